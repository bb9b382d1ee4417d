#pragma once

#include "bingham/cdf.hpp"
#include "bingham/incomplete_beta.hpp"
#include "bingham/linalg.hpp"
#include "bingham/log_scalar.hpp"
#include "bingham/matrix_io.hpp"
#include "bingham/moments.hpp"
#include "bingham/posterior.hpp"
#include "bingham/random.hpp"
#include "bingham/sampler.hpp"
#include "bingham/validation.hpp"
#include "bingham/validation_suites.hpp"
