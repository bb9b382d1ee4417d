// bingham: sample, posterior, validate.
//
// Exit codes: 0 ok, 1 runtime failure, 2 bad usage or unparseable input,
// 3 unusable matrix, 4 gamma <= 0. Output is assembled in memory and written
// only on success, so a failed run never leaves a partial file behind.
#include "bingham/bingham.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kRuntime = 1, kUsage = 2, kInvalid = 3, kBadGamma = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  long max_rejections = 1'000'000;
  double tolerance = 1e-13;
  unsigned threads = 1;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  const char* env = std::getenv("BINGHAM_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t v = 0;
  const std::string s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw UsageError("BINGHAM_SEED is not an unsigned integer: '" + s + "'");
  }
  return v;
}

bingham::SamplerConfig make_config(const Common& c) {
  bingham::SamplerConfig cfg;
  cfg.seed = resolve_seed(c.seed);
  cfg.max_rejections = c.max_rejections;
  cfg.cdf_tolerance = c.tolerance;
  cfg.threads = c.threads;
  return cfg;
}

bingham::SymmetricMatrix load(const std::string& path, const std::string& format) {
  const auto fmt = format.empty() ? bingham::guess_format(path) : bingham::parse_format(format);
  bingham::ParsedMatrix parsed = bingham::read_matrix_file(path, fmt);
  for (const auto& w : parsed.warnings) std::cerr << "warning: " << w << '\n';
  return std::move(parsed.matrix);
}

json to_json(const bingham::Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const bingham::Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(bingham::Vector(m.row(i).transpose())));
  return a;
}

void append_batch(std::string& out, const bingham::SampleBatch& b) {
  for (std::size_t i = 0; i < b.samples.size(); ++i) {
    out += json{{"x", to_json(b.samples[i])}, {"proposals", b.proposals_used[i]}}.dump();
    out += '\n';
  }
  out += json{{"acceptance_rate", b.total_acceptance_rate}, {"seed", b.seed}, {"n", b.n}, {"gap", b.gap}}.dump();
  out += '\n';
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
  if (!f.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "RNG seed (default: $BINGHAM_SEED, else 0)");
  cmd->add_option("--out", c.out, "output path (default: standard output)");
  cmd->add_option("--max-rejections", c.max_rejections, "proposals allowed per sample")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", c.tolerance, "CDF inversion tolerance");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 1024u));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact sampling from the Bingham distribution p(x) ~ exp(x^T A x)"};
  app.require_subcommand(1);

  Common common;
  std::string matrix_path, format;
  long count = 1000;
  double gamma = 0.0;
  std::string suite = "all";

  auto* sample = app.add_subcommand("sample", "draw exact samples for a matrix A");
  sample->add_option("--matrix", matrix_path, "matrix file")->required();
  sample->add_option("--format", format, "dense-csv, triplet-csv or json (default: from extension)");
  sample->add_option("--count", count, "number of samples")->check(CLI::PositiveNumber);
  add_common(sample, common);

  auto* posterior = app.add_subcommand("posterior", "sample the rank-1 posterior for an observation Y");
  posterior->add_option("--observation", matrix_path, "observation file")->required();
  posterior->add_option("--format", format, "dense-csv, triplet-csv or json (default: from extension)");
  posterior->add_option("--gamma", gamma, "noise level")->required();
  posterior->add_option("--count", count, "number of samples")->check(CLI::PositiveNumber);
  add_common(posterior, common);

  auto* validate = app.add_subcommand("validate", "run a validation suite and print its JSON report");
  validate->add_option("--suite", suite, "moments, cdf, sampler, posterior, ratio or all");
  validate->add_option("--seed", common.seed, "RNG seed (default: $BINGHAM_SEED, else 0)");
  validate->add_option("--out", common.out, "output path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sample) {
      const auto a = load(matrix_path, format);
      const auto batch = bingham::sample_bingham(a, count, make_config(common));
      std::string out;
      append_batch(out, batch);
      emit(out, common.out);
    } else if (*posterior) {
      if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        std::cerr << "error: --gamma must be positive\n";
        return kBadGamma;
      }
      const bingham::Observation obs{load(matrix_path, format), gamma};
      const auto batch = bingham::posterior_sample(obs, count, make_config(common));
      const auto summary = bingham::mmse_estimate(batch);
      std::string out;
      append_batch(out, batch);
      out += json{{"mmse", to_json(summary.mmse)},
                  {"top_direction", to_json(summary.top_direction)},
                  {"trace", summary.mmse.trace()}}
                 .dump();
      out += '\n';
      emit(out, common.out);
    } else if (*validate) {
      if (suite != "all" && !bingham::validation_suites().contains(suite)) {
        throw UsageError("unknown suite '" + suite + "'");
      }
      const std::uint64_t seed = resolve_seed(common.seed);
      const auto report = bingham::run_suite(suite, seed);
      json results = json::array();
      bool all_pass = true;
      for (const auto& r : report) {
        results.push_back({{"test", r.test}, {"statistic", r.statistic}, {"threshold", r.threshold}, {"pass", r.pass}});
        all_pass = all_pass && r.pass;
      }
      const json doc{{"suite", suite}, {"seed", seed}, {"pass", all_pass}, {"results", results}};
      emit(doc.dump(2) + "\n", common.out);
      return all_pass ? kOk : kRuntime;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const bingham::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
