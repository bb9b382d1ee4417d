// Reading and writing symmetric matrices as dense CSV, i,j,value triplets, or
// JSON {"dim": d, "entries": [[...], ...]}. Numbers are written with 17
// significant digits, so write-then-read reproduces every entry exactly.
#pragma once

#include "bingham/linalg.hpp"

#include "json.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bingham {

enum class MatrixFormat { dense_csv, triplet_csv, json };

/// Malformed input text. Distinct from std::invalid_argument, which signals
/// well-formed text describing an unusable matrix.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParsedMatrix {
  SymmetricMatrix matrix;
  std::vector<std::string> warnings;
};

inline MatrixFormat parse_format(std::string_view name) {
  if (name == "dense-csv") return MatrixFormat::dense_csv;
  if (name == "triplet-csv") return MatrixFormat::triplet_csv;
  if (name == "json") return MatrixFormat::json;
  throw ParseError("unknown matrix format '" + std::string(name) + "'");
}

inline std::string format_name(MatrixFormat f) {
  switch (f) {
    case MatrixFormat::dense_csv: return "dense-csv";
    case MatrixFormat::triplet_csv: return "triplet-csv";
    case MatrixFormat::json: return "json";
  }
  return "";
}

/// Guess from the extension: .json, .triplet(s)/.tri/.coo, everything else dense.
inline MatrixFormat guess_format(std::string_view path) {
  const auto ends = [&](std::string_view s) {
    return path.size() >= s.size() && path.substr(path.size() - s.size()) == s;
  };
  if (ends(".json")) return MatrixFormat::json;
  if (ends(".triplet") || ends(".triplets") || ends(".tri") || ends(".coo")) return MatrixFormat::triplet_csv;
  return MatrixFormat::dense_csv;
}

inline std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view field, int line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line) + ": not a number: '" + std::string(field) + "'");
  }
  return v;
}

inline long parse_index(std::string_view field, int line) {
  field = trim(field);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || v < 0) {
    throw ParseError("line " + std::to_string(line) + ": bad index '" + std::string(field) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(',', start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline void note_asymmetry(const Matrix& m, std::vector<std::string>& warnings) {
  if (SymmetricMatrix::needs_symmetrization(m)) {
    warnings.emplace_back("input matrix is not symmetric; using (A + A^T) / 2");
  }
}

inline void check_finite(const Matrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
}

}  // namespace detail

inline ParsedMatrix parse_dense_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = detail::trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    for (std::string_view f : detail::split_commas(line)) row.push_back(detail::parse_number(f, line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("dense-csv: no rows");
  const std::size_t d = rows.size();
  for (std::size_t i = 0; i < d; ++i) {
    if (rows[i].size() != d) {
      throw std::invalid_argument("dense-csv: matrix is not square (" + std::to_string(d) + " rows, row " +
                                  std::to_string(i) + " has " + std::to_string(rows[i].size()) + " entries)");
    }
  }
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  detail::check_finite(m);
  ParsedMatrix out{SymmetricMatrix(m), {}};
  detail::note_asymmetry(m, out.warnings);
  return out;
}

/// "i,j,value" lines, 0-indexed. The dimension is one past the largest index.
/// A lone (i, j) entry also sets (j, i); if both are given and differ they
/// are averaged with a warning. Repeating the same (i, j) is an error.
inline ParsedMatrix parse_triplet_csv(std::string_view text) {
  std::map<std::pair<long, long>, double> entries;
  long max_index = -1;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = detail::trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = detail::split_commas(line);
    if (fields.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected i,j,value");
    }
    const long i = detail::parse_index(fields[0], line_no);
    const long j = detail::parse_index(fields[1], line_no);
    const double v = detail::parse_number(fields[2], line_no);
    if (!entries.emplace(std::pair{i, j}, v).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate entry (" + std::to_string(i) + "," +
                       std::to_string(j) + ")");
    }
    max_index = std::max({max_index, i, j});
  }
  if (max_index < 0) throw ParseError("triplet-csv: no entries");
  if (max_index >= 100'000) throw std::invalid_argument("triplet-csv: dimension too large");

  const Eigen::Index d = max_index + 1;
  Matrix m = Matrix::Zero(d, d);
  ParsedMatrix out{SymmetricMatrix::identity(1), {}};
  bool asymmetric = false;
  for (const auto& [ij, v] : entries) {
    const auto [i, j] = ij;
    const auto mirror = entries.find({j, i});
    if (mirror == entries.end() || i == j) {
      m(i, j) = v;
      m(j, i) = v;
    } else {
      m(i, j) = 0.5 * (v + mirror->second);
      asymmetric = asymmetric || v != mirror->second;
    }
  }
  if (asymmetric) out.warnings.emplace_back("input matrix is not symmetric; using (A + A^T) / 2");
  detail::check_finite(m);
  out.matrix = SymmetricMatrix(m);
  return out;
}

inline ParsedMatrix parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw ParseError("json: expected an object with an \"entries\" array");
  }
  const auto& rows = doc["entries"];
  const std::size_t d = rows.size();
  if (d == 0) throw std::invalid_argument("json: empty matrix");
  if (doc.contains("dim")) {
    if (!doc["dim"].is_number_integer()) throw ParseError("json: \"dim\" must be an integer");
    if (doc["dim"].get<long>() != static_cast<long>(d)) {
      throw std::invalid_argument("json: \"dim\" is " + doc["dim"].dump() + " but entries has " +
                                  std::to_string(d) + " rows");
    }
  }
  Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (!rows[i].is_array()) throw ParseError("json: row " + std::to_string(i) + " is not an array");
    if (rows[i].size() != d) throw std::invalid_argument("json: matrix is not square");
    for (std::size_t j = 0; j < d; ++j) {
      if (!rows[i][j].is_number()) {
        throw ParseError("json: entry (" + std::to_string(i) + "," + std::to_string(j) + ") is not a number");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
    }
  }
  detail::check_finite(m);
  ParsedMatrix out{SymmetricMatrix(m), {}};
  detail::note_asymmetry(m, out.warnings);
  return out;
}

inline ParsedMatrix parse_matrix(std::string_view text, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::dense_csv: return parse_dense_csv(text);
    case MatrixFormat::triplet_csv: return parse_triplet_csv(text);
    case MatrixFormat::json: return parse_json(text);
  }
  throw ParseError("unknown format");
}

inline ParsedMatrix read_matrix_file(const std::string& path, MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str(), format);
}

inline std::string write_matrix(const SymmetricMatrix& a, MatrixFormat format) {
  const Matrix& m = a.entries();
  const Eigen::Index d = a.dim();
  std::string out;
  switch (format) {
    case MatrixFormat::dense_csv:
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
          if (j > 0) out += ',';
          out += format_double(m(i, j));
        }
        out += '\n';
      }
      break;
    case MatrixFormat::triplet_csv:
      // The last diagonal entry is always written so the dimension survives.
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
          if (m(i, j) == 0.0 && !(i == d - 1 && j == d - 1)) continue;
          out += std::to_string(i) + ',' + std::to_string(j) + ',' + format_double(m(i, j)) + '\n';
        }
      }
      break;
    case MatrixFormat::json:
      out = "{\"dim\": " + std::to_string(d) + ", \"entries\": [";
      for (Eigen::Index i = 0; i < d; ++i) {
        out += i > 0 ? ", [" : "[";
        for (Eigen::Index j = 0; j < d; ++j) {
          if (j > 0) out += ", ";
          out += format_double(m(i, j));
        }
        out += ']';
      }
      out += "]}\n";
      break;
  }
  return out;
}

}  // namespace bingham
