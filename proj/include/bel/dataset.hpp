#pragma once

#include <Eigen/Dense>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bel/error.hpp"

namespace bel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Mode { mean, regression };

inline const char* to_string(Mode m) { return m == Mode::mean ? "mean" : "regression"; }

// Observation matrix with an optional response. Centering and
// standardization are recorded so downstream code can tell raw data from
// prepared data.
struct Dataset {
  Matrix X;
  std::optional<Vector> y;
  std::vector<std::string> names;  // column names of X
  std::string response_name = "y";
  std::vector<bool> centered;  // per column of X
  bool response_centered = false;
  bool standardized = false;

  Dataset() = default;
  explicit Dataset(Matrix x, std::optional<Vector> resp = std::nullopt)
      : X(std::move(x)), y(std::move(resp)), centered(X.cols(), false) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
  bool has_response() const { return y.has_value(); }

  void validate() const {
    if (X.rows() < 2) throw DataError("dataset needs at least 2 rows");
    if (X.cols() < 1) throw DataError("dataset needs at least 1 column");
    if (!X.allFinite()) throw DataError("dataset contains non-finite entries");
    if (y) {
      if (y->size() != X.rows())
        throw DataError("response length " + std::to_string(y->size()) +
                        " does not match row count " + std::to_string(X.rows()));
      if (!y->allFinite()) throw DataError("response contains non-finite entries");
    }
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != X.cols())
      throw DataError("column name count does not match column count");
  }

  // The sampler relies on the EL normal approximation, which breaks down
  // once p grows comparably to n.
  void require_low_dimension() const {
    if (2 * p() >= n())
      throw UsageError("p = " + std::to_string(p()) + " is not below n/2 = " +
                       std::to_string(n() / 2) +
                       "; empirical-likelihood variable selection needs p < n/2");
  }
};

// Centers X columns (and y when present). Returns the removed means.
struct CenteringInfo {
  Vector x_mean;
  Vector x_scale;  // 1 unless standardized
  double y_mean = 0.0;
  double y_scale = 1.0;
};

inline CenteringInfo center(Dataset& d) {
  CenteringInfo info;
  info.x_mean = d.X.colwise().mean().transpose();
  info.x_scale = Vector::Ones(d.p());
  d.X.rowwise() -= info.x_mean.transpose();
  d.centered.assign(d.p(), true);
  if (d.y) {
    info.y_mean = d.y->mean();
    d.y->array() -= info.y_mean;
    d.response_centered = true;
  }
  return info;
}

// Predictors to mean 0 / sd 1; the response is centered and, when
// scale_response is set, also scaled to sd 1.
inline CenteringInfo standardize(Dataset& d, bool scale_response) {
  CenteringInfo info = center(d);
  const double denom = static_cast<double>(d.n() - 1);
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    double sd = std::sqrt(d.X.col(j).squaredNorm() / denom);
    if (!(sd > 0.0))
      throw DataError("column '" + (d.names.empty() ? std::to_string(j + 1) : d.names[j]) +
                      "' has zero variance");
    d.X.col(j) /= sd;
    info.x_scale(j) = sd;
  }
  if (d.y && scale_response) {
    double sd = std::sqrt(d.y->squaredNorm() / denom);
    if (!(sd > 0.0)) throw DataError("response has zero variance");
    *d.y /= sd;
    info.y_scale = sd;
  }
  d.standardized = true;
  return info;
}

inline Dataset select_rows(const Dataset& d, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), d.p());
  if (d.y) out.y = Vector(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.X.row(static_cast<Eigen::Index>(r)) = d.X.row(rows[r]);
    if (d.y) (*out.y)(static_cast<Eigen::Index>(r)) = (*d.y)(rows[r]);
  }
  out.names = d.names;
  out.response_name = d.response_name;
  out.centered.assign(d.p(), false);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

// Shortest formatting is not used for machine files: every number is
// written with 17 significant digits so strtod recovers it exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  if (cell.empty())
    throw DataError("empty cell at row " + std::to_string(row) + ", column " + std::to_string(col));
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  // ERANGE on underflow still yields the nearest subnormal, which we keep.
  if (end != cell.c_str() + cell.size() || (errno == ERANGE && std::abs(v) == HUGE_VAL))
    throw DataError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                    ", column " + std::to_string(col));
  if (!std::isfinite(v))
    throw DataError("non-finite cell at row " + std::to_string(row) + ", column " +
                    std::to_string(col));
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Reads a numeric CSV with a header row. Row numbers in error messages are
// 1-based file lines; columns are 1-based.
inline CsvTable read_csv_table(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size())
      throw DataError("row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(t.header.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) row[c] = parse_cell(cells[c], lineno, c + 1);
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw DataError("CSV input is empty");
  return t;
}

inline CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv_table(in);
}

// Builds a Dataset from a table. An empty response_column means every
// column is an observation (mean mode).
inline Dataset dataset_from_table(const CsvTable& t, const std::string& response_column) {
  std::ptrdiff_t ycol = -1;
  if (!response_column.empty()) {
    for (std::size_t c = 0; c < t.header.size(); ++c)
      if (t.header[c] == response_column) ycol = static_cast<std::ptrdiff_t>(c);
    if (ycol < 0) throw DataError("response column '" + response_column + "' not found");
  }
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  const auto p = static_cast<Eigen::Index>(t.header.size()) - (ycol >= 0 ? 1 : 0);
  Dataset d;
  d.X.resize(n, p);
  if (ycol >= 0) d.y = Vector(n);
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (static_cast<std::ptrdiff_t>(c) != ycol) d.names.push_back(t.header[c]);
  if (ycol >= 0) d.response_name = response_column;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      double v = t.rows[static_cast<std::size_t>(i)][c];
      if (static_cast<std::ptrdiff_t>(c) == ycol)
        (*d.y)(i) = v;
      else
        d.X(i, j++) = v;
    }
  }
  d.centered.assign(p, false);
  d.validate();
  return d;
}

inline Dataset read_dataset_csv(const std::string& path, const std::string& response_column) {
  return dataset_from_table(read_csv_table(path), response_column);
}

inline void write_dataset_csv(std::ostream& out, const Dataset& d) {
  for (Eigen::Index j = 0; j < d.p(); ++j) {
    if (j) out << ',';
    out << (d.names.empty() ? "x" + std::to_string(j + 1) : d.names[j]);
  }
  if (d.y) out << ',' << d.response_name;
  out << '\n';
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    for (Eigen::Index j = 0; j < d.p(); ++j) {
      if (j) out << ',';
      out << format_double(d.X(i, j));
    }
    if (d.y) out << ',' << format_double((*d.y)(i));
    out << '\n';
  }
}

inline void write_dataset_csv(const std::string& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_dataset_csv(out, d);
}

}  // namespace bel
