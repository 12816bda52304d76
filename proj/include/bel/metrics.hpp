#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bel/dataset.hpp"
#include "bel/error.hpp"

namespace bel {

// One method's averaged scores in a benchmark cell. Counts are averages
// over replicates, hence real-valued.
struct BenchRow {
  std::string method;
  double mse_x1000 = 0.0;
  double true_count = 0.0;
  double false_count = 0.0;
  double f1_x100 = 0.0;
  int replicates = 0;
  int failures = 0;
  bool available = true;  // false for methods this library does not implement
};

inline double mse(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size())
    throw DataError("mse: length mismatch (" + std::to_string(estimate.size()) + " vs " +
                    std::to_string(truth.size()) + ")");
  if (estimate.size() == 0) return 0.0;
  return (estimate - truth).squaredNorm() / static_cast<double>(estimate.size());
}

struct SupportCounts {
  int true_count = 0;
  int false_count = 0;
};

inline SupportCounts support_counts(const std::vector<bool>& selected,
                                    const std::vector<bool>& true_support) {
  if (selected.size() != true_support.size()) throw DataError("support_counts: length mismatch");
  SupportCounts c;
  for (std::size_t j = 0; j < selected.size(); ++j) {
    if (!selected[j]) continue;
    if (true_support[j])
      ++c.true_count;
    else
      ++c.false_count;
  }
  return c;
}

inline std::vector<bool> support_of(const Vector& v) {
  std::vector<bool> s(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) s[static_cast<std::size_t>(j)] = v(j) != 0.0;
  return s;
}

// Harmonic mean of precision T/(T+F) and recall T/actual; 0 for an empty
// selection.
inline double f1(double true_count, double false_count, double n_actual_positives) {
  if (true_count <= 0.0 || n_actual_positives <= 0.0) return 0.0;
  const double precision = true_count / (true_count + false_count);
  const double recall = true_count / n_actual_positives;
  return 2.0 * precision * recall / (precision + recall);
}

// Sample autocorrelation at lags 0..max_lag (biased autocovariance).
inline std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (n < 2) throw DataError("autocorrelation needs at least 2 values");
  max_lag = std::min(max_lag, n - 1);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(n);
  for (std::size_t t = 0; t < n; ++t) c[t] = x[t] - mean;
  double c0 = 0.0;
  for (double v : c) c0 += v * v;
  std::vector<double> out(max_lag + 1, 0.0);
  if (c0 <= 0.0) {
    out[0] = 1.0;
    return out;
  }
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += c[t] * c[t + k];
    out[k] = s / c0;
  }
  return out;
}

struct EssResult {
  double ess = 0.0;
  bool degenerate = false;  // constant series
};

// Effective sample size via Geyer's initial positive sequence.
inline EssResult ess(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 10) throw DataError("ESS needs a series of length >= 10, got " + std::to_string(n));
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> c(n);
  double c0 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    c[t] = x[t] - mean;
    c0 += c[t] * c[t];
  }
  if (!(c0 > 0.0) || c0 <= 1e-300 * static_cast<double>(n)) return {0.0, true};

  auto rho = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) s += c[t] * c[t + k];
    return s / c0;
  };
  double sum_pairs = 0.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double pair = rho(2 * m) + rho(2 * m + 1);
    if (pair <= 0.0) break;
    sum_pairs += pair;
  }
  const double tau = std::max(-1.0 + 2.0 * sum_pairs, 1.0 / static_cast<double>(n));
  return {std::min(static_cast<double>(n), static_cast<double>(n) / tau), false};
}

inline EssResult ess(const std::vector<double>& x) { return ess(std::span<const double>(x)); }

}  // namespace bel
