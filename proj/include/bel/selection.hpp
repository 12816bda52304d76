#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bel/dataset.hpp"
#include "bel/error.hpp"
#include "bel/parallel.hpp"
#include "bel/samplers.hpp"

namespace bel {

struct SelectionReport {
  Vector posterior_mean;
  Vector ci_lower;  // 2.5% posterior quantile
  Vector ci_upper;  // 97.5% posterior quantile
  double cutoff = 0.0;  // 0 until a threshold is applied
  std::vector<bool> support;
  Vector thresholded_estimate;
};

// (p/n)^(1/2 - delta), the contraction scale behind the hard threshold.
inline double threshold_scale(double n, double p, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw UsageError("delta must lie in (0, 1/2)");
  if (!(p > 0.0 && n > 0.0)) throw UsageError("n and p must be positive");
  if (p > n) throw UsageError("threshold scale needs p <= n");
  return std::pow(p / n, 0.5 - delta);
}

// Linear-interpolation quantile of sorted data (R type 7).
inline double sorted_quantile(const std::vector<double>& sorted, double prob) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline SelectionReport summarize(const Chain& chain, double level = 0.95) {
  if (chain.samples.empty()) throw DataError("cannot summarize an empty chain");
  const Eigen::Index p = chain.p();
  SelectionReport r;
  r.posterior_mean = Vector::Zero(p);
  r.ci_lower.resize(p);
  r.ci_upper.resize(p);
  for (const auto& s : chain.samples) r.posterior_mean += s.theta;
  r.posterior_mean /= static_cast<double>(chain.samples.size());
  const double tail = 0.5 * (1.0 - level);
  for (Eigen::Index j = 0; j < p; ++j) {
    auto col = chain.coordinate(j);
    std::sort(col.begin(), col.end());
    r.ci_lower(j) = sorted_quantile(col, tail);
    r.ci_upper(j) = sorted_quantile(col, 1.0 - tail);
  }
  r.support.assign(static_cast<std::size_t>(p), true);
  r.thresholded_estimate = r.posterior_mean;
  return r;
}

// Zeroes posterior-mean coordinates with |value| <= cutoff.
inline SelectionReport apply_threshold(SelectionReport report, double cutoff) {
  if (!(cutoff > 0.0)) throw UsageError("cutoff must be positive");
  report.cutoff = cutoff;
  const Eigen::Index p = report.posterior_mean.size();
  report.support.assign(static_cast<std::size_t>(p), false);
  report.thresholded_estimate = Vector::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (std::abs(report.posterior_mean(j)) > cutoff) {
      report.support[static_cast<std::size_t>(j)] = true;
      report.thresholded_estimate(j) = report.posterior_mean(j);
    }
  }
  return report;
}

inline Vector threshold_vector(const Vector& v, double cutoff) {
  Vector out = v;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (!(std::abs(v(j)) > cutoff)) out(j) = 0.0;
  return out;
}

// Log-spaced cutoffs between 1e-3 and 1 times the largest |estimate|.
inline std::vector<double> default_cutoff_grid(const Vector& reference, int points = 50) {
  const double top = reference.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) return {1e-3};
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k)
    grid[static_cast<std::size_t>(k)] = top * std::pow(10.0, -3.0 + 3.0 * k / (points - 1));
  return grid;
}

struct CvOptions {
  int folds = 5;
  int n_iter = 2000;  // per fold fit
  std::vector<double> grid;  // empty selects default_cutoff_grid of the OLS fit
  unsigned jobs = 1;
};

struct CvResult {
  double cutoff = 0.0;
  std::vector<double> grid;
  std::vector<double> cv_error;  // mean squared prediction error per grid point
};

// K-fold cross-validation of the hard-threshold cutoff in regression mode.
// Each training fold is centered on its own means and refit by MCMC; the
// thresholded posterior mean predicts the held-out rows. Near-ties go to
// the larger cutoff.
inline CvResult cv_cutoff(const Dataset& data, const PriorSpec& prior, const SamplerConfig& cfg,
                          const CvOptions& opt) {
  if (!data.y) throw DataError("cross-validated cutoff needs a response");
  if (opt.folds < 2) throw UsageError("cross-validation needs at least 2 folds");
  const Eigen::Index n = data.n();
  if (n < 2 * opt.folds) throw DataError("too few rows for " + std::to_string(opt.folds) + " folds");

  CvResult out;
  out.grid = opt.grid;
  if (out.grid.empty()) {
    Dataset c = data;
    center(c);
    out.grid = default_cutoff_grid(detail::ols_coefficients(c));
  }
  std::sort(out.grid.begin(), out.grid.end());
  for (double c : out.grid)
    if (!(c > 0.0)) throw UsageError("cutoff grid values must be positive");

  // Seeded Fisher-Yates permutation, then round-robin fold labels.
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng shuffle(derive_seed(cfg.seed, 0xcf0));
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[shuffle.index(i + 1)]);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < perm.size(); ++k)
    fold_of[static_cast<std::size_t>(perm[k])] = static_cast<int>(k % static_cast<std::size_t>(opt.folds));

  const std::size_t G = out.grid.size();
  std::vector<std::vector<double>> fold_sse(static_cast<std::size_t>(opt.folds), std::vector<double>(G, 0.0));

  parallel_for(static_cast<std::size_t>(opt.folds), opt.jobs, [&](std::size_t f) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold_of[static_cast<std::size_t>(i)] == static_cast<int>(f) ? test : train).push_back(i);
    Dataset tr = select_rows(data, train);
    const CenteringInfo ci = center(tr);
    if (2 * tr.p() >= tr.n()) throw DataError("training fold too small for p = " + std::to_string(tr.p()));

    SamplerConfig fc = cfg;
    fc.n_iter = std::min(cfg.n_iter, opt.n_iter);
    fc.burn_in = fc.n_iter / 2;
    fc.seed = derive_seed(cfg.seed, 0xf01d + f);
    const Chain chain = run_chain(tr, prior, fc, Mode::regression);
    const Vector mean = summarize(chain).posterior_mean;

    const Dataset te = select_rows(data, test);
    const Matrix Xc = te.X.rowwise() - ci.x_mean.transpose();
    for (std::size_t g = 0; g < G; ++g) {
      const Vector beta = threshold_vector(mean, out.grid[g]);
      const Vector pred = (Xc * beta).array() + ci.y_mean;
      fold_sse[f][g] = (*te.y - pred).squaredNorm();
    }
  });

  out.cv_error.assign(G, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    for (const auto& fs : fold_sse) out.cv_error[g] += fs[g];
    out.cv_error[g] /= static_cast<double>(n);
  }
  const double best = *std::min_element(out.cv_error.begin(), out.cv_error.end());
  const Vector yc = data.y->array() - data.y->mean();
  const double tie_tol = 1e-9 * (yc.squaredNorm() / static_cast<double>(n) + 1e-300);
  for (std::size_t g = G; g-- > 0;) {
    if (out.cv_error[g] <= best + tie_tol) {
      out.cutoff = out.grid[g];
      break;
    }
  }
  return out;
}

}  // namespace bel
