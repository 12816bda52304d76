#pragma once

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>

#include "bel/dataset.hpp"
#include "bel/error.hpp"

namespace bel {

inline Vector soft_threshold_mean(const Dataset& data, double s) {
  if (s < 0.0) throw UsageError("threshold must be nonnegative");
  const Vector xbar = data.X.colwise().mean().transpose();
  Vector out(xbar.size());
  for (Eigen::Index j = 0; j < xbar.size(); ++j) {
    const double shrunk = std::abs(xbar(j)) - s;
    out(j) = shrunk > 0.0 ? std::copysign(shrunk, xbar(j)) : 0.0;
  }
  return out;
}

inline Vector hard_threshold_mean(const Dataset& data, double s) {
  if (s < 0.0) throw UsageError("threshold must be nonnegative");
  Vector xbar = data.X.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < xbar.size(); ++j)
    if (!(std::abs(xbar(j)) > s)) xbar(j) = 0.0;
  return xbar;
}

struct OlsFit {
  Vector beta;
  Vector std_error;
  Vector ci_lower;
  Vector ci_upper;
  int df = 0;
};

// Least squares by column-pivoted QR with classical t intervals. When X
// and y are centered the intercept is counted as one more parameter.
inline OlsFit ols(const Dataset& data, double level = 0.95) {
  if (!data.y) throw DataError("OLS needs a response");
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  Eigen::ColPivHouseholderQR<Matrix> qr(data.X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p)
    throw NumericalError("design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                         " < " + std::to_string(p) + ")");
  OlsFit fit;
  fit.beta = qr.solve(*data.y);

  const bool intercept_absorbed =
      data.response_centered &&
      std::all_of(data.centered.begin(), data.centered.end(), [](bool b) { return b; });
  fit.df = static_cast<int>(n - p - (intercept_absorbed ? 1 : 0));
  fit.std_error = Vector::Zero(p);
  fit.ci_lower = fit.beta;
  fit.ci_upper = fit.beta;
  if (fit.df <= 0) return fit;

  const Vector resid = *data.y - data.X * fit.beta;
  const double sigma2 = resid.squaredNorm() / fit.df;
  // diag((X'X)^-1) through the triangular factor.
  const Matrix R = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
  const Matrix Rinv = R.template triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
  const Vector diag_perm = Rinv.rowwise().squaredNorm();
  Vector diag(p);
  for (Eigen::Index k = 0; k < p; ++k) diag(qr.colsPermutation().indices()(k)) = diag_perm(k);

  boost::math::students_t dist(fit.df);
  const double tq = boost::math::quantile(dist, 0.5 + level / 2.0);
  fit.std_error = (sigma2 * diag.array()).sqrt().matrix();
  fit.ci_lower = fit.beta - tq * fit.std_error;
  fit.ci_upper = fit.beta + tq * fit.std_error;
  return fit;
}

}  // namespace bel
