#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "bel/dataset.hpp"
#include "bel/error.hpp"

namespace bel {

// Row i holds U_i(theta).
struct EstimatingFunctions {
  Matrix U;
  Eigen::Index n() const { return U.rows(); }
  Eigen::Index p() const { return U.cols(); }
};

struct ELConfig {
  double newton_tol = 1e-10;  // on ||sum_i w_i U_i||
  int max_iter = 100;
  double logstar_eps = 0.0;  // 0 selects 1/n

  bool operator==(const ELConfig&) const = default;

  void validate() const {
    if (!(newton_tol > 0.0)) throw UsageError("el.newton_tol must be positive");
    if (max_iter < 1) throw UsageError("el.max_iter must be at least 1");
    if (logstar_eps < 0.0) throw UsageError("el.logstar_eps must be nonnegative");
  }
};

enum class SolveStatus { converged, not_in_convex_hull, max_iter_exceeded };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::not_in_convex_hull: return "not_in_convex_hull";
    case SolveStatus::max_iter_exceeded: return "max_iter_exceeded";
  }
  return "?";
}

struct LagrangeSolution {
  Vector lambda;
  Vector weights;
  double log_el_ratio = -std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::max_iter_exceeded;
  bool converged = false;
  double residual_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

inline EstimatingFunctions estimating_functions_mean(const Dataset& data, const Vector& mu) {
  if (mu.size() != data.p())
    throw DataError("mean vector has length " + std::to_string(mu.size()) + ", expected " +
                    std::to_string(data.p()));
  if (!mu.allFinite()) throw DataError("mean vector has non-finite entries");
  return {data.X.rowwise() - mu.transpose()};
}

inline EstimatingFunctions estimating_functions_regression(const Dataset& data, const Vector& beta) {
  if (!data.y) throw DataError("regression estimating functions need a response");
  if (beta.size() != data.p())
    throw DataError("coefficient vector has length " + std::to_string(beta.size()) +
                    ", expected " + std::to_string(data.p()));
  if (!beta.allFinite()) throw DataError("coefficient vector has non-finite entries");
  const Vector resid = *data.y - data.X * beta;
  return {data.X.array().colwise() * resid.array()};
}

inline EstimatingFunctions estimating_functions(const Dataset& data, const Vector& theta, Mode mode) {
  return mode == Mode::mean ? estimating_functions_mean(data, theta)
                            : estimating_functions_regression(data, theta);
}

namespace detail {

// Owen's pseudo-logarithm: log above eps, its second-order Taylor
// expansion below. Concave and twice differentiable on the whole line.
struct LogStar {
  double eps;
  double log_eps;
  explicit LogStar(double e) : eps(e), log_eps(std::log(e)) {}

  double value(double z) const {
    if (z >= eps) return std::log(z);
    const double r = z / eps;
    return log_eps - 1.5 + 2.0 * r - 0.5 * r * r;
  }
  double d1(double z) const { return z >= eps ? 1.0 / z : (2.0 - z / eps) / eps; }
  // Negated second derivative (positive).
  double neg_d2(double z) const { return z >= eps ? 1.0 / (z * z) : 1.0 / (eps * eps); }
};

inline double dual_objective(const Matrix& U, const Vector& lambda, const LogStar& ls) {
  const Vector z = (U * lambda).array() + 1.0;
  double f = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) f += ls.value(z(i));
  return f;
}

// A coordinate of U with one strict sign on every row certifies that 0 is
// outside the convex hull.
inline bool one_signed_column(const Matrix& U) {
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    if (U.col(j).minCoeff() > 0.0 || U.col(j).maxCoeff() < 0.0) return true;
  }
  return false;
}

}  // namespace detail

// Solves sum_i U_i / (1 + lambda' U_i) = 0 by damped Newton ascent on the
// concave dual sum_i log*(1 + lambda' U_i).
inline LagrangeSolution solve_lambda(const EstimatingFunctions& ef, const ELConfig& cfg = {}) {
  const Matrix& U = ef.U;
  const Eigen::Index n = U.rows();
  const Eigen::Index p = U.cols();
  if (n < 1 || p < 1) throw DataError("estimating functions are empty");
  if (!U.allFinite()) throw NumericalError("estimating functions contain non-finite entries");

  const double dn = static_cast<double>(n);
  const detail::LogStar ls(cfg.logstar_eps > 0.0 ? cfg.logstar_eps : 1.0 / dn);

  LagrangeSolution sol;
  sol.lambda = Vector::Zero(p);

  if (detail::one_signed_column(U)) {
    sol.status = SolveStatus::not_in_convex_hull;
    return sol;
  }

  const double u_scale = std::max(1.0, U.rowwise().norm().maxCoeff());
  Vector z(n), d1(n), h(n), grad(p), step(p), trial(p);
  Matrix H(p, p);
  double f = detail::dual_objective(U, sol.lambda, ls);
  double best_resid = std::numeric_limits<double>::infinity();
  int stall = 0;
  int polish = 0;
  bool diverged = false;

  for (int it = 0; it < cfg.max_iter; ++it) {
    sol.iterations = it + 1;
    z = (U * sol.lambda).array() + 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      d1(i) = ls.d1(z(i));
      h(i) = ls.neg_d2(z(i));
    }
    grad.noalias() = U.transpose() * d1;
    const double resid = grad.norm() / dn;
    sol.residual_norm = resid;
    if (resid <= cfg.newton_tol) {
      // One extra Newton step to push the residual to rounding level.
      if (polish++ > 0 || resid == 0.0) {
        sol.converged = true;
        break;
      }
    }

    if (resid < best_resid * (1.0 - 1e-6)) {
      best_resid = resid;
      stall = 0;
    } else if (++stall >= 10) {
      // Residual stuck at rounding level counts as converged.
      sol.converged = resid <= 1e-8 * u_scale;
      break;
    }

    H.noalias() = U.transpose() * (U.array().colwise() * h.array()).matrix();
    Eigen::LLT<Matrix> llt(H);
    double damping = 1e-12 * std::max(H.trace() / static_cast<double>(p), 1e-300);
    while (llt.info() != Eigen::Success) {
      llt.compute(H + damping * Matrix::Identity(p, p));
      damping *= 10.0;
      if (!std::isfinite(damping)) throw NumericalError("dual Hessian could not be factorized");
    }
    step = llt.solve(grad);
    const double slope = grad.dot(step);

    double t = 1.0;
    bool moved = false;
    if (slope <= 1e-12 * std::max(1.0, std::abs(f))) {
      // Inside the quadratic region the ascent is below rounding in f, so
      // the Armijo test is meaningless; take the full step.
      sol.lambda += step;
      f = detail::dual_objective(U, sol.lambda, ls);
      moved = true;
    }
    for (int k = 0; k < 60 && !moved; ++k, t *= 0.5) {
      trial = sol.lambda + t * step;
      const double ft = detail::dual_objective(U, trial, ls);
      if (ft >= f + 1e-4 * t * slope) {
        sol.lambda = trial;
        f = ft;
        moved = true;
        break;
      }
    }
    if (!moved) {
      // No ascent possible: we are at the optimum to machine precision.
      sol.converged = resid <= 1e-8 * u_scale;
      break;
    }
    if (sol.lambda.norm() * u_scale > 1e12) {
      diverged = true;
      break;
    }
  }

  z = (U * sol.lambda).array() + 1.0;
  const double zmin = z.minCoeff();
  sol.weights = (dn * z.array()).inverse().matrix();

  if (diverged || (stall >= 10 && !sol.converged)) {
    sol.status = SolveStatus::not_in_convex_hull;
    sol.converged = false;
    return sol;
  }
  if (!sol.converged) {
    // Unbounded dual ascent shows up as collapsing weights.
    sol.status = (zmin > 0.0 && std::abs(sol.weights.sum() - 1.0) < 0.5)
                     ? SolveStatus::max_iter_exceeded
                     : SolveStatus::not_in_convex_hull;
    return sol;
  }
  if (zmin < ls.eps || std::abs(sol.weights.sum() - 1.0) > 1e-6) {
    sol.status = SolveStatus::not_in_convex_hull;
    sol.converged = false;
    return sol;
  }
  sol.status = SolveStatus::converged;
  sol.residual_norm = (U.transpose() * sol.weights).norm();
  sol.log_el_ratio = -z.array().log().sum();
  return sol;
}

// Log EL ratio at theta, or -inf with in_hull = false when the solver
// cannot produce a valid multiplier.
struct ELValue {
  double value = -std::numeric_limits<double>::infinity();
  bool in_hull = false;
  SolveStatus status = SolveStatus::not_in_convex_hull;
};

inline ELValue log_el(const Dataset& data, const Vector& theta, Mode mode, const ELConfig& cfg = {}) {
  const LagrangeSolution s = solve_lambda(estimating_functions(data, theta, mode), cfg);
  ELValue v;
  v.status = s.status;
  if (s.status == SolveStatus::converged) {
    v.value = s.log_el_ratio;
    v.in_hull = true;
  }
  return v;
}

}  // namespace bel
