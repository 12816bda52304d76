#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "bel/dataset.hpp"
#include "bel/el_core.hpp"
#include "bel/error.hpp"
#include "bel/metrics.hpp"
#include "bel/priors.hpp"
#include "bel/random.hpp"

namespace bel {

enum class Algorithm { rw, normal_approx };

inline const char* to_string(Algorithm a) { return a == Algorithm::rw ? "rw" : "normal_approx"; }

struct SamplerConfig {
  Algorithm algorithm = Algorithm::normal_approx;
  int n_iter = 10000;
  int burn_in = -1;  // negative selects n_iter / 2
  int thin = 1;
  double step_size = 0.0;  // random-walk scale s; 0 picks a pilot value
  bool adapt_step = true;  // tune s during burn-in only
  std::array<double, 3> move_probs{0.4, 0.3, 0.3};
  std::uint64_t seed = 1;
  ELConfig el;

  bool operator==(const SamplerConfig&) const = default;

  int effective_burn_in() const { return burn_in < 0 ? n_iter / 2 : burn_in; }

  void validate() const {
    if (n_iter < 1) throw UsageError("sampler.n_iter must be positive");
    if (effective_burn_in() >= n_iter) throw UsageError("sampler.burn_in must be below n_iter");
    if (thin < 1) throw UsageError("sampler.thin must be at least 1");
    if (step_size < 0.0) throw UsageError("sampler.step_size must be nonnegative");
    double total = 0.0;
    for (double q : move_probs) {
      if (q < 0.0) throw UsageError("sampler move probabilities must be nonnegative");
      total += q;
    }
    if (std::abs(total - 1.0) > 1e-12) throw UsageError("sampler move probabilities must sum to 1");
    el.validate();
  }
};

struct ChainState {
  Vector theta;
  MixtureScales tau_sq;
  double gamma = 1.0;
  double log_el = -std::numeric_limits<double>::infinity();
  double log_post = -std::numeric_limits<double>::infinity();
  int iteration = 0;
};

struct ChainSample {
  int iteration = 0;
  Vector theta;
  Vector tau_sq;
  double gamma = 0.0;
};

struct Chain {
  std::vector<ChainSample> samples;
  double acceptance_rate = 0.0;
  std::vector<double> ess;        // per coordinate of theta
  std::vector<double> acf_lag1;   // per coordinate of theta
  double step_size = 0.0;         // final RW scale (0 for the normal-approximation sampler)
  int hull_rejections = 0;        // proposals with zero EL
  bool proposal_regularized = false;

  Eigen::Index p() const { return samples.empty() ? 0 : samples.front().theta.size(); }

  std::vector<double> coordinate(Eigen::Index j) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.theta(j));
    return out;
  }
};

// Target likelihood for the theta update. The empirical likelihood is the
// production choice; tests inject closed-form likelihoods.
template <typename F>
concept LogLikelihood = requires(const F& f, const Vector& theta) {
  { f(theta) } -> std::convertible_to<ELValue>;
};

struct EmpiricalLikelihood {
  const Dataset* data;
  Mode mode;
  ELConfig cfg;
  ELValue operator()(const Vector& theta) const { return log_el(*data, theta, mode, cfg); }
};

// ---------------------------------------------------------------------------
// Initialization

namespace detail {

inline Vector ols_coefficients(const Dataset& data) {
  if (!data.y) throw DataError("regression mode needs a response");
  Eigen::ColPivHouseholderQR<Matrix> qr(data.X);
  qr.setThreshold(1e-10);
  if (qr.rank() < data.p()) throw NumericalError("design matrix is singular");
  return qr.solve(*data.y);
}

}  // namespace detail

// theta = sample mean (mean mode) or OLS (regression mode);
// tau_j^2 = n / sum_i U_ij^2 and gamma = sqrt(2 sum_ij U_ij^2 / n), with
// U evaluated at the starting theta.
inline ChainState initialize(const Dataset& data, Mode mode) {
  data.validate();
  ChainState s;
  s.theta = mode == Mode::mean ? Vector(data.X.colwise().mean().transpose())
                               : detail::ols_coefficients(data);
  const Matrix U = estimating_functions(data, s.theta, mode).U;
  const double n = static_cast<double>(data.n());
  const Vector ss = U.colwise().squaredNorm().transpose();
  s.tau_sq.tau_sq.resize(data.p());
  for (Eigen::Index j = 0; j < data.p(); ++j)
    s.tau_sq.tau_sq(j) = ss(j) > 0.0 ? std::min(n / ss(j), kFlatPriorVariance) : kFlatPriorVariance;
  s.gamma = std::clamp(std::sqrt(2.0 * ss.sum() / n), 1e-6, 1e6);
  s.iteration = 0;
  return s;
}

// ---------------------------------------------------------------------------
// Hyperparameter updates

inline constexpr double kGammaMin = 1e-6;
inline constexpr double kGammaMax = 1e6;

// Closed-form maximizer of p ln(gamma^2) - gamma^2/2 * sum_j E(tau_j^2),
// written for an effective coordinate count and total.
inline double em_gamma(double effective_p, double tau_total) {
  if (!(tau_total > 0.0)) return kGammaMax;
  return std::clamp(std::sqrt(2.0 * effective_p / tau_total), kGammaMin, kGammaMax);
}

// gamma from the running means E(tau_j^2) of all draws so far.
inline double update_gamma_em(const Vector& tau_running_mean) {
  if (tau_running_mean.size() == 0) throw UsageError("EM update needs a nonempty tau history");
  return em_gamma(static_cast<double>(tau_running_mean.size()), tau_running_mean.sum());
}

// Draws gamma^2 ~ Gamma(shape effective_p + r, rate tau_total/2 + delta').
inline double conjugate_gamma(double effective_p, double tau_total, double r, double delta_prime,
                              Rng& rng) {
  const double g2 = rng.gamma(effective_p + r, 0.5 * tau_total + delta_prime);
  return std::clamp(std::sqrt(g2), kGammaMin, kGammaMax);
}

inline double update_gamma_conjugate(const MixtureScales& tau_sq, double r, double delta_prime,
                                     Rng& rng) {
  return conjugate_gamma(static_cast<double>(tau_sq.tau_sq.size()), tau_sq.tau_sq.sum(), r,
                         delta_prime, rng);
}

// Inverse-Gaussian(mean mu, shape lambda) by transformation with a uniform
// correction (Michael, Schucany and Haas). The smaller root is written as
// 4 mu lambda w / (w + S)^2 to avoid cancellation when mu >> lambda.
inline double sample_inverse_gaussian(double mu, double lambda, Rng& rng) {
  const double y = rng.chisq1();
  const double w = mu * y;
  const double s = std::sqrt(w * w + 4.0 * lambda * w);
  const double x = (w + s) > 0.0 ? 4.0 * mu * lambda * w / ((w + s) * (w + s)) : mu;
  const double root = w > 0.0 ? x : mu;
  const double u = rng.uniform();
  return u <= mu / (mu + root) ? root : mu * mu / root;
}

inline constexpr double kThetaFloor = 1e-8;

// Laplace rates for the tau update: gamma for every coordinate, or the
// SCAD local linear weights at the current theta.
inline Vector prior_rates(const PriorSpec& prior, const Vector& theta, double gamma) {
  if (prior.kind == PriorKind::laplace) return Vector::Constant(theta.size(), gamma);
  return local_linear_weights(theta, gamma, prior.scad_a);
}

// 1/tau_j^2 | theta_j ~ IG(rate_j / |theta_j|, rate_j^2). A zero rate means
// the coordinate is locally unpenalized and gets the flat surrogate.
inline MixtureScales update_tau(const Vector& theta, const Vector& rates, Rng& rng) {
  MixtureScales out;
  out.tau_sq.resize(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    if (rates(j) <= 0.0) {
      out.tau_sq(j) = kFlatPriorVariance;
      continue;
    }
    const double a = std::max(std::abs(theta(j)), kThetaFloor);
    const double inv = sample_inverse_gaussian(rates(j) / a, rates(j) * rates(j), rng);
    out.tau_sq(j) = std::min(1.0 / inv, kFlatPriorVariance);
  }
  return out;
}

inline MixtureScales update_tau(const ChainState& state, const PriorSpec& prior, Rng& rng) {
  return update_tau(state.theta, prior_rates(prior, state.theta, state.gamma), rng);
}

// Sufficient statistics for gamma: with rate_j = c_j gamma, c_j^2 tau_j^2
// is Exp(gamma^2/2) distributed, so gamma sees sum_j c_j^2 tau_j^2 over the
// coordinates with c_j > 0.
struct GammaStatistics {
  double effective_p = 0.0;
  double tau_total = 0.0;
};

inline GammaStatistics gamma_statistics(const Vector& rates, double gamma, const MixtureScales& tau) {
  GammaStatistics st;
  for (Eigen::Index j = 0; j < rates.size(); ++j) {
    if (rates(j) <= 0.0) continue;
    const double c = rates(j) / gamma;
    st.effective_p += 1.0;
    st.tau_total += c * c * tau.tau_sq(j);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Proposals

struct RwProposal {
  Vector theta;
  int move = 0;  // 0 full vector, 1 one coordinate, 2 two coordinates
};

inline RwProposal propose_rw(const Vector& theta, double s, const std::array<double, 3>& move_probs,
                             Rng& rng) {
  const auto p = static_cast<std::size_t>(theta.size());
  RwProposal out{theta, 0};
  const double un = rng.uniform();
  if (un < move_probs[0]) {
    Vector e(theta.size());
    for (Eigen::Index j = 0; j < e.size(); ++j) e(j) = rng.normal();
    e.normalize();
    out.theta += e * (rng.normal() * s);
    out.move = 0;
  } else if (un < move_probs[0] + move_probs[1] || p < 2) {
    const auto l1 = static_cast<Eigen::Index>(rng.index(p));
    out.theta(l1) += rng.normal() * s;
    out.move = 1;
  } else {
    const auto l1 = rng.index(p);
    auto l2 = rng.index(p - 1);
    if (l2 >= l1) ++l2;
    out.theta(static_cast<Eigen::Index>(l1)) += rng.normal() * s;
    out.theta(static_cast<Eigen::Index>(l2)) += rng.normal() * s;
    out.move = 2;
  }
  return out;
}

inline RwProposal propose_rw(const ChainState& state, const SamplerConfig& cfg, double s, Rng& rng) {
  return propose_rw(state.theta, s, cfg.move_probs, rng);
}

// Gaussian approximation of the log EL around its maximizer:
// log EL(theta) ~ -1/2 (theta - center)' precision (theta - center).
//   mean mode:       center = xbar, precision = n Sigma_n^{-1}
//   regression mode: center = OLS, precision = (X'X) S^{-1} (X'X) with
//                    S = sum_i U_i U_i' at the OLS fit (inverse sandwich).
struct NormalApproximation {
  Vector center;
  Matrix precision;
  Vector shift;  // precision * center
  bool regularized = false;
};

namespace detail {

// Returns the inverse of a symmetric PSD matrix, adding jitter
// 1e-8 trace/p to the diagonal when it is numerically singular.
inline Matrix spd_inverse(Matrix M, bool& regularized) {
  const auto p = M.rows();
  Eigen::LDLT<Matrix> ldlt(M);
  const Vector d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  const bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive() && dmax > 0.0 &&
                  d.minCoeff() > 1e-13 * dmax;
  if (!ok) {
    double jitter = 1e-8 * std::max(M.trace() / static_cast<double>(p), 1e-300);
    M.diagonal().array() += jitter;
    ldlt.compute(M);
    regularized = true;
    std::clog << "warning: singular covariance in normal approximation; added jitter " << jitter
              << '\n';
  }
  return ldlt.solve(Matrix::Identity(p, p));
}

}  // namespace detail

inline NormalApproximation build_normal_approximation(const Dataset& data, Mode mode) {
  NormalApproximation a;
  const double n = static_cast<double>(data.n());
  if (mode == Mode::mean) {
    a.center = data.X.colwise().mean().transpose();
    const Matrix Xc = data.X.rowwise() - a.center.transpose();
    const Matrix sigma_n = Xc.transpose() * Xc / n;
    a.precision = n * detail::spd_inverse(sigma_n, a.regularized);
  } else {
    a.center = detail::ols_coefficients(data);
    const Matrix U = estimating_functions_regression(data, a.center).U;
    const Matrix S = U.transpose() * U;
    const Matrix XtX = data.X.transpose() * data.X;
    a.precision = XtX * detail::spd_inverse(S, a.regularized) * XtX;
  }
  a.precision = 0.5 * (a.precision + a.precision.transpose());
  a.shift = a.precision * a.center;
  return a;
}

// Conditional proposal N(mean, cov) with cov = (precision + D_tau^-1)^-1
// and mean = cov * precision * center.
struct ProposalDistribution {
  Vector mean;
  Eigen::LLT<Matrix> chol;  // of the proposal precision
  double log_det_half = 0.0;

  Matrix covariance() const {
    return chol.solve(Matrix::Identity(mean.size(), mean.size()));
  }
  double log_density(const Vector& x) const {
    const Vector d = chol.matrixU() * (x - mean);
    return -0.5 * d.squaredNorm() + log_det_half -
           0.5 * static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi);
  }
};

inline ProposalDistribution proposal_distribution(const NormalApproximation& approx,
                                                  const MixtureScales& tau) {
  Matrix P = approx.precision;
  P.diagonal() += tau.tau_sq.cwiseInverse();
  ProposalDistribution d;
  d.chol.compute(P);
  if (d.chol.info() != Eigen::Success) throw NumericalError("proposal precision is not positive definite");
  d.mean = d.chol.solve(approx.shift);
  d.log_det_half = d.chol.matrixLLT().diagonal().array().log().sum();
  return d;
}

struct NormalProposal {
  Vector theta;
  double log_q_forward = 0.0;  // log g(proposal)
  double log_q_reverse = 0.0;  // log g(current)
};

inline NormalProposal propose_normal_approx(const NormalApproximation& approx, const ChainState& state,
                                            Rng& rng) {
  const ProposalDistribution dist = proposal_distribution(approx, state.tau_sq);
  Vector z(state.theta.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
  NormalProposal out;
  out.theta = dist.mean + dist.chol.matrixU().solve(z);
  out.log_q_forward = dist.log_density(out.theta);
  out.log_q_reverse = dist.log_density(state.theta);
  return out;
}

inline NormalProposal propose_normal_approx(const Dataset& data, const ChainState& state, Mode mode,
                                            Rng& rng) {
  return propose_normal_approx(build_normal_approximation(data, mode), state, rng);
}

// ---------------------------------------------------------------------------
// Metropolis-Hastings

inline double log_posterior(double log_el_value, const Vector& theta, const MixtureScales& tau) {
  if (!std::isfinite(log_el_value)) return -std::numeric_limits<double>::infinity();
  return log_el_value + log_conditional_prior(theta, tau);
}

struct MhResult {
  ChainState state;
  bool accepted = false;
  bool proposal_in_hull = true;
};

// Accepts with probability min(1, post(prop) g(cur) / (post(cur) g(prop))).
// A proposal with zero EL is always rejected; a current state with zero EL
// is left for any proposal with positive EL.
template <LogLikelihood L>
MhResult mh_step(const ChainState& state, const Vector& proposal, double log_q_fwd, double log_q_rev,
                 const L& likelihood, Rng& rng) {
  const ELValue el = likelihood(proposal);
  const double lp_prop = log_posterior(el.value, proposal, state.tau_sq);
  const double log_u = std::log(rng.uniform_open());
  MhResult out{state, false, el.in_hull};
  bool accept;
  if (!std::isfinite(lp_prop)) {
    accept = false;
  } else if (!std::isfinite(state.log_post)) {
    accept = true;
  } else {
    accept = log_u < lp_prop - state.log_post + log_q_rev - log_q_fwd;
  }
  if (accept) {
    out.state.theta = proposal;
    out.state.log_el = el.value;
    out.state.log_post = lp_prop;
    out.accepted = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full sampler

namespace detail {

inline void finalize_diagnostics(Chain& chain) {
  const Eigen::Index p = chain.p();
  chain.ess.assign(static_cast<std::size_t>(p), 0.0);
  chain.acf_lag1.assign(static_cast<std::size_t>(p), 0.0);
  if (chain.samples.size() < 10) return;
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto series = chain.coordinate(j);
    chain.ess[static_cast<std::size_t>(j)] = ess(series).ess;
    chain.acf_lag1[static_cast<std::size_t>(j)] = acf(series, 1)[1];
  }
}

}  // namespace detail

// One chain: each iteration updates gamma, then tau^2, then theta.
template <LogLikelihood L>
Chain run_chain(const Dataset& data, const PriorSpec& prior, const SamplerConfig& cfg, Mode mode,
                const L& likelihood) {
  prior.validate();
  cfg.validate();
  data.validate();
  data.require_low_dimension();
  if (mode == Mode::regression && !data.y) throw DataError("regression mode needs a response");

  Rng rng(cfg.seed);
  ChainState state = initialize(data, mode);
  const Eigen::Index p = data.p();
  if (const auto* fixed = std::get_if<GammaFixed>(&prior.gamma_mode)) state.gamma = fixed->gamma;

  const NormalApproximation approx = build_normal_approximation(data, mode);
  double step = cfg.step_size;
  if (step <= 0.0) {
    bool unused = false;
    const Matrix cov = detail::spd_inverse(approx.precision, unused);
    step = cov.diagonal().cwiseMax(0.0).cwiseSqrt().mean();
    if (!(step > 0.0)) step = 0.1;
  }

  // EM accumulators over every tau draw so far, starting with the initial one.
  GammaStatistics em_total{static_cast<double>(p), state.tau_sq.tau_sq.sum()};
  GammaStatistics last_stats = em_total;

  state.log_el = likelihood(state.theta).value;
  state.log_post = log_posterior(state.log_el, state.theta, state.tau_sq);

  const int burn_in = cfg.effective_burn_in();
  Chain chain;
  chain.samples.reserve(static_cast<std::size_t>((cfg.n_iter - burn_in) / cfg.thin));
  chain.proposal_regularized = approx.regularized;
  int accepted_after_burn = 0;
  int window_accepts = 0;
  int window_len = 0;

  for (int k = 1; k <= cfg.n_iter; ++k) {
    // gamma
    if (std::holds_alternative<GammaEM>(prior.gamma_mode)) {
      state.gamma = em_gamma(em_total.effective_p, em_total.tau_total);
    } else if (const auto* h = std::get_if<GammaHyperprior>(&prior.gamma_mode)) {
      state.gamma = conjugate_gamma(last_stats.effective_p, last_stats.tau_total, h->r,
                                    h->delta_prime, rng);
    }

    // tau^2
    const Vector rates = prior_rates(prior, state.theta, state.gamma);
    state.tau_sq = update_tau(state.theta, rates, rng);
    last_stats = gamma_statistics(rates, state.gamma, state.tau_sq);
    em_total.effective_p += last_stats.effective_p;
    em_total.tau_total += last_stats.tau_total;
    state.log_post = log_posterior(state.log_el, state.theta, state.tau_sq);

    // theta
    MhResult res;
    if (cfg.algorithm == Algorithm::rw) {
      const RwProposal prop = propose_rw(state.theta, step, cfg.move_probs, rng);
      res = mh_step(state, prop.theta, 0.0, 0.0, likelihood, rng);
    } else {
      const NormalProposal prop = propose_normal_approx(approx, state, rng);
      res = mh_step(state, prop.theta, prop.log_q_forward, prop.log_q_reverse, likelihood, rng);
    }
    state = std::move(res.state);
    state.iteration = k;
    if (!res.proposal_in_hull) ++chain.hull_rejections;

    if (k <= burn_in) {
      if (cfg.algorithm == Algorithm::rw && cfg.adapt_step) {
        window_accepts += res.accepted ? 1 : 0;
        if (++window_len == 100) {
          const double rate = window_accepts / 100.0;
          if (rate < 0.2) step *= 0.7;
          else if (rate > 0.4) step *= 1.4;
          window_accepts = 0;
          window_len = 0;
        }
      }
    } else {
      accepted_after_burn += res.accepted ? 1 : 0;
      if ((k - burn_in) % cfg.thin == 0)
        chain.samples.push_back({k, state.theta, state.tau_sq.tau_sq, state.gamma});
    }
  }

  chain.acceptance_rate = static_cast<double>(accepted_after_burn) / (cfg.n_iter - burn_in);
  chain.step_size = cfg.algorithm == Algorithm::rw ? step : 0.0;
  detail::finalize_diagnostics(chain);
  return chain;
}

inline Chain run_chain(const Dataset& data, const PriorSpec& prior, const SamplerConfig& cfg,
                       Mode mode) {
  return run_chain(data, prior, cfg, mode, EmpiricalLikelihood{&data, mode, cfg.el});
}

}  // namespace bel
