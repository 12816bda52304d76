#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bel/dataset.hpp"
#include "bel/error.hpp"
#include "bel/samplers.hpp"
#include "bel/selection.hpp"

namespace bel {

using json = nlohmann::ordered_json;

inline json to_json(const PriorSpec& prior) {
  json j;
  j["kind"] = to_string(prior.kind);
  j["scad_a"] = prior.scad_a;
  if (const auto* f = std::get_if<GammaFixed>(&prior.gamma_mode)) {
    j["gamma_mode"] = "fixed";
    j["gamma"] = f->gamma;
  } else if (const auto* h = std::get_if<GammaHyperprior>(&prior.gamma_mode)) {
    j["gamma_mode"] = "gamma";
    j["r"] = h->r;
    j["delta_prime"] = h->delta_prime;
  } else {
    j["gamma_mode"] = "em";
  }
  return j;
}

inline json to_json(const SamplerConfig& cfg) {
  json j;
  j["algorithm"] = to_string(cfg.algorithm);
  j["n_iter"] = cfg.n_iter;
  j["burn_in"] = cfg.effective_burn_in();
  j["thin"] = cfg.thin;
  j["step_size"] = cfg.step_size;
  j["adapt_step"] = cfg.adapt_step;
  j["move_probs"] = cfg.move_probs;
  j["seed"] = cfg.seed;
  j["el"] = {{"newton_tol", cfg.el.newton_tol},
             {"max_iter", cfg.el.max_iter},
             {"logstar_eps", cfg.el.logstar_eps}};
  return j;
}

// Columnar chain file: iteration, theta_1..p, tau_sq_1..p, gamma.
inline void write_chain_csv(std::ostream& out, const Chain& chain, Eigen::Index p) {
  out << "iteration";
  for (Eigen::Index j = 1; j <= p; ++j) out << ",theta_" << j;
  for (Eigen::Index j = 1; j <= p; ++j) out << ",tau_sq_" << j;
  out << ",gamma\n";
  for (const auto& s : chain.samples) {
    out << s.iteration;
    for (Eigen::Index j = 0; j < p; ++j) out << ',' << format_double(s.theta(j));
    for (Eigen::Index j = 0; j < p; ++j) out << ',' << format_double(s.tau_sq(j));
    out << ',' << format_double(s.gamma) << '\n';
  }
}

inline void write_chain_csv(const std::string& path, const Chain& chain, Eigen::Index p) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_chain_csv(out, chain, p);
}

inline Chain read_chain_csv(std::istream& in) {
  const CsvTable t = read_csv_table(in);
  const std::size_t cols = t.header.size();
  if (cols < 4 || (cols - 2) % 2 != 0 || t.header.front() != "iteration" || t.header.back() != "gamma")
    throw DataError("not a chain file: expected iteration, theta_*, tau_sq_*, gamma columns");
  const auto p = static_cast<Eigen::Index>((cols - 2) / 2);
  Chain chain;
  chain.samples.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    ChainSample s;
    s.iteration = static_cast<int>(row[0]);
    s.theta.resize(p);
    s.tau_sq.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      s.theta(j) = row[static_cast<std::size_t>(1 + j)];
      s.tau_sq(j) = row[static_cast<std::size_t>(1 + p + j)];
    }
    s.gamma = row.back();
    chain.samples.push_back(std::move(s));
  }
  detail::finalize_diagnostics(chain);
  return chain;
}

inline Chain read_chain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open chain file '" + path + "'");
  return read_chain_csv(in);
}

inline json chain_sidecar(const Chain& chain, const PriorSpec& prior, const SamplerConfig& cfg, Mode mode) {
  json j;
  j["mode"] = to_string(mode);
  j["prior"] = to_json(prior);
  j["sampler"] = to_json(cfg);
  j["seed"] = cfg.seed;
  j["samples"] = chain.samples.size();
  j["acceptance_rate"] = chain.acceptance_rate;
  j["step_size"] = chain.step_size;
  j["hull_rejections"] = chain.hull_rejections;
  j["proposal_regularized"] = chain.proposal_regularized;
  j["ess"] = chain.ess;
  j["acf_lag1"] = chain.acf_lag1;
  return j;
}

inline json to_json(const SelectionReport& r, const std::vector<std::string>& names) {
  json j;
  json coefs = json::array();
  for (Eigen::Index k = 0; k < r.posterior_mean.size(); ++k) {
    const auto idx = static_cast<std::size_t>(k);
    json c;
    c["name"] = idx < names.size() ? names[idx] : "theta_" + std::to_string(k + 1);
    c["posterior_mean"] = r.posterior_mean(k);
    c["ci_lower"] = r.ci_lower(k);
    c["ci_upper"] = r.ci_upper(k);
    c["ci_length"] = r.ci_upper(k) - r.ci_lower(k);
    c["selected"] = static_cast<bool>(r.support[idx]);
    c["thresholded_estimate"] = r.thresholded_estimate(k);
    coefs.push_back(std::move(c));
  }
  j["cutoff"] = r.cutoff;
  j["coefficients"] = std::move(coefs);
  return j;
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace bel
