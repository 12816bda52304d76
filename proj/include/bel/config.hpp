#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bel/dataset.hpp"
#include "bel/error.hpp"
#include "bel/priors.hpp"
#include "bel/samplers.hpp"
#include "bel/simgen.hpp"

namespace bel {

// Everything a CLI command needs. Stored in a flat key=value file with
// dotted keys, e.g. `sampler.n_iter = 10000`; `#` starts a comment.
struct RunConfig {
  std::string command = "fit";  // simulate | fit | bench | summarize | diagnose
  Mode mode = Mode::mean;

  // prior.*
  PriorKind prior_kind = PriorKind::laplace;
  std::string gamma_mode = "em";  // em | fixed | gamma
  double gamma = 1.0;
  double gamma_r = 1.0;
  double gamma_delta_prime = 1.0;
  double scad_a = 3.7;

  SamplerConfig sampler;  // sampler.* and el.*; the seed comes from master_seed

  // design.*
  std::vector<int> design_n{100};
  std::vector<int> design_p{10};
  double design_rho = 0.3;
  Scenario scenario = Scenario::A;

  // selection.*
  std::string cutoff_method = "auto";  // auto | fixed | cv
  double cutoff = 0.2;
  int cv_folds = 5;
  int cv_n_iter = 2000;

  // fit.*
  std::string input;              // dataset (fit) or chain file (summarize, diagnose)
  std::string response = "y";     // response column for regression fits
  bool standardize_response = false;

  int replicates = 20;
  bool full = false;  // 100 replicates instead of `replicates`
  std::string output_dir = "out";
  std::uint64_t master_seed = 20240101;
  unsigned jobs = 0;  // 0 = available parallelism

  bool operator==(const RunConfig&) const = default;

  PriorSpec prior_spec() const {
    PriorSpec p;
    p.kind = prior_kind;
    p.scad_a = scad_a;
    if (gamma_mode == "fixed")
      p.gamma_mode = GammaFixed{gamma};
    else if (gamma_mode == "gamma")
      p.gamma_mode = GammaHyperprior{gamma_r, gamma_delta_prime};
    else
      p.gamma_mode = GammaEM{};
    return p;
  }

  int effective_replicates() const { return full ? 100 : replicates; }

  bool use_cv() const {
    if (cutoff_method == "cv") return true;
    if (cutoff_method == "fixed") return false;
    return mode == Mode::regression;
  }

  void validate() const {
    if (gamma_mode != "em" && gamma_mode != "fixed" && gamma_mode != "gamma")
      throw UsageError("prior.gamma_mode must be em, fixed or gamma");
    if (cutoff_method != "auto" && cutoff_method != "fixed" && cutoff_method != "cv")
      throw UsageError("selection.method must be auto, fixed or cv");
    prior_spec().validate();
    sampler.validate();
    if (design_n.empty() || design_p.empty()) throw UsageError("design.n and design.p need values");
    if (replicates < 1) throw UsageError("replicates must be positive");
    if (!(cutoff > 0.0)) throw UsageError("selection.cutoff must be positive");
    if (cv_folds < 2) throw UsageError("selection.cv_folds must be at least 2");
    if (cv_n_iter < 2) throw UsageError("selection.cv_n_iter must be at least 2");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': '" + v + "' is not a number");
  }
  if (pos != v.size()) throw UsageError("config key '" + key + "': '" + v + "' is not a number");
  return out;
}

inline long long to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long out;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': '" + v + "' is not an integer");
  }
  if (pos != v.size()) throw UsageError("config key '" + key + "': '" + v + "' is not an integer");
  return out;
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long out;
  try {
    out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': '" + v + "' is not an unsigned integer");
  }
  if (pos != v.size() || v.front() == '-')
    throw UsageError("config key '" + key + "': '" + v + "' is not an unsigned integer");
  return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config key '" + key + "': '" + v + "' is not a boolean");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

inline std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace detail

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  const std::string& v = value;
  if (key == "command") c.command = v;
  else if (key == "mode") {
    if (v == "mean") c.mode = Mode::mean;
    else if (v == "regression") c.mode = Mode::regression;
    else throw UsageError("mode must be mean or regression");
  } else if (key == "prior.kind") {
    if (v == "laplace" || v == "lasso") c.prior_kind = PriorKind::laplace;
    else if (v == "scad") c.prior_kind = PriorKind::scad;
    else throw UsageError("prior.kind must be laplace or scad");
  } else if (key == "prior.gamma_mode") c.gamma_mode = v;
  else if (key == "prior.gamma") c.gamma = to_double(key, v);
  else if (key == "prior.r") c.gamma_r = to_double(key, v);
  else if (key == "prior.delta_prime") c.gamma_delta_prime = to_double(key, v);
  else if (key == "prior.scad_a") c.scad_a = to_double(key, v);
  else if (key == "sampler.algorithm") {
    if (v == "rw" || v == "1") c.sampler.algorithm = Algorithm::rw;
    else if (v == "normal_approx" || v == "2") c.sampler.algorithm = Algorithm::normal_approx;
    else throw UsageError("sampler.algorithm must be rw or normal_approx");
  } else if (key == "sampler.n_iter") c.sampler.n_iter = static_cast<int>(to_int(key, v));
  else if (key == "sampler.burn_in") c.sampler.burn_in = static_cast<int>(to_int(key, v));
  else if (key == "sampler.thin") c.sampler.thin = static_cast<int>(to_int(key, v));
  else if (key == "sampler.step_size") c.sampler.step_size = to_double(key, v);
  else if (key == "sampler.adapt_step") c.sampler.adapt_step = to_bool(key, v);
  else if (key == "sampler.move_probs") {
    auto parts = split_list(v);
    if (parts.size() != 3) throw UsageError("sampler.move_probs needs three values");
    for (std::size_t i = 0; i < 3; ++i) c.sampler.move_probs[i] = to_double(key, parts[i]);
  } else if (key == "el.newton_tol") c.sampler.el.newton_tol = to_double(key, v);
  else if (key == "el.max_iter") c.sampler.el.max_iter = static_cast<int>(to_int(key, v));
  else if (key == "el.logstar_eps") c.sampler.el.logstar_eps = to_double(key, v);
  else if (key == "design.n" || key == "design.p") {
    std::vector<int> vals;
    for (const auto& part : split_list(v)) vals.push_back(static_cast<int>(to_int(key, part)));
    (key == "design.n" ? c.design_n : c.design_p) = vals;
  } else if (key == "design.rho") c.design_rho = to_double(key, v);
  else if (key == "design.scenario") {
    if (v == "A") c.scenario = Scenario::A;
    else if (v == "B") c.scenario = Scenario::B;
    else if (v == "C") c.scenario = Scenario::C;
    else throw UsageError("design.scenario must be A, B or C");
  } else if (key == "selection.method") c.cutoff_method = v;
  else if (key == "selection.cutoff") c.cutoff = to_double(key, v);
  else if (key == "selection.cv_folds") c.cv_folds = static_cast<int>(to_int(key, v));
  else if (key == "selection.cv_n_iter") c.cv_n_iter = static_cast<int>(to_int(key, v));
  else if (key == "fit.input" || key == "input") c.input = v;
  else if (key == "fit.response") c.response = v;
  else if (key == "fit.standardize_response") c.standardize_response = to_bool(key, v);
  else if (key == "replicates") c.replicates = static_cast<int>(to_int(key, v));
  else if (key == "full") c.full = to_bool(key, v);
  else if (key == "output_dir") c.output_dir = v;
  else if (key == "master_seed") c.master_seed = to_u64(key, v);
  else if (key == "jobs") c.jobs = static_cast<unsigned>(to_int(key, v));
  else throw UsageError("unknown config key '" + key + "'");
}

inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return base;
}

inline RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  return parse_config(in);
}

inline std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  auto d = [](double v) { return format_double(v); };
  o << "command = " << c.command << '\n'
    << "mode = " << to_string(c.mode) << '\n'
    << "prior.kind = " << to_string(c.prior_kind) << '\n'
    << "prior.gamma_mode = " << c.gamma_mode << '\n'
    << "prior.gamma = " << d(c.gamma) << '\n'
    << "prior.r = " << d(c.gamma_r) << '\n'
    << "prior.delta_prime = " << d(c.gamma_delta_prime) << '\n'
    << "prior.scad_a = " << d(c.scad_a) << '\n'
    << "sampler.algorithm = " << to_string(c.sampler.algorithm) << '\n'
    << "sampler.n_iter = " << c.sampler.n_iter << '\n'
    << "sampler.burn_in = " << c.sampler.burn_in << '\n'
    << "sampler.thin = " << c.sampler.thin << '\n'
    << "sampler.step_size = " << d(c.sampler.step_size) << '\n'
    << "sampler.adapt_step = " << (c.sampler.adapt_step ? "true" : "false") << '\n'
    << "sampler.move_probs = " << d(c.sampler.move_probs[0]) << ',' << d(c.sampler.move_probs[1])
    << ',' << d(c.sampler.move_probs[2]) << '\n'
    << "el.newton_tol = " << d(c.sampler.el.newton_tol) << '\n'
    << "el.max_iter = " << c.sampler.el.max_iter << '\n'
    << "el.logstar_eps = " << d(c.sampler.el.logstar_eps) << '\n'
    << "design.n = " << detail::join_ints(c.design_n) << '\n'
    << "design.p = " << detail::join_ints(c.design_p) << '\n'
    << "design.rho = " << d(c.design_rho) << '\n'
    << "design.scenario = " << to_string(c.scenario) << '\n'
    << "selection.method = " << c.cutoff_method << '\n'
    << "selection.cutoff = " << d(c.cutoff) << '\n'
    << "selection.cv_folds = " << c.cv_folds << '\n'
    << "selection.cv_n_iter = " << c.cv_n_iter << '\n'
    << "fit.input = " << c.input << '\n'
    << "fit.response = " << c.response << '\n'
    << "fit.standardize_response = " << (c.standardize_response ? "true" : "false") << '\n'
    << "replicates = " << c.replicates << '\n'
    << "full = " << (c.full ? "true" : "false") << '\n'
    << "output_dir = " << c.output_dir << '\n'
    << "master_seed = " << c.master_seed << '\n'
    << "jobs = " << c.jobs << '\n';
  return o.str();
}

}  // namespace bel
