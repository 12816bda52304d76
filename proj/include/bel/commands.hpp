#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "bel/baselines.hpp"
#include "bel/bench.hpp"
#include "bel/chain_io.hpp"
#include "bel/config.hpp"
#include "bel/metrics.hpp"
#include "bel/selection.hpp"

namespace bel {

namespace fs = std::filesystem;

namespace detail {

inline fs::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

inline json config_json(const RunConfig& cfg) {
  json j;
  std::istringstream in(render_config(cfg));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string replicate_file(int n, int p, std::size_t rep) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "data_n%d_p%d_r%03zu.csv", n, p, rep + 1);
  return buf;
}

}  // namespace detail

// Writes one CSV per replicate and a manifest. The manifest is the only
// file carrying a timestamp.
inline json cmd_simulate(const RunConfig& cfg) {
  cfg.validate();
  require_design_cells(cfg);
  const fs::path dir = detail::prepare_output_dir(cfg.output_dir);
  const auto reps = static_cast<std::size_t>(cfg.effective_replicates());
  const auto cells = design_cells(cfg);
  json files = json::array();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [n, p] = cells[c];
    for (std::size_t r = 0; r < reps; ++r) {
      const std::uint64_t seed = replicate_seed(cfg.master_seed, c, r);
      const std::string name = detail::replicate_file(n, p, r);
      write_dataset_csv((dir / name).string(), simulate_replicate(cfg, n, p, seed));
      files.push_back({{"file", name}, {"n", n}, {"p", p}, {"replicate", r + 1}, {"seed", seed}});
    }
  }
  json manifest;
  manifest["created"] = detail::utc_timestamp();
  manifest["mode"] = to_string(cfg.mode);
  if (cfg.mode == Mode::mean)
    manifest["design"] = {{"rho", cfg.design_rho}, {"mu0_head", {3.0, 2.0, 1.0, 0.6, 0.3}}};
  else
    manifest["design"] = {{"scenario", to_string(cfg.scenario)}};
  manifest["master_seed"] = cfg.master_seed;
  manifest["replicates"] = reps;
  manifest["files"] = std::move(files);
  manifest["config"] = detail::config_json(cfg);
  write_json((dir / "manifest.json").string(), manifest);
  return manifest;
}

struct FitResult {
  Chain chain;
  SelectionReport report;
  json report_json;
};

// Fits one dataset. Regression predictors are standardized and the
// response centered (scaled too when fit.standardize_response is set);
// mean-mode data are used as given.
inline FitResult cmd_fit(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.input.empty()) throw UsageError("fit needs an input dataset (fit.input)");
  const bool reg = cfg.mode == Mode::regression;
  Dataset data = read_dataset_csv(cfg.input, reg ? cfg.response : "");
  data.require_low_dimension();
  CenteringInfo info;
  if (reg) info = standardize(data, cfg.standardize_response);

  const PriorSpec prior = cfg.prior_spec();
  SamplerConfig sc = cfg.sampler;
  sc.seed = cfg.master_seed;

  FitResult res;
  res.chain = run_chain(data, prior, sc, cfg.mode);
  double cutoff = cfg.cutoff;
  json cv;
  if (cfg.use_cv()) {
    if (!reg) throw UsageError("cross-validated cutoffs need regression mode");
    CvOptions opt;
    opt.folds = cfg.cv_folds;
    opt.n_iter = cfg.cv_n_iter;
    opt.jobs = cfg.jobs == 0 ? default_jobs() : cfg.jobs;
    const CvResult r = cv_cutoff(data, prior, sc, opt);
    cutoff = r.cutoff;
    cv = {{"grid", r.grid}, {"cv_error", r.cv_error}};
  }
  res.report = apply_threshold(summarize(res.chain), cutoff);

  const fs::path dir = detail::prepare_output_dir(cfg.output_dir);
  write_chain_csv((dir / "chain.csv").string(), res.chain, data.p());
  write_json((dir / "chain.json").string(), chain_sidecar(res.chain, prior, sc, cfg.mode));

  json& j = res.report_json;
  j = to_json(res.report, data.names);
  j["mode"] = to_string(cfg.mode);
  j["n"] = data.n();
  j["p"] = data.p();
  j["standardized"] = data.standardized;
  if (reg) {
    j["x_mean"] = std::vector<double>(info.x_mean.data(), info.x_mean.data() + info.x_mean.size());
    j["x_scale"] = std::vector<double>(info.x_scale.data(), info.x_scale.data() + info.x_scale.size());
    j["y_mean"] = info.y_mean;
    j["y_scale"] = info.y_scale;
    const OlsFit o = ols(data);
    json ols_rows = json::array();
    for (Eigen::Index k = 0; k < data.p(); ++k)
      ols_rows.push_back({{"name", data.names[static_cast<std::size_t>(k)]},
                          {"estimate", o.beta(k)},
                          {"ci_lower", o.ci_lower(k)},
                          {"ci_upper", o.ci_upper(k)},
                          {"ci_length", o.ci_upper(k) - o.ci_lower(k)}});
    j["ols"] = std::move(ols_rows);
  }
  if (!cv.is_null()) j["cross_validation"] = std::move(cv);
  j["acceptance_rate"] = res.chain.acceptance_rate;
  write_json((dir / "report.json").string(), j);
  return res;
}

inline BenchTable cmd_bench(const RunConfig& cfg, std::ostream* human = nullptr) {
  const BenchTable table = run_bench(cfg);
  const fs::path dir = detail::prepare_output_dir(cfg.output_dir);
  std::ostringstream csv, text;
  write_bench_csv(csv, table);
  write_bench_text(text, table);
  detail::write_text(dir / "bench.csv", csv.str());
  detail::write_text(dir / "bench.txt", text.str());
  if (human) *human << text.str();
  return table;
}

// Report from a stored chain at a fixed cutoff.
inline json cmd_summarize(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.input.empty()) throw UsageError("summarize needs a chain file (fit.input)");
  if (cfg.cutoff_method == "cv") throw UsageError("summarize works from a chain alone; use a fixed cutoff");
  const Chain chain = read_chain_csv(cfg.input);
  if (chain.samples.empty()) throw DataError("chain file '" + cfg.input + "' has no samples");
  const SelectionReport report = apply_threshold(summarize(chain), cfg.cutoff);
  json j = to_json(report, {});
  j["samples"] = chain.samples.size();
  j["ess"] = chain.ess;
  const fs::path dir = detail::prepare_output_dir(cfg.output_dir);
  write_json((dir / "summary.json").string(), j);
  return j;
}

// Trace and autocorrelation CSVs for plotting, plus ESS per coordinate.
inline json cmd_diagnose(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.input.empty()) throw UsageError("diagnose needs a chain file (fit.input)");
  const Chain chain = read_chain_csv(cfg.input);
  const std::size_t N = chain.samples.size();
  if (N < 10)
    throw DataError("TooShort: chain has " + std::to_string(N) + " samples, diagnostics need at least 10");
  const Eigen::Index p = chain.p();
  const fs::path dir = detail::prepare_output_dir(cfg.output_dir);

  std::ostringstream trace;
  trace << "iteration";
  for (Eigen::Index j = 1; j <= p; ++j) trace << ",theta_" << j;
  trace << '\n';
  for (const auto& s : chain.samples) {
    trace << s.iteration;
    for (Eigen::Index j = 0; j < p; ++j) trace << ',' << format_double(s.theta(j));
    trace << '\n';
  }
  detail::write_text(dir / "trace.csv", trace.str());

  const std::size_t max_lag = std::min<std::size_t>(100, N - 1);
  std::vector<std::vector<double>> acfs;
  for (Eigen::Index j = 0; j < p; ++j) acfs.push_back(acf(chain.coordinate(j), max_lag));
  std::ostringstream ac;
  ac << "lag";
  for (Eigen::Index j = 1; j <= p; ++j) ac << ",theta_" << j;
  ac << '\n';
  for (std::size_t l = 0; l <= max_lag; ++l) {
    ac << l;
    for (const auto& a : acfs) ac << ',' << format_double(a[l]);
    ac << '\n';
  }
  detail::write_text(dir / "acf.csv", ac.str());

  json j;
  j["samples"] = N;
  j["ess"] = chain.ess;
  j["acf_lag1"] = chain.acf_lag1;
  write_json((dir / "diagnostics.json").string(), j);
  return j;
}

}  // namespace bel
