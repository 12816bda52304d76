#pragma once

#include <cstdio>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "bel/baselines.hpp"
#include "bel/config.hpp"
#include "bel/metrics.hpp"
#include "bel/parallel.hpp"
#include "bel/selection.hpp"
#include "bel/simgen.hpp"

namespace bel {

struct BenchCell {
  int n = 0;
  int p = 0;
  std::vector<BenchRow> rows;
};

struct BenchTable {
  Mode mode = Mode::mean;
  std::vector<BenchCell> cells;
};

inline std::vector<std::pair<int, int>> design_cells(const RunConfig& cfg) {
  std::vector<std::pair<int, int>> out;
  for (int n : cfg.design_n)
    for (int p : cfg.design_p) out.emplace_back(n, p);
  return out;
}

// Seed of replicate `rep` in design cell `cell`; simulate and bench agree on it.
inline std::uint64_t replicate_seed(std::uint64_t master, std::size_t cell, std::size_t rep) {
  return derive_seed(derive_seed(master, cell), rep);
}

inline std::uint64_t chain_seed(std::uint64_t data_seed) { return derive_seed(data_seed, 0xc4a1); }

inline Dataset simulate_replicate(const RunConfig& cfg, int n, int p, std::uint64_t seed) {
  if (cfg.mode == Mode::mean) return gen_mean_data({n, p, cfg.design_rho, seed});
  return gen_regression_data({cfg.scenario, n, p, seed});
}

inline void require_design_cells(const RunConfig& cfg) {
  for (auto [n, p] : design_cells(cfg)) {
    if (2 * p >= n)
      throw UsageError("design cell n = " + std::to_string(n) + ", p = " + std::to_string(p) +
                       ": p must be below n/2; the empirical likelihood degenerates as p approaches n");
  }
}

namespace detail {

struct MethodScore {
  bool ok = false;
  Vector estimate;
};

inline PriorSpec with_kind(PriorSpec prior, PriorKind kind) {
  prior.kind = kind;
  return prior;
}

// Thresholded posterior mean of one BEL fit.
inline Vector bel_estimate(const Dataset& data, const RunConfig& cfg, PriorKind kind, std::uint64_t seed) {
  const PriorSpec prior = with_kind(cfg.prior_spec(), kind);
  SamplerConfig sc = cfg.sampler;
  sc.seed = seed;
  const Chain chain = run_chain(data, prior, sc, cfg.mode);
  double cutoff = cfg.cutoff;
  if (cfg.use_cv()) {
    CvOptions opt;
    opt.folds = cfg.cv_folds;
    opt.n_iter = cfg.cv_n_iter;
    cutoff = cv_cutoff(data, prior, sc, opt).cutoff;
  }
  return apply_threshold(summarize(chain), cutoff).thresholded_estimate;
}

template <typename Fn>
MethodScore guarded(Fn&& fn) {
  try {
    return {true, fn()};
  } catch (const Error& e) {
    std::clog << "warning: replicate failed: " << e.what() << '\n';
    return {};
  }
}

inline BenchRow aggregate(const std::string& method, const std::vector<MethodScore>& scores,
                          const Vector& truth) {
  BenchRow row;
  row.method = method;
  const std::vector<bool> true_support = support_of(truth);
  double actual = 0.0;
  for (bool b : true_support) actual += b ? 1.0 : 0.0;
  for (const auto& s : scores) {
    if (!s.ok) {
      ++row.failures;
      continue;
    }
    const SupportCounts c = support_counts(support_of(s.estimate), true_support);
    row.mse_x1000 += 1000.0 * mse(s.estimate, truth);
    row.true_count += c.true_count;
    row.false_count += c.false_count;
    row.f1_x100 += 100.0 * f1(c.true_count, c.false_count, actual);
    ++row.replicates;
  }
  if (row.replicates > 0) {
    const double k = row.replicates;
    row.mse_x1000 /= k;
    row.true_count /= k;
    row.false_count /= k;
    row.f1_x100 /= k;
  }
  return row;
}

inline BenchRow absent_row(const std::string& method) {
  BenchRow row;
  row.method = method;
  row.available = false;
  return row;
}

}  // namespace detail

// Averages every method over the replicates of each (n, p) cell. Replicates
// run concurrently with seeds fixed before fan-out.
inline BenchTable run_bench(const RunConfig& cfg) {
  cfg.validate();
  require_design_cells(cfg);
  const unsigned jobs = cfg.jobs == 0 ? default_jobs() : cfg.jobs;
  const auto reps = static_cast<std::size_t>(cfg.effective_replicates());
  BenchTable table;
  table.mode = cfg.mode;
  const auto cells = design_cells(cfg);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [n, p] = cells[c];
    const Vector truth = cfg.mode == Mode::mean ? MeanDesign{n, p, cfg.design_rho, 0}.mu0()
                                                : RegressionDesign{cfg.scenario, n, p, 0}.beta0();
    const std::vector<std::string> methods =
        cfg.mode == Mode::mean ? std::vector<std::string>{"bel_lasso", "bel_scad", "soft", "hard", "mean"}
                               : std::vector<std::string>{"bel_lasso", "bel_scad", "ols"};
    std::vector<std::vector<detail::MethodScore>> scores(methods.size(),
                                                         std::vector<detail::MethodScore>(reps));

    parallel_for(reps, jobs, [&](std::size_t r) {
      const std::uint64_t seed = replicate_seed(cfg.master_seed, c, r);
      Dataset data = simulate_replicate(cfg, n, p, seed);
      if (cfg.mode == Mode::regression) center(data);
      const std::uint64_t cs = chain_seed(seed);
      scores[0][r] = detail::guarded([&] { return detail::bel_estimate(data, cfg, PriorKind::laplace, cs); });
      scores[1][r] = detail::guarded([&] { return detail::bel_estimate(data, cfg, PriorKind::scad, cs); });
      if (cfg.mode == Mode::mean) {
        scores[2][r] = detail::guarded([&] { return soft_threshold_mean(data, cfg.cutoff); });
        scores[3][r] = detail::guarded([&] { return hard_threshold_mean(data, cfg.cutoff); });
        scores[4][r] = detail::guarded([&] { return Vector(data.X.colwise().mean().transpose()); });
      } else {
        scores[2][r] = detail::guarded([&] { return ols(data).beta; });
      }
    });

    BenchCell cell{n, p, {}};
    for (std::size_t m = 0; m < methods.size(); ++m)
      cell.rows.push_back(detail::aggregate(methods[m], scores[m], truth));
    if (cfg.mode == Mode::regression)
      for (const char* name : {"bayesian_lasso", "lasso", "scad"}) cell.rows.push_back(detail::absent_row(name));
    table.cells.push_back(std::move(cell));
  }
  return table;
}

inline void write_bench_csv(std::ostream& out, const BenchTable& t) {
  out << "mode,n,p,method,mse_x1000,true_count,false_count,f1_x100,replicates,failures\n";
  for (const auto& cell : t.cells) {
    for (const auto& r : cell.rows) {
      out << to_string(t.mode) << ',' << cell.n << ',' << cell.p << ',' << r.method << ',';
      if (r.available)
        out << format_double(r.mse_x1000) << ',' << format_double(r.true_count) << ','
            << format_double(r.false_count) << ',' << format_double(r.f1_x100) << ',';
      else
        out << "NA,NA,NA,NA,";
      out << r.replicates << ',' << r.failures << '\n';
    }
  }
}

// Human-readable table: MSE x 1000 to one decimal, counts to two.
inline void write_bench_text(std::ostream& out, const BenchTable& t) {
  char buf[160];
  const bool reg = t.mode == Mode::regression;
  std::snprintf(buf, sizeof buf, "%5s %4s  %-15s %9s %6s %6s %s\n", "n", "p", "method", "MSE", "True",
                "False", reg ? "   F1" : "");
  out << buf;
  for (const auto& cell : t.cells) {
    for (const auto& r : cell.rows) {
      if (!r.available) {
        std::snprintf(buf, sizeof buf, "%5d %4d  %-15s %9s %6s %6s %s\n", cell.n, cell.p, r.method.c_str(), "NA",
                      "NA", "NA", reg ? "   NA" : "");
      } else if (reg) {
        std::snprintf(buf, sizeof buf, "%5d %4d  %-15s %9.1f %6.2f %6.2f %5.0f\n", cell.n, cell.p,
                      r.method.c_str(), r.mse_x1000, r.true_count, r.false_count, r.f1_x100);
      } else {
        std::snprintf(buf, sizeof buf, "%5d %4d  %-15s %9.1f %6.2f %6.2f\n", cell.n, cell.p, r.method.c_str(),
                      r.mse_x1000, r.true_count, r.false_count);
      }
      out << buf;
      if (r.failures > 0) out << "      (" << r.failures << " failed replicates)\n";
    }
  }
}

inline const BenchRow& find_row(const BenchCell& cell, const std::string& method) {
  for (const auto& r : cell.rows)
    if (r.method == method) return r;
  throw UsageError("no benchmark row for method '" + method + "'");
}

}  // namespace bel
