#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "bel/selection.hpp"
#include "bel/simgen.hpp"

using namespace bel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Chain chain_of(const std::vector<std::vector<double>>& rows) {
  Chain c;
  int k = 0;
  for (const auto& r : rows) {
    ChainSample s;
    s.iteration = ++k;
    s.theta = Eigen::Map<const Vector>(r.data(), static_cast<Eigen::Index>(r.size()));
    s.tau_sq = Vector::Ones(s.theta.size());
    s.gamma = 1.0;
    c.samples.push_back(s);
  }
  return c;
}

SelectionReport report_of(std::initializer_list<double> means) {
  SelectionReport r;
  r.posterior_mean.resize(static_cast<Eigen::Index>(means.size()));
  Eigen::Index j = 0;
  for (double m : means) r.posterior_mean(j++) = m;
  r.ci_lower = r.posterior_mean.array() - 1.0;
  r.ci_upper = r.posterior_mean.array() + 1.0;
  r.support.assign(means.size(), true);
  r.thresholded_estimate = r.posterior_mean;
  return r;
}

}  // namespace

TEST_CASE("threshold scale", "[selection]") {
  CHECK(threshold_scale(50, 50, 0.1) == 1.0);
  CHECK(threshold_scale(50, 50, 0.4) == 1.0);
  CHECK_THAT(threshold_scale(100, 10, 0.1), WithinAbs(0.398107, 1e-6));
  double prev = 2.0;
  for (double n : {20.0, 100.0, 1e3, 1e5, 1e8}) {
    const double e = threshold_scale(n, 10, 0.2);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-2);
  CHECK_THROWS_AS(threshold_scale(100, 10, 0.0), UsageError);
  CHECK_THROWS_AS(threshold_scale(100, 10, 0.5), UsageError);
  CHECK_THROWS_AS(threshold_scale(10, 100, 0.2), UsageError);
}

TEST_CASE("summarize", "[selection]") {
  SECTION("constant chain") {
    const SelectionReport r = summarize(chain_of(std::vector<std::vector<double>>(20, {1.5, -2.0})));
    CHECK(r.ci_lower(0) == 1.5);
    CHECK(r.ci_upper(0) == 1.5);
    CHECK(r.ci_lower(1) == -2.0);
    CHECK(r.posterior_mean(1) == -2.0);
  }
  SECTION("normal draws give the 1.96 interval") {
    Rng rng(1);
    std::vector<std::vector<double>> rows(100000);
    for (auto& r : rows) r = {rng.normal()};
    const SelectionReport rep = summarize(chain_of(rows));
    CHECK_THAT(rep.ci_lower(0), WithinAbs(-1.96, 0.1));
    CHECK_THAT(rep.ci_upper(0), WithinAbs(1.96, 0.1));
  }
  SECTION("quantiles interpolate order statistics") {
    // 11 values: the 2.5% point sits at h = 10 * 0.025 = 0.25.
    std::vector<std::vector<double>> rows;
    for (double v : {7.0, 1.0, 4.0, 9.0, 3.0, 0.0, 8.0, 2.0, 6.0, 5.0, 10.0}) rows.push_back({v});
    const SelectionReport rep = summarize(chain_of(rows));
    CHECK_THAT(rep.ci_lower(0), WithinAbs(0.25, 1e-15));
    CHECK_THAT(rep.ci_upper(0), WithinAbs(9.75, 1e-15));
    CHECK_THAT(rep.posterior_mean(0), WithinAbs(5.0, 1e-15));
  }
  SECTION("empty chain") { CHECK_THROWS_AS(summarize(Chain{}), DataError); }
}

TEST_CASE("apply_threshold", "[selection]") {
  const SelectionReport r = apply_threshold(report_of({3.0, 0.1, -0.5}), 0.2);
  CHECK(r.cutoff == 0.2);
  CHECK(r.support == std::vector<bool>{true, false, true});
  CHECK(r.thresholded_estimate(0) == 3.0);
  CHECK(r.thresholded_estimate(1) == 0.0);
  CHECK(r.thresholded_estimate(2) == -0.5);

  const SelectionReport none = apply_threshold(report_of({3.0, 0.1, -0.5}), 10.0);
  CHECK(none.thresholded_estimate.isZero(0.0));

  SECTION("equality is not selected") {
    CHECK_FALSE(apply_threshold(report_of({0.2}), 0.2).support[0]);
  }
  SECTION("idempotent") {
    const SelectionReport twice = apply_threshold(r, 0.2);
    CHECK(twice.support == r.support);
    CHECK(twice.thresholded_estimate == r.thresholded_estimate);
  }
  SECTION("support shrinks as the cutoff grows") {
    const SelectionReport base = report_of({3.0, 0.1, -0.5, 0.3, -1.2, 0.05});
    std::vector<bool> prev(6, true);
    for (double c : {0.01, 0.08, 0.2, 0.4, 1.0, 2.0, 5.0}) {
      const auto s = apply_threshold(base, c).support;
      for (std::size_t j = 0; j < 6; ++j) CHECK((!s[j] || prev[j]));
      prev = s;
    }
  }
  CHECK_THROWS_AS(apply_threshold(r, 0.0), UsageError);
  CHECK(threshold_vector(Vector::Constant(2, 0.3), 0.3).isZero(0.0));
}

TEST_CASE("report invariants hold for a real chain", "[selection]") {
  const Dataset d = gen_mean_data({150, 6, 0.3, 4});
  SamplerConfig cfg;
  cfg.n_iter = 2000;
  const SelectionReport r = apply_threshold(summarize(run_chain(d, PriorSpec{}, cfg, Mode::mean)), 0.2);
  for (Eigen::Index j = 0; j < 6; ++j) {
    CHECK(r.ci_lower(j) <= r.posterior_mean(j));
    CHECK(r.posterior_mean(j) <= r.ci_upper(j));
    CHECK(r.support[static_cast<std::size_t>(j)] == (std::abs(r.posterior_mean(j)) > 0.2));
  }
}

TEST_CASE("default cutoff grid", "[selection]") {
  Vector ref(3);
  ref << 0.5, -4.0, 1.0;
  const auto g = default_cutoff_grid(ref);
  REQUIRE(g.size() == 50);
  CHECK_THAT(g.front(), WithinRel(4e-3, 1e-12));
  CHECK_THAT(g.back(), WithinRel(4.0, 1e-12));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK_THAT(g[k] / g[k - 1], WithinRel(g[1] / g[0], 1e-9));
}

TEST_CASE("cross-validated cutoff", "[selection]") {
  SamplerConfig cfg;
  cfg.n_iter = 600;
  cfg.seed = 3;

  SECTION("a one-point grid is returned as is") {
    Dataset d = gen_regression_data({Scenario::A, 80, 5, 2});
    center(d);
    CvOptions opt;
    opt.n_iter = 400;
    opt.grid = {0.7};
    CHECK(cv_cutoff(d, PriorSpec{}, cfg, opt).cutoff == 0.7);
  }
  SECTION("nearly noiseless data pick the largest cutoff below the signal") {
    Rng rng(6);
    Matrix X(100, 4);
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 4; ++j) X(i, j) = rng.normal();
    Vector beta = Vector::Zero(4);
    beta(0) = 5.0;
    Vector y = X * beta;
    for (int i = 0; i < 100; ++i) y(i) += 1e-3 * rng.normal();
    Dataset d(X, y);
    center(d);
    CvOptions opt;
    opt.n_iter = 600;
    opt.grid = {0.5, 1.0, 2.0, 4.0, 6.0};
    const CvResult r = cv_cutoff(d, PriorSpec{}, cfg, opt);
    CHECK(r.cutoff == 4.0);
    CHECK(r.cv_error.back() > 100.0 * r.cv_error.front());
  }
  SECTION("schedule independent") {
    Dataset d = gen_regression_data({Scenario::B, 100, 5, 8});
    center(d);
    CvOptions a;
    a.n_iter = 400;
    a.jobs = 1;
    CvOptions b = a;
    b.jobs = 3;
    const CvResult ra = cv_cutoff(d, PriorSpec{}, cfg, a);
    const CvResult rb = cv_cutoff(d, PriorSpec{}, cfg, b);
    CHECK(ra.cutoff == rb.cutoff);
    CHECK(ra.cv_error == rb.cv_error);
    CHECK(ra.grid.size() == 50);
  }
  SECTION("invalid setups") {
    Dataset d = gen_regression_data({Scenario::A, 60, 5, 2});
    CvOptions opt;
    opt.folds = 1;
    CHECK_THROWS_AS(cv_cutoff(d, PriorSpec{}, cfg, opt), UsageError);
    opt.folds = 40;
    CHECK_THROWS_AS(cv_cutoff(d, PriorSpec{}, cfg, opt), DataError);
    CHECK_THROWS_AS(cv_cutoff(Dataset(d.X), PriorSpec{}, cfg, CvOptions{}), DataError);
  }
}

TEST_CASE("CV recovers the Scenario A support", "[selection][slow]") {
  // All five active coefficients selected in at least 18 of 20 replicates.
  int hits = 0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    Dataset d = gen_regression_data({Scenario::A, 500, 10, 1000 + r});
    center(d);
    SamplerConfig cfg;
    cfg.n_iter = 2000;
    cfg.seed = 50 + r;
    CvOptions opt;
    opt.n_iter = 1000;
    const double cutoff = cv_cutoff(d, PriorSpec{}, cfg, opt).cutoff;
    const SelectionReport rep = apply_threshold(summarize(run_chain(d, PriorSpec{}, cfg, Mode::regression)), cutoff);
    hits += std::all_of(rep.support.begin(), rep.support.begin() + 5, [](bool b) { return b; });
  }
  CHECK(hits >= 18);
}
