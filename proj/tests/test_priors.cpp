#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "bel/priors.hpp"

using namespace bel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("SCAD derivative branches", "[priors]") {
  const double g = 0.8;
  CHECK(scad_derivative(0.5 * g, g) == g);
  CHECK(scad_derivative(g, g) == g);  // boundary uses the first branch
  CHECK(scad_derivative(3.7 * g, g) == 0.0);
  CHECK(scad_derivative(10.0, g) == 0.0);
  CHECK_THAT(scad_derivative(2.0 * g, g, 3.7), WithinRel(g * 1.7 / 2.7, 1e-14));
}

TEST_CASE("SCAD penalty closed form integrates the derivative", "[priors]") {
  const double g = 1.3, a = 3.7;
  CHECK(scad_penalty(0.0, g, a) == 0.0);
  CHECK_THAT(scad_penalty(g, g, a), WithinRel(g * g, 1e-14));
  CHECK_THAT(scad_penalty(100.0, g, a), WithinRel((a + 1) * g * g / 2, 1e-14));
  CHECK_THAT(scad_penalty(a * g, g, a), WithinRel((a + 1) * g * g / 2, 1e-12));

  // Trapezoid integration of the derivative as an independent check.
  for (double theta : {0.3, 1.0, 2.0, 3.5, 4.8, 6.0}) {
    const int m = 200000;
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
      const double t0 = theta * k / m, t1 = theta * (k + 1) / m;
      s += 0.5 * (scad_derivative(t0, g, a) + scad_derivative(t1, g, a)) * (t1 - t0);
    }
    CHECK_THAT(scad_penalty(theta, g, a), WithinAbs(s, 1e-6));
  }
}

TEST_CASE("SCAD never exceeds the LASSO penalty", "[priors]") {
  const double g = 0.9;
  double prev = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double t = 8.0 * k / 10000.0;
    const double pen = scad_penalty(t, g);
    CHECK(pen <= g * t + 1e-15);
    CHECK(pen >= prev - 1e-15);
    CHECK(scad_derivative(t, g) >= 0.0);
    prev = pen;
  }
}

TEST_CASE("local linear weights", "[priors]") {
  const double g = 1.0;
  Vector small(3);
  small << 0.1, -0.5, 0.99;
  CHECK(local_linear_weights(small, g) == Vector::Constant(3, g));

  Vector mixed(4);
  mixed << 0.5, -2.0, 3.7, 10.0;
  Vector w = local_linear_weights(mixed, g);
  CHECK(w(0) == g);
  CHECK_THAT(w(1), WithinRel(1.7 / 2.7, 1e-14));
  CHECK(w(2) == 0.0);
  CHECK(w(3) == 0.0);
}

TEST_CASE("conditional prior log density", "[priors]") {
  MixtureScales s{Vector::Constant(1, 1.0)};
  CHECK_THAT(log_conditional_prior(Vector::Constant(1, 1.0), s), WithinAbs(-0.5, 1e-15));

  MixtureScales s3{Vector(3)};
  s3.tau_sq << 0.5, 2.0, 4.0;
  CHECK_THAT(log_conditional_prior(Vector::Zero(3), s3),
             WithinAbs(-0.5 * (std::log(0.5) + std::log(2.0) + std::log(4.0)), 1e-14));

  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    Vector th(3);
    for (int j = 0; j < 3; ++j) th(j) = 2.0 * nd(gen);
    double direct = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double var = s3.tau_sq(j);
      direct += std::log(std::exp(-th(j) * th(j) / (2 * var)) / std::sqrt(2 * std::numbers::pi * var));
    }
    CHECK_THAT(log_conditional_prior(th, s3) - 1.5 * std::log(2 * std::numbers::pi),
               WithinAbs(direct, 1e-10));
  }
}

TEST_CASE("prior spec validation", "[priors]") {
  PriorSpec p;
  p.scad_a = 2.0;
  CHECK_THROWS_AS(p.validate(), UsageError);
  PriorSpec q;
  q.gamma_mode = GammaFixed{-1.0};
  CHECK_THROWS_AS(q.validate(), UsageError);
  PriorSpec r;
  r.gamma_mode = GammaHyperprior{0.0, 1.0};
  CHECK_THROWS_AS(r.validate(), UsageError);
}
