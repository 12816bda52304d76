#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bel/baselines.hpp"
#include "bel/random.hpp"

using namespace bel;
using Catch::Matchers::WithinAbs;

namespace {

// One row whose column means are the given values.
Dataset means_of(std::initializer_list<double> xs) {
  Matrix X(2, static_cast<Eigen::Index>(xs.size()));
  Eigen::Index j = 0;
  for (double v : xs) {
    X(0, j) = v - 1.0;
    X(1, j) = v + 1.0;
    ++j;
  }
  return Dataset(X);
}

}  // namespace

TEST_CASE("soft and hard thresholding", "[baselines]") {
  const Dataset d = means_of({0.5, -0.1, 0.2, -0.7, 0.0});
  const Vector soft = soft_threshold_mean(d, 0.2);
  const Vector hard = hard_threshold_mean(d, 0.2);
  CHECK_THAT(soft(0), WithinAbs(0.3, 1e-15));
  CHECK(soft(1) == 0.0);
  CHECK(soft(2) == 0.0);
  CHECK_THAT(soft(3), WithinAbs(-0.5, 1e-15));
  CHECK(hard(0) == 0.5);
  CHECK(hard(2) == 0.0);
  CHECK(hard(3) == -0.7);
  for (Eigen::Index j = 0; j < 5; ++j) CHECK(std::abs(soft(j)) <= std::abs(hard(j)));

  const Vector xbar = d.X.colwise().mean().transpose();
  CHECK(soft_threshold_mean(d, 0.0) == xbar);
  CHECK(hard_threshold_mean(d, 0.0) == xbar);
  CHECK(hard_threshold_mean(d, 0.0)(4) == 0.0);
  CHECK_THROWS_AS(soft_threshold_mean(d, -1.0), UsageError);
  CHECK_THROWS_AS(hard_threshold_mean(d, -1.0), UsageError);
}

TEST_CASE("OLS", "[baselines]") {
  SECTION("noiseless data give exact coefficients and zero-width intervals") {
    Rng rng(1);
    Matrix X(40, 3);
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    const Vector beta = (Vector(3) << 1.0, -2.0, 0.5).finished();
    const OlsFit f = ols(Dataset(X, Vector(X * beta)));
    CHECK((f.beta - beta).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f.ci_upper - f.ci_lower).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(f.df == 37);
  }
  SECTION("hand-solvable 2x2 system") {
    // X = [[1,0],[0,1],[1,1]], y = (1,2,4): normal equations
    // [[2,1],[1,2]] b = (5,6) give b = (4/3, 7/3).
    Matrix X(3, 2);
    X << 1, 0, 0, 1, 1, 1;
    const OlsFit f = ols(Dataset(X, Vector((Vector(3) << 1, 2, 4).finished())));
    CHECK_THAT(f.beta(0), WithinAbs(4.0 / 3.0, 1e-14));
    CHECK_THAT(f.beta(1), WithinAbs(7.0 / 3.0, 1e-14));
    // residual (-1/3, -1/3, 1/3): sigma^2 = 1/3, diag((X'X)^-1) = 2/3,
    // t(0.975, 1) = 12.7062047361747.
    const double half = 12.706204736174707 * std::sqrt(2.0 / 9.0);
    CHECK_THAT(f.ci_upper(0) - f.beta(0), WithinAbs(half, 1e-10));
  }
  SECTION("residuals are orthogonal to the columns") {
    Rng rng(2);
    Matrix X(200, 5);
    Vector y(200);
    for (int i = 0; i < 200; ++i) {
      for (int j = 0; j < 5; ++j) X(i, j) = 100.0 * rng.normal();
      y(i) = rng.normal();
    }
    const OlsFit f = ols(Dataset(X, y));
    const Vector r = y - X * f.beta;
    CHECK((X.transpose() * r).cwiseAbs().maxCoeff() / (X.norm() * y.norm()) <= 1e-8);
  }
  SECTION("intervals cover at the nominal rate") {
    Rng rng(3);
    const Vector beta = (Vector(2) << 1.0, -1.0).finished();
    int covered = 0;
    const int R = 1000;
    for (int r = 0; r < R; ++r) {
      Matrix X(30, 2);
      Vector y(30);
      for (int i = 0; i < 30; ++i) {
        X(i, 0) = rng.normal();
        X(i, 1) = rng.normal();
        y(i) = X.row(i).dot(beta) + rng.normal();
      }
      const OlsFit f = ols(Dataset(X, y));
      covered += f.ci_lower(0) <= beta(0) && beta(0) <= f.ci_upper(0);
    }
    CHECK_THAT(covered / double(R), WithinAbs(0.95, 0.02));
  }
  SECTION("rank deficiency") {
    Matrix X(10, 2);
    for (int i = 0; i < 10; ++i) X(i, 0) = X(i, 1) = i;
    CHECK_THROWS_AS(ols(Dataset(X, Vector(Vector::Ones(10)))), NumericalError);
    CHECK_THROWS_AS(ols(Dataset(X)), DataError);
  }
}
