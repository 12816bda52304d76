#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "bel/dataset.hpp"
#include "bel/error.hpp"
#include "bel/random.hpp"

namespace bel {

// Mean-vector design: x_i = mu0 + Gamma^{1/2} (z_i - 1) with z_ij iid
// chi-square(1) and Gamma the equicorrelation matrix. The resulting
// covariance is 2 * Gamma because var(chi-square(1)) = 2.
struct MeanDesign {
  int n = 100;
  int p = 10;
  double rho = 0.3;
  std::uint64_t seed = 1;

  Vector mu0() const {
    Vector m = Vector::Zero(p);
    const double head[] = {3.0, 2.0, 1.0, 0.6, 0.3};
    for (int j = 0; j < 5 && j < p; ++j) m(j) = head[j];
    return m;
  }
  void validate() const {
    if (n < 2) throw UsageError("design.n must be at least 2");
    if (p < 5) throw UsageError("design.p must be at least 5");
    if (!(rho < 1.0 && rho > -1.0 / (p - 1)))
      throw UsageError("design.rho = " + std::to_string(rho) +
                       " does not give a positive definite equicorrelation matrix");
  }
};

enum class Scenario { A, B, C };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
  }
  return "?";
}

// Linear model y = X beta0 + eps with standard normal X.
//   A: eps ~ N(0, 9), beta0 head (1,2,3,4,5)
//   B: eps ~ 0.5 N(3,1) + 0.5 N(-3,1), beta0 head (1,2,3,4,5)
//   C: as B with beta0 head (0.3,0.6,3,4,5)
struct RegressionDesign {
  Scenario scenario = Scenario::A;
  int n = 100;
  int p = 10;
  std::uint64_t seed = 1;

  Vector beta0() const {
    Vector b = Vector::Zero(p);
    const double ab[] = {1.0, 2.0, 3.0, 4.0, 5.0};
    const double c[] = {0.3, 0.6, 3.0, 4.0, 5.0};
    const double* head = scenario == Scenario::C ? c : ab;
    for (int j = 0; j < 5 && j < p; ++j) b(j) = head[j];
    return b;
  }
  void validate() const {
    if (n < 2) throw UsageError("design.n must be at least 2");
    if (p < 5) throw UsageError("design.p must be at least 5");
  }
};

// Symmetric square root of the equicorrelation matrix in closed form,
// S = a I + b J, from its two eigenvalues.
inline Matrix equicorrelation_sqrt(int p, double rho) {
  if (p < 1) throw UsageError("dimension must be positive");
  const double big = 1.0 + (p - 1) * rho;  // eigenvalue along the ones vector
  const double small = 1.0 - rho;
  if (!(big > 0.0 && small > 0.0))
    throw UsageError("equicorrelation matrix with rho = " + std::to_string(rho) +
                     " is not positive definite");
  const double a = std::sqrt(small);
  const double b = (std::sqrt(big) - a) / p;
  return a * Matrix::Identity(p, p) + b * Matrix::Ones(p, p);
}

inline Dataset gen_mean_data(const MeanDesign& design) {
  design.validate();
  Rng rng(design.seed);
  const Matrix S = equicorrelation_sqrt(design.p, design.rho);
  const Vector mu0 = design.mu0();
  Matrix Z(design.n, design.p);
  for (int i = 0; i < design.n; ++i)
    for (int j = 0; j < design.p; ++j) Z(i, j) = rng.chisq1() - 1.0;
  Matrix X = Z * S;  // S is symmetric
  X.rowwise() += mu0.transpose();
  return Dataset(std::move(X));
}

inline Dataset gen_regression_data(const RegressionDesign& design) {
  design.validate();
  Rng rng(design.seed);
  Matrix X(design.n, design.p);
  for (int i = 0; i < design.n; ++i)
    for (int j = 0; j < design.p; ++j) X(i, j) = rng.normal();
  Vector eps(design.n);
  for (int i = 0; i < design.n; ++i) {
    if (design.scenario == Scenario::A) {
      eps(i) = 3.0 * rng.normal();
    } else {
      const double centre = rng.uniform() < 0.5 ? 3.0 : -3.0;
      eps(i) = centre + rng.normal();
    }
  }
  Vector y = X * design.beta0() + eps;
  return Dataset(std::move(X), std::move(y));
}

}  // namespace bel
