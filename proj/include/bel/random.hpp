#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bel {

// splitmix64 finalizer; used to derive independent stream seeds from a
// master seed and a stream index.
inline std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix_seed(mix_seed(master) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

// Random source for one chain or one generator task. Holds its own
// distribution objects so cached normal pairs stay with the engine.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unif_(engine_); }
  // Uniform on the open interval (0, 1).
  double uniform_open() {
    double u;
    do {
      u = unif_(engine_);
    } while (u <= 0.0);
    return u;
  }
  double normal() { return norm_(engine_); }
  double chisq1() {
    double z = norm_(engine_);
    return z * z;
  }
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> g(shape, 1.0 / rate);
    return g(engine_);
  }
  // Uniform integer on [0, n).
  std::size_t index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace bel
