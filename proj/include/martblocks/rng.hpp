#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

// Deterministic random draws for experiments and tests.
//
// The generator is splitmix64 (Steele, Lea, Vigna 2014): a 64-bit Weyl
// sequence pushed through a fixed finalizer. It is fully specified by the
// constants below, so a (seed, stream) pair produces the same draws on any
// platform; the standard <random> distributions make no such promise.

namespace martblocks {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream for trial t of a seeded run.
  static Rng stream(std::uint64_t seed, std::uint64_t t) {
    Rng r(seed ^ (0x9e3779b97f4a7c15ULL * (t + 1)));
    r.next();  // decorrelate nearby seeds
    return r;
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53-bit mantissa
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n), n >= 1; multiply-shift bound mapping
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  int range(int lo, int hi) {  // inclusive ends
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool coin(double p = 0.5) { return uniform() < p; }

  // standard exponential, inverse CDF
  double exponential() { return -std::log1p(-uniform()); }

  // standard normal, Box-Muller (one value per call keeps the stream simple)
  double normal() {
    double u = 1.0 - uniform();  // (0, 1]
    double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
  }

  // Dirichlet(1,...,1) via normalized exponentials; strictly positive parts
  std::vector<double> dirichlet(int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    double s = 0;
    for (auto& x : w) {
      x = exponential() + 1e-9;
      s += x;
    }
    for (auto& x : w) x /= s;
    return w;
  }

 private:
  std::uint64_t state_;
};

}  // namespace martblocks
