#pragma once

// Deterministic randomness. All variate transforms are written out by hand
// on top of a fixed 64-bit engine so that streams reproduce bit-for-bit
// across platforms and standard-library versions; std::uniform_real_distribution
// and friends make no such promise.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mixcirc {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent stream `stream` of a master seed. Derivations can be nested
// (per replicate, then per start) without the streams colliding.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Uniform on [0, 1) with 53 random mantissa bits.
inline double runif(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double runif(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * runif(rng);
}

// Standard normal via Box-Muller (one variate per call, no cached spare).
inline double rnorm(Rng& rng) {
  double u1;
  do {
    u1 = runif(rng);
  } while (u1 == 0.0);
  const double u2 = runif(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Gamma(shape, 1) by Marsaglia-Tsang squeeze; requires shape >= 1.
inline double rgamma(Rng& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rnorm(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = runif(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Symmetric Dirichlet(alpha) of dimension k via normalized gammas.
inline std::vector<double> rdirichlet(Rng& rng, double alpha, int k) {
  std::vector<double> w(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& wi : w) {
    wi = rgamma(rng, alpha);
    total += wi;
  }
  for (double& wi : w) wi /= total;
  return w;
}

}  // namespace mixcirc
