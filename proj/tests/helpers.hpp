#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fisher/fisher.hpp"

namespace testutil {

// Deterministic test randomness, independent of library sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    double u = double(eng_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + int(uniform() * (hi - lo + 1) * (1.0 - 1e-16));
  }

  double normal() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

inline fisher::MarketInstance random_instance(Rng& rng, int n, int m,
                                              fisher::Kind kind = fisher::Kind::Linear,
                                              fisher::Dist dist = fisher::Dist::Uniform01) {
  fisher::GenSpec spec;
  spec.kind = kind;
  spec.n = n;
  spec.m = m;
  spec.dist = dist;
  spec.seed = rng.raw();
  return fisher::generate(spec);
}

inline std::vector<double> random_mu(Rng& rng, const fisher::PriceBounds& b, int m,
                                     double eta = 0.0) {
  std::vector<double> mu(m);
  for (int j = 0; j < m; ++j) mu[j] = rng.uniform(b.mu_lower - eta, b.mu_upper + eta);
  return mu;
}

inline double linf(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace testutil
