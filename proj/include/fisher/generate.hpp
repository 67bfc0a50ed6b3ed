#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fisher/market.hpp"

namespace fisher {

enum class Dist { Uniform01, IntegerUniform, Exponential, LogNormal };

inline const char* dist_name(Dist d) {
  switch (d) {
    case Dist::Uniform01: return "uniform";
    case Dist::IntegerUniform: return "integer";
    case Dist::Exponential: return "exponential";
    case Dist::LogNormal: return "lognormal";
  }
  return "unknown";
}

struct GenSpec {
  Kind kind = Kind::Linear;
  int n = 1;
  int m = 1;
  Dist dist = Dist::Uniform01;
  int integer_max = 10;  // IntegerUniform draws from 1..integer_max
  std::uint64_t seed = 0;
};

namespace detail {

// Sampling is hand-rolled on top of the engine's raw bits so generated
// instances are reproducible independent of library distribution internals.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    return double(eng_() >> 11) * 0x1.0p-53;
  }

  double draw(Dist dist, int integer_max) {
    switch (dist) {
      case Dist::Uniform01:
        return uniform01();
      case Dist::IntegerUniform: {
        double u = uniform01();
        int v = 1 + int(u * integer_max);
        return double(std::min(v, integer_max));
      }
      case Dist::Exponential:
        return -std::log(1.0 - uniform01());
      case Dist::LogNormal: {
        // Box-Muller from two fresh uniforms
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return std::exp(z);
      }
    }
    return 0.0;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace detail

// Deterministic instance generation; zero rows/columns are resampled so the
// result always passes validation.  Budgets follow the equal income setting.
inline MarketInstance generate(const GenSpec& spec) {
  detail::Sampler sampler(spec.seed);
  const int n = spec.n, m = spec.m;
  std::vector<double> v(std::size_t(n) * m);
  for (auto& x : v) x = sampler.draw(spec.dist, spec.integer_max);

  for (int pass = 0; pass < 64; ++pass) {
    bool fixed = false;
    for (int i = 0; i < n; ++i) {
      bool any = false;
      for (int j = 0; j < m; ++j) any = any || v[std::size_t(i) * m + j] > 0.0;
      if (!any) {
        for (int j = 0; j < m; ++j) v[std::size_t(i) * m + j] = sampler.draw(spec.dist, spec.integer_max);
        fixed = true;
      }
    }
    for (int j = 0; j < m; ++j) {
      bool any = false;
      for (int i = 0; i < n; ++i) any = any || v[std::size_t(i) * m + j] > 0.0;
      if (!any) {
        for (int i = 0; i < n; ++i) v[std::size_t(i) * m + j] = sampler.draw(spec.dist, spec.integer_max);
        fixed = true;
      }
    }
    if (!fixed) break;
  }

  return MarketInstance(spec.kind, std::move(v), std::vector<double>(n, 1.0), n, m);
}

}  // namespace fisher
