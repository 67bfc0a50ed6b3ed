#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fisher/market.hpp"

namespace fisher {

// Parameter bundle for the entropy-smoothed objective F_delta on the
// eta-relaxed log-price box.
struct SmoothedObjective {
  double delta = 0.0;   // entropy weight
  double eta = 0.0;     // box relaxation radius
  double L = 0.0;       // smoothness modulus: exp(mu_upper+eta) + ||B||_1/delta
  double sigma = 0.0;   // strong convexity modulus: exp(mu_lower-eta)
  double q = 0.0;       // sigma / L
};

inline SmoothedObjective make_smoothed(const MarketInstance& inst, const PriceBounds& b,
                                       double delta, double eta) {
  SmoothedObjective s;
  s.delta = delta;
  s.eta = eta;
  s.L = std::exp(b.mu_upper + eta) + inst.budget_total() / delta;
  s.sigma = std::exp(b.mu_lower - eta);
  s.q = s.sigma / s.L;
  return s;
}

// Softmax demand at temperature delta: d_ij = B_i * w_ij with w the buyer's
// weight over goods (and the outside option for quasi-linear buyers).
// Weight rows sum to 1 over goods plus d0/B_i.
struct DemandWeights {
  std::vector<double> d;   // n x m, row-major
  std::vector<double> d0;  // per-buyer outside mass (zero for linear kind)
  int n = 0;
  int m = 0;

  double at(int i, int j) const { return d[std::size_t(i) * m + j]; }
};

// Per-buyer active index sets J_i over goods 0..m-1 plus outside_index()=m
// for quasi-linear buyers; h holds the max values alongside.
struct IndexFamily {
  std::vector<std::vector<int>> sets;
  std::vector<double> h;
};

// Coordinate-wise clamp to [lo, hi].
inline std::vector<double> project_box(std::vector<double> mu, double lo, double hi) {
  for (double& x : mu) x = std::max(lo, std::min(x, hi));
  return mu;
}

// h_i(mu) = max over active indices of log(v_ij) - mu_j; zero-valuation
// pairs are excluded outright, the outside option contributes exactly 0.
inline double buyer_best(const MarketInstance& inst, const std::vector<double>& mu, int i) {
  double best = inst.quasi_linear() ? 0.0 : -kInf;
  const int m = inst.goods();
  for (int j = 0; j < m; ++j) {
    if (inst.value(i, j) <= 0.0) continue;
    best = std::max(best, inst.log_value(i, j) - mu[j]);
  }
  return best;
}

// F(mu) = sum_j exp(mu_j) + sum_i B_i h_i(mu).
inline double eval_F(const MarketInstance& inst, const std::vector<double>& mu) {
  double total = 0.0;
  for (int j = 0; j < inst.goods(); ++j) total += std::exp(mu[j]);
  for (int i = 0; i < inst.buyers(); ++i) total += inst.budget(i) * buyer_best(inst, mu, i);
  return total;
}

// F_delta(mu): the max terms replaced by a temperature-delta log-sum-exp,
// computed with a max shift.  Exponents more than 745*delta below the max
// underflow to exact zero, so saturated entries are skipped.
inline double eval_F_delta(const MarketInstance& inst, const SmoothedObjective& smooth,
                           const std::vector<double>& mu) {
  const int m = inst.goods();
  const double delta = smooth.delta;
  double total = 0.0;
  for (int j = 0; j < m; ++j) total += std::exp(mu[j]);
  for (int i = 0; i < inst.buyers(); ++i) {
    const double h = buyer_best(inst, mu, i);
    const double cutoff = h - 745.0 * delta;
    double acc = 0.0;
    if (inst.quasi_linear() && 0.0 >= cutoff) acc += std::exp(-h / delta);
    for (int j = 0; j < m; ++j) {
      if (inst.value(i, j) <= 0.0) continue;
      const double z = inst.log_value(i, j) - mu[j];
      if (z < cutoff) continue;
      acc += std::exp((z - h) / delta);
    }
    total += inst.budget(i) * (h + delta * std::log(acc));
  }
  return total;
}

// grad_j F_delta = exp(mu_j) - sum_i d_ij.  Demand weights are returned on
// request so allocation extraction can reuse them.
inline void grad_F_delta(const MarketInstance& inst, const SmoothedObjective& smooth,
                         const std::vector<double>& mu, std::vector<double>& grad,
                         DemandWeights* weights = nullptr) {
  const int n = inst.buyers();
  const int m = inst.goods();
  const double delta = smooth.delta;
  grad.assign(m, 0.0);
  for (int j = 0; j < m; ++j) grad[j] = std::exp(mu[j]);
  if (weights) {
    weights->n = n;
    weights->m = m;
    weights->d.assign(std::size_t(n) * m, 0.0);
    weights->d0.assign(n, 0.0);
  }

  std::vector<double> expz(m);
  for (int i = 0; i < n; ++i) {
    const double h = buyer_best(inst, mu, i);
    const double cutoff = h - 745.0 * delta;
    double acc = 0.0;
    double e0 = 0.0;
    if (inst.quasi_linear() && 0.0 >= cutoff) {
      e0 = std::exp(-h / delta);
      acc += e0;
    }
    for (int j = 0; j < m; ++j) {
      double e = 0.0;
      if (inst.value(i, j) > 0.0) {
        const double z = inst.log_value(i, j) - mu[j];
        if (z >= cutoff) e = std::exp((z - h) / delta);
      }
      expz[j] = e;
      acc += e;
    }
    const double scale = inst.budget(i) / acc;
    for (int j = 0; j < m; ++j) {
      if (expz[j] == 0.0) continue;
      const double dij = scale * expz[j];
      grad[j] -= dij;
      if (weights) weights->d[std::size_t(i) * m + j] = dij;
    }
    if (weights) weights->d0[i] = scale * e0;
  }
}

inline std::vector<double> grad_F_delta(const MarketInstance& inst,
                                        const SmoothedObjective& smooth,
                                        const std::vector<double>& mu) {
  std::vector<double> g;
  grad_F_delta(inst, smooth, mu, g);
  return g;
}

// Argmax sets with tie tolerance 1e-12*(1+|h_i|); an exact tie is
// measure-zero in floats, so near-ties count as active.
inline IndexFamily argmax_sets(const MarketInstance& inst, const std::vector<double>& mu) {
  const int n = inst.buyers();
  const int m = inst.goods();
  IndexFamily fam;
  fam.sets.resize(n);
  fam.h.resize(n);
  for (int i = 0; i < n; ++i) {
    const double h = buyer_best(inst, mu, i);
    const double tol = 1e-12 * (1.0 + std::fabs(h));
    auto& set = fam.sets[i];
    for (int j = 0; j < m; ++j) {
      if (inst.value(i, j) <= 0.0) continue;
      if (inst.log_value(i, j) - mu[j] >= h - tol) set.push_back(j);
    }
    if (inst.quasi_linear() && 0.0 >= h - tol) set.push_back(inst.outside_index());
    fam.h[i] = h;
  }
  return fam;
}

// Equal-split subgradient: the delta->0 limit of grad F_delta.
inline std::vector<double> subgrad_F(const MarketInstance& inst, const std::vector<double>& mu) {
  const int m = inst.goods();
  std::vector<double> g(m);
  for (int j = 0; j < m; ++j) g[j] = std::exp(mu[j]);
  IndexFamily fam = argmax_sets(inst, mu);
  for (int i = 0; i < inst.buyers(); ++i) {
    const auto& set = fam.sets[i];
    const double share = inst.budget(i) / double(set.size());
    for (int j : set)
      if (j < m) g[j] -= share;
  }
  return g;
}

inline double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace fisher
