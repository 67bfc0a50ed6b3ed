#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "fisher/apm.hpp"
#include "fisher/objective.hpp"

namespace fisher {

enum class BaselineAlgo { AdditiveTatonnement, ProportionalResponse };

struct BaselineConfig {
  BaselineAlgo algo = BaselineAlgo::AdditiveTatonnement;
  double stepsize = 1e-4;  // tatonnement default; proportional response uses 1.0
  std::int64_t max_iters = 10'000'000;
  std::int64_t eval_every = 1;  // trace cadence
};

inline BaselineConfig tatonnement_config() { return {}; }

inline BaselineConfig proportional_response_config() {
  BaselineConfig c;
  c.algo = BaselineAlgo::ProportionalResponse;
  c.stepsize = 1.0;
  return c;
}

// Additive tatonnement in price space: raise the price of over-demanded
// goods, lower it otherwise, with the equal-split demand selection.  Prices
// are clamped to a slightly inflated price-bound box.  Stops at the supplied
// objective gap; exact CE is generally unreachable.
inline GapRunReport tatonnement_solve(const MarketInstance& inst, const PriceBounds& bounds,
                                      const BaselineConfig& config, double target_gap,
                                      double f_star, bool with_trace = false,
                                      std::optional<std::vector<double>> p0 = std::nullopt) {
  const int m = inst.goods();
  const double lo = bounds.p_lower * std::exp(-1.0);
  const double hi = bounds.p_upper * std::exp(1.0);

  std::vector<double> p(m, std::exp(0.5 * (bounds.mu_lower + bounds.mu_upper)));
  if (p0) p = std::move(*p0);
  for (double& x : p) x = std::max(lo, std::min(x, hi));

  GapRunReport rep;
  std::vector<double> mu(m);
  for (;;) {
    for (int j = 0; j < m; ++j) mu[j] = std::log(p[j]);
    const double gap = eval_F(inst, mu) - f_star;
    rep.final_gap = gap;
    std::vector<double> g = subgrad_F(inst, mu);
    if (with_trace && rep.iterations % config.eval_every == 0 &&
        detail::record_trace(rep.iterations))
      rep.trace.push_back({rep.iterations, gap + f_star, norm2(g)});
    if (gap <= target_gap) {
      rep.reached = true;
      break;
    }
    if (rep.iterations >= config.max_iters) break;
    // g_j = p_j - demand_j, so this is p + stepsize * excess demand
    for (int j = 0; j < m; ++j)
      p[j] = std::max(lo, std::min(p[j] - config.stepsize * g[j], hi));
    ++rep.iterations;
  }
  rep.mu = mu;
  return rep;
}

// Proportional response over bid vectors: prices are column sums of bids,
// allocations are bid shares, and each buyer re-splits the budget in
// proportion to realized utility.  Quasi-linear buyers carry an outside bid
// at fixed unit price so bid rows always sum to B_i.
inline GapRunReport proportional_response_solve(const MarketInstance& inst,
                                                const BaselineConfig& config, double target_gap,
                                                double f_star, bool with_trace = false) {
  const int n = inst.buyers();
  const int m = inst.goods();
  const bool quasi = inst.quasi_linear();

  std::vector<double> bids(std::size_t(n) * m, 0.0);
  std::vector<double> bid0(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double w = quasi ? 1.0 : 0.0;
    for (int j = 0; j < m; ++j) w += inst.value(i, j);
    for (int j = 0; j < m; ++j)
      bids[std::size_t(i) * m + j] = inst.budget(i) * inst.value(i, j) / w;
    if (quasi) bid0[i] = inst.budget(i) / w;
  }

  GapRunReport rep;
  std::vector<double> p(m), mu(m), util(n);
  for (;;) {
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += bids[std::size_t(i) * m + j];
      p[j] = s;
      mu[j] = std::log(s);
    }
    const double gap = eval_F(inst, mu) - f_star;
    rep.final_gap = gap;
    if (with_trace && rep.iterations % config.eval_every == 0 &&
        detail::record_trace(rep.iterations)) {
      std::vector<double> g = subgrad_F(inst, mu);
      rep.trace.push_back({rep.iterations, gap + f_star, norm2(g)});
    }
    if (gap <= target_gap) {
      rep.reached = true;
      break;
    }
    if (rep.iterations >= config.max_iters) break;

    for (int i = 0; i < n; ++i) {
      double u = quasi ? bid0[i] : 0.0;  // outside: v_i0 * x_i0 with x_i0 = b_i0
      for (int j = 0; j < m; ++j)
        u += inst.value(i, j) * bids[std::size_t(i) * m + j] / p[j];
      util[i] = u;
    }
    for (int i = 0; i < n; ++i) {
      const double scale = inst.budget(i) / util[i];
      for (int j = 0; j < m; ++j) {
        double x = bids[std::size_t(i) * m + j] / p[j];
        bids[std::size_t(i) * m + j] = scale * inst.value(i, j) * x;
      }
      if (quasi) bid0[i] = scale * bid0[i];
    }
    ++rep.iterations;
  }
  rep.mu = mu;
  return rep;
}

}  // namespace fisher
