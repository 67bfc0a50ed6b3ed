#pragma once

// Independent reference implementations used only by tests.  Nothing here
// calls into the solver paths under test: the optimum oracle is brute-force
// grid refinement, the partition oracle is union-find, and the feasibility
// oracle is integer max flow over snapped capacities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>
#include <vector>

#include "fisher/fisher.hpp"

namespace oracle {

// Brute-force grid refinement of min F over the price-bound box.  The box
// translates toward boundary minima and shrinks around interior ones; the
// returned value is the best point ever evaluated.
inline double grid_fstar(const fisher::MarketInstance& inst, const fisher::PriceBounds& b,
                         double width_tol = 1e-11, int pts = 7, int max_rounds = 800) {
  const int m = inst.goods();
  const double full_lo = b.mu_lower, full_hi = b.mu_upper;
  double width = full_hi - full_lo;
  std::vector<double> lo(m, full_lo);
  std::vector<double> point(m);
  std::vector<int> idx(m);
  double best_val = fisher::kInf;
  std::vector<double> best_pt(m, 0.5 * (full_lo + full_hi));

  std::int64_t total = 1;
  for (int d = 0; d < m; ++d) total *= pts;

  if (width <= 0.0) {
    for (int d = 0; d < m; ++d) point[d] = full_lo;
    return fisher::eval_F(inst, point);
  }

  int stalled_translates = 0;
  for (int round = 0; round < max_rounds; ++round) {
    const double h = width / (pts - 1);
    const double prev_best = best_val;
    double round_best = fisher::kInf;
    std::vector<int> round_idx(m, 0);
    for (std::int64_t c = 0; c < total; ++c) {
      std::int64_t r = c;
      for (int d = 0; d < m; ++d) {
        idx[d] = int(r % pts);
        r /= pts;
        point[d] = lo[d] + idx[d] * h;
      }
      const double val = fisher::eval_F(inst, point);
      if (val < round_best) {
        round_best = val;
        round_idx = idx;
      }
      if (val < best_val) {
        best_val = val;
        best_pt = point;
      }
    }
    // a minimizer cell counts as boundary only where the box has real room
    // to move that way; a clamped translation would reproduce the same box
    bool movable_edge = false;
    for (int d = 0; d < m; ++d) {
      if (round_idx[d] == 0 && lo[d] > full_lo + 0.5 * h) movable_edge = true;
      if (round_idx[d] == pts - 1 && lo[d] + width < full_hi - 0.5 * h) movable_edge = true;
    }
    if (movable_edge && stalled_translates < 3) {
      stalled_translates = best_val < prev_best ? 0 : stalled_translates + 1;
      // walk the box toward the minimizer at the same width
      for (int d = 0; d < m; ++d) {
        double c = lo[d] + round_idx[d] * h;
        lo[d] = std::min(std::max(c - 0.5 * width, full_lo), full_hi - width);
      }
      continue;
    }
    stalled_translates = 0;
    // recenter on the best point seen and shrink with a two-cell margin
    double new_width = std::min(4.0 * h, width);
    for (int d = 0; d < m; ++d)
      lo[d] = std::min(std::max(best_pt[d] - 0.5 * new_width, full_lo), full_hi - new_width);
    width = new_width;
    if (width < width_tol) break;
  }
  return best_val;
}

// Central finite differences of F_delta.
inline std::vector<double> fd_gradient(const fisher::MarketInstance& inst,
                                       const fisher::SmoothedObjective& smooth,
                                       const std::vector<double>& mu) {
  std::vector<double> g(mu.size());
  std::vector<double> p = mu;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const double h = 1e-6 * (1.0 + std::fabs(mu[j]));
    p[j] = mu[j] + h;
    const double fp = fisher::eval_F_delta(inst, smooth, p);
    p[j] = mu[j] - h;
    const double fm = fisher::eval_F_delta(inst, smooth, p);
    p[j] = mu[j];
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Union-find transitive closure over buyers sharing any active index.
inline std::vector<std::vector<int>> union_find_classes(
    const std::vector<std::vector<int>>& sets, int width) {
  const int n = int(sets.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> first_owner(width, -1);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j : sets[i]) {
      if (first_owner[j] < 0)
        first_owner[j] = i;
      else
        parent[find(i)] = find(first_owner[j]);
    }
  std::vector<std::vector<int>> classes(n);
  for (int i = 0; i < n; ++i) classes[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& c : classes)
    if (!c.empty()) out.push_back(std::move(c));
  return out;
}

// Integer Edmonds-Karp max flow on an adjacency-matrix capacity graph.
// Exact for snapped capacities; small networks only.
inline std::int64_t int_max_flow(std::vector<std::vector<std::int64_t>> cap, int s, int t) {
  const int n = int(cap.size());
  std::int64_t flow = 0;
  for (;;) {
    std::vector<int> prev(n, -1);
    std::queue<int> q;
    q.push(s);
    prev[s] = s;
    while (!q.empty() && prev[t] < 0) {
      int u = q.front();
      q.pop();
      for (int v = 0; v < n; ++v)
        if (prev[v] < 0 && cap[u][v] > 0) {
          prev[v] = u;
          q.push(v);
        }
    }
    if (prev[t] < 0) break;
    std::int64_t aug = INT64_MAX;
    for (int v = t; v != s; v = prev[v]) aug = std::min(aug, cap[prev[v]][v]);
    for (int v = t; v != s; v = prev[v]) {
      cap[prev[v]][v] -= aug;
      cap[v][prev[v]] += aug;
    }
    flow += aug;
  }
  return flow;
}

// Rational-arithmetic feasibility oracle for the stationarity system at mu:
// capacities snapped to a 1e-9 grid, exact integer max flow with the arc
// lower bounds (saturated supply arcs; full budgets for buyers whose active
// set excludes the outside option) folded in through a super source/sink.
inline bool eq14_feasible(const fisher::MarketInstance& inst, const std::vector<double>& mu,
                          double tol) {
  const int n = inst.buyers();
  const int m = inst.goods();
  constexpr double kGrid = 1e9;

  // independent reimplementation of the active sets
  std::vector<std::vector<int>> sets(n);
  for (int i = 0; i < n; ++i) {
    double h = inst.quasi_linear() ? 0.0 : -fisher::kInf;
    for (int j = 0; j < m; ++j)
      if (inst.value(i, j) > 0.0) h = std::max(h, std::log(inst.value(i, j)) - mu[j]);
    const double tie = 1e-12 * (1.0 + std::fabs(h));
    for (int j = 0; j < m; ++j)
      if (inst.value(i, j) > 0.0 && std::log(inst.value(i, j)) - mu[j] >= h - tie)
        sets[i].push_back(j);
    if (inst.quasi_linear() && 0.0 >= h - tie) sets[i].push_back(m);
  }

  const int nodes = 4 + n + m;  // s, goods, buyers, t, super pair
  const int s = 0, t = 1 + n + m, ss = t + 1, tt = t + 2;
  auto good = [&](int j) { return 1 + j; };
  auto buyer = [&](int i) { return 1 + m + i; };
  std::vector<std::vector<std::int64_t>> cap(nodes, std::vector<std::int64_t>(nodes, 0));
  std::int64_t supply = 0;
  for (int j = 0; j < m; ++j) {
    cap[ss][good(j)] = std::llround(std::exp(mu[j]) * kGrid);
    supply += cap[ss][good(j)];
  }
  cap[s][tt] = supply;
  std::int64_t required = supply, budget_total = 0;
  for (int i = 0; i < n; ++i) {
    const std::int64_t bi = std::llround(inst.budget(i) * kGrid);
    budget_total += bi;
    bool outside_active = !sets[i].empty() && sets[i].back() == m;
    for (int j : sets[i])
      if (j < m) cap[good(j)][buyer(i)] = bi;
    if (outside_active) {
      cap[buyer(i)][t] = bi;
    } else {
      cap[ss][t] += bi;
      cap[buyer(i)][tt] = bi;
      required += bi;
    }
  }
  cap[t][s] = supply + budget_total;
  const std::int64_t flow = int_max_flow(std::move(cap), ss, tt);
  return flow >= required - std::llround(tol * kGrid);
}

// Optimal buyer utility at prices p (budget-constrained best bundle).
inline double best_utility_linear(const fisher::MarketInstance& inst, int i,
                                  const std::vector<double>& p) {
  double best = 0.0;
  for (int j = 0; j < inst.goods(); ++j)
    best = std::max(best, inst.value(i, j) / p[j]);
  return inst.budget(i) * best;
}

inline double best_utility_quasi(const fisher::MarketInstance& inst, int i,
                                 const std::vector<double>& p) {
  double best = 1.0;  // outside option: v=1 at price 1
  for (int j = 0; j < inst.goods(); ++j)
    best = std::max(best, inst.value(i, j) / p[j]);
  return inst.budget(i) * best - inst.budget(i);
}

inline double utility(const fisher::MarketInstance& inst, int i, const std::vector<double>& x,
                      const std::vector<double>& p) {
  double u = 0.0;
  for (int j = 0; j < inst.goods(); ++j) {
    const double xij = x[std::size_t(i) * inst.goods() + j];
    u += (inst.quasi_linear() ? inst.value(i, j) - p[j] : inst.value(i, j)) * xij;
  }
  return u;
}

// Golden-section minimum of a scalar convex function on [lo, hi].
template <typename F>
double golden_min(F f, double lo, double hi, double tol = 1e-13) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace oracle
