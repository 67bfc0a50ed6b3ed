#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "fisher/objective.hpp"

namespace fisher {

// Smallest log bang-per-buck gap between any buyer's best and second-best
// choices at mu.  +inf when every buyer's complement set is empty.
inline double gap_Delta(const MarketInstance& inst, const std::vector<double>& mu) {
  const int m = inst.goods();
  IndexFamily fam = argmax_sets(inst, mu);
  double gap = kInf;
  for (int i = 0; i < inst.buyers(); ++i) {
    const auto& set = fam.sets[i];
    double second = -kInf;
    bool outside_active = false;
    std::vector<char> in_set(m, 0);
    for (int j : set) {
      if (j < m)
        in_set[j] = 1;
      else
        outside_active = true;
    }
    for (int j = 0; j < m; ++j) {
      if (in_set[j] || inst.value(i, j) <= 0.0) continue;
      second = std::max(second, inst.log_value(i, j) - mu[j]);
    }
    if (inst.quasi_linear() && !outside_active) second = std::max(second, 0.0);
    gap = std::min(gap, fam.h[i] - second);  // -inf second => +inf gap
  }
  return gap;
}

// J_i = { j : log(v_ij) - mu_j >= h_i(mu) - 2r }, closed set, so the
// comparison carries a 1e-12 absolute slack.  Equals the optimal active
// sets whenever ||mu - mu*|| <= r and 4r < Delta*.
inline IndexFamily relaxed_active_sets(const MarketInstance& inst,
                                       const std::vector<double>& mu, double r) {
  const int n = inst.buyers();
  const int m = inst.goods();
  IndexFamily fam;
  fam.sets.resize(n);
  fam.h.resize(n);
  for (int i = 0; i < n; ++i) {
    const double h = buyer_best(inst, mu, i);
    const double threshold = h - 2.0 * r - 1e-12;
    auto& set = fam.sets[i];
    for (int j = 0; j < m; ++j) {
      if (inst.value(i, j) <= 0.0) continue;
      if (inst.log_value(i, j) - mu[j] >= threshold) set.push_back(j);
    }
    if (inst.quasi_linear() && 0.0 >= threshold) set.push_back(inst.outside_index());
    fam.h[i] = h;
  }
  return fam;
}

// Traversal record of one connection class: the seed buyer, the checked
// indices in order, and the buyers newly incorporated at each check.  The
// solution procedure consumes this order.
struct ClassTraversal {
  int seed = -1;
  std::vector<int> checked;
  std::vector<std::vector<int>> new_buyers;
};

struct ConnectionPartition {
  std::vector<std::vector<int>> class_members;  // buyer classes I_l, partition of [n]
  std::vector<std::vector<int>> class_unions;   // index unions J~_l, pairwise disjoint
  std::vector<ClassTraversal> traversal;
};

// Classification procedure: grow each class by checking indices of the
// running union against the unclassified buyers.  Cost O((m+n)^2) via the
// per-index buyer lists.
inline ConnectionPartition classify(const MarketInstance& inst, const IndexFamily& fam) {
  const int n = int(fam.sets.size());
  const int width = inst.goods() + 1;  // goods plus outside slot

  std::vector<std::vector<int>> buyers_with(width);
  for (int i = 0; i < n; ++i)
    for (int j : fam.sets[i]) buyers_with[j].push_back(i);

  std::vector<char> classified(n, 0);
  std::vector<char> in_union(width, 0);
  ConnectionPartition part;

  for (int seed = 0; seed < n; ++seed) {
    if (classified[seed]) continue;
    classified[seed] = 1;
    ClassTraversal trav;
    trav.seed = seed;
    std::vector<int> members{seed};
    std::vector<int> uni;
    std::deque<int> pending;
    for (int j : fam.sets[seed]) {
      in_union[j] = 1;
      uni.push_back(j);
      pending.push_back(j);
    }
    while (!pending.empty()) {
      int j = pending.front();
      pending.pop_front();
      std::vector<int> incorporated;
      for (int i : buyers_with[j]) {
        if (classified[i]) continue;
        classified[i] = 1;
        incorporated.push_back(i);
        members.push_back(i);
        for (int jj : fam.sets[i]) {
          if (in_union[jj]) continue;
          in_union[jj] = 1;
          uni.push_back(jj);
          pending.push_back(jj);
        }
      }
      trav.checked.push_back(j);
      trav.new_buyers.push_back(std::move(incorporated));
    }
    for (int j : uni) in_union[j] = 0;
    std::sort(uni.begin(), uni.end());
    part.class_members.push_back(std::move(members));
    part.class_unions.push_back(std::move(uni));
    part.traversal.push_back(std::move(trav));
  }
  return part;
}

// Solution procedure: propagate within-class log-valuation offsets along the
// traversal, then anchor each class either at the outside option (price 1)
// or at its budget equation.  Exact up to log/exp rounding.
inline std::vector<double> solve_classes(const MarketInstance& inst,
                                         const ConnectionPartition& part,
                                         const IndexFamily& fam) {
  const int m = inst.goods();
  const int outside = inst.outside_index();
  std::vector<double> mu(m, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> a(m + 1, 0.0);
  std::vector<char> done(m + 1, 0);

  std::vector<char> covered(m, 0);
  for (const auto& uni : part.class_unions)
    for (int j : uni)
      if (j < m) covered[j] = 1;
  for (int j = 0; j < m; ++j)
    if (!covered[j])
      throw Error(ErrorCode::MissingGood,
                  "good " + std::to_string(j) + " appears in no active set");

  auto log_val = [&](int i, int j) { return j == outside ? 0.0 : inst.log_value(i, j); };

  for (std::size_t l = 0; l < part.class_members.size(); ++l) {
    const auto& trav = part.traversal[l];
    const auto& uni = part.class_unions[l];
    const int seed = trav.seed;
    const int j1 = trav.checked.empty() ? fam.sets[seed].front() : trav.checked.front();

    for (int j : uni) done[j] = 0;
    for (int j : fam.sets[seed]) {
      a[j] = log_val(seed, j) - log_val(seed, j1);
      done[j] = 1;
    }
    for (std::size_t t = 0; t < trav.checked.size(); ++t) {
      const int jt = trav.checked[t];
      for (int i : trav.new_buyers[t]) {
        for (int j : fam.sets[i]) {
          if (done[j]) continue;
          a[j] = a[jt] + log_val(i, j) - log_val(i, jt);
          done[j] = 1;
        }
      }
    }

    bool has_outside = !uni.empty() && uni.back() == outside;
    double base;
    if (has_outside) {
      base = -a[outside];
    } else {
      double budget_sum = 0.0;
      for (int i : part.class_members[l]) budget_sum += inst.budget(i);
      double amax = -kInf;
      for (int j : uni) amax = std::max(amax, a[j]);
      double acc = 0.0;
      for (int j : uni) acc += std::exp(a[j] - amax);
      base = std::log(budget_sum) - (amax + std::log(acc));
    }
    for (int j : uni)
      if (j < m) mu[j] = base + a[j];
  }
  return mu;
}

struct RecoveryResult {
  bool recovered = false;
  std::vector<double> mu;  // finite in every coordinate when recovered
};

// Recovery oracle: relaxed active sets -> classification -> closed-form
// solve.  Returns mu* exactly whenever ||mu - mu*|| <= r and 4r < Delta*;
// an uncovered good yields NotCovered (the caller keeps iterating).
inline RecoveryResult recover(const MarketInstance& inst, const std::vector<double>& mu,
                              double r) {
  const int m = inst.goods();
  IndexFamily fam = relaxed_active_sets(inst, mu, r);
  std::vector<char> covered(m, 0);
  for (const auto& set : fam.sets)
    for (int j : set)
      if (j < m) covered[j] = 1;
  for (int j = 0; j < m; ++j)
    if (!covered[j]) return {};

  ConnectionPartition part = classify(inst, fam);
  RecoveryResult res;
  res.mu = solve_classes(inst, part, fam);
  res.recovered = true;
  for (double x : res.mu)
    if (!std::isfinite(x)) return {};
  return res;
}

}  // namespace fisher
