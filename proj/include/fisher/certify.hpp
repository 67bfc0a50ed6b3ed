#pragma once

#include <cmath>
#include <vector>

#include "fisher/maxflow.hpp"
#include "fisher/objective.hpp"

namespace fisher {

// Bipartite network for the optimality test: source -> good j (capacity
// exp(mu_j)), good j -> buyer i for j in J_i (capacity B_i), buyer i -> sink
// (capacity B_i).  A candidate mu is optimal iff the max flow saturates all
// source arcs.
struct FlowNetwork {
  struct Arc {
    int from;
    int to;
    double cap;
    int buyer = -1;  // set on good->buyer arcs
    int good = -1;
  };

  int n = 0;
  int m = 0;
  int source = 0;
  int sink = 0;
  std::vector<Arc> arcs;

  int good_node(int j) const { return 1 + j; }
  int buyer_node(int i) const { return 1 + m + i; }
  int num_nodes() const { return 2 + n + m; }
};

inline FlowNetwork build_network(const MarketInstance& inst, const std::vector<double>& mu,
                                 const IndexFamily& fam) {
  FlowNetwork net;
  net.n = inst.buyers();
  net.m = inst.goods();
  net.source = 0;
  net.sink = 1 + net.n + net.m;
  for (int j = 0; j < net.m; ++j)
    net.arcs.push_back({net.source, net.good_node(j), std::exp(mu[j]), -1, j});
  for (int i = 0; i < net.n; ++i)
    for (int j : fam.sets[i])
      if (j < net.m)
        net.arcs.push_back({net.good_node(j), net.buyer_node(i), inst.budget(i), i, j});
  for (int i = 0; i < net.n; ++i)
    net.arcs.push_back({net.buyer_node(i), net.sink, inst.budget(i), i, -1});
  return net;
}

struct MaxFlowResult {
  double value = 0.0;
  std::vector<double> arc_flows;  // parallel to FlowNetwork::arcs
};

inline MaxFlowResult max_flow(const FlowNetwork& net) {
  Dinic dinic(net.num_nodes());
  std::vector<int> ids;
  ids.reserve(net.arcs.size());
  for (const auto& a : net.arcs) ids.push_back(dinic.add_arc(a.from, a.to, a.cap));
  MaxFlowResult res;
  res.value = dinic.solve(net.source, net.sink);
  res.arc_flows.reserve(ids.size());
  for (int id : ids) res.arc_flows.push_back(dinic.flow_on(id));
  return res;
}

// Feasibility certificate for the stationarity system at a candidate mu.
// lambda is n x (m+1): column m holds the outside slack B_i - sum_j lambda_ij.
struct Certificate {
  double flow_value = 0.0;
  bool optimal = false;
  double tol = 0.0;
  std::vector<double> lambda;
  int n = 0;
  int m = 0;

  double lambda_at(int i, int j) const { return lambda[std::size_t(i) * (m + 1) + j]; }
};

inline Certificate test_optimality(const MarketInstance& inst, const std::vector<double>& mu,
                                   double tol = 1e-8) {
  const int n = inst.buyers();
  const int m = inst.goods();
  IndexFamily fam = argmax_sets(inst, mu);

  // Stationarity needs every source arc saturated and, for buyers whose
  // active set excludes the outside option, the full budget routed
  // (lambda_i0 = 0 is forced for them).  Both equalities become arc lower
  // bounds, handled by the usual super-source / super-sink transformation.
  const int source = 0, sink = 1 + n + m;
  const int super_s = sink + 1, super_t = sink + 2;
  auto good_node = [&](int j) { return 1 + j; };
  auto buyer_node = [&](int i) { return 1 + m + i; };

  Dinic dinic(super_t + 1);
  double supply = 0.0;
  for (int j = 0; j < m; ++j) {
    const double q = std::exp(mu[j]);
    supply += q;
    dinic.add_arc(super_s, good_node(j), q);
  }
  dinic.add_arc(source, super_t, supply);

  std::vector<int> lambda_arcs;
  std::vector<int> lambda_owner, lambda_good;
  double required = supply;
  for (int i = 0; i < n; ++i) {
    bool outside_active = !fam.sets[i].empty() && fam.sets[i].back() == inst.outside_index();
    for (int j : fam.sets[i]) {
      if (j >= m) continue;
      lambda_arcs.push_back(dinic.add_arc(good_node(j), buyer_node(i), inst.budget(i)));
      lambda_owner.push_back(i);
      lambda_good.push_back(j);
    }
    if (outside_active) {
      dinic.add_arc(buyer_node(i), sink, inst.budget(i));
    } else {
      dinic.add_arc(super_s, sink, inst.budget(i));
      dinic.add_arc(buyer_node(i), super_t, inst.budget(i));
      required += inst.budget(i);
    }
  }
  dinic.add_arc(sink, source, supply + inst.budget_total());

  const double value = dinic.solve(super_s, super_t);

  Certificate cert;
  cert.n = n;
  cert.m = m;
  cert.tol = tol;
  cert.optimal = value >= required - tol;
  cert.lambda.assign(std::size_t(n) * (m + 1), 0.0);
  std::vector<double> spent(n, 0.0);
  double routed = 0.0;
  for (std::size_t k = 0; k < lambda_arcs.size(); ++k) {
    const double f = dinic.flow_on(lambda_arcs[k]);
    cert.lambda[std::size_t(lambda_owner[k]) * (m + 1) + lambda_good[k]] = f;
    spent[lambda_owner[k]] += f;
    routed += f;
  }
  cert.flow_value = routed;
  for (int i = 0; i < n; ++i)
    cert.lambda[std::size_t(i) * (m + 1) + m] = inst.budget(i) - spent[i];
  return cert;
}

// Exact CE allocation from a passing certificate: x_ij = lambda_ij / p_j.
inline std::vector<double> exact_allocation(const MarketInstance& inst, const Certificate& cert,
                                            const std::vector<double>& mu) {
  if (!cert.optimal)
    throw Error(ErrorCode::NotCertified, "allocation requires a passing certificate");
  const int n = inst.buyers();
  const int m = inst.goods();
  std::vector<double> x(std::size_t(n) * m);
  for (int j = 0; j < m; ++j) {
    const double p = std::exp(mu[j]);
    for (int i = 0; i < n; ++i) x[std::size_t(i) * m + j] = cert.lambda_at(i, j) / p;
  }
  return x;
}

}  // namespace fisher
