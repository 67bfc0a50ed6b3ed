#pragma once

#include <algorithm>
#include <queue>
#include <vector>

namespace fisher {

// Dinic's algorithm (BFS level graphs + DFS blocking flow) on real
// capacities.  Residual capacities below an absolute threshold derived from
// the total capacity mass count as saturated, which makes termination
// well-defined for doubles.  Deterministic given the arc insertion order.
class Dinic {
 public:
  explicit Dinic(int num_nodes) : head_(num_nodes, -1), level_(num_nodes), it_(num_nodes) {}

  int add_arc(int from, int to, double cap) {
    int id = int(to_.size());
    to_.push_back(to);
    next_.push_back(head_[from]);
    head_[from] = id;
    cap_.push_back(cap);
    to_.push_back(from);
    next_.push_back(head_[to]);
    head_[to] = id + 1;
    cap_.push_back(0.0);
    total_cap_ += cap;
    return id;
  }

  double solve(int s, int t) {
    eps_ = 1e-12 * std::max(total_cap_, 1.0);
    double flow = 0.0;
    while (bfs(s, t)) {
      it_ = head_;
      for (;;) {
        double pushed = dfs(s, t, kBig);
        if (pushed <= 0.0) break;
        flow += pushed;
      }
    }
    return flow;
  }

  // Flow on the forward arc with the given id (residual on its twin).
  double flow_on(int id) const { return cap_[id + 1]; }

 private:
  static constexpr double kBig = 1e300;

  bool bfs(int s, int t) {
    level_.assign(level_.size(), -1);
    std::queue<int> q;
    q.push(s);
    level_[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int e = head_[u]; e != -1; e = next_[e]) {
        if (cap_[e] > eps_ && level_[to_[e]] < 0) {
          level_[to_[e]] = level_[u] + 1;
          q.push(to_[e]);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double limit) {
    if (u == t) return limit;
    for (int& e = it_[u]; e != -1; e = next_[e]) {
      int v = to_[e];
      if (cap_[e] > eps_ && level_[v] == level_[u] + 1) {
        double pushed = dfs(v, t, std::min(limit, cap_[e]));
        if (pushed > 0.0) {
          cap_[e] -= pushed;
          cap_[e ^ 1] += pushed;
          return pushed;
        }
      }
    }
    level_[u] = -1;
    return 0.0;
  }

  std::vector<int> head_;
  std::vector<int> to_;
  std::vector<int> next_;
  std::vector<double> cap_;
  std::vector<int> level_;
  std::vector<int> it_;
  double total_cap_ = 0.0;
  double eps_ = 0.0;
};

}  // namespace fisher
