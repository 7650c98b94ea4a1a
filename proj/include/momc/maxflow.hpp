#pragma once

#include <cstdint>
#include <vector>

namespace momc {

// Dinic max-flow on doubles.  Deterministic: edges are traversed in
// insertion order, so identical inputs give identical flows.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes);

  static constexpr double kInf = 1e30;
  // residuals below this are treated as saturated
  static constexpr double kEps = 1e-14;

  // returns the edge id; use it to query flow afterwards
  int add_edge(int from, int to, double cap);

  double solve(int s, int t);

  double flow_on(int edge_id) const;

  // nodes reachable from s in the residual graph of the last solve
  std::vector<uint8_t> min_cut_side(int s) const;

  void reset_caps(const std::vector<double>& caps);  // caps indexed by edge id

 private:
  struct Edge {
    int to;
    double cap;     // remaining residual
    double orig;    // capacity at solve time
  };
  bool bfs(int s, int t);
  double dfs(int v, int t, double limit);

  int n_;
  std::vector<Edge> edges_;           // edge 2k is forward, 2k+1 its reverse
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_, iter_;
};

}  // namespace momc
