#include "momc/maxflow.hpp"

#include <algorithm>
#include <stdexcept>

namespace momc {

MaxFlow::MaxFlow(int nodes) : n_(nodes), adj_(nodes), level_(nodes), iter_(nodes) {}

int MaxFlow::add_edge(int from, int to, double cap) {
  const int id = int(edges_.size());
  edges_.push_back({to, cap, cap});
  edges_.push_back({from, 0.0, 0.0});
  adj_[from].push_back(id);
  adj_[to].push_back(id + 1);
  return id;
}

bool MaxFlow::bfs(int s, int t) {
  std::fill(level_.begin(), level_.end(), -1);
  std::vector<int> queue;
  queue.reserve(n_);
  queue.push_back(s);
  level_[s] = 0;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    const int v = queue[qi];
    for (int id : adj_[v]) {
      const Edge& e = edges_[id];
      if (e.cap > kEps && level_[e.to] < 0) {
        level_[e.to] = level_[v] + 1;
        queue.push_back(e.to);
      }
    }
  }
  return level_[t] >= 0;
}

double MaxFlow::dfs(int v, int t, double limit) {
  if (v == t) return limit;
  for (int& i = iter_[v]; i < int(adj_[v].size()); ++i) {
    const int id = adj_[v][i];
    Edge& e = edges_[id];
    if (e.cap > kEps && level_[v] < level_[e.to]) {
      const double d = dfs(e.to, t, std::min(limit, e.cap));
      if (d > 0.0) {
        e.cap -= d;
        edges_[id ^ 1].cap += d;
        return d;
      }
    }
  }
  return 0.0;
}

double MaxFlow::solve(int s, int t) {
  double flow = 0.0;
  while (bfs(s, t)) {
    std::fill(iter_.begin(), iter_.end(), 0);
    for (;;) {
      const double f = dfs(s, t, kInf);
      if (f <= 0.0) break;
      flow += f;
    }
  }
  return flow;
}

double MaxFlow::flow_on(int edge_id) const {
  // read the reverse arc: `orig - cap` on the forward arc cancels to zero for
  // near-infinite capacities
  return edges_[edge_id ^ 1].cap - edges_[edge_id ^ 1].orig;
}

std::vector<uint8_t> MaxFlow::min_cut_side(int s) const {
  std::vector<uint8_t> side(n_, 0);
  std::vector<int> queue{s};
  side[s] = 1;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    const int v = queue[qi];
    for (int id : adj_[v]) {
      const Edge& e = edges_[id];
      if (e.cap > kEps && !side[e.to]) {
        side[e.to] = 1;
        queue.push_back(e.to);
      }
    }
  }
  return side;
}

void MaxFlow::reset_caps(const std::vector<double>& caps) {
  if (caps.size() * 2 != edges_.size()) throw std::invalid_argument("cap vector size mismatch");
  for (size_t k = 0; k < caps.size(); ++k) {
    edges_[2 * k].cap = caps[k];
    edges_[2 * k].orig = caps[k];
    edges_[2 * k + 1].cap = 0.0;
    edges_[2 * k + 1].orig = 0.0;
  }
}

}  // namespace momc
