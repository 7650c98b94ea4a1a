#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "momc/dist.hpp"
#include "momc/kernel.hpp"
#include "momc/poset.hpp"

namespace momc::testhelp {

using Rng = std::mt19937_64;

inline int rand_int(Rng& g, int n) { return int(g() % uint64_t(n)); }
inline double rand_unit(Rng& g) { return double(g() >> 11) * 0x1.0p-53; }

// Random partial order: edges i -> j over i < j, closed transitively.
inline Poset random_poset(Rng& g, int n, double edge_prob = 0.35) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rand_unit(g) < edge_prob) pairs.emplace_back(i, j);
  return Poset::from_pairs(n, pairs);
}

inline Dist random_dist(Rng& g, int n) {
  std::vector<double> w(static_cast<size_t>(n));
  for (double& v : w) v = 0.05 + rand_unit(g);
  return Dist::from_weights(w);
}

// (mu1, mu2) with mu1 <= mu2: mu1 is mu2 with mass repeatedly pushed downward.
inline std::pair<Dist, Dist> random_dominated_pair(Rng& g, const Poset& p) {
  const int n = p.size();
  const Dist mu2 = random_dist(g, n);
  std::vector<double> w = mu2.values();
  for (int moves = 0; moves < 3 * n; ++moves) {
    const int x = rand_int(g, n);
    std::vector<int> downs;
    for (int y = 0; y < n; ++y)
      if (y != x && p.leq(y, x)) downs.push_back(y);
    if (downs.empty()) continue;
    const int y = downs[size_t(rand_int(g, int(downs.size())))];
    const double amt = 0.5 * rand_unit(g) * w[size_t(x)];
    w[size_t(x)] -= amt;
    w[size_t(y)] += amt;
  }
  return {Dist(std::move(w)), mu2};
}

// Monotone kernel on chain(n): each row pushes the previous row's mass upward,
// then every row is mixed with the uniform law.  All entries end up positive,
// so a one-step split through the middle state always exists.
inline FiniteKernel random_monotone_chain_kernel(Rng& g, int n, double uniform_mix = 0.2) {
  Eigen::MatrixXd m(n, n);
  std::vector<double> row = random_dist(g, n).values();
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      for (int moves = 0; moves < n; ++moves) {
        const int x = rand_int(g, n);
        if (x + 1 >= n) continue;
        const int z = x + 1 + rand_int(g, n - x - 1);
        const double amt = 0.5 * rand_unit(g) * row[size_t(x)];
        row[size_t(x)] -= amt;
        row[size_t(z)] += amt;
      }
    }
    for (int j = 0; j < n; ++j)
      m(i, j) = (1.0 - uniform_mix) * row[size_t(j)] + uniform_mix / n;
  }
  return FiniteKernel(std::make_shared<const Poset>(Poset::chain(n)), std::move(m));
}

inline bool is_up_mask(const Poset& p, uint64_t mask) {
  for (int x = 0; x < p.size(); ++x) {
    if (!(mask >> x & 1)) continue;
    for (int y = 0; y < p.size(); ++y)
      if (p.leq(x, y) && !(mask >> y & 1)) return false;
  }
  return true;
}

// max over up-sets of mu1(I) - mu2(I), by filtering all subsets (n <= ~20).
inline double brute_force_distance(const Dist& mu1, const Dist& mu2, const Poset& p) {
  const int n = p.size();
  double best = 0.0;
  for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
    if (!is_up_mask(p, mask)) continue;
    double s = 0.0;
    for (int x = 0; x < n; ++x)
      if (mask >> x & 1) s += mu1[x] - mu2[x];
    best = std::max(best, s);
  }
  return best;
}

inline bool brute_force_dominates(const Dist& mu1, const Dist& mu2, const Poset& p,
                                  double tol = 1e-12) {
  const int n = p.size();
  for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
    if (!is_up_mask(p, mask)) continue;
    double s1 = 0.0, s2 = 0.0;
    for (int x = 0; x < n; ++x)
      if (mask >> x & 1) {
        s1 += mu1[x];
        s2 += mu2[x];
      }
    if (s1 > s2 + tol) return false;
  }
  return true;
}

}  // namespace momc::testhelp
