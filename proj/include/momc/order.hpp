#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "momc/dist.hpp"
#include "momc/maxflow.hpp"
#include "momc/poset.hpp"

namespace momc {

// Strassen infeasibility: carries an up-set I with mu1(I) > mu2(I).
struct NotDominated : Error {
  UpSet witness;
  double gap;
  NotDominated(UpSet w, double g)
      : Error("stochastic dominance fails"), witness(std::move(w)), gap(g) {}
};

struct DominanceResult {
  bool dominated;
  double gap;                    // max over up-sets of mu1(I) - mu2(I)
  std::optional<UpSet> witness;  // achieving up-set when not dominated
};

// Joint law on pairs, supported on {(i,j) : i <= j}, with marginals (mu1, mu2).
struct Coupling {
  Eigen::MatrixXd lambda;
  double marginal_error(const Dist& mu1, const Dist& mu2) const;
  double off_relation_mass(const Poset& poset) const;
};

// true iff mu1 <= mu2 in the stochastic order induced by the poset
bool dominates(const Dist& mu1, const Dist& mu2, const Poset& poset, double tol = 1e-12);
DominanceResult dominance_check(const Dist& mu1, const Dist& mu2, const Poset& poset,
                                double tol = 1e-12);

// Monotone coupling via max-flow; throws NotDominated (with witness) when
// none exists.
Coupling strassen_coupling(const Dist& mu1, const Dist& mu2, const Poset& poset,
                           double tol = 1e-12);

struct ClosureResult {
  double value;  // max over up-sets I of sum_{i in I} w(i); >= 0 (empty set)
  UpSet argmax;
};

// sup over up-sets of |mu1(I) - mu2(I)|.  A metric on distributions over the
// poset; coincides with the Kolmogorov distance when the order is total.
double order_distance(const Dist& mu1, const Dist& mu2, const Poset& poset);

struct DistanceResult {
  double distance;
  UpSet witness;  // up-set achieving the sup
};
DistanceResult order_distance_witness(const Dist& mu1, const Dist& mu2, const Poset& poset);

// Reusable max-weight-closure solver over a fixed poset (min-cut on the
// covering dag).  Build once, query many weight vectors.
class ClosureSolver {
 public:
  explicit ClosureSolver(PosetPtr poset);
  ClosureResult max_weight(const std::vector<double>& w);
  double distance(const std::vector<double>& p1, const std::vector<double>& p2);

 private:
  PosetPtr poset_;
  MaxFlow net_;
  std::vector<double> caps_;  // scratch, indexed by edge id / 2
  int n_, s_, t_;
};

// Reusable Strassen feasibility/coupling solver over a fixed poset.
class StrassenSolver {
 public:
  explicit StrassenSolver(PosetPtr poset);
  DominanceResult check(const Dist& mu1, const Dist& mu2, double tol = 1e-12);
  Coupling couple(const Dist& mu1, const Dist& mu2, double tol = 1e-12);

 private:
  double run(const Dist& mu1, const Dist& mu2);
  PosetPtr poset_;
  MaxFlow net_;
  std::vector<double> caps_;
  std::vector<std::pair<int, int>> relation_arcs_;  // (i, j) per relation edge, arc order
  int n_, s_, t_;
  int first_relation_edge_;
};

}  // namespace momc
