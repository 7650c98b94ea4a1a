#include "momc/order.hpp"

#include <algorithm>
#include <cmath>

namespace momc {

double Coupling::marginal_error(const Dist& mu1, const Dist& mu2) const {
  const int n = int(lambda.rows());
  double err = 0.0;
  for (int i = 0; i < n; ++i) err = std::max(err, std::abs(lambda.row(i).sum() - mu1[i]));
  for (int j = 0; j < n; ++j) err = std::max(err, std::abs(lambda.col(j).sum() - mu2[j]));
  return err;
}

double Coupling::off_relation_mass(const Poset& poset) const {
  const int n = poset.size();
  double mass = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!poset.leq(i, j)) mass += lambda(i, j);
  return mass;
}

// ---------------------------------------------------------------------------
// Strassen transportation network: s -> a_i (cap mu1_i), a_i -> b_j (inf, for
// i <= j), b_j -> t (cap mu2_j).  Max flow equals 1 - max_I (mu1(I) - mu2(I))
// over up-sets I, so dominance holds iff the flow saturates the source.
// ---------------------------------------------------------------------------

StrassenSolver::StrassenSolver(PosetPtr poset)
    : poset_(std::move(poset)), net_(2 * poset_->size() + 2), n_(poset_->size()) {
  s_ = 2 * n_;
  t_ = 2 * n_ + 1;
  for (int i = 0; i < n_; ++i) net_.add_edge(s_, i, 0.0);
  for (int j = 0; j < n_; ++j) net_.add_edge(n_ + j, t_, 0.0);
  first_relation_edge_ = 2 * n_;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (poset_->leq(i, j)) {
        net_.add_edge(i, n_ + j, MaxFlow::kInf);
        relation_arcs_.emplace_back(i, j);
      }
  caps_.assign(2 * n_ + relation_arcs_.size(), 0.0);
}

double StrassenSolver::run(const Dist& mu1, const Dist& mu2) {
  if (mu1.size() != n_ || mu2.size() != n_)
    throw DimensionMismatch("distribution size does not match poset");
  for (int i = 0; i < n_; ++i) caps_[i] = mu1[i];
  for (int j = 0; j < n_; ++j) caps_[n_ + j] = mu2[j];
  for (size_t k = 0; k < relation_arcs_.size(); ++k) caps_[2 * n_ + k] = MaxFlow::kInf;
  net_.reset_caps(caps_);
  return net_.solve(s_, t_);
}

DominanceResult StrassenSolver::check(const Dist& mu1, const Dist& mu2, double tol) {
  const double flow = run(mu1, mu2);
  const double gap = 1.0 - flow;
  if (gap <= tol) return {true, gap, std::nullopt};
  // Source side of the min cut; the violating up-set is the upward closure of
  // the still-reachable first-coordinate nodes.
  const std::vector<uint8_t> side = net_.min_cut_side(s_);
  UpSet seed = UpSet::empty(n_);
  for (int i = 0; i < n_; ++i)
    if (side[i]) seed.add(i);
  UpSet witness = up_closure(*poset_, seed);
  return {false, gap, witness};
}

Coupling StrassenSolver::couple(const Dist& mu1, const Dist& mu2, double tol) {
  DominanceResult r = check(mu1, mu2, tol);
  if (!r.dominated) throw NotDominated(*r.witness, r.gap);
  Coupling c;
  c.lambda = Eigen::MatrixXd::Zero(n_, n_);
  for (size_t k = 0; k < relation_arcs_.size(); ++k) {
    const auto [i, j] = relation_arcs_[k];
    // the k-th relation arc was the (first_relation_edge_ + k)-th edge added
    const double f = net_.flow_on(2 * (first_relation_edge_ + int(k)));
    if (f > 0.0) c.lambda(i, j) = f;
  }
  return c;
}

bool dominates(const Dist& mu1, const Dist& mu2, const Poset& poset, double tol) {
  return dominance_check(mu1, mu2, poset, tol).dominated;
}

DominanceResult dominance_check(const Dist& mu1, const Dist& mu2, const Poset& poset, double tol) {
  StrassenSolver solver(std::make_shared<Poset>(poset));
  return solver.check(mu1, mu2, tol);
}

Coupling strassen_coupling(const Dist& mu1, const Dist& mu2, const Poset& poset, double tol) {
  StrassenSolver solver(std::make_shared<Poset>(poset));
  return solver.couple(mu1, mu2, tol);
}

// ---------------------------------------------------------------------------
// Max-weight up-set via min-cut (closure reduction): positive weights hang off
// the source, negative weights feed the sink, and covering arcs i -> j carry
// infinite capacity so the source side of any finite cut is upward closed.
// ---------------------------------------------------------------------------

ClosureSolver::ClosureSolver(PosetPtr poset)
    : poset_(std::move(poset)), net_(poset_->size() + 2), n_(poset_->size()) {
  s_ = n_;
  t_ = n_ + 1;
  for (int i = 0; i < n_; ++i) net_.add_edge(s_, i, 0.0);
  for (int i = 0; i < n_; ++i) net_.add_edge(i, t_, 0.0);
  for (const auto& [i, j] : poset_->covers()) net_.add_edge(i, j, MaxFlow::kInf);
  caps_.assign(2 * n_ + poset_->covers().size(), 0.0);
}

ClosureResult ClosureSolver::max_weight(const std::vector<double>& w) {
  if (int(w.size()) != n_) throw DimensionMismatch("weight vector size does not match poset");
  for (int i = 0; i < n_; ++i) {
    caps_[i] = w[i] > 0.0 ? w[i] : 0.0;
    caps_[n_ + i] = w[i] < 0.0 ? -w[i] : 0.0;
  }
  for (size_t k = 0; k < poset_->covers().size(); ++k) caps_[2 * n_ + k] = MaxFlow::kInf;
  net_.reset_caps(caps_);
  net_.solve(s_, t_);
  const std::vector<uint8_t> side = net_.min_cut_side(s_);
  UpSet arg = UpSet::empty(n_);
  for (int i = 0; i < n_; ++i)
    if (side[i]) arg.add(i);
  // report the exact weight of the recovered set rather than the flow value,
  // so the result is free of flow rounding dust
  double value = 0.0;
  for (int i = 0; i < n_; ++i)
    if (arg.contains(i)) value += w[i];
  if (value < 0.0) return {0.0, UpSet::empty(n_)};
  return {value, arg};
}

double ClosureSolver::distance(const std::vector<double>& p1, const std::vector<double>& p2) {
  std::vector<double> w(n_);
  for (int i = 0; i < n_; ++i) w[i] = p1[i] - p2[i];
  const double up = max_weight(w).value;
  for (int i = 0; i < n_; ++i) w[i] = -w[i];
  const double dn = max_weight(w).value;
  return std::max({up, dn, 0.0});
}

double order_distance(const Dist& mu1, const Dist& mu2, const Poset& poset) {
  return order_distance_witness(mu1, mu2, poset).distance;
}

DistanceResult order_distance_witness(const Dist& mu1, const Dist& mu2, const Poset& poset) {
  if (mu1.size() != poset.size() || mu2.size() != poset.size())
    throw DimensionMismatch("distribution size does not match poset");
  ClosureSolver solver(std::make_shared<Poset>(poset));
  std::vector<double> w(poset.size());
  for (int i = 0; i < poset.size(); ++i) w[i] = mu1[i] - mu2[i];
  ClosureResult up = solver.max_weight(w);
  for (int i = 0; i < poset.size(); ++i) w[i] = -w[i];
  ClosureResult dn = solver.max_weight(w);
  if (up.value >= dn.value) return {std::max(up.value, 0.0), up.argmax};
  return {dn.value, dn.argmax};
}

}  // namespace momc
