#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "momc/dist.hpp"
#include "momc/order.hpp"
#include "momc/poset.hpp"
#include "momc/spaces.hpp"

namespace momc {

// Row-stochastic transition matrix over a finite poset.
class FiniteKernel {
 public:
  FiniteKernel(PosetPtr poset, Eigen::MatrixXd rows, double tol = 1e-9);

  int size() const { return int(P_.rows()); }
  const Poset& poset() const { return *poset_; }
  PosetPtr poset_ptr() const { return poset_; }
  const Eigen::MatrixXd& matrix() const { return P_; }
  double tol() const { return tol_; }

  Dist row(int i) const;
  // inverse-CDF sampling over the row, in state-index order
  int sample_next(int i, double u) const;

 private:
  PosetPtr poset_;
  Eigen::MatrixXd P_;
  std::vector<double> cum_;  // row-major cumulative sums
  double tol_;
};

struct MonotoneCheck {
  bool monotone;
  int x = -1, y = -1;            // offending comparable pair when not monotone
  std::optional<UpSet> witness;  // up-set with P(x, I) > P(y, I)
};

// x <= y must imply row(x) <= row(y) in the stochastic order.
MonotoneCheck is_monotone(const FiniteKernel& k, double tol = 1e-12);

// n-step kernel by binary exponentiation; n = 0 gives the identity.
FiniteKernel n_step(const FiniteKernel& k, int64_t n);

struct StationaryReport {
  std::vector<std::vector<int>> closed_classes;  // sorted state lists
  std::vector<Dist> stationary;                  // one per class, full-length vectors
  bool unique;                                   // exactly one closed class
};

// Closed communicating classes of the support graph and the stationary law of
// each (residual checked to resid_tol).
StationaryReport stationary_report(const FiniteKernel& k, double resid_tol = 1e-10);

enum class HitConvention {
  FirstEntry,   // tau = inf{n >= 0 : X_n in target}
  FirstReturn,  // tau = inf{n >= 1 : X_n in target}
};

struct HittingResult {
  double prob;      // P(tau < infinity)
  double expected;  // E tau, +infinity when the tail is not summable
  bool prob_is_one; // exact graph-theoretic verdict, no float threshold
};

HittingResult hitting_analysis(const FiniteKernel& k, const UpSet& target, int start,
                               HitConvention conv);

// Per-state first-entry solve for a fixed target: probabilities, expected
// times (+inf marked), and exact prob-one flags.
struct HittingSolve {
  std::vector<double> prob;
  std::vector<double> expected;
  std::vector<uint8_t> prob_is_one;
};
HittingSolve hitting_solve(const FiniteKernel& k, const UpSet& target);

struct MomentResult {
  double sup_moment;  // sup over x in C of E[tau_x(C)^alpha] on the N-skeleton
  bool finite;        // exact graph verdict on the taboo matrix
  double taboo_spectral_radius;  // diagnostic, power iteration
  int argmax_state = -1;
};

// Return-time moment of order alpha to C for the N-step skeleton chain,
// computed by exact tail summation down to tail_tol.
MomentResult moment_check(const FiniteKernel& k, const std::vector<int>& C, double alpha,
                          int64_t N, int64_t horizon = 200000, double tail_tol = 1e-14);

// Reachability closure of the support graph: row i holds the bitset of states
// reachable from i (including i itself).
std::vector<uint64_t> support_reachability(const Eigen::MatrixXd& P, double tol = 0.0);

// Stochastic recursion X_{n+1} = f(X_n, U) with U uniform on [0,1).
class RecursionKernel {
 public:
  using Update = std::function<State(const State&, double)>;

  RecursionKernel(SpacePtr space, Update f, bool monotone_in_state, std::string name,
                  std::optional<std::vector<double>> u_breakpoints = std::nullopt)
      : space_(std::move(space)),
        f_(std::move(f)),
        monotone_(monotone_in_state),
        name_(std::move(name)),
        u_breaks_(std::move(u_breakpoints)) {}

  const OrderedSpace& space() const { return *space_; }
  SpacePtr space_ptr() const { return space_; }
  bool monotone_in_state() const { return monotone_; }
  const std::string& name() const { return name_; }
  const std::optional<std::vector<double>>& u_breakpoints() const { return u_breaks_; }

  State step(const State& x, double u) const;

 private:
  SpacePtr space_;
  Update f_;
  bool monotone_;
  std::string name_;
  std::optional<std::vector<double>> u_breaks_;
};

// One driven step; throws DomainError when x lies outside the kernel's space.
State sample_step(const RecursionKernel& k, const State& x, double u);

// Exact finite-kernel form of a recursion whose update is piecewise constant
// in u with declared breakpoints, on an explicit state list.  Checks the
// declaration by evaluating each piece at both ends and the midpoint.
FiniteKernel exactify(const RecursionKernel& k, PosetPtr poset, const std::vector<State>& states);

}  // namespace momc
