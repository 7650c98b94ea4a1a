#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "momc/kernel.hpp"
#include "momc/poset.hpp"
#include "momc/spaces.hpp"

namespace momc {

// Subset of the product space, usable both over finite state indices and over
// general states.  Predicate variants receive finite states as int64 States.
struct PairSet {
  enum class Kind { Diagonal, InM, Product, Pairs, Predicate };
  Kind kind = Kind::Diagonal;
  std::string name = "diag";
  IndexSet a, b;                         // Product, finite form
  std::function<bool(const State&)> fa, fb;    // Product, general form
  std::vector<std::pair<int, int>> pairs;      // Pairs (finite only)
  std::function<bool(const State&, const State&)> fn;  // Predicate

  static PairSet diagonal();
  static PairSet in_m();
  static PairSet everything();
  static PairSet product(IndexSet a, IndexSet b, std::string name = "product");
  static PairSet product(std::function<bool(const State&)> fa,
                         std::function<bool(const State&)> fb, std::string name = "product");
  static PairSet explicit_pairs(std::vector<std::pair<int, int>> pairs,
                                std::string name = "pairs");
  static PairSet predicate(std::function<bool(const State&, const State&)> fn,
                           std::string name = "predicate");

  bool contains(const Poset& poset, int x, int y) const;
  bool contains(const OrderedSpace& space, const State& x, const State& y) const;
};

// Test on the coupled history, evaluated at each arrival.  Every variant
// depends only on (x_n, y_n, n, steps in current stage), so prefixes decide.
struct StoppingPredicate {
  enum class Kind { Never, PairIn, FirstCoordIn, SecondCoordIn, TimeAtLeast, StepsInStage, AllOf };
  Kind kind = Kind::Never;
  PairSet set;                            // PairIn
  IndexSet cset;                       // coordinate tests, finite form
  std::function<bool(const State&)> cfn;  // coordinate tests, general form
  int64_t t = 0;                          // TimeAtLeast / StepsInStage
  std::vector<StoppingPredicate> all;     // AllOf

  static StoppingPredicate never();
  static StoppingPredicate pair_in(PairSet s);
  static StoppingPredicate first_coord_in(IndexSet s);
  static StoppingPredicate first_coord_in(std::function<bool(const State&)> f);
  static StoppingPredicate second_coord_in(IndexSet s);
  static StoppingPredicate time_at_least(int64_t t);
  static StoppingPredicate steps_in_stage(int64_t t);
  static StoppingPredicate all_of(std::vector<StoppingPredicate> preds);

  bool fires(const Poset& poset, int x, int y, int64_t time, int64_t steps) const;
  bool fires(const OrderedSpace& space, const State& x, const State& y, int64_t time,
             int64_t steps) const;
  bool uses_stage_clock() const;
};

// One-step joint rule for the coupled pair.
//   Independent:       distinct driver substreams per coordinate.
//   CommonNoise:       one driver shared by both coordinates (comonotone on
//                      finite kernels, identical u for recursions).
//   StrassenMonotone:  joint law on {(x', y') : x' <= y'}; applicable only
//                      from ordered pairs of a monotone kernel.  On recursions
//                      it is realized pathwise as CommonNoise and requires a
//                      monotone-in-state update.
//   JointMatrix:       explicit (n^2 x n^2) row-stochastic matrix over pairs,
//                      rows/cols indexed p = x*n + y.
struct BasicPolicy {
  enum class Kind { Independent, CommonNoise, StrassenMonotone, JointMatrix };
  Kind kind = Kind::Independent;
  std::shared_ptr<const Eigen::MatrixXd> joint;

  static BasicPolicy independent();
  static BasicPolicy common_noise();
  static BasicPolicy strassen_monotone();
  static BasicPolicy joint_matrix(Eigen::MatrixXd m);
};

struct SwitchRule {
  StoppingPredicate when;
  int next = 0;  // stage index to enter when the predicate fires
};

struct SwitchStage {
  BasicPolicy policy;
  std::vector<SwitchRule> rules;  // evaluated in order at each arrival
  std::string label;
};

// A basic rule, or a stage automaton over basic rules.  At each arrival the
// current stage's rules are re-evaluated (cascading through stage changes
// without advancing time, guarded against cycles); the step is then generated
// by the final stage's policy.
struct CouplingPolicy {
  enum class Kind { Basic, Switched };
  Kind kind = Kind::Basic;
  BasicPolicy basic;
  std::vector<SwitchStage> stages;

  static CouplingPolicy independent();
  static CouplingPolicy common_noise();
  static CouplingPolicy strassen_monotone();
  static CouplingPolicy joint_matrix(Eigen::MatrixXd m);
  static CouplingPolicy switched(std::vector<SwitchStage> stages);
};

struct CoupledPath {
  std::vector<int> x, y;
  std::vector<int> stage;  // stage in effect at each time (post-cascade)
};

struct RecursionCoupledPath {
  std::vector<State> x, y;
  std::vector<int> stage;
};

CoupledPath simulate_pair(const FiniteKernel& kx, const FiniteKernel& ky,
                          const CouplingPolicy& policy, int x0, int y0, int64_t horizon,
                          uint64_t seed, uint64_t rep = 0);
RecursionCoupledPath simulate_pair(const RecursionKernel& kx, const RecursionKernel& ky,
                                   const CouplingPolicy& policy, const State& x0, const State& y0,
                                   int64_t horizon, uint64_t seed, uint64_t rep = 0);

// Empirical tail of tau = inf{n >= 0 : predicate fires at time n}, with
// right-censoring at the horizon.  exceed[n] counts replications with tau > n.
struct TailEstimate {
  int64_t horizon = 0;
  int64_t reps = 0;
  std::vector<int64_t> exceed;  // length horizon + 1
  double censored_fraction = 0.0;
  uint64_t seed = 0;

  double tail(int64_t n) const { return double(exceed[size_t(n)]) / double(reps); }
  double halfwidth3(int64_t n) const;  // 3 * binomial standard error at n
};

TailEstimate estimate_tau(const FiniteKernel& kx, const FiniteKernel& ky,
                          const CouplingPolicy& policy, const StoppingPredicate& H, int x0, int y0,
                          int64_t horizon, int64_t reps, uint64_t seed, int jobs = 1);
TailEstimate estimate_tau(const RecursionKernel& kx, const RecursionKernel& ky,
                          const CouplingPolicy& policy, const StoppingPredicate& H, const State& x0,
                          const State& y0, int64_t horizon, int64_t reps, uint64_t seed,
                          int jobs = 1);

// Exact P(tau > n), n = 0..nmax, by vector iteration of the product chain.
// Switched policies augment the product state with (stage, stage clock).
std::vector<double> exact_tau_tail(const FiniteKernel& kx, const FiniteKernel& ky,
                                   const CouplingPolicy& policy, const PairSet& H, int x0, int y0,
                                   int64_t nmax);

// Dense one-step joint law of a basic policy from pair (x, y) over pairs
// p' = x'*n + y' (marginal-projection checks, joint-matrix construction).
std::vector<double> policy_joint_row(const FiniteKernel& kx, const FiniteKernel& ky,
                                     const BasicPolicy& policy, int x, int y);

// Three-stage construction for driving an ordered target set:
//   seek:    inner policy until the pair is in C x C,
//   burnin:  N independent steps; if the pair lands in A x B switch for good,
//            else seek again,
//   coupled: StrassenMonotone from then on.
// eps = min over x in C of min(P^N(x,A), P^N(x,B)); the number of burn-in
// attempts is stochastically dominated by a geometric law with parameter
// eps^2.
struct LemmaCoupling {
  CouplingPolicy policy;
  double eps = 0.0;
  int64_t N = 1;
  IndexSet C, A, B;
  static constexpr int kSeekStage = 0;
  static constexpr int kBurninStage = 1;
  static constexpr int kCoupledStage = 2;
};

LemmaCoupling build_lemma_coupling(const FiniteKernel& k, const IndexSet& C, const IndexSet& A,
                                   const IndexSet& B, int64_t N,
                                   const BasicPolicy& inner = BasicPolicy::independent());

// Exact upper bounds on P(burn-in attempts > j), j = 0..jmax, from the
// attempt-augmented product chain.  tail[j] includes still-circulating mass,
// so it only overstates the true tail; residual reports that mass.
struct StageCountTail {
  std::vector<double> tail;
  double eps = 0.0;
  double residual = 0.0;
};

StageCountTail lemma_stage_count_tail(const FiniteKernel& k, const LemmaCoupling& lemma, int x0,
                                      int y0, int jmax, int64_t horizon = 100000,
                                      double resid_tol = 1e-12);

// Streaming check that x_n <= y_n at every step with stage >= from_stage.
struct PathwiseReport {
  int64_t reps = 0;
  int64_t steps_checked = 0;
  bool ok = true;
  int64_t bad_rep = -1;
  int64_t bad_step = -1;
};

PathwiseReport check_pathwise_order(const FiniteKernel& kx, const FiniteKernel& ky,
                                    const CouplingPolicy& policy, int x0, int y0, int64_t horizon,
                                    int64_t reps, uint64_t seed, int from_stage = 0, int jobs = 1);
PathwiseReport check_pathwise_order(const RecursionKernel& kx, const RecursionKernel& ky,
                                    const CouplingPolicy& policy, const State& x0, const State& y0,
                                    int64_t horizon, int64_t reps, uint64_t seed,
                                    int from_stage = 0, int jobs = 1);

// Coupling with per-coordinate clocks: each coordinate evolves independently
// until it first enters its own target set; the two entry states are then
// coupled on aligned clocks under StrassenMonotone.  The aligned segment is
// Markov in aligned time even though the construction is not Markov for the
// plain pair process.
struct TwoClockSpec {
  IndexSet target_x, target_y;
};

struct TwoClockPath {
  std::vector<int> x_pre, y_pre;
  int64_t tau_x = -1, tau_y = -1;
  bool fired_x = false, fired_y = false;
  CoupledPath aligned;
};

TwoClockPath simulate_two_clock(const FiniteKernel& kx, const FiniteKernel& ky,
                                const TwoClockSpec& spec, int x0, int y0, int64_t pre_horizon,
                                int64_t aligned_horizon, uint64_t seed, uint64_t rep = 0);

// Values of X_n over independent replications, in replication order (so the
// output is identical for any worker count).
std::vector<double> sample_values(const RecursionKernel& k, const State& x0, int64_t n,
                                  int64_t reps, uint64_t seed, int jobs,
                                  const std::function<double(const State&)>& value);
std::vector<double> sample_values(const RecursionKernel& k, const State& x0, int64_t n,
                                  int64_t reps, uint64_t seed, int jobs = 1);

}  // namespace momc
