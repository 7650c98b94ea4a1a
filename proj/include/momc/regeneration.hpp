#pragma once

#include <cstdint>
#include <vector>

#include "momc/dist.hpp"
#include "momc/kernel.hpp"

namespace momc {

// Ordered pair of restart anchors.  The lower chain restarts at x0 whenever
// it hits { z : z >= x0 } at a step n >= 1; the upper chain restarts at y0 on
// hitting { z : z <= y0 }.
struct RegenSpec {
  int x0 = 0;
  int y0 = 0;
};

struct PrReport {
  double e_nu_minus = 0.0;  // expected first return time to up(x0) from x0
  double e_nu_plus = 0.0;   // expected first return time to down(y0) from y0
  bool holds = false;       // both returns almost sure (hence finite-mean)
};

// Return-time expectations for both anchors, n >= 1 convention.
PrReport check_pr(const FiniteKernel& k, const RegenSpec& spec);

struct OccupationMeasure {
  Dist pi;            // normalized expected occupation over one cycle
  double mean_cycle;  // expected cycle length E(nu)
};

// Expected time spent in each state before the restart rule triggers,
// accumulated from the anchor and normalized by the mean cycle length.
// Cross-checked internally against the stationary law of the explicitly
// restarted chain.  Throws DivergentCycle when the surviving mass does not
// vanish within the horizon.
OccupationMeasure pi_minus_exact(const FiniteKernel& k, const RegenSpec& spec,
                                 int64_t horizon = 1000000, double tail_tol = 1e-14);
OccupationMeasure pi_plus_exact(const FiniteKernel& k, const RegenSpec& spec,
                                int64_t horizon = 1000000, double tail_tol = 1e-14);

// The chain with the restart rule wired into the kernel, restricted to the
// states reachable from its anchor.  states[i] is the original index of
// restricted state i; the anchor is state 0.
struct RestartedChain {
  FiniteKernel kernel;
  std::vector<int> states;
};

RestartedChain restarted_lower(const FiniteKernel& k, const RegenSpec& spec);
RestartedChain restarted_upper(const FiniteKernel& k, const RegenSpec& spec);

struct MonotoneIteration {
  std::vector<Dist> sequence;  // mu_0 .. mu_{converged_at + 1}
  int64_t converged_at;        // first k with |mu_{k+1} - mu_k|_1 <= eps
  Dist limit;
  double limit_residual;       // |limit P - limit|_1
};

// Push-forward iteration mu_{k+1} = mu_k P from mu_0 = pi_minus.  Every step
// asserts mu_k <= mu_{k+1} and mu_{k+1} <= pi_plus in the dominance order;
// a failure means the inputs broke the contract (kernel not monotone, or the
// seeds not a valid lower/upper pair) and raises MonotoneViolation.  Raises
// NotConverged when nmax steps pass without the increments dropping to eps.
MonotoneIteration monotone_iteration(const FiniteKernel& k, const Dist& pi_minus,
                                     const Dist& pi_plus, int64_t nmax = 100000,
                                     double eps = 1e-10);

}  // namespace momc
