#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "momc/coupling.hpp"
#include "momc/kernel.hpp"

namespace momc {

// N-step splitting witness: from every state of C, the N-step law puts at
// least eps of mass below z0 and at least eps above it.
struct SplitCertificate {
  IndexSet C;
  int z0 = -1;
  IndexSet A;  // { x : x <= z0 }
  IndexSet B;  // { y : z0 <= y }
  int64_t N = 1;
  double eps = 0.0;
};

// Monte Carlo split for a recursion on a real interval.  eps carries a 3-sigma
// downward margin; the endpoint starts are the binding ones for monotone
// updates, the interior grid documents that reduction.
struct IntervalSplit {
  double pivot = 0.0;
  int64_t N = 1;
  double eps = 0.0;
  double p_low_at_hi = 0.0;   // empirical P(X_N <= pivot) from the top start
  double p_high_at_lo = 0.0;  // empirical P(X_N >= pivot) from the bottom start
  double se = 0.0;            // larger of the two binomial standard errors
  int grid_points = 0;
  int64_t reps = 0;
  uint64_t seed = 0;
};

struct RateCertificate {
  std::optional<SplitCertificate> split;  // finite-chain route
  std::optional<IntervalSplit> interval;  // recursion route
  int64_t N = 1;
  double eps = 0.0;
  double q = 0.0;      // (1 - eps)^(1/N)
  double K = 1.0;      // (1 - eps)^(-(N-1)/N)
  double alt_q = 0.0;  // (1 - eps^2)^(1/N), the independent-coupling rate
  double alt_K = 1.0;
  bool exact_coupling = false;  // eps = 1: coupled after N steps
};

// Rate arithmetic from a split level; the degenerate eps = 1 case reports
// exact coupling instead of running 0^0 through the formulas.
RateCertificate make_rate(double eps, int64_t N);

struct UniquenessWitness {
  int x, y;  // ordered pair of starts
  int a, b;  // a <= b; {a} hit a.s. from x, {b} hit a.s. from y
};

struct UniquenessCertificate {
  bool ok = false;
  std::vector<UniquenessWitness> witnesses;  // one per ordered pair when ok
  int fail_x = -1, fail_y = -1;              // first pair with no witness
};

// Largest gap between the n-step laws from x and y over all up-sets.
double compressibility_exact(const FiniteKernel& k, int x, int y, int64_t n);

struct BoundRow {
  int64_t n;
  double lhs;  // exact n-step distance
  double rhs;  // larger of the two exact meeting-time tails
};

struct CompressibilityReport {
  std::vector<BoundRow> rows;
  bool ok = true;
  int64_t first_bad_n = -1;
};

// Checks lhs <= rhs + slack for every n <= nmax, with rhs the exact tail of
// the policy's meeting time run from (x,y) and from (y,x).  A violation is a
// bug by theory, hence BoundViolated unless throwing is disabled.
CompressibilityReport verify_compressibility_bound(const FiniteKernel& k,
                                                   const CouplingPolicy& policy, int x, int y,
                                                   int64_t nmax, double slack = 1e-10,
                                                   bool throw_on_violation = true);

// Best canonical split over all anchors z0: A = down(z0), B = up(z0), eps
// maximized over z0.  Throws NoSplit when every anchor gives eps = 0.
SplitCertificate find_split(const FiniteKernel& k, int64_t N, const IndexSet& C);
SplitCertificate find_split(const FiniteKernel& k, int64_t N);

struct AchievabilityReport {
  bool holds = false;
  double sup_moment = 0.0;  // sup over x in C of E tau^alpha on the N-skeleton
  double alpha = 0.0;
  double taboo_spectral_radius = 0.0;
};

// The two hypotheses of the coupling construction, decided exactly on finite
// chains: C is reached almost surely from every start of the N-skeleton, and
// return times to C have a finite alpha-moment uniformly on C.
AchievabilityReport check_achievability_hypotheses(const FiniteKernel& k,
                                                   const SplitCertificate& cert, double alpha);

// Geometric-rate certificate.  Finite chains must carry a total order and go
// through find_split with C = full space; recursions on a real interval go
// through the Monte Carlo interval split.
RateCertificate bm_certificate(const FiniteKernel& k, int64_t N);

struct BmMcOptions {
  int64_t reps = 100000;
  uint64_t seed = 715772021;
  int grid_points = 17;  // interior starts; the two endpoints are always run
  int jobs = 1;
};

RateCertificate bm_certificate(const RecursionKernel& k, int64_t N, const BmMcOptions& opt = {});

struct RateRow {
  int64_t n;
  double max_distance;  // over all starting states
  double bound;         // K q^floor(n/N)
  double alt_bound;     // alt_K alt_q^floor(n/N)
};

struct RateReport {
  std::vector<RateRow> rows;
  bool ok = true;
  int64_t first_bad_n = -1;
};

// Checks the certified decay of order_distance(delta_x P^n, pi) for every
// start x and every n <= nmax.  Requires a unique stationary law.
RateReport verify_rate(const FiniteKernel& k, const RateCertificate& cert, int64_t nmax,
                       double slack = 1e-10, bool throw_on_violation = true);

// Singleton-witness uniqueness certificate; on success cross-checks that the
// chain indeed has a single closed class.
UniquenessCertificate uniqueness_certificate(const FiniteKernel& k);

}  // namespace momc
