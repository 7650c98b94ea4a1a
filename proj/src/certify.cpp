#include "momc/certify.hpp"

#include <algorithm>
#include <cmath>

#include "momc/errors.hpp"
#include "momc/order.hpp"

namespace momc {

namespace {

std::vector<double> row_vector(const Eigen::MatrixXd& m, int i) {
  std::vector<double> v(size_t(m.cols()));
  for (int j = 0; j < m.cols(); ++j) v[size_t(j)] = m(i, j);
  return v;
}

double set_mass(const Eigen::MatrixXd& q, int x, const UpSet& s) {
  double m = 0.0;
  for (int j = 0; j < q.cols(); ++j)
    if (s.contains(j)) m += q(x, j);
  return m;
}

}  // namespace

RateCertificate make_rate(double eps, int64_t N) {
  if (N < 1) throw ConfigError("N must be at least 1");
  if (eps <= 0.0 || eps > 1.0) throw ConfigError("split level must lie in (0, 1]");
  RateCertificate c;
  c.N = N;
  c.eps = eps;
  if (eps == 1.0) {
    c.exact_coupling = true;
    c.q = 0.0;
    c.K = 1.0;
    c.alt_q = 0.0;
    c.alt_K = 1.0;
    return c;
  }
  const double nn = double(N);
  c.q = std::pow(1.0 - eps, 1.0 / nn);
  c.K = std::pow(1.0 - eps, -(nn - 1.0) / nn);
  c.alt_q = std::pow(1.0 - eps * eps, 1.0 / nn);
  c.alt_K = std::pow(1.0 - eps * eps, -(nn - 1.0) / nn);
  return c;
}

double compressibility_exact(const FiniteKernel& k, int x, int y, int64_t n) {
  const int sz = k.size();
  if (x < 0 || x >= sz || y < 0 || y >= sz) throw DimensionMismatch("state out of range");
  if (n < 0) throw DimensionMismatch("negative step count");
  if (x == y) return 0.0;
  const FiniteKernel pn = n_step(k, n);
  ClosureSolver solver(k.poset_ptr());
  return solver.distance(row_vector(pn.matrix(), x), row_vector(pn.matrix(), y));
}

CompressibilityReport verify_compressibility_bound(const FiniteKernel& k,
                                                   const CouplingPolicy& policy, int x, int y,
                                                   int64_t nmax, double slack,
                                                   bool throw_on_violation) {
  const int sz = k.size();
  if (x < 0 || x >= sz || y < 0 || y >= sz) throw DimensionMismatch("state out of range");
  if (nmax < 0) throw DimensionMismatch("negative horizon");

  const PairSet ordered = PairSet::in_m();
  const std::vector<double> tail_xy = exact_tau_tail(k, k, policy, ordered, x, y, nmax);
  const std::vector<double> tail_yx = exact_tau_tail(k, k, policy, ordered, y, x, nmax);

  ClosureSolver solver(k.poset_ptr());
  const int n = sz;
  Eigen::RowVectorXd ux = Eigen::RowVectorXd::Zero(n), uy = Eigen::RowVectorXd::Zero(n);
  ux(x) = 1.0;
  uy(y) = 1.0;

  CompressibilityReport rep;
  rep.rows.reserve(size_t(nmax) + 1);
  for (int64_t t = 0; t <= nmax; ++t) {
    std::vector<double> px(static_cast<size_t>(n)), py(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      px[size_t(j)] = ux(j);
      py[size_t(j)] = uy(j);
    }
    const double lhs = solver.distance(px, py);
    const double rhs = std::max(tail_xy[size_t(t)], tail_yx[size_t(t)]);
    rep.rows.push_back({t, lhs, rhs});
    if (lhs > rhs + slack && rep.ok) {
      rep.ok = false;
      rep.first_bad_n = t;
      if (throw_on_violation)
        throw BoundViolated("n-step distance exceeds the meeting-time tail at n = " +
                                std::to_string(t),
                            size_t(t), lhs, rhs);
    }
    if (t < nmax) {
      ux = ux * k.matrix();
      uy = uy * k.matrix();
    }
  }
  return rep;
}

SplitCertificate find_split(const FiniteKernel& k, int64_t N, const IndexSet& C) {
  const int n = k.size();
  if (C.ground_size() != n) throw DimensionMismatch("C must live on the kernel's state space");
  if (C.count() == 0) throw ConfigError("C must be nonempty");
  if (N < 1) throw ConfigError("N must be at least 1");
  const Eigen::MatrixXd Q = n_step(k, N).matrix();

  SplitCertificate best;
  best.C = C;
  best.N = N;
  for (int z = 0; z < n; ++z) {
    const UpSet a = down_of_mask(k.poset(), z);
    const UpSet b = up_of(k.poset(), z);
    double eps = 1.0;
    for (int x : C.indices()) {
      eps = std::min(eps, std::min(set_mass(Q, x, a), set_mass(Q, x, b)));
      if (eps <= best.eps) break;
    }
    if (eps > best.eps) {
      best.z0 = z;
      best.A = a;
      best.B = b;
      best.eps = eps;
    }
  }
  if (best.eps <= 0.0)
    throw NoSplit("no anchor gives positive N-step mass both below and above it");
  return best;
}

SplitCertificate find_split(const FiniteKernel& k, int64_t N) {
  std::vector<uint64_t> bits(size_t((k.size() + 63) / 64), 0);
  UpSet full(k.size(), std::move(bits));
  for (int i = 0; i < k.size(); ++i) full.add(i);
  return find_split(k, N, full);
}

AchievabilityReport check_achievability_hypotheses(const FiniteKernel& k,
                                                   const SplitCertificate& cert, double alpha) {
  if (alpha <= 1.0) throw ConfigError("the moment exponent must exceed 1");
  if (cert.C.ground_size() != k.size() || cert.C.count() == 0)
    throw ConfigError("certificate carries an unusable C");

  const FiniteKernel skel = n_step(k, cert.N);
  const HittingSolve hs = hitting_solve(skel, cert.C);
  for (int x = 0; x < k.size(); ++x)
    if (!hs.prob_is_one[size_t(x)])
      throw HypothesisFails("C is not reached almost surely from state " + std::to_string(x), x);

  const MomentResult mr = moment_check(k, cert.C.indices(), alpha, cert.N);
  if (!mr.finite)
    throw HypothesisFails("return times to C from state " + std::to_string(mr.argmax_state) +
                              " have an infinite moment of order " + std::to_string(alpha),
                          mr.argmax_state);

  AchievabilityReport rep;
  rep.holds = true;
  rep.sup_moment = mr.sup_moment;
  rep.alpha = alpha;
  rep.taboo_spectral_radius = mr.taboo_spectral_radius;
  return rep;
}

RateCertificate bm_certificate(const FiniteKernel& k, int64_t N) {
  if (!k.poset().is_total_order())
    throw ConfigError("finite-chain rate certificates need a total order");
  SplitCertificate split = find_split(k, N);
  RateCertificate cert = make_rate(split.eps, N);
  cert.split = std::move(split);
  return cert;
}

RateCertificate bm_certificate(const RecursionKernel& k, int64_t N, const BmMcOptions& opt) {
  const auto* interval = dynamic_cast<const RealIntervalSpace*>(&k.space());
  if (!interval) throw ConfigError("Monte Carlo rate certificates need a real-interval space");
  if (!k.monotone_in_state())
    throw ConfigError("the endpoint reduction needs a monotone-in-state update");
  if (N < 1) throw ConfigError("N must be at least 1");
  if (opt.reps < 100) throw ConfigError("too few replications for a 3-sigma margin");
  if (opt.grid_points < 1) throw ConfigError("grid must have at least one point");

  const double lo = interval->lo(), hi = interval->hi();
  std::vector<double> starts{lo};
  for (int g = 1; g <= opt.grid_points; ++g)
    starts.push_back(lo + (hi - lo) * double(g) / double(opt.grid_points + 1));
  starts.push_back(hi);

  // Same seed and rep indexing for every start: draws are shared pathwise, so
  // a monotone update makes the sampled endpoints bracket every grid start
  // rep by rep, which is checked below rather than assumed.
  std::vector<std::vector<double>> vals;
  vals.reserve(starts.size());
  for (double s : starts)
    vals.push_back(sample_values(k, State(s), N, opt.reps, opt.seed, opt.jobs));
  for (size_t g = 0; g + 1 < starts.size(); ++g)
    for (int64_t r = 0; r < opt.reps; ++r)
      if (vals[g][size_t(r)] > vals[g + 1][size_t(r)])
        throw MonotoneViolation("update is not monotone: shared-noise paths cross between starts " +
                                std::to_string(starts[g]) + " and " + std::to_string(starts[g + 1]));

  const std::vector<double>& at_lo = vals.front();
  const std::vector<double>& at_hi = vals.back();
  IntervalSplit best;
  best.N = N;
  best.eps = -1.0;
  for (size_t g = 0; g < starts.size(); ++g) {
    const double z = starts[g];
    int64_t below_hi = 0, above_lo = 0;
    for (int64_t r = 0; r < opt.reps; ++r) {
      if (at_hi[size_t(r)] <= z) ++below_hi;
      if (at_lo[size_t(r)] >= z) ++above_lo;
    }
    const double pa = double(below_hi) / double(opt.reps);
    const double pb = double(above_lo) / double(opt.reps);
    const double sea = std::sqrt(pa * (1.0 - pa) / double(opt.reps));
    const double seb = std::sqrt(pb * (1.0 - pb) / double(opt.reps));
    const double eps = std::min(pa - 3.0 * sea, pb - 3.0 * seb);
    if (eps > best.eps) {
      best.pivot = z;
      best.eps = eps;
      best.p_low_at_hi = pa;
      best.p_high_at_lo = pb;
      best.se = std::max(sea, seb);
    }
  }
  if (best.eps <= 0.0)
    throw NoSplit("no pivot keeps a positive margin after the 3-sigma deduction");
  best.grid_points = opt.grid_points;
  best.reps = opt.reps;
  best.seed = opt.seed;

  RateCertificate cert = make_rate(std::min(best.eps, 1.0), N);
  cert.interval = best;
  return cert;
}

RateReport verify_rate(const FiniteKernel& k, const RateCertificate& cert, int64_t nmax,
                       double slack, bool throw_on_violation) {
  if (nmax < 0) throw DimensionMismatch("negative horizon");
  if (cert.N < 1) throw ConfigError("certificate carries N < 1");
  const StationaryReport sr = stationary_report(k);
  if (!sr.unique)
    throw ConfigError("rate verification needs a unique stationary law (found " +
                      std::to_string(sr.closed_classes.size()) + " closed classes)");
  const std::vector<double>& pi = sr.stationary[0].values();

  const int n = k.size();
  ClosureSolver solver(k.poset_ptr());
  Eigen::MatrixXd pn = Eigen::MatrixXd::Identity(n, n);

  RateReport rep;
  rep.rows.reserve(size_t(nmax) + 1);
  for (int64_t t = 0; t <= nmax; ++t) {
    double worst = 0.0;
    for (int x = 0; x < n; ++x) worst = std::max(worst, solver.distance(row_vector(pn, x), pi));
    const double blocks = double(t / cert.N);
    const double bound = cert.K * std::pow(cert.q, blocks);
    const double alt_bound = cert.alt_K * std::pow(cert.alt_q, blocks);
    rep.rows.push_back({t, worst, bound, alt_bound});
    if ((worst > bound + slack || worst > alt_bound + slack) && rep.ok) {
      rep.ok = false;
      rep.first_bad_n = t;
      if (throw_on_violation)
        throw BoundViolated("certified decay fails at n = " + std::to_string(t), size_t(t), worst,
                            std::min(bound, alt_bound));
    }
    if (t < nmax) pn = pn * k.matrix();
  }
  return rep;
}

UniquenessCertificate uniqueness_certificate(const FiniteKernel& k) {
  const int n = k.size();
  // hit1[a] = set of starts from which {a} is reached with probability one
  std::vector<UpSet> hit1;
  hit1.reserve(size_t(n));
  for (int a = 0; a < n; ++a) {
    UpSet target = UpSet::empty(n);
    target.add(a);
    const HittingSolve hs = hitting_solve(k, target);
    UpSet from = UpSet::empty(n);
    for (int x = 0; x < n; ++x)
      if (hs.prob_is_one[size_t(x)]) from.add(x);
    hit1.push_back(std::move(from));
  }

  UniquenessCertificate cert;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      int wa = -1, wb = -1;
      for (int a = 0; a < n && wa < 0; ++a) {
        if (!hit1[size_t(a)].contains(x)) continue;
        for (int b = 0; b < n; ++b) {
          if (!k.poset().leq(a, b)) continue;
          if (hit1[size_t(b)].contains(y)) {
            wa = a;
            wb = b;
            break;
          }
        }
      }
      if (wa < 0) {
        cert.ok = false;
        cert.fail_x = x;
        cert.fail_y = y;
        cert.witnesses.clear();
        return cert;
      }
      cert.witnesses.push_back({x, y, wa, wb});
    }
  }
  cert.ok = true;
  if (!stationary_report(k).unique)
    throw InvariantViolation(
        "uniqueness witnesses exist but the chain has several closed classes");
  return cert;
}

}  // namespace momc
