#include "momc/regeneration.hpp"

#include <cmath>
#include <limits>

#include "momc/errors.hpp"
#include "momc/order.hpp"

namespace momc {

namespace {

void validate_spec(const FiniteKernel& k, const RegenSpec& spec) {
  const int n = k.size();
  if (spec.x0 < 0 || spec.x0 >= n || spec.y0 < 0 || spec.y0 >= n)
    throw DimensionMismatch("anchor out of range");
  if (!k.poset().leq(spec.x0, spec.y0))
    throw ConfigError("anchors must satisfy x0 <= y0 in the partial order");
}

// Occupation summation for one anchor: start at `anchor`, kill mass entering
// `restart` at n >= 1, accumulate the surviving vectors.
OccupationMeasure occupation(const FiniteKernel& k, int anchor, const UpSet& restart,
                             int64_t horizon, double tail_tol) {
  const int n = k.size();
  const Eigen::MatrixXd& P = k.matrix();
  Eigen::RowVectorXd u = Eigen::RowVectorXd::Zero(n);
  u(anchor) = 1.0;
  Eigen::RowVectorXd occ = u;
  double mean_cycle = 1.0;
  bool converged = false;
  for (int64_t t = 1; t <= horizon; ++t) {
    u = u * P;
    for (int j = 0; j < n; ++j)
      if (restart.contains(j)) u(j) = 0.0;
    const double mass = u.sum();
    occ += u;
    mean_cycle += mass;
    if (mass <= tail_tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw DivergentCycle("cycle mass from state " + std::to_string(anchor) +
                         " did not vanish within the horizon");
  std::vector<double> pi(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) pi[size_t(j)] = occ(j) / mean_cycle;
  return {Dist::from_weights(pi), mean_cycle};
}

RestartedChain restart_into(const FiniteKernel& k, int anchor, const UpSet& restart) {
  const int n = k.size();
  const Eigen::MatrixXd& P = k.matrix();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double redirected = 0.0;
    for (int j = 0; j < n; ++j) {
      if (restart.contains(j))
        redirected += P(i, j);
      else
        R(i, j) = P(i, j);
    }
    R(i, anchor) += redirected;
  }

  std::vector<int> states{anchor};
  std::vector<int> local(size_t(n), -1);
  local[size_t(anchor)] = 0;
  for (size_t qi = 0; qi < states.size(); ++qi) {
    const int i = states[qi];
    for (int j = 0; j < n; ++j)
      if (R(i, j) > 0.0 && local[size_t(j)] < 0) {
        local[size_t(j)] = int(states.size());
        states.push_back(j);
      }
  }

  const int m = int(states.size());
  std::vector<uint8_t> leq(size_t(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      leq[size_t(a) * m + b] = k.poset().leq(states[size_t(a)], states[size_t(b)]) ? 1 : 0;
  auto sub = std::make_shared<const Poset>(Poset::from_matrix(m, leq));
  Eigen::MatrixXd Q(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) Q(a, b) = R(states[size_t(a)], states[size_t(b)]);
  return {FiniteKernel(std::move(sub), std::move(Q), std::max(k.tol(), 1e-9)), std::move(states)};
}

void cross_check(const FiniteKernel& k, const RestartedChain& rc, const OccupationMeasure& om) {
  const StationaryReport rep = stationary_report(rc.kernel);
  if (!rep.unique)
    throw SolverFailure("restarted chain has several closed classes despite a convergent cycle");
  std::vector<double> embedded(size_t(k.size()), 0.0);
  for (int a = 0; a < rc.kernel.size(); ++a)
    embedded[size_t(rc.states[size_t(a)])] = rep.stationary[0][a];
  for (int j = 0; j < k.size(); ++j)
    if (std::abs(embedded[size_t(j)] - om.pi[j]) > 1e-10)
      throw SolverFailure("occupation measure disagrees with the restarted chain at state " +
                          std::to_string(j));
}

}  // namespace

PrReport check_pr(const FiniteKernel& k, const RegenSpec& spec) {
  validate_spec(k, spec);
  const HittingResult lo =
      hitting_analysis(k, up_of(k.poset(), spec.x0), spec.x0, HitConvention::FirstReturn);
  const HittingResult hi =
      hitting_analysis(k, down_of_mask(k.poset(), spec.y0), spec.y0, HitConvention::FirstReturn);
  PrReport out;
  out.e_nu_minus = lo.expected;
  out.e_nu_plus = hi.expected;
  out.holds = lo.prob_is_one && hi.prob_is_one;
  return out;
}

OccupationMeasure pi_minus_exact(const FiniteKernel& k, const RegenSpec& spec, int64_t horizon,
                                 double tail_tol) {
  validate_spec(k, spec);
  const UpSet restart = up_of(k.poset(), spec.x0);
  OccupationMeasure om = occupation(k, spec.x0, restart, horizon, tail_tol);
  cross_check(k, restart_into(k, spec.x0, restart), om);
  return om;
}

OccupationMeasure pi_plus_exact(const FiniteKernel& k, const RegenSpec& spec, int64_t horizon,
                                double tail_tol) {
  validate_spec(k, spec);
  const UpSet restart = down_of_mask(k.poset(), spec.y0);
  OccupationMeasure om = occupation(k, spec.y0, restart, horizon, tail_tol);
  cross_check(k, restart_into(k, spec.y0, restart), om);
  return om;
}

RestartedChain restarted_lower(const FiniteKernel& k, const RegenSpec& spec) {
  validate_spec(k, spec);
  return restart_into(k, spec.x0, up_of(k.poset(), spec.x0));
}

RestartedChain restarted_upper(const FiniteKernel& k, const RegenSpec& spec) {
  validate_spec(k, spec);
  return restart_into(k, spec.y0, down_of_mask(k.poset(), spec.y0));
}

MonotoneIteration monotone_iteration(const FiniteKernel& k, const Dist& pi_minus,
                                     const Dist& pi_plus, int64_t nmax, double eps) {
  const int n = k.size();
  if (pi_minus.size() != n || pi_plus.size() != n)
    throw DimensionMismatch("seed distributions must match the kernel");
  if (nmax < 1) throw ConfigError("nmax must be at least 1");
  const Poset& poset = k.poset();
  if (!dominates(pi_minus, pi_plus, poset))
    throw MonotoneViolation("lower seed does not lie below the upper seed");

  MonotoneIteration out{.sequence = {pi_minus},
                        .converged_at = -1,
                        .limit = pi_minus,
                        .limit_residual = std::numeric_limits<double>::infinity()};
  const Eigen::MatrixXd& P = k.matrix();
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(n);
  for (int j = 0; j < n; ++j) mu(j) = pi_minus[j];

  for (int64_t step = 0; step < nmax; ++step) {
    const Eigen::RowVectorXd next = mu * P;
    std::vector<double> nv(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) nv[size_t(j)] = next(j);
    Dist mu_next(std::move(nv), std::max(k.tol(), 1e-9));
    const Dist& mu_cur = out.sequence.back();
    if (!dominates(mu_cur, mu_next, poset))
      throw MonotoneViolation("iterate " + std::to_string(step) +
                              " is not below its successor; the kernel is not monotone or the "
                              "seed is not superinvariant");
    if (!dominates(mu_next, pi_plus, poset))
      throw MonotoneViolation("iterate " + std::to_string(step + 1) +
                              " escapes above the upper seed");
    const double delta = mu_cur.l1_distance(mu_next);
    out.sequence.push_back(mu_next);
    if (delta <= eps) {
      out.converged_at = step;
      out.limit = out.sequence.back();
      break;
    }
    mu = next;
  }
  if (out.converged_at < 0)
    throw NotConverged("push-forward increments stayed above eps for " + std::to_string(nmax) +
                       " steps");

  Eigen::RowVectorXd lim = Eigen::RowVectorXd::Zero(n);
  for (int j = 0; j < n; ++j) lim(j) = out.limit[j];
  out.limit_residual = (lim * P - lim).cwiseAbs().sum();
  if (out.limit_residual > 1e-8)
    throw SolverFailure("converged iterate is not stationary to 1e-8 (residual " +
                        std::to_string(out.limit_residual) + ")");
  return out;
}

}  // namespace momc
