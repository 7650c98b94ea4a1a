#include "momc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momc/errors.hpp"

namespace momc {

namespace {
constexpr int kMaxDenseStates = 2048;
}

FiniteKernel::FiniteKernel(PosetPtr poset, Eigen::MatrixXd rows, double tol)
    : poset_(std::move(poset)), P_(std::move(rows)), tol_(tol) {
  const int n = poset_->size();
  if (n > kMaxDenseStates) throw DimensionMismatch("dense kernel too large");
  if (P_.rows() != n || P_.cols() != n)
    throw DimensionMismatch("kernel matrix does not match poset size");
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      double& v = P_(i, j);
      if (!std::isfinite(v)) throw DimensionMismatch("non-finite kernel entry");
      if (v < -tol_) throw DimensionMismatch("negative kernel entry at row " + std::to_string(i));
      if (v < 0.0) v = 0.0;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol_)
      throw DimensionMismatch("kernel row " + std::to_string(i) + " sums to " + std::to_string(sum));
    if (sum != 1.0)
      for (int j = 0; j < n; ++j) P_(i, j) /= sum;
  }
  cum_.assign(size_t(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += P_(i, j);
      cum_[size_t(i) * n + j] = acc;
    }
    cum_[size_t(i) * n + (n - 1)] = 1.0;
  }
}

Dist FiniteKernel::row(int i) const {
  std::vector<double> p(size());
  for (int j = 0; j < size(); ++j) p[j] = P_(i, j);
  return Dist(std::move(p), tol_);
}

int FiniteKernel::sample_next(int i, double u) const {
  const double* c = cum_.data() + size_t(i) * size();
  const double* it = std::upper_bound(c, c + size(), u);
  int j = int(it - c);
  if (j >= size()) j = size() - 1;
  return j;
}

MonotoneCheck is_monotone(const FiniteKernel& k, double tol) {
  const int n = k.size();
  // Checking cover pairs suffices: any x <= y joins through a saturated chain
  // of covers, and stochastic dominance is transitive along it.
  if (k.poset().is_total_order()) {
    // Up-sets of a total order are the suffixes of its linear extension, so
    // dominance reduces to a suffix-sum sweep per cover.
    const std::vector<int> ext = linear_extension(k.poset());
    const Eigen::MatrixXd& P = k.matrix();
    for (const auto& [x, y] : k.poset().covers()) {
      double sx = 0.0, sy = 0.0;
      for (int t = n - 1; t >= 0; --t) {
        sx += P(x, ext[size_t(t)]);
        sy += P(y, ext[size_t(t)]);
        if (sx > sy + tol) {
          UpSet w = UpSet::empty(n);
          for (int s = t; s < n; ++s) w.add(ext[size_t(s)]);
          return {false, x, y, std::move(w)};
        }
      }
    }
    return {true, -1, -1, std::nullopt};
  }
  StrassenSolver solver(k.poset_ptr());
  for (const auto& [x, y] : k.poset().covers()) {
    DominanceResult r = solver.check(k.row(x), k.row(y), tol);
    if (!r.dominated) return {false, x, y, r.witness};
  }
  return {true, -1, -1, std::nullopt};
}

FiniteKernel n_step(const FiniteKernel& k, int64_t n) {
  if (n < 0) throw DimensionMismatch("negative step count");
  const int sz = k.size();
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(sz, sz);
  Eigen::MatrixXd base = k.matrix();
  int64_t e = n;
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  // powers of a stochastic matrix drift from row-sum 1 only by rounding;
  // construction renormalizes
  return FiniteKernel(k.poset_ptr(), std::move(result), std::max(k.tol(), 1e-9));
}

std::vector<uint64_t> support_reachability(const Eigen::MatrixXd& P, double tol) {
  const int n = int(P.rows());
  const int words = (n + 63) / 64;
  std::vector<uint64_t> reach(size_t(n) * words, 0);
  for (int i = 0; i < n; ++i) {
    reach[size_t(i) * words + (i >> 6)] |= uint64_t(1) << (i & 63);
    for (int j = 0; j < n; ++j)
      if (P(i, j) > tol) reach[size_t(i) * words + (j >> 6)] |= uint64_t(1) << (j & 63);
  }
  for (int k = 0; k < n; ++k) {
    const uint64_t* rk = reach.data() + size_t(k) * words;
    for (int i = 0; i < n; ++i) {
      if ((reach[size_t(i) * words + (k >> 6)] >> (k & 63)) & 1u) {
        uint64_t* ri = reach.data() + size_t(i) * words;
        for (int w = 0; w < words; ++w) ri[w] |= rk[w];
      }
    }
  }
  return reach;
}

// --------------------------------------------------------------------------
// stationary_report
// --------------------------------------------------------------------------

namespace {

// Kosaraju strongly connected components; components numbered in reverse
// topological order of the condensation (deterministic).
std::vector<int> scc_of(const Eigen::MatrixXd& P) {
  const int n = int(P.rows());
  std::vector<std::vector<int>> adj(n), radj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (P(i, j) > 0.0) {
        adj[i].push_back(j);
        radj[j].push_back(i);
      }
  std::vector<int> order;
  order.reserve(n);
  std::vector<uint8_t> seen(n, 0);
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    // iterative DFS recording finish order
    std::vector<std::pair<int, size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [v, idx] = stack.back();
      if (idx < adj[v].size()) {
        const int w = adj[v][idx++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (int k = n - 1; k >= 0; --k) {
    const int s = order[k];
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : radj[v])
        if (comp[w] < 0) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
    }
    ++ncomp;
  }
  return comp;
}

// Stationary vector of an irreducible row-stochastic matrix.
Eigen::VectorXd solve_stationary(const Eigen::MatrixXd& P, double resid_tol) {
  const int n = int(P.rows());
  // (P^T - I) x = 0 with one row swapped for the normalization constraint
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(0) = Eigen::RowVectorXd::Ones(n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(0) = 1.0;
  Eigen::VectorXd pi = A.fullPivLu().solve(rhs);
  auto residual = [&](const Eigen::VectorXd& v) {
    return ((P.transpose() * v - v).cwiseAbs()).sum() + std::abs(v.sum() - 1.0);
  };
  if (!pi.allFinite() || residual(pi) > resid_tol) {
    // least-squares fallback on the stacked system
    Eigen::MatrixXd B(n + 1, n);
    B.topRows(n) = P.transpose() - Eigen::MatrixXd::Identity(n, n);
    B.row(n) = Eigen::RowVectorXd::Ones(n);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
    c(n) = 1.0;
    pi = B.colPivHouseholderQr().solve(c);
    if (!pi.allFinite() || residual(pi) > resid_tol)
      throw SolverFailure("stationary solve residual too large");
  }
  bool clean = true;
  for (int i = 0; i < n; ++i)
    if (pi(i) < 0.0) clean = false;
  if (!clean) {
    for (int i = 0; i < n; ++i)
      if (pi(i) < 0.0) pi(i) = 0.0;
  }
  const double sum = pi.sum();
  if (sum != 1.0) pi /= sum;
  if (residual(pi) > resid_tol) throw SolverFailure("stationary vector failed residual check");
  return pi;
}

}  // namespace

StationaryReport stationary_report(const FiniteKernel& k, double resid_tol) {
  const int n = k.size();
  const Eigen::MatrixXd& P = k.matrix();
  const std::vector<int> comp = scc_of(P);
  const int ncomp = *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<std::vector<int>> members(ncomp);
  for (int i = 0; i < n; ++i) members[comp[i]].push_back(i);
  std::vector<uint8_t> closed(ncomp, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (P(i, j) > 0.0 && comp[i] != comp[j]) closed[comp[i]] = 0;

  StationaryReport report;
  for (int c = 0; c < ncomp; ++c) {
    if (!closed[c]) continue;
    const std::vector<int>& cls = members[c];
    const int m = int(cls.size());
    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) sub(a, b) = P(cls[a], cls[b]);
    const Eigen::VectorXd pi = solve_stationary(sub, resid_tol);
    std::vector<double> full(n, 0.0);
    for (int a = 0; a < m; ++a) full[cls[a]] = pi(a);
    report.closed_classes.push_back(cls);
    report.stationary.emplace_back(std::move(full), 1e-9);
  }
  report.unique = report.closed_classes.size() == 1;
  return report;
}

// --------------------------------------------------------------------------
// hitting analysis
// --------------------------------------------------------------------------

HittingSolve hitting_solve(const FiniteKernel& k, const UpSet& target) {
  const int n = k.size();
  if (target.ground_size() != n) throw DimensionMismatch("target set over wrong ground set");
  const Eigen::MatrixXd& P = k.matrix();

  std::vector<std::vector<int>> radj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (P(i, j) > 0.0) radj[j].push_back(i);

  // B: taboo states from which the target is reachable
  std::vector<uint8_t> in_b(n, 0);
  std::vector<int> queue;
  for (int t = 0; t < n; ++t) {
    if (!target.contains(t)) continue;
    for (int v : radj[t])
      if (!target.contains(v) && !in_b[v]) {
        in_b[v] = 1;
        queue.push_back(v);
      }
  }
  for (size_t qi = 0; qi < queue.size(); ++qi)
    for (int v : radj[queue[qi]])
      if (!target.contains(v) && !in_b[v]) {
        in_b[v] = 1;
        queue.push_back(v);
      }

  // Bad: taboo states that can reach a taboo state with no route to the target
  std::vector<uint8_t> bad(n, 0);
  queue.clear();
  for (int v = 0; v < n; ++v)
    if (!target.contains(v) && !in_b[v]) {
      bad[v] = 1;
      queue.push_back(v);
    }
  for (size_t qi = 0; qi < queue.size(); ++qi)
    for (int v : radj[queue[qi]])
      if (!target.contains(v) && !bad[v]) {
        bad[v] = 1;
        queue.push_back(v);
      }

  HittingSolve out;
  out.prob.assign(n, 0.0);
  out.expected.assign(n, std::numeric_limits<double>::infinity());
  out.prob_is_one.assign(n, 0);
  for (int t = 0; t < n; ++t)
    if (target.contains(t)) {
      out.prob[t] = 1.0;
      out.expected[t] = 0.0;
      out.prob_is_one[t] = 1;
    }

  // probabilities on B
  std::vector<int> bidx;
  std::vector<int> bpos(n, -1);
  for (int v = 0; v < n; ++v)
    if (in_b[v]) {
      bpos[v] = int(bidx.size());
      bidx.push_back(v);
    }
  if (!bidx.empty()) {
    const int m = int(bidx.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
    for (int a = 0; a < m; ++a) {
      const int v = bidx[a];
      for (int j = 0; j < n; ++j) {
        if (P(v, j) <= 0.0) continue;
        if (target.contains(j))
          r(a) += P(v, j);
        else if (bpos[j] >= 0)
          A(a, bpos[j]) += P(v, j);
      }
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m) - A;
    Eigen::VectorXd h = M.partialPivLu().solve(r);
    if (!h.allFinite()) throw SolverFailure("hitting probability solve failed");
    for (int a = 0; a < m; ++a) out.prob[bidx[a]] = std::clamp(h(a), 0.0, 1.0);
  }

  // expected times on Good = taboo and not bad
  std::vector<int> gidx;
  std::vector<int> gpos(n, -1);
  for (int v = 0; v < n; ++v)
    if (!target.contains(v) && !bad[v]) {
      gpos[v] = int(gidx.size());
      gidx.push_back(v);
      out.prob_is_one[v] = 1;
    }
  if (!gidx.empty()) {
    const int m = int(gidx.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
      const int v = gidx[a];
      for (int j = 0; j < n; ++j)
        if (P(v, j) > 0.0 && gpos[j] >= 0) A(a, gpos[j]) += P(v, j);
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m) - A;
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    Eigen::VectorXd t = M.partialPivLu().solve(ones);
    if (!t.allFinite()) throw SolverFailure("expected hitting time solve failed");
    for (int a = 0; a < m; ++a) out.expected[gidx[a]] = std::max(t(a), 0.0);
  }
  return out;
}

HittingResult hitting_analysis(const FiniteKernel& k, const UpSet& target, int start,
                               HitConvention conv) {
  const int n = k.size();
  if (start < 0 || start >= n) throw DimensionMismatch("start state out of range");
  const HittingSolve s = hitting_solve(k, target);
  if (conv == HitConvention::FirstEntry)
    return {s.prob[start], s.expected[start], s.prob_is_one[start] != 0};

  const Eigen::MatrixXd& P = k.matrix();
  double prob = 0.0, expected = 1.0;
  bool finite = true, one = true;
  for (int j = 0; j < n; ++j) {
    const double p = P(start, j);
    if (p <= 0.0) continue;
    prob += p * s.prob[j];
    if (!s.prob_is_one[j]) one = false;
    if (std::isinf(s.expected[j]))
      finite = false;
    else
      expected += p * s.expected[j];
  }
  return {std::clamp(prob, 0.0, 1.0),
          finite ? expected : std::numeric_limits<double>::infinity(), one};
}

// --------------------------------------------------------------------------
// moment_check
// --------------------------------------------------------------------------

MomentResult moment_check(const FiniteKernel& k, const std::vector<int>& C, double alpha,
                          int64_t N, int64_t horizon, double tail_tol) {
  if (alpha <= 1.0) throw DimensionMismatch("moment order alpha must exceed 1");
  if (N < 1) throw DimensionMismatch("skeleton step N must be >= 1");
  const int n = k.size();
  std::vector<uint8_t> in_c(n, 0);
  for (int x : C) {
    if (x < 0 || x >= n) throw DimensionMismatch("C contains an out-of-range state");
    in_c[x] = 1;
  }
  if (C.empty()) throw DimensionMismatch("C must be nonempty");

  const Eigen::MatrixXd Q = n_step(k, N).matrix();

  // D_reach: complement states reachable from C without re-entering C
  std::vector<uint8_t> reach(n, 0);
  std::vector<int> queue;
  for (int x : C)
    for (int j = 0; j < n; ++j)
      if (Q(x, j) > 0.0 && !in_c[j] && !reach[j]) {
        reach[j] = 1;
        queue.push_back(j);
      }
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    const int v = queue[qi];
    for (int j = 0; j < n; ++j)
      if (Q(v, j) > 0.0 && !in_c[j] && !reach[j]) {
        reach[j] = 1;
        queue.push_back(j);
      }
  }

  // back-reach of C within the complement
  std::vector<std::vector<int>> radj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (Q(i, j) > 0.0) radj[j].push_back(i);
  std::vector<uint8_t> to_c(n, 0);
  queue.clear();
  for (int c : C)
    for (int v : radj[c])
      if (!in_c[v] && !to_c[v]) {
        to_c[v] = 1;
        queue.push_back(v);
      }
  for (size_t qi = 0; qi < queue.size(); ++qi)
    for (int v : radj[queue[qi]])
      if (!in_c[v] && !to_c[v]) {
        to_c[v] = 1;
        queue.push_back(v);
      }

  bool finite = true;
  int bad_witness = -1;
  for (int v = 0; v < n && finite; ++v)
    if (reach[v] && !to_c[v]) {
      finite = false;
      bad_witness = v;
    }

  std::vector<int> didx;
  std::vector<int> dpos(n, -1);
  for (int v = 0; v < n; ++v)
    if (reach[v]) {
      dpos[v] = int(didx.size());
      didx.push_back(v);
    }
  const int m = int(didx.size());
  Eigen::MatrixXd Qdd(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) Qdd(a, b) = Q(didx[a], didx[b]);

  // power-iteration spectral radius of the taboo matrix (diagnostic)
  double rho = 0.0;
  if (m > 0) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
    for (int it = 0; it < 400; ++it) {
      Eigen::VectorXd w = Qdd * v;
      const double norm = w.lpNorm<Eigen::Infinity>();
      if (norm <= 0.0) {
        rho = 0.0;
        v.setZero();
        break;
      }
      rho = norm;
      v = w / norm;
    }
  }

  if (!finite) {
    // report a C state that can leak to the bad part
    int arg = C[0];
    for (int x : C) {
      bool leaks = false;
      for (int j = 0; j < n && !leaks; ++j)
        if (Q(x, j) > 0.0 && !in_c[j] && reach[j] && !to_c[j]) leaks = true;
      if (leaks) {
        arg = x;
        break;
      }
    }
    (void)bad_witness;
    return {std::numeric_limits<double>::infinity(), false, rho, arg};
  }

  double best = 0.0;
  int argmax = C[0];
  for (int x : C) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < n; ++j)
      if (Q(x, j) > 0.0 && !in_c[j]) u(dpos[j]) += Q(x, j);
    double moment = 1.0;  // (1^alpha - 0^alpha) * P(tau > 0), and tau >= 1 always
    double tail = u.sum();
    int64_t mstep = 1;
    while (tail >= tail_tol) {
      moment += (std::pow(double(mstep + 1), alpha) - std::pow(double(mstep), alpha)) * tail;
      if (mstep > horizon)
        throw Nonconvergent("return-time tail did not reach threshold within horizon");
      u = Qdd.transpose() * u;
      tail = u.sum();
      ++mstep;
    }
    if (moment > best) {
      best = moment;
      argmax = x;
    }
  }
  return {best, true, rho, argmax};
}

// --------------------------------------------------------------------------
// recursions
// --------------------------------------------------------------------------

State RecursionKernel::step(const State& x, double u) const {
  if (!space_->contains(x))
    throw DomainError("state " + state_to_string(x) + " outside space " + space_->name());
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("driver u outside [0,1)");
  return f_(x, u);
}

State sample_step(const RecursionKernel& k, const State& x, double u) { return k.step(x, u); }

FiniteKernel exactify(const RecursionKernel& k, PosetPtr poset, const std::vector<State>& states) {
  if (!k.u_breakpoints())
    throw ConfigError("recursion does not declare u-breakpoints; cannot exactify");
  const int n = int(states.size());
  if (poset->size() != n) throw DimensionMismatch("state list does not match poset size");
  std::vector<double> breaks{0.0};
  for (double b : k.u_breakpoints().value()) {
    if (!(b > breaks.back() && b < 1.0)) throw ConfigError("u-breakpoints must be increasing within (0,1)");
    breaks.push_back(b);
  }
  breaks.push_back(1.0);
  auto find_state = [&](const State& s) {
    for (int i = 0; i < n; ++i)
      if (state_equal(states[i], s)) return i;
    throw ConfigError("exactify: update left the declared state list at " + state_to_string(s));
  };
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (size_t t = 0; t + 1 < breaks.size(); ++t) {
      const double lo = breaks[t], hi = breaks[t + 1];
      const double mid = lo + (hi - lo) / 2;
      const State s_lo = k.step(states[i], lo);
      const State s_mid = k.step(states[i], mid);
      const State s_hi = k.step(states[i], std::nextafter(hi, lo));
      if (!state_equal(s_lo, s_mid) || !state_equal(s_mid, s_hi))
        throw ConfigError("update is not constant on a declared u-piece");
      P(i, find_state(s_mid)) += hi - lo;
    }
  }
  return FiniteKernel(std::move(poset), std::move(P));
}

}  // namespace momc
