#include "momc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include "momc/errors.hpp"
#include "momc/order.hpp"
#include "momc/rng.hpp"

namespace momc {

namespace {

constexpr uint32_t kChanX = 0;
constexpr uint32_t kChanY = 1;
constexpr uint32_t kChanAux = 2;
constexpr size_t kExactCap = size_t(1) << 22;

int resolve_jobs(int jobs, int64_t reps) {
  if (jobs < 1) jobs = 1;
  if (jobs > 64) jobs = 64;
  if (reps > 0 && int64_t(jobs) > reps) jobs = int(reps);
  return jobs;
}

// Contiguous replication blocks, one per worker; block boundaries never
// influence results because draws are addressed by absolute rep index.
void parallel_blocks(int64_t reps, int jobs,
                     const std::function<void(int, int64_t, int64_t)>& body) {
  if (jobs <= 1) {
    body(0, 0, reps);
    return;
  }
  const int64_t per = (reps + jobs - 1) / jobs;
  std::vector<std::exception_ptr> errs(jobs);
  std::vector<std::thread> threads;
  for (int w = 0; w < jobs; ++w) {
    const int64_t r0 = per * w, r1 = std::min<int64_t>(reps, r0 + per);
    if (r0 >= r1) break;
    threads.emplace_back([&body, &errs, w, r0, r1] {
      try {
        body(w, r0, r1);
      } catch (...) {
        errs[size_t(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

bool coord_in_finite(const IndexSet& s, const std::function<bool(const State&)>& f,
                     const Poset& poset, int x) {
  if (s.ground_size() == poset.size()) return s.contains(x);
  if (f) return f(State(int64_t(x)));
  throw ConfigError("coordinate predicate has no usable form for this space");
}

// Sparse one-step joint law over flat pair indices, weights normalized to 1.
struct JointTable {
  std::vector<int32_t> pair_of;
  std::vector<double> w;
  std::vector<double> cum;

  int32_t sample(double u) const {
    const double target = u * cum.back();
    size_t i = size_t(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin());
    if (i >= cum.size()) i = cum.size() - 1;
    return pair_of[i];
  }
};

JointTable make_table(const std::vector<std::pair<int32_t, double>>& entries) {
  double total = 0.0;
  for (const auto& [p, weight] : entries)
    if (weight > 0.0) total += weight;
  if (total <= 0.0) throw SolverFailure("joint step law has no mass");
  JointTable t;
  t.pair_of.reserve(entries.size());
  t.w.reserve(entries.size());
  t.cum.reserve(entries.size());
  double acc = 0.0;
  for (const auto& [p, weight] : entries) {
    if (weight <= 0.0) continue;
    const double nw = weight / total;
    acc += nw;
    t.pair_of.push_back(p);
    t.w.push_back(nw);
    t.cum.push_back(acc);
  }
  t.cum.back() = 1.0;
  return t;
}

// Quantile coupling of two kernel rows: walk both distributions in state
// order, pairing equal amounts of mass.
std::vector<std::pair<int32_t, double>> comono_entries(const FiniteKernel& kx,
                                                       const FiniteKernel& ky, int x, int y) {
  const Eigen::MatrixXd& Px = kx.matrix();
  const Eigen::MatrixXd& Py = ky.matrix();
  const int n = kx.size();
  std::vector<std::pair<int32_t, double>> out;
  int i = -1, j = -1;
  double rx = 0.0, ry = 0.0;
  auto next_i = [&] {
    ++i;
    while (i < n && Px(x, i) <= 0.0) ++i;
    rx = (i < n) ? Px(x, i) : 0.0;
  };
  auto next_j = [&] {
    ++j;
    while (j < n && Py(y, j) <= 0.0) ++j;
    ry = (j < n) ? Py(y, j) : 0.0;
  };
  next_i();
  next_j();
  while (i < n && j < n) {
    const double m = std::min(rx, ry);
    if (m > 0.0) out.emplace_back(int32_t(i) * n + j, m);
    rx -= m;
    ry -= m;
    if (rx <= 0.0) next_i();
    if (ry <= 0.0) next_j();
  }
  return out;
}

std::vector<std::pair<int32_t, double>> strassen_entries(StrassenSolver& solver,
                                                         const FiniteKernel& kx,
                                                         const FiniteKernel& ky, int x, int y) {
  const Coupling c = solver.couple(kx.row(x), ky.row(y));
  const int n = kx.size();
  std::vector<std::pair<int32_t, double>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (c.lambda(i, j) > 0.0) out.emplace_back(int32_t(i) * n + j, c.lambda(i, j));
  return out;
}

// One-step joint sampling and per-pair joint tables for a fixed kernel pair.
// Tables are built lazily and shared across replication workers; the values
// are pure functions of the pair, so build order never matters.
class PairStepper {
 public:
  PairStepper(const FiniteKernel& kx, const FiniteKernel& ky) : kx_(kx), ky_(ky), n_(kx.size()) {}

  std::pair<int, int> sample(const BasicPolicy& pol, int x, int y, uint64_t seed, uint64_t rep,
                             uint64_t step) {
    switch (pol.kind) {
      case BasicPolicy::Kind::Independent: {
        const double ux = uniform01(seed, rep, step, kChanX);
        const double uy = uniform01(seed, rep, step, kChanY);
        return {kx_.sample_next(x, ux), ky_.sample_next(y, uy)};
      }
      case BasicPolicy::Kind::CommonNoise: {
        const double u = uniform01(seed, rep, step, kChanX);
        return {kx_.sample_next(x, u), ky_.sample_next(y, u)};
      }
      case BasicPolicy::Kind::StrassenMonotone: {
        const JointTable& t = strassen(x, y);
        const int32_t p = t.sample(uniform01(seed, rep, step, kChanAux));
        return {p / n_, p % n_};
      }
      case BasicPolicy::Kind::JointMatrix: {
        const double u = uniform01(seed, rep, step, kChanAux);
        const Eigen::MatrixXd& J = *pol.joint;
        const int64_t row = int64_t(x) * n_ + y;
        double acc = 0.0;
        int64_t last = -1;
        for (int64_t q = 0; q < J.cols(); ++q) {
          const double v = J(row, q);
          if (v <= 0.0) continue;
          acc += v;
          last = q;
          if (u < acc) break;
        }
        if (last < 0) throw SolverFailure("joint matrix row has no mass");
        return {int(last / n_), int(last % n_)};
      }
    }
    throw ConfigError("unhandled policy kind");
  }

  const JointTable& strassen(int x, int y) {
    return cached(strassen_cache_, x, y, [this](int a, int b) {
      if (!kx_.poset().leq(a, b))
        throw PolicyInapplicable("monotone coupling started from unordered pair (" +
                                 std::to_string(a) + ", " + std::to_string(b) + ")");
      try {
        return make_table(strassen_entries(solver(), kx_, ky_, a, b));
      } catch (const NotDominated&) {
        throw PolicyInapplicable("rows at pair (" + std::to_string(a) + ", " + std::to_string(b) +
                                 ") are not stochastically ordered");
      }
    });
  }

  const JointTable& comono(int x, int y) {
    return cached(comono_cache_, x, y,
                  [this](int a, int b) { return make_table(comono_entries(kx_, ky_, a, b)); });
  }

 private:
  StrassenSolver& solver() {
    if (!solver_) solver_.emplace(kx_.poset_ptr());
    return *solver_;
  }

  template <class Build>
  const JointTable& cached(std::map<std::pair<int, int>, JointTable>& cache, int x, int y,
                           Build&& build) {
    const std::pair<int, int> key{x, y};
    {
      std::shared_lock lk(mu_);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    std::unique_lock lk(mu_);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build(x, y)).first;
    return it->second;
  }

  const FiniteKernel& kx_;
  const FiniteKernel& ky_;
  int n_;
  std::optional<StrassenSolver> solver_;  // built under the write lock only
  std::map<std::pair<int, int>, JointTable> comono_cache_, strassen_cache_;
  std::shared_mutex mu_;
};

const BasicPolicy& active_policy(const CouplingPolicy& pol, int stage) {
  return pol.kind == CouplingPolicy::Kind::Basic ? pol.basic : pol.stages[size_t(stage)].policy;
}

// Re-evaluate stage rules at an arrival, following stage changes without
// advancing time.  Bounded by the stage count: any longer chain must revisit
// a stage with a zero clock and would loop forever.
template <class Fires>
void run_cascade(const CouplingPolicy& pol, int& stage, int64_t& steps, Fires&& fires) {
  if (pol.kind != CouplingPolicy::Kind::Switched) return;
  int guard = int(pol.stages.size()) + 1;
  for (;;) {
    bool moved = false;
    for (const SwitchRule& r : pol.stages[size_t(stage)].rules) {
      if (fires(r.when, steps)) {
        stage = r.next;
        steps = 0;
        moved = true;
        break;
      }
    }
    if (!moved) return;
    if (--guard < 0) throw ConfigError("stage rules cycle without advancing time");
  }
}

void validate_basic(const BasicPolicy& b, int n) {
  if (b.kind != BasicPolicy::Kind::JointMatrix) return;
  if (!b.joint) throw ConfigError("joint-matrix policy carries no matrix");
  const Eigen::MatrixXd& J = *b.joint;
  const int64_t m = int64_t(n) * n;
  if (J.rows() != m || J.cols() != m)
    throw DimensionMismatch("joint matrix must be n^2 x n^2 over pair indices");
  for (int64_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (int64_t c = 0; c < m; ++c) {
      if (J(r, c) < -1e-12) throw ConfigError("joint matrix has a negative entry");
      if (J(r, c) > 0.0) s += J(r, c);
    }
    if (std::abs(s - 1.0) > 1e-9)
      throw ConfigError("joint matrix row " + std::to_string(r) + " is not stochastic");
  }
}

void validate_policy(const CouplingPolicy& pol, int n) {
  if (pol.kind == CouplingPolicy::Kind::Basic) {
    validate_basic(pol.basic, n);
    return;
  }
  if (pol.stages.empty()) throw ConfigError("switched policy needs at least one stage");
  for (const SwitchStage& st : pol.stages) {
    validate_basic(st.policy, n);
    for (const SwitchRule& r : st.rules)
      if (r.next < 0 || r.next >= int(pol.stages.size()))
        throw ConfigError("stage rule targets a nonexistent stage");
  }
}

void validate_pair_inputs(const FiniteKernel& kx, const FiniteKernel& ky, int x0, int y0,
                          int64_t horizon, const CouplingPolicy& policy) {
  if (kx.size() != ky.size()) throw DimensionMismatch("coupled kernels must share a state space");
  const int n = kx.size();
  if (x0 < 0 || x0 >= n || y0 < 0 || y0 >= n) throw DimensionMismatch("start pair out of range");
  if (horizon < 0) throw DimensionMismatch("negative horizon");
  validate_policy(policy, n);
}

std::pair<State, State> recursion_step(const RecursionKernel& kx, const RecursionKernel& ky,
                                       const BasicPolicy& pol, const State& x, const State& y,
                                       uint64_t seed, uint64_t rep, uint64_t step) {
  switch (pol.kind) {
    case BasicPolicy::Kind::Independent: {
      const double ux = uniform01(seed, rep, step, kChanX);
      const double uy = uniform01(seed, rep, step, kChanY);
      return {kx.step(x, ux), ky.step(y, uy)};
    }
    case BasicPolicy::Kind::CommonNoise: {
      const double u = uniform01(seed, rep, step, kChanX);
      return {kx.step(x, u), ky.step(y, u)};
    }
    case BasicPolicy::Kind::StrassenMonotone: {
      // realized pathwise as common noise; sound only for monotone updates
      if (!kx.monotone_in_state() || !ky.monotone_in_state())
        throw PolicyInapplicable("monotone coupling on recursions needs monotone-in-state updates");
      if (!kx.space().leq(x, y))
        throw PolicyInapplicable("monotone coupling started from unordered pair " +
                                 state_to_string(x) + ", " + state_to_string(y));
      const double u = uniform01(seed, rep, step, kChanX);
      return {kx.step(x, u), ky.step(y, u)};
    }
    case BasicPolicy::Kind::JointMatrix:
      throw PolicyInapplicable("joint-matrix policies need finite kernels");
  }
  throw ConfigError("unhandled policy kind");
}

void validate_recursion_inputs(const RecursionKernel& kx, const RecursionKernel& ky,
                               const State& x0, const State& y0, int64_t horizon) {
  if (kx.space_ptr() != ky.space_ptr() && kx.space().name() != ky.space().name())
    throw DimensionMismatch("coupled recursions must share a space");
  if (!kx.space().contains(x0) || !ky.space().contains(y0))
    throw DomainError("start pair outside the space");
  if (horizon < 0) throw DimensionMismatch("negative horizon");
}

int64_t stage_clock_cap(const SwitchStage& st) {
  int64_t cap = 0;
  const std::function<void(const StoppingPredicate&)> scan = [&](const StoppingPredicate& p) {
    if (p.kind == StoppingPredicate::Kind::StepsInStage) cap = std::max(cap, p.t);
    for (const StoppingPredicate& q : p.all) scan(q);
  };
  for (const SwitchRule& r : st.rules) scan(r.when);
  return cap;
}

}  // namespace

// ---------------------------------------------------------------------------
// PairSet
// ---------------------------------------------------------------------------

PairSet PairSet::diagonal() {
  PairSet s;
  s.kind = Kind::Diagonal;
  s.name = "diag";
  return s;
}

PairSet PairSet::in_m() {
  PairSet s;
  s.kind = Kind::InM;
  s.name = "M";
  return s;
}

PairSet PairSet::everything() {
  PairSet s;
  s.kind = Kind::Predicate;
  s.name = "all";
  s.fn = [](const State&, const State&) { return true; };
  return s;
}

PairSet PairSet::product(IndexSet a, IndexSet b, std::string name) {
  PairSet s;
  s.kind = Kind::Product;
  s.name = std::move(name);
  s.a = std::move(a);
  s.b = std::move(b);
  return s;
}

PairSet PairSet::product(std::function<bool(const State&)> fa, std::function<bool(const State&)> fb,
                         std::string name) {
  PairSet s;
  s.kind = Kind::Product;
  s.name = std::move(name);
  s.fa = std::move(fa);
  s.fb = std::move(fb);
  return s;
}

PairSet PairSet::explicit_pairs(std::vector<std::pair<int, int>> pairs, std::string name) {
  PairSet s;
  s.kind = Kind::Pairs;
  s.name = std::move(name);
  std::sort(pairs.begin(), pairs.end());
  s.pairs = std::move(pairs);
  return s;
}

PairSet PairSet::predicate(std::function<bool(const State&, const State&)> fn, std::string name) {
  PairSet s;
  s.kind = Kind::Predicate;
  s.name = std::move(name);
  s.fn = std::move(fn);
  return s;
}

bool PairSet::contains(const Poset& poset, int x, int y) const {
  switch (kind) {
    case Kind::Diagonal:
      return x == y;
    case Kind::InM:
      return poset.leq(x, y);
    case Kind::Product:
      if (a.ground_size() == poset.size() && b.ground_size() == poset.size())
        return a.contains(x) && b.contains(y);
      if (fa && fb) return fa(State(int64_t(x))) && fb(State(int64_t(y)));
      throw DimensionMismatch("pair set '" + name + "' does not fit this state space");
    case Kind::Pairs:
      return std::binary_search(pairs.begin(), pairs.end(), std::pair<int, int>{x, y});
    case Kind::Predicate:
      return fn(State(int64_t(x)), State(int64_t(y)));
  }
  return false;
}

bool PairSet::contains(const OrderedSpace& space, const State& x, const State& y) const {
  switch (kind) {
    case Kind::Diagonal:
      return state_equal(x, y);
    case Kind::InM:
      return space.leq(x, y);
    case Kind::Product:
      if (fa && fb) return fa(x) && fb(y);
      throw ConfigError("pair set '" + name + "' has no general-state form");
    case Kind::Pairs:
      throw ConfigError("explicit pair lists need finite state indices");
    case Kind::Predicate:
      return fn(x, y);
  }
  return false;
}

// ---------------------------------------------------------------------------
// StoppingPredicate
// ---------------------------------------------------------------------------

StoppingPredicate StoppingPredicate::never() { return {}; }

StoppingPredicate StoppingPredicate::pair_in(PairSet s) {
  StoppingPredicate p;
  p.kind = Kind::PairIn;
  p.set = std::move(s);
  return p;
}

StoppingPredicate StoppingPredicate::first_coord_in(IndexSet s) {
  StoppingPredicate p;
  p.kind = Kind::FirstCoordIn;
  p.cset = std::move(s);
  return p;
}

StoppingPredicate StoppingPredicate::first_coord_in(std::function<bool(const State&)> f) {
  StoppingPredicate p;
  p.kind = Kind::FirstCoordIn;
  p.cfn = std::move(f);
  return p;
}

StoppingPredicate StoppingPredicate::second_coord_in(IndexSet s) {
  StoppingPredicate p;
  p.kind = Kind::SecondCoordIn;
  p.cset = std::move(s);
  return p;
}

StoppingPredicate StoppingPredicate::time_at_least(int64_t t) {
  StoppingPredicate p;
  p.kind = Kind::TimeAtLeast;
  p.t = t;
  return p;
}

StoppingPredicate StoppingPredicate::steps_in_stage(int64_t t) {
  StoppingPredicate p;
  p.kind = Kind::StepsInStage;
  p.t = t;
  return p;
}

StoppingPredicate StoppingPredicate::all_of(std::vector<StoppingPredicate> preds) {
  StoppingPredicate p;
  p.kind = Kind::AllOf;
  p.all = std::move(preds);
  return p;
}

bool StoppingPredicate::fires(const Poset& poset, int x, int y, int64_t time,
                              int64_t steps) const {
  switch (kind) {
    case Kind::Never:
      return false;
    case Kind::PairIn:
      return set.contains(poset, x, y);
    case Kind::FirstCoordIn:
      return coord_in_finite(cset, cfn, poset, x);
    case Kind::SecondCoordIn:
      return coord_in_finite(cset, cfn, poset, y);
    case Kind::TimeAtLeast:
      return time >= t;
    case Kind::StepsInStage:
      return steps >= t;
    case Kind::AllOf:
      for (const StoppingPredicate& p : all)
        if (!p.fires(poset, x, y, time, steps)) return false;
      return true;
  }
  return false;
}

bool StoppingPredicate::fires(const OrderedSpace& space, const State& x, const State& y,
                              int64_t time, int64_t steps) const {
  switch (kind) {
    case Kind::Never:
      return false;
    case Kind::PairIn:
      return set.contains(space, x, y);
    case Kind::FirstCoordIn:
      if (!cfn) throw ConfigError("coordinate predicate has no general-state form");
      return cfn(x);
    case Kind::SecondCoordIn:
      if (!cfn) throw ConfigError("coordinate predicate has no general-state form");
      return cfn(y);
    case Kind::TimeAtLeast:
      return time >= t;
    case Kind::StepsInStage:
      return steps >= t;
    case Kind::AllOf:
      for (const StoppingPredicate& p : all)
        if (!p.fires(space, x, y, time, steps)) return false;
      return true;
  }
  return false;
}

bool StoppingPredicate::uses_stage_clock() const {
  if (kind == Kind::StepsInStage) return true;
  for (const StoppingPredicate& p : all)
    if (p.uses_stage_clock()) return true;
  return false;
}

// ---------------------------------------------------------------------------
// policies
// ---------------------------------------------------------------------------

BasicPolicy BasicPolicy::independent() { return {}; }

BasicPolicy BasicPolicy::common_noise() {
  BasicPolicy p;
  p.kind = Kind::CommonNoise;
  return p;
}

BasicPolicy BasicPolicy::strassen_monotone() {
  BasicPolicy p;
  p.kind = Kind::StrassenMonotone;
  return p;
}

BasicPolicy BasicPolicy::joint_matrix(Eigen::MatrixXd m) {
  BasicPolicy p;
  p.kind = Kind::JointMatrix;
  p.joint = std::make_shared<const Eigen::MatrixXd>(std::move(m));
  return p;
}

CouplingPolicy CouplingPolicy::independent() { return {}; }

CouplingPolicy CouplingPolicy::common_noise() {
  CouplingPolicy p;
  p.basic = BasicPolicy::common_noise();
  return p;
}

CouplingPolicy CouplingPolicy::strassen_monotone() {
  CouplingPolicy p;
  p.basic = BasicPolicy::strassen_monotone();
  return p;
}

CouplingPolicy CouplingPolicy::joint_matrix(Eigen::MatrixXd m) {
  CouplingPolicy p;
  p.basic = BasicPolicy::joint_matrix(std::move(m));
  return p;
}

CouplingPolicy CouplingPolicy::switched(std::vector<SwitchStage> stages) {
  CouplingPolicy p;
  p.kind = Kind::Switched;
  p.stages = std::move(stages);
  return p;
}

// ---------------------------------------------------------------------------
// simulation
// ---------------------------------------------------------------------------

CoupledPath simulate_pair(const FiniteKernel& kx, const FiniteKernel& ky,
                          const CouplingPolicy& policy, int x0, int y0, int64_t horizon,
                          uint64_t seed, uint64_t rep) {
  validate_pair_inputs(kx, ky, x0, y0, horizon, policy);
  PairStepper stepper(kx, ky);
  CoupledPath path;
  path.x.reserve(size_t(horizon) + 1);
  path.y.reserve(size_t(horizon) + 1);
  path.stage.reserve(size_t(horizon) + 1);
  int x = x0, y = y0, stage = 0;
  int64_t steps = 0;
  for (int64_t t = 0; t <= horizon; ++t) {
    run_cascade(policy, stage, steps, [&](const StoppingPredicate& p, int64_t s) {
      return p.fires(kx.poset(), x, y, t, s);
    });
    path.x.push_back(x);
    path.y.push_back(y);
    path.stage.push_back(stage);
    if (t == horizon) break;
    std::tie(x, y) = stepper.sample(active_policy(policy, stage), x, y, seed, rep, uint64_t(t));
    ++steps;
  }
  return path;
}

RecursionCoupledPath simulate_pair(const RecursionKernel& kx, const RecursionKernel& ky,
                                   const CouplingPolicy& policy, const State& x0, const State& y0,
                                   int64_t horizon, uint64_t seed, uint64_t rep) {
  validate_recursion_inputs(kx, ky, x0, y0, horizon);
  if (policy.kind == CouplingPolicy::Kind::Switched && policy.stages.empty())
    throw ConfigError("switched policy needs at least one stage");
  if (policy.kind == CouplingPolicy::Kind::Switched)
    for (const SwitchStage& st : policy.stages)
      for (const SwitchRule& r : st.rules)
        if (r.next < 0 || r.next >= int(policy.stages.size()))
          throw ConfigError("stage rule targets a nonexistent stage");
  RecursionCoupledPath path;
  path.x.reserve(size_t(horizon) + 1);
  path.y.reserve(size_t(horizon) + 1);
  path.stage.reserve(size_t(horizon) + 1);
  State x = x0, y = y0;
  int stage = 0;
  int64_t steps = 0;
  for (int64_t t = 0; t <= horizon; ++t) {
    run_cascade(policy, stage, steps, [&](const StoppingPredicate& p, int64_t s) {
      return p.fires(kx.space(), x, y, t, s);
    });
    path.x.push_back(x);
    path.y.push_back(y);
    path.stage.push_back(stage);
    if (t == horizon) break;
    std::tie(x, y) =
        recursion_step(kx, ky, active_policy(policy, stage), x, y, seed, rep, uint64_t(t));
    ++steps;
  }
  return path;
}

// ---------------------------------------------------------------------------
// tau estimation
// ---------------------------------------------------------------------------

double TailEstimate::halfwidth3(int64_t n) const {
  const double p = tail(n);
  return 3.0 * std::sqrt(std::max(p * (1.0 - p), 0.0) / double(reps));
}

namespace {

TailEstimate tails_from_counts(std::vector<std::vector<int64_t>>&& worker_counts, int64_t horizon,
                               int64_t reps, uint64_t seed) {
  std::vector<int64_t> cnt(size_t(horizon) + 2, 0);
  for (const auto& c : worker_counts)
    for (size_t i = 0; i < cnt.size(); ++i) cnt[i] += c[i];
  TailEstimate te;
  te.horizon = horizon;
  te.reps = reps;
  te.seed = seed;
  te.exceed.assign(size_t(horizon) + 1, 0);
  int64_t suffix = cnt[size_t(horizon) + 1];
  for (int64_t n = horizon; n >= 0; --n) {
    te.exceed[size_t(n)] = suffix + ((n == horizon) ? 0 : cnt[size_t(n) + 1]);
    if (n < horizon) suffix = te.exceed[size_t(n)];
  }
  te.censored_fraction = double(cnt[size_t(horizon) + 1]) / double(reps);
  return te;
}

}  // namespace

TailEstimate estimate_tau(const FiniteKernel& kx, const FiniteKernel& ky,
                          const CouplingPolicy& policy, const StoppingPredicate& H, int x0, int y0,
                          int64_t horizon, int64_t reps, uint64_t seed, int jobs) {
  validate_pair_inputs(kx, ky, x0, y0, horizon, policy);
  if (reps < 1) throw DimensionMismatch("reps must be at least 1");
  if (H.uses_stage_clock()) throw ConfigError("a stage-local clock cannot define a hitting time");
  PairStepper stepper(kx, ky);
  jobs = resolve_jobs(jobs, reps);
  std::vector<std::vector<int64_t>> counts(size_t(jobs),
                                           std::vector<int64_t>(size_t(horizon) + 2, 0));
  parallel_blocks(reps, jobs, [&](int w, int64_t r0, int64_t r1) {
    std::vector<int64_t>& cnt = counts[size_t(w)];
    for (int64_t r = r0; r < r1; ++r) {
      int x = x0, y = y0, stage = 0;
      int64_t steps = 0;
      int64_t tau = horizon + 1;
      for (int64_t t = 0; t <= horizon; ++t) {
        run_cascade(policy, stage, steps, [&](const StoppingPredicate& p, int64_t s) {
          return p.fires(kx.poset(), x, y, t, s);
        });
        if (H.fires(kx.poset(), x, y, t, 0)) {
          tau = t;
          break;
        }
        if (t == horizon) break;
        std::tie(x, y) =
            stepper.sample(active_policy(policy, stage), x, y, seed, uint64_t(r), uint64_t(t));
        ++steps;
      }
      ++cnt[size_t(tau)];
    }
  });
  return tails_from_counts(std::move(counts), horizon, reps, seed);
}

TailEstimate estimate_tau(const RecursionKernel& kx, const RecursionKernel& ky,
                          const CouplingPolicy& policy, const StoppingPredicate& H, const State& x0,
                          const State& y0, int64_t horizon, int64_t reps, uint64_t seed, int jobs) {
  validate_recursion_inputs(kx, ky, x0, y0, horizon);
  if (reps < 1) throw DimensionMismatch("reps must be at least 1");
  if (H.uses_stage_clock()) throw ConfigError("a stage-local clock cannot define a hitting time");
  jobs = resolve_jobs(jobs, reps);
  std::vector<std::vector<int64_t>> counts(size_t(jobs),
                                           std::vector<int64_t>(size_t(horizon) + 2, 0));
  parallel_blocks(reps, jobs, [&](int w, int64_t r0, int64_t r1) {
    std::vector<int64_t>& cnt = counts[size_t(w)];
    for (int64_t r = r0; r < r1; ++r) {
      State x = x0, y = y0;
      int stage = 0;
      int64_t steps = 0;
      int64_t tau = horizon + 1;
      for (int64_t t = 0; t <= horizon; ++t) {
        run_cascade(policy, stage, steps, [&](const StoppingPredicate& p, int64_t s) {
          return p.fires(kx.space(), x, y, t, s);
        });
        if (H.fires(kx.space(), x, y, t, 0)) {
          tau = t;
          break;
        }
        if (t == horizon) break;
        std::tie(x, y) =
            recursion_step(kx, ky, active_policy(policy, stage), x, y, seed, uint64_t(r), uint64_t(t));
        ++steps;
      }
      ++cnt[size_t(tau)];
    }
  });
  return tails_from_counts(std::move(counts), horizon, reps, seed);
}

// ---------------------------------------------------------------------------
// exact product-chain iteration
// ---------------------------------------------------------------------------

namespace {

struct ClassLayout {
  struct Cls {
    int stage;
    int64_t phase;
  };
  std::vector<Cls> classes;
  std::vector<int> offset;      // per stage, index of its phase-0 class
  std::vector<int64_t> caps;    // per stage, clock saturation value

  int index(int stage, int64_t phase) const {
    return offset[size_t(stage)] + int(std::min(phase, caps[size_t(stage)]));
  }
};

ClassLayout layout_for(const CouplingPolicy& pol) {
  ClassLayout lay;
  if (pol.kind == CouplingPolicy::Kind::Basic) {
    lay.classes.push_back({0, 0});
    lay.offset = {0};
    lay.caps = {0};
    return lay;
  }
  for (int s = 0; s < int(pol.stages.size()); ++s) {
    const int64_t cap = stage_clock_cap(pol.stages[size_t(s)]);
    lay.offset.push_back(int(lay.classes.size()));
    lay.caps.push_back(cap);
    for (int64_t c = 0; c <= cap; ++c) lay.classes.push_back({s, c});
  }
  return lay;
}

}  // namespace

std::vector<double> exact_tau_tail(const FiniteKernel& kx, const FiniteKernel& ky,
                                   const CouplingPolicy& policy, const PairSet& H, int x0, int y0,
                                   int64_t nmax) {
  validate_pair_inputs(kx, ky, x0, y0, nmax, policy);
  const int n = kx.size();
  const ClassLayout lay = layout_for(policy);
  if (lay.classes.size() * size_t(n) * size_t(n) > kExactCap)
    throw CapExceeded("product chain with stage clocks exceeds the exact-iteration cap");
  PairStepper stepper(kx, ky);

  std::vector<Eigen::MatrixXd> V(lay.classes.size(), Eigen::MatrixXd::Zero(n, n));
  V[0](x0, y0) = 1.0;
  std::vector<double> tail(size_t(nmax) + 1, 0.0);

  for (int64_t t = 0; t <= nmax; ++t) {
    // arrival: cascade stage rules, absorb mass sitting in H
    std::vector<Eigen::MatrixXd> W(lay.classes.size(), Eigen::MatrixXd::Zero(n, n));
    double alive = 0.0;
    for (size_t c = 0; c < lay.classes.size(); ++c) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double m = V[c](i, j);
          if (m <= 0.0) continue;
          int s = lay.classes[c].stage;
          int64_t ph = lay.classes[c].phase;
          run_cascade(policy, s, ph, [&](const StoppingPredicate& p, int64_t sc) {
            return p.fires(kx.poset(), i, j, t, sc);
          });
          if (H.contains(kx.poset(), i, j)) continue;
          W[size_t(lay.index(s, ph))](i, j) += m;
          alive += m;
        }
      }
    }
    tail[size_t(t)] = alive;
    if (t == nmax || alive == 0.0) break;

    std::vector<Eigen::MatrixXd> U(lay.classes.size(), Eigen::MatrixXd::Zero(n, n));
    for (size_t c = 0; c < lay.classes.size(); ++c) {
      if (W[c].lpNorm<1>() == 0.0) continue;
      const int s = lay.classes[c].stage;
      const int dst = lay.index(s, lay.classes[c].phase + 1);
      const BasicPolicy& bp = active_policy(policy, s);
      switch (bp.kind) {
        case BasicPolicy::Kind::Independent:
          U[size_t(dst)] += kx.matrix().transpose() * W[c] * ky.matrix();
          break;
        case BasicPolicy::Kind::CommonNoise:
        case BasicPolicy::Kind::StrassenMonotone:
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              const double m = W[c](i, j);
              if (m <= 0.0) continue;
              const JointTable& tab = (bp.kind == BasicPolicy::Kind::CommonNoise)
                                          ? stepper.comono(i, j)
                                          : stepper.strassen(i, j);
              for (size_t e = 0; e < tab.pair_of.size(); ++e)
                U[size_t(dst)](tab.pair_of[e] / n, tab.pair_of[e] % n) += m * tab.w[e];
            }
          break;
        case BasicPolicy::Kind::JointMatrix: {
          const Eigen::MatrixXd& J = *bp.joint;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              const double m = W[c](i, j);
              if (m <= 0.0) continue;
              const int64_t row = int64_t(i) * n + j;
              for (int64_t q = 0; q < J.cols(); ++q)
                if (J(row, q) > 0.0) U[size_t(dst)](int(q / n), int(q % n)) += m * J(row, q);
            }
          break;
        }
      }
    }
    V = std::move(U);
  }
  return tail;
}

// ---------------------------------------------------------------------------
// joint row
// ---------------------------------------------------------------------------

std::vector<double> policy_joint_row(const FiniteKernel& kx, const FiniteKernel& ky,
                                     const BasicPolicy& policy, int x, int y) {
  if (kx.size() != ky.size()) throw DimensionMismatch("coupled kernels must share a state space");
  const int n = kx.size();
  if (x < 0 || x >= n || y < 0 || y >= n) throw DimensionMismatch("pair out of range");
  validate_basic(policy, n);
  std::vector<double> row(size_t(n) * n, 0.0);
  switch (policy.kind) {
    case BasicPolicy::Kind::Independent:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) row[size_t(i) * n + j] = kx.matrix()(x, i) * ky.matrix()(y, j);
      break;
    case BasicPolicy::Kind::CommonNoise: {
      const JointTable t = make_table(comono_entries(kx, ky, x, y));
      for (size_t e = 0; e < t.pair_of.size(); ++e) row[size_t(t.pair_of[e])] += t.w[e];
      break;
    }
    case BasicPolicy::Kind::StrassenMonotone: {
      if (!kx.poset().leq(x, y))
        throw PolicyInapplicable("monotone coupling started from unordered pair (" +
                                 std::to_string(x) + ", " + std::to_string(y) + ")");
      StrassenSolver solver(kx.poset_ptr());
      try {
        const JointTable t = make_table(strassen_entries(solver, kx, ky, x, y));
        for (size_t e = 0; e < t.pair_of.size(); ++e) row[size_t(t.pair_of[e])] += t.w[e];
      } catch (const NotDominated&) {
        throw PolicyInapplicable("rows at pair (" + std::to_string(x) + ", " + std::to_string(y) +
                                 ") are not stochastically ordered");
      }
      break;
    }
    case BasicPolicy::Kind::JointMatrix: {
      const Eigen::MatrixXd& J = *policy.joint;
      for (int64_t q = 0; q < J.cols(); ++q) row[size_t(q)] = J(int64_t(x) * n + y, q);
      break;
    }
  }
  return row;
}

// ---------------------------------------------------------------------------
// lemma coupling
// ---------------------------------------------------------------------------

LemmaCoupling build_lemma_coupling(const FiniteKernel& k, const IndexSet& C, const IndexSet& A,
                                   const IndexSet& B, int64_t N, const BasicPolicy& inner) {
  const int n = k.size();
  if (C.ground_size() != n || A.ground_size() != n || B.ground_size() != n)
    throw DimensionMismatch("subsets must live on the kernel's state space");
  if (C.count() == 0 || A.count() == 0 || B.count() == 0)
    throw ConfigError("C, A and B must be nonempty");
  if (N < 1) throw ConfigError("burn-in length N must be at least 1");
  if (inner.kind != BasicPolicy::Kind::Independent && inner.kind != BasicPolicy::Kind::CommonNoise)
    throw ConfigError("seek stage supports the independent and common-noise policies");
  for (int a : A.indices())
    for (int b : B.indices())
      if (!k.poset().leq(a, b))
        throw ConfigError("A must lie elementwise below B (offending pair " + std::to_string(a) +
                          ", " + std::to_string(b) + ")");

  // split mass after N steps
  const Eigen::MatrixXd Q = n_step(k, N).matrix();
  double eps = 1.0;
  for (int x : C.indices()) {
    double to_a = 0.0, to_b = 0.0;
    for (int j = 0; j < n; ++j) {
      if (A.contains(j)) to_a += Q(x, j);
      if (B.contains(j)) to_b += Q(x, j);
    }
    eps = std::min(eps, std::min(to_a, to_b));
  }
  if (eps <= 0.0) throw BadSplit("some state in C has no N-step mass in A or in B");

  // C x C must be reached from every pair under the seek policy; on a finite
  // product chain, reachability from everywhere is the same as almost-sure
  // hitting from everywhere.
  {
    const int64_t pairs = int64_t(n) * n;
    std::vector<std::vector<int32_t>> pred(static_cast<size_t>(pairs));
    if (inner.kind == BasicPolicy::Kind::Independent) {
      std::vector<std::vector<int32_t>> col_supp(static_cast<size_t>(n));
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
          if (k.matrix()(i, j) > 0.0) col_supp[size_t(j)].push_back(i);
      for (int32_t p = 0; p < pairs; ++p) {
        const int xi = p / n, yj = p % n;
        for (int32_t px : col_supp[size_t(xi)])
          for (int32_t py : col_supp[size_t(yj)]) pred[size_t(p)].push_back(px * n + py);
      }
    } else {
      PairStepper stepper(k, k);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const JointTable& t = stepper.comono(i, j);
          for (int32_t q : t.pair_of) pred[size_t(q)].push_back(int32_t(i) * n + j);
        }
    }
    std::vector<uint8_t> seen(size_t(pairs), 0);
    std::vector<int32_t> queue;
    for (int x : C.indices())
      for (int y : C.indices()) {
        const int32_t p = int32_t(x) * n + y;
        if (!seen[size_t(p)]) {
          seen[size_t(p)] = 1;
          queue.push_back(p);
        }
      }
    for (size_t qi = 0; qi < queue.size(); ++qi)
      for (int32_t p : pred[size_t(queue[qi])])
        if (!seen[size_t(p)]) {
          seen[size_t(p)] = 1;
          queue.push_back(p);
        }
    for (int32_t p = 0; p < pairs; ++p)
      if (!seen[size_t(p)])
        throw PolicyInapplicable("C x C is unreachable from pair (" + std::to_string(p / n) + ", " +
                                 std::to_string(p % n) + ") under the seek policy");
  }

  PairSet cxc = PairSet::product(C, C, "CxC");
  PairSet axb = PairSet::product(A, B, "AxB");
  std::vector<SwitchStage> stages(3);
  stages[LemmaCoupling::kSeekStage] = {inner,
                                       {{StoppingPredicate::pair_in(std::move(cxc)),
                                         LemmaCoupling::kBurninStage}},
                                       "seek"};
  stages[LemmaCoupling::kBurninStage] = {
      BasicPolicy::independent(),
      {{StoppingPredicate::all_of({StoppingPredicate::steps_in_stage(N),
                                   StoppingPredicate::pair_in(axb)}),
        LemmaCoupling::kCoupledStage},
       {StoppingPredicate::steps_in_stage(N), LemmaCoupling::kSeekStage}},
      "burnin"};
  stages[LemmaCoupling::kCoupledStage] = {BasicPolicy::strassen_monotone(), {}, "coupled"};

  LemmaCoupling lc;
  lc.policy = CouplingPolicy::switched(std::move(stages));
  lc.eps = eps;
  lc.N = N;
  lc.C = C;
  lc.A = A;
  lc.B = B;
  return lc;
}

StageCountTail lemma_stage_count_tail(const FiniteKernel& k, const LemmaCoupling& lemma, int x0,
                                      int y0, int jmax, int64_t horizon, double resid_tol) {
  const CouplingPolicy& pol = lemma.policy;
  validate_pair_inputs(k, k, x0, y0, horizon, pol);
  if (pol.kind != CouplingPolicy::Kind::Switched || pol.stages.size() != 3)
    throw ConfigError("expected the three-stage construction");
  if (jmax < 0) throw DimensionMismatch("jmax must be nonnegative");
  const int n = k.size();
  const int amax = jmax + 1;  // saturating attempt bucket, never reported

  // circulating classes: (stage in {seek, burnin}, stage clock, attempts)
  const int64_t capb = stage_clock_cap(pol.stages[LemmaCoupling::kBurninStage]);
  const int per_attempt = 1 + int(capb) + 1;
  auto cls_of = [&](int stage, int64_t phase, int attempts) {
    const int base = (stage == LemmaCoupling::kSeekStage) ? 0 : 1 + int(std::min(phase, capb));
    return attempts * per_attempt + base;
  };
  const size_t nclasses = size_t(amax + 1) * size_t(per_attempt);
  if (nclasses * size_t(n) * size_t(n) > kExactCap)
    throw CapExceeded("attempt-augmented product chain exceeds the exact-iteration cap");
  PairStepper stepper(k, k);

  std::vector<Eigen::MatrixXd> V(nclasses, Eigen::MatrixXd::Zero(n, n));
  V[size_t(cls_of(LemmaCoupling::kSeekStage, 0, 0))](x0, y0) = 1.0;
  std::vector<double> succ(size_t(amax) + 1, 0.0);
  double alive = 1.0;

  for (int64_t t = 0; t <= horizon && alive > resid_tol; ++t) {
    std::vector<Eigen::MatrixXd> W(nclasses, Eigen::MatrixXd::Zero(n, n));
    alive = 0.0;
    for (int a = 0; a <= amax; ++a) {
      for (int sb = 0; sb < per_attempt; ++sb) {
        const Eigen::MatrixXd& M = V[size_t(a * per_attempt + sb)];
        const int stage0 = (sb == 0) ? LemmaCoupling::kSeekStage : LemmaCoupling::kBurninStage;
        const int64_t phase0 = (sb == 0) ? 0 : sb - 1;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const double m = M(i, j);
            if (m <= 0.0) continue;
            int s = stage0;
            int64_t ph = phase0;
            int att = a;
            bool succeeded = false;
            int guard = 8;
            for (;;) {
              bool moved = false;
              for (const SwitchRule& r : pol.stages[size_t(s)].rules) {
                if (r.when.fires(k.poset(), i, j, t, ph)) {
                  if (s == LemmaCoupling::kBurninStage) att = std::min(att + 1, amax);
                  s = r.next;
                  ph = 0;
                  moved = true;
                  break;
                }
              }
              if (s == LemmaCoupling::kCoupledStage) {
                succeeded = true;
                break;
              }
              if (!moved) break;
              if (--guard < 0) throw ConfigError("stage rules cycle without advancing time");
            }
            if (succeeded) {
              succ[size_t(att)] += m;
              continue;
            }
            W[size_t(cls_of(s, ph, att))](i, j) += m;
            alive += m;
          }
        }
      }
    }
    if (t == horizon || alive <= resid_tol) {
      V = std::move(W);
      break;
    }

    std::vector<Eigen::MatrixXd> U(nclasses, Eigen::MatrixXd::Zero(n, n));
    for (int a = 0; a <= amax; ++a) {
      for (int sb = 0; sb < per_attempt; ++sb) {
        const Eigen::MatrixXd& M = W[size_t(a * per_attempt + sb)];
        if (M.lpNorm<1>() == 0.0) continue;
        const int stage = (sb == 0) ? LemmaCoupling::kSeekStage : LemmaCoupling::kBurninStage;
        const int64_t phase = (sb == 0) ? 0 : sb - 1;
        const int dst = cls_of(stage, phase + 1, a);
        const BasicPolicy& bp = pol.stages[size_t(stage)].policy;
        if (bp.kind == BasicPolicy::Kind::Independent) {
          U[size_t(dst)] += k.matrix().transpose() * M * k.matrix();
        } else {
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              const double m = M(i, j);
              if (m <= 0.0) continue;
              const JointTable& tab = stepper.comono(i, j);
              for (size_t e = 0; e < tab.pair_of.size(); ++e)
                U[size_t(dst)](tab.pair_of[e] / n, tab.pair_of[e] % n) += m * tab.w[e];
            }
        }
      }
    }
    V = std::move(U);
  }

  StageCountTail out;
  out.eps = lemma.eps;
  out.residual = alive;
  out.tail.assign(size_t(jmax) + 1, 0.0);
  double cum = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    cum += succ[size_t(j)];
    out.tail[size_t(j)] = std::max(1.0 - cum, 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// pathwise order checks
// ---------------------------------------------------------------------------

PathwiseReport check_pathwise_order(const FiniteKernel& kx, const FiniteKernel& ky,
                                    const CouplingPolicy& policy, int x0, int y0, int64_t horizon,
                                    int64_t reps, uint64_t seed, int from_stage, int jobs) {
  validate_pair_inputs(kx, ky, x0, y0, horizon, policy);
  if (reps < 1) throw DimensionMismatch("reps must be at least 1");
  PairStepper stepper(kx, ky);
  jobs = resolve_jobs(jobs, reps);
  std::vector<PathwiseReport> local(static_cast<size_t>(jobs));
  parallel_blocks(reps, jobs, [&](int w, int64_t r0, int64_t r1) {
    PathwiseReport& rep = local[size_t(w)];
    for (int64_t r = r0; r < r1; ++r) {
      ++rep.reps;
      int x = x0, y = y0, stage = 0;
      int64_t steps = 0;
      for (int64_t t = 0; t <= horizon; ++t) {
        run_cascade(policy, stage, steps, [&](const StoppingPredicate& p, int64_t s) {
          return p.fires(kx.poset(), x, y, t, s);
        });
        if (stage >= from_stage) {
          ++rep.steps_checked;
          if (!kx.poset().leq(x, y)) {
            if (rep.ok) {
              rep.ok = false;
              rep.bad_rep = r;
              rep.bad_step = t;
            }
            break;
          }
        }
        if (t == horizon) break;
        std::tie(x, y) =
            stepper.sample(active_policy(policy, stage), x, y, seed, uint64_t(r), uint64_t(t));
        ++steps;
      }
    }
  });
  PathwiseReport out;
  for (const PathwiseReport& l : local) {
    out.reps += l.reps;
    out.steps_checked += l.steps_checked;
    if (!l.ok && (out.ok || l.bad_rep < out.bad_rep)) {
      out.ok = false;
      out.bad_rep = l.bad_rep;
      out.bad_step = l.bad_step;
    }
  }
  return out;
}

PathwiseReport check_pathwise_order(const RecursionKernel& kx, const RecursionKernel& ky,
                                    const CouplingPolicy& policy, const State& x0, const State& y0,
                                    int64_t horizon, int64_t reps, uint64_t seed, int from_stage,
                                    int jobs) {
  validate_recursion_inputs(kx, ky, x0, y0, horizon);
  if (reps < 1) throw DimensionMismatch("reps must be at least 1");
  jobs = resolve_jobs(jobs, reps);
  std::vector<PathwiseReport> local(static_cast<size_t>(jobs));
  parallel_blocks(reps, jobs, [&](int w, int64_t r0, int64_t r1) {
    PathwiseReport& rep = local[size_t(w)];
    for (int64_t r = r0; r < r1; ++r) {
      ++rep.reps;
      State x = x0, y = y0;
      int stage = 0;
      int64_t steps = 0;
      for (int64_t t = 0; t <= horizon; ++t) {
        run_cascade(policy, stage, steps, [&](const StoppingPredicate& p, int64_t s) {
          return p.fires(kx.space(), x, y, t, s);
        });
        if (stage >= from_stage) {
          ++rep.steps_checked;
          if (!kx.space().leq(x, y)) {
            if (rep.ok) {
              rep.ok = false;
              rep.bad_rep = r;
              rep.bad_step = t;
            }
            break;
          }
        }
        if (t == horizon) break;
        std::tie(x, y) = recursion_step(kx, ky, active_policy(policy, stage), x, y, seed,
                                        uint64_t(r), uint64_t(t));
        ++steps;
      }
    }
  });
  PathwiseReport out;
  for (const PathwiseReport& l : local) {
    out.reps += l.reps;
    out.steps_checked += l.steps_checked;
    if (!l.ok && (out.ok || l.bad_rep < out.bad_rep)) {
      out.ok = false;
      out.bad_rep = l.bad_rep;
      out.bad_step = l.bad_step;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// two-clock coupling
// ---------------------------------------------------------------------------

TwoClockPath simulate_two_clock(const FiniteKernel& kx, const FiniteKernel& ky,
                                const TwoClockSpec& spec, int x0, int y0, int64_t pre_horizon,
                                int64_t aligned_horizon, uint64_t seed, uint64_t rep) {
  if (kx.size() != ky.size()) throw DimensionMismatch("coupled kernels must share a state space");
  const int n = kx.size();
  if (x0 < 0 || x0 >= n || y0 < 0 || y0 >= n) throw DimensionMismatch("start pair out of range");
  if (spec.target_x.ground_size() != n || spec.target_y.ground_size() != n)
    throw DimensionMismatch("clock targets must live on the state space");
  if (pre_horizon < 0 || aligned_horizon < 0) throw DimensionMismatch("negative horizon");

  TwoClockPath out;
  int x = x0;
  out.x_pre.push_back(x);
  if (spec.target_x.contains(x)) {
    out.tau_x = 0;
    out.fired_x = true;
  }
  for (int64_t t = 0; t < pre_horizon && !out.fired_x; ++t) {
    x = kx.sample_next(x, uniform01(seed, rep, uint64_t(t), kChanX));
    out.x_pre.push_back(x);
    if (spec.target_x.contains(x)) {
      out.tau_x = t + 1;
      out.fired_x = true;
    }
  }
  int y = y0;
  out.y_pre.push_back(y);
  if (spec.target_y.contains(y)) {
    out.tau_y = 0;
    out.fired_y = true;
  }
  for (int64_t t = 0; t < pre_horizon && !out.fired_y; ++t) {
    y = ky.sample_next(y, uniform01(seed, rep, uint64_t(t), kChanY));
    out.y_pre.push_back(y);
    if (spec.target_y.contains(y)) {
      out.tau_y = t + 1;
      out.fired_y = true;
    }
  }
  if (out.fired_x && out.fired_y) {
    out.aligned = simulate_pair(kx, ky, CouplingPolicy::strassen_monotone(), out.x_pre.back(),
                                out.y_pre.back(), aligned_horizon, seed, rep);
  }
  return out;
}

// ---------------------------------------------------------------------------
// replicated single-chain sampling
// ---------------------------------------------------------------------------

std::vector<double> sample_values(const RecursionKernel& k, const State& x0, int64_t n,
                                  int64_t reps, uint64_t seed, int jobs,
                                  const std::function<double(const State&)>& value) {
  if (!k.space().contains(x0)) throw DomainError("start state outside the space");
  if (n < 0) throw DimensionMismatch("negative step count");
  if (reps < 1) throw DimensionMismatch("reps must be at least 1");
  std::vector<double> out(size_t(reps), 0.0);
  parallel_blocks(reps, resolve_jobs(jobs, reps), [&](int, int64_t r0, int64_t r1) {
    for (int64_t r = r0; r < r1; ++r) {
      State x = x0;
      for (int64_t t = 0; t < n; ++t) x = k.step(x, uniform01(seed, uint64_t(r), uint64_t(t), kChanX));
      out[size_t(r)] = value(x);
    }
  });
  return out;
}

std::vector<double> sample_values(const RecursionKernel& k, const State& x0, int64_t n,
                                  int64_t reps, uint64_t seed, int jobs) {
  return sample_values(k, x0, n, reps, seed, jobs, [](const State& s) {
    if (!std::holds_alternative<double>(s))
      throw ConfigError("state is not a real number; pass an explicit value map");
    return std::get<double>(s);
  });
}

}  // namespace momc
