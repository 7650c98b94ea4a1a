#include "momc/gallery.hpp"

#include <algorithm>
#include <cmath>

#include "momc/errors.hpp"
#include "momc/rng.hpp"

namespace momc {

namespace {

PosetPtr share(Poset p) { return std::make_shared<const Poset>(std::move(p)); }

Fixture make_srw2d() {
  Fixture f;
  f.name = "srw2d";
  auto space = std::make_shared<const IntLatticeSpace>(2);
  f.space = space;
  f.recursion = std::make_shared<const RecursionKernel>(
      space,
      [](const State& s, double u) -> State {
        const auto& p = std::get<LatticePoint>(s);
        int inc = int(u * 9.0);
        if (inc > 8) inc = 8;
        LatticePoint q = p;
        q[0] += inc % 3 - 1;
        q[1] += inc / 3 - 1;
        return q;
      },
      true, "srw2d");
  f.expected.monotone = true;
  f.expected.achievable_policy = "switched";
  f.expected.tight = false;
  f.notes =
      "planar walk with the nine uniform increments; the pair meets under "
      "independent steps because the difference walk is recurrent, then "
      "shared noise freezes the difference at zero";
  return f;
}

Fixture make_shift(const GalleryOptions& opt) {
  Fixture f;
  f.name = "shift_chain";
  const int d = opt.depth;
  if (d < 3) throw ConfigError("depth must be at least 3");
  // states i = 0..d-1 carry values 1/(i+1); no two distinct states comparable
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    P(i, i) = 0.5;
    P(i, i + 1) = 0.5;
  }
  P(d - 1, d - 1) = 1.0;  // truncation lump, outside every checked column
  f.finite = FiniteKernel(share(Poset::antichain(d)), std::move(P));
  auto space = std::make_shared<const RealIntervalSpace>(0.0, 1.0);
  f.space = space;
  f.recursion = std::make_shared<const RecursionKernel>(
      space,
      [](const State& s, double u) -> State {
        const double x = std::get<double>(s);
        return u < 0.5 ? x : x / (1.0 + x);
      },
      true, "shift_chain");
  f.expected.monotone = true;
  f.expected.no_stationary = true;
  f.expected.tight = true;
  f.expected.bmc_holds = false;
  for (int j = 1; j < std::min(d - 1, 100); ++j) f.balance_cols.push_back(j);
  f.notes =
      "values 1/n with a half-half hold/advance step and no order between "
      "distinct states; mass drifts toward 0 without a stationary law; the "
      "real-interval recursion is the value process, its interval order is "
      "not part of the fixture's (trivial) order";
  return f;
}

// x - tanh(x)/2 evaluated so the result is nondecreasing in x under IEEE
// rounding.  libm tanh wobbles by an ulp and is not monotone at that scale;
// a coupled pair under shared noise contracts to a 1-ulp gap within ~100
// steps, where the wobble would invert strict order.  Linear interpolation
// between dyadic knots, clamped at the right knot, is monotone stage by
// stage (knot values rise by at least h/2 - 2^-52 per cell) and stays
// within 5e-14 of the smooth drift.
double layered_drift(double x) {
  constexpr double h = 0x1p-20;
  const double x0 = std::floor(x / h) * h;
  const double d0 = x0 - std::tanh(x0) / 2.0;
  const double d1 = (x0 + h) - std::tanh(x0 + h) / 2.0;
  return std::min(d1, d0 + (d1 - d0) * ((x - x0) / h));
}

Fixture make_layered() {
  Fixture f;
  f.name = "layered_chain";
  auto space = std::make_shared<const LayeredSpace>();
  f.space = space;
  f.recursion = std::make_shared<const RecursionKernel>(
      space,
      [](const State& s, double u) -> State {
        const auto& p = std::get<LayeredPoint>(s);
        const double x = layered_drift(p.x) + normal_quantile(u);
        return LayeredPoint{p.layer == 0 ? 0 : p.layer + 1, x};
      },
      true, "layered_chain");
  f.expected.monotone = true;
  f.expected.achievable_policy = "independent";
  f.expected.tight = false;
  f.notes =
      "layer 0 holds, higher layers escalate; the drift term x - tanh(x)/2 "
      "has slope in [1/2, 1], so shared noise contracts differences at least "
      "as fast as the layer gaps halve";
  return f;
}

Fixture make_remex(const GalleryOptions& opt) {
  Fixture f;
  f.name = "remex_chain";
  const int d = opt.depth;
  if (d < 3) throw ConfigError("depth must be at least 3");
  // 2d states ordered by value: 0..d-1 are -1/1..-1/d, then d..2d-1 are 1/d..1/1
  const int n = 2 * d;
  std::vector<uint8_t> leq(size_t(n) * n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) leq[size_t(a) * n + b] = 1;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < d; ++i) P(i, i + 1) = 1.0;       // -1/k -> -1/(k+1)
  P(d - 1, d - 1) = 1.0;                                   // truncation lump
  for (int i = n - 1; i > d; --i) P(i, i - 1) = 1.0;       // 1/k -> 1/(k+1)
  P(d, d) = 1.0;                                           // truncation lump
  f.finite = FiniteKernel(share(Poset::from_matrix(n, leq)), std::move(P));
  auto space = std::make_shared<const RealIntervalSpace>(-1.0, 1.0);
  f.space = space;
  f.recursion = std::make_shared<const RecursionKernel>(
      space,
      [](const State& s, double) -> State {
        const double x = std::get<double>(s);
        return x / (1.0 + std::abs(x));
      },
      true, "remex_chain");
  f.expected.monotone = true;
  f.expected.no_stationary = true;
  f.expected.bmc_holds = false;
  f.expected.pr_holds = true;
  f.regen = RegenSpec{0, n - 1};  // -1 and +1 are the order extremes
  for (int j = 1; j < std::min(d - 1, 100); ++j) f.balance_cols.push_back(j);
  f.notes =
      "two deterministic approaches to the missing point 0; anchor returns "
      "are instant at the extremes yet balance forces equal masses, so no "
      "stationary law exists on the full chain";
  return f;
}

Fixture make_flip() {
  Fixture f;
  f.name = "flip_chain";
  Eigen::MatrixXd P(2, 2);
  P << 0, 1, 1, 0;
  f.finite = FiniteKernel(share(Poset::antichain(2)), std::move(P));
  f.space = std::make_shared<const FinitePosetSpace>(f.finite->poset_ptr());
  f.expected.monotone = true;
  f.expected.closed_classes = 1;
  f.expected.unique_stationary = true;
  f.expected.uniqueness_cert = true;
  f.expected.pr_holds = true;
  f.expected.compressibility = false;
  f.regen = RegenSpec{0, 0};
  f.notes =
      "deterministic two-cycle with no order between the states: the unique "
      "stationary law is uniform, but the laws from distinct starts stay at "
      "distance 1 forever";
  return f;
}

Fixture make_identity(const GalleryOptions& opt) {
  Fixture f;
  f.name = "identity01";
  const int m = opt.identity_points;
  if (m < 2) throw ConfigError("identity fixture needs at least 2 points");
  f.finite = FiniteKernel(share(Poset::chain(m)), Eigen::MatrixXd::Identity(m, m));
  f.space = std::make_shared<const FinitePosetSpace>(f.finite->poset_ptr());
  f.expected.monotone = true;
  f.expected.closed_classes = m;
  f.expected.unique_stationary = false;
  f.expected.uniqueness_cert = false;
  f.expected.pr_holds = true;
  f.regen = RegenSpec{0, 0};
  f.notes = "identity on a grid of [0,1]: every law is stationary";
  return f;
}

Fixture make_average(const GalleryOptions& opt) {
  Fixture f;
  f.name = "average_chain";
  f.finite = discretize_average(opt.average_states);
  auto space = std::make_shared<const RealIntervalSpace>(0.0, 1.0);
  f.space = space;
  f.recursion = std::make_shared<const RecursionKernel>(
      space,
      [](const State& s, double u) -> State { return (std::get<double>(s) + u) / 2.0; },
      true, "average_chain");
  f.expected.monotone = true;
  f.expected.closed_classes = 1;
  f.expected.unique_stationary = true;
  f.expected.uniqueness_cert = true;
  f.expected.pr_holds = true;
  f.expected.compressibility = true;
  f.expected.tight = true;
  f.expected.bmc_holds = true;
  f.expected.achievable_policy = "common_noise";
  f.regen = RegenSpec{0, opt.average_states - 1};
  f.notes =
      "averaging recursion on [0,1]; two-step splitting at the midpoint with "
      "mass 1/4 on each side from every start";
  return f;
}

Fixture make_birth_death() {
  Fixture f;
  f.name = "birth_death";
  const int n = 5;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double up = 0.3, down = 0.5, stay = 0.2;
    double hold = stay;
    if (i > 0)
      P(i, i - 1) = down;
    else
      hold += down;
    if (i + 1 < n)
      P(i, i + 1) = up;
    else
      hold += up;
    P(i, i) = hold;
  }
  f.finite = FiniteKernel(share(Poset::chain(n)), std::move(P));
  f.space = std::make_shared<const FinitePosetSpace>(f.finite->poset_ptr());
  f.expected.monotone = true;
  f.expected.closed_classes = 1;
  f.expected.unique_stationary = true;
  f.expected.uniqueness_cert = true;
  f.expected.pr_holds = true;
  f.expected.compressibility = true;
  f.regen = RegenSpec{1, 3};
  f.notes = "five-state reflecting birth-death walk with downward drift";
  return f;
}

}  // namespace

std::vector<std::string> gallery_names() {
  return {"srw2d",      "shift_chain", "layered_chain", "remex_chain",
          "flip_chain", "identity01",  "average_chain", "birth_death"};
}

Fixture build_fixture(const std::string& name, const GalleryOptions& opt) {
  if (name == "srw2d") return make_srw2d();
  if (name == "shift_chain") return make_shift(opt);
  if (name == "layered_chain") return make_layered();
  if (name == "remex_chain") return make_remex(opt);
  if (name == "flip_chain") return make_flip();
  if (name == "identity01") return make_identity(opt);
  if (name == "average_chain") return make_average(opt);
  if (name == "birth_death") return make_birth_death();
  throw UnknownFixture("no fixture named '" + name + "'");
}

FiniteKernel discretize_average(int m) {
  if (m < 2) throw ConfigError("need at least 2 cells");
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
  const double w = 1.0 / double(m);
  for (int i = 0; i < m; ++i) {
    const double c = (double(i) + 0.5) * w;
    const double lo = c / 2.0, hi = c / 2.0 + 0.5;  // support of (c + U)/2
    for (int j = 0; j < m; ++j) {
      const double a = std::max(lo, double(j) * w);
      const double b = std::min(hi, double(j + 1) * w);
      if (b > a) P(i, j) = 2.0 * (b - a);
    }
  }
  return FiniteKernel(share(Poset::chain(m)), std::move(P));
}

BalanceReport balance_check(const FiniteKernel& k, const std::vector<int>& cols) {
  BalanceReport rep;
  const Eigen::MatrixXd& P = k.matrix();
  const int n = k.size();
  rep.applicable = true;
  for (int j : cols) {
    if (j < 0 || j >= n) throw DimensionMismatch("balance column out of range");
    int source = -1;
    for (int i = 0; i < n; ++i) {
      if (i == j || P(i, j) <= 0.0) continue;
      if (source >= 0) {
        rep.applicable = false;
        return rep;
      }
      source = i;
    }
    if (source < 0 || P(j, j) >= 1.0) {
      rep.applicable = false;
      return rep;
    }
    if (P(source, j) != 1.0 - P(j, j)) return rep;
    ++rep.checked;
  }
  rep.forces_equal_mass = rep.checked == int(cols.size());
  return rep;
}

}  // namespace momc
