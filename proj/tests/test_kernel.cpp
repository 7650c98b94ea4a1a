#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "momc/gallery.hpp"
#include "momc/kernel.hpp"
#include "momc/rng.hpp"
#include "momc/spaces.hpp"

using namespace momc;
using namespace momc::testhelp;

namespace {

FiniteKernel flip_kernel(PosetPtr poset) {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  return FiniteKernel(std::move(poset), std::move(m));
}

PosetPtr chain_ptr(int n) { return std::make_shared<const Poset>(Poset::chain(n)); }
PosetPtr antichain_ptr(int n) { return std::make_shared<const Poset>(Poset::antichain(n)); }

}  // namespace

TEST_CASE("row validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.5, 0.6, 0.5, 0.5;
  CHECK_THROWS_AS(FiniteKernel(antichain_ptr(2), bad), Error);
  Eigen::MatrixXd neg(2, 2);
  neg << 1.2, -0.2, 0.5, 0.5;
  CHECK_THROWS_AS(FiniteKernel(antichain_ptr(2), neg), Error);
  Eigen::MatrixXd mismatched(3, 3);
  mismatched.setIdentity();
  CHECK_THROWS_AS(FiniteKernel(antichain_ptr(2), mismatched), Error);
  // tiny negatives inside tol are clamped
  Eigen::MatrixXd tiny(2, 2);
  tiny << 1.0 + 1e-12, -1e-12, 0.5, 0.5;
  const FiniteKernel k(antichain_ptr(2), tiny);
  CHECK(k.matrix()(0, 1) == 0.0);
  CHECK(k.row(0)[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sample_next inverts the row cdf") {
  Eigen::MatrixXd m(3, 3);
  m << 0.2, 0.5, 0.3, 0.0, 1.0, 0.0, 0.1, 0.0, 0.9;
  const FiniteKernel k(chain_ptr(3), m);
  CHECK(k.sample_next(0, 0.0) == 0);
  CHECK(k.sample_next(0, 0.19) == 0);
  CHECK(k.sample_next(0, 0.2) == 1);
  CHECK(k.sample_next(0, 0.69) == 1);
  CHECK(k.sample_next(0, 0.7) == 2);
  CHECK(k.sample_next(0, 0.999999) == 2);
  CHECK(k.sample_next(1, 0.5) == 1);
  CHECK(k.sample_next(2, 0.05) == 0);
  CHECK(k.sample_next(2, 0.100001) == 2);
}

TEST_CASE("n_step equals naive powers") {
  Rng g(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + rand_int(g, 5);
    const FiniteKernel k = random_monotone_chain_kernel(g, n);
    Eigen::MatrixXd pow = Eigen::MatrixXd::Identity(n, n);
    for (int64_t steps : {int64_t(0), int64_t(1), int64_t(2), int64_t(3), int64_t(7)}) {
      pow = Eigen::MatrixXd::Identity(n, n);
      for (int64_t s = 0; s < steps; ++s) pow = pow * k.matrix();
      const FiniteKernel ks = n_step(k, steps);
      CHECK((ks.matrix() - pow).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  // deterministic flip: period two
  const FiniteKernel f = flip_kernel(antichain_ptr(2));
  CHECK((n_step(f, 2).matrix() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stationary report on known chains") {
  const FiniteKernel f = flip_kernel(antichain_ptr(2));
  const StationaryReport rf = stationary_report(f);
  CHECK(rf.unique);
  REQUIRE(rf.stationary.size() == 1);
  CHECK(rf.stationary[0][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rf.stationary[0][1] == doctest::Approx(0.5).epsilon(1e-12));

  Eigen::MatrixXd id3 = Eigen::MatrixXd::Identity(3, 3);
  const FiniteKernel identity(antichain_ptr(3), id3);
  const StationaryReport ri = stationary_report(identity);
  CHECK(!ri.unique);
  CHECK(ri.closed_classes.size() == 3);

  // two-class chain: {0,1} closed, {2} falls into it
  Eigen::MatrixXd m(3, 3);
  m << 0.5, 0.5, 0, 0.2, 0.8, 0, 0.3, 0.3, 0.4;
  const FiniteKernel k(antichain_ptr(3), m);
  const StationaryReport r = stationary_report(k);
  CHECK(r.unique);
  REQUIRE(r.closed_classes.size() == 1);
  CHECK(r.closed_classes[0] == std::vector<int>{0, 1});
  // pi P = pi and mass confined to the class
  const Dist& pi = r.stationary[0];
  CHECK(pi[2] == 0.0);
  Eigen::Map<const Eigen::VectorXd> pv(pi.values().data(), 3);
  CHECK(((pv.transpose() * k.matrix()).transpose() - pv).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("stationary law matches power iteration on random ergodic kernels") {
  Rng g(42);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 3 + rand_int(g, 4);
    const FiniteKernel k = random_monotone_chain_kernel(g, n);  // all entries positive
    const StationaryReport r = stationary_report(k);
    REQUIRE(r.unique);
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(n, 1.0 / n);
    for (int it = 0; it < 20000; ++it) v = v * k.matrix();
    for (int i = 0; i < n; ++i) CHECK(r.stationary[0][i] == doctest::Approx(v(i)).epsilon(1e-9));
  }
}

TEST_CASE("monotonicity verdicts") {
  // flip chain is monotone for the trivial order, not for the chain order
  CHECK(is_monotone(flip_kernel(antichain_ptr(2))).monotone);
  const MonotoneCheck bad = is_monotone(flip_kernel(chain_ptr(2)));
  CHECK(!bad.monotone);
  CHECK(bad.x == 0);
  CHECK(bad.y == 1);
  REQUIRE(bad.witness.has_value());
  // witness: P(0, I) > P(1, I); I = {1} gives 1 > 0
  CHECK(bad.witness->indices() == std::vector<int>{1});

  Rng g(43);
  for (int trial = 0; trial < 30; ++trial)
    CHECK(is_monotone(random_monotone_chain_kernel(g, 2 + rand_int(g, 6))).monotone);
}

TEST_CASE("monotone kernels compose and preserve dominance") {
  Rng g(44);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 3 + rand_int(g, 4);
    const FiniteKernel k = random_monotone_chain_kernel(g, n);
    CHECK(is_monotone(n_step(k, 3)).monotone);
    // mu1 <= mu2 implies mu1 P <= mu2 P
    const auto [mu1, mu2] = random_dominated_pair(g, k.poset());
    Eigen::Map<const Eigen::VectorXd> v1(mu1.values().data(), n);
    Eigen::Map<const Eigen::VectorXd> v2(mu2.values().data(), n);
    Eigen::RowVectorXd p1 = v1.transpose() * k.matrix();
    Eigen::RowVectorXd p2 = v2.transpose() * k.matrix();
    const Dist d1(std::vector<double>(p1.data(), p1.data() + n));
    const Dist d2(std::vector<double>(p2.data(), p2.data() + n));
    CHECK(dominates(d1, d2, k.poset(), 1e-9));
  }
}

TEST_CASE("hitting analysis on the flip chain") {
  const FiniteKernel f = flip_kernel(antichain_ptr(2));
  UpSet target = UpSet::empty(2);
  target.add(1);
  const HittingResult entry = hitting_analysis(f, target, 1, HitConvention::FirstEntry);
  CHECK(entry.prob == 1.0);
  CHECK(entry.prob_is_one);
  CHECK(entry.expected == 0.0);
  const HittingResult ret = hitting_analysis(f, target, 1, HitConvention::FirstReturn);
  CHECK(ret.prob == 1.0);
  CHECK(ret.prob_is_one);
  CHECK(ret.expected == doctest::Approx(2.0).epsilon(1e-12));
  const HittingResult from0 = hitting_analysis(f, target, 0, HitConvention::FirstEntry);
  CHECK(from0.expected == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hitting probabilities below one are detected exactly") {
  // 0 -> {0,1} equally; 1 absorbing; 2 absorbing. From 0, P(hit 1) = 1/2.
  Eigen::MatrixXd m(3, 3);
  m << 0, 0.5, 0.5, 0, 1, 0, 0, 0, 1;
  const FiniteKernel k(antichain_ptr(3), m);
  UpSet target = UpSet::empty(3);
  target.add(1);
  const HittingResult r = hitting_analysis(k, target, 0, HitConvention::FirstEntry);
  CHECK(!r.prob_is_one);
  CHECK(r.prob == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::isinf(r.expected));

  const HittingSolve s = hitting_solve(k, target);
  CHECK(s.prob[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.prob[1] == 1.0);
  CHECK(s.prob[2] == 0.0);
  CHECK(s.prob_is_one == std::vector<uint8_t>{0, 1, 0});
}

TEST_CASE("hitting expectation matches Monte Carlo on a birth-death chain") {
  const Fixture f = build_fixture("birth_death");
  REQUIRE(f.finite);
  const FiniteKernel& k = *f.finite;
  UpSet target = UpSet::empty(k.size());
  target.add(4);
  const HittingResult r = hitting_analysis(k, target, 0, HitConvention::FirstEntry);
  REQUIRE(r.prob_is_one);
  const int reps = 40000;
  double mean = 0.0, sq = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    int x = 0;
    int64_t t = 0;
    while (x != 4) {
      x = k.sample_next(x, uniform01(99, uint64_t(rep), uint64_t(t), 0));
      ++t;
    }
    mean += double(t);
    sq += double(t) * double(t);
  }
  mean /= reps;
  sq /= reps;
  const double se = std::sqrt((sq - mean * mean) / reps);
  CHECK(std::abs(r.expected - mean) <= 3.0 * se + 1e-9);
}

TEST_CASE("return moments") {
  // flip chain, C = {0}: return time is exactly 2, so E[tau^2] = 4
  const FiniteKernel f = flip_kernel(antichain_ptr(2));
  const MomentResult m = moment_check(f, {0}, 2.0, 1);
  CHECK(m.finite);
  CHECK(m.sup_moment == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(m.taboo_spectral_radius == doctest::Approx(0.0).epsilon(1e-9));

  // absorbing escape: from C = {0}, mass leaks to absorbing 1 and never returns
  Eigen::MatrixXd esc(2, 2);
  esc << 0.5, 0.5, 0, 1;
  const MomentResult bad = moment_check(FiniteKernel(antichain_ptr(2), esc), {0}, 2.0, 1);
  CHECK(!bad.finite);
}

TEST_CASE("geometric return time moment") {
  // two states, P(0,1)=1, P(1,0)=p, P(1,1)=1-p: return to 0 is 1 + Geom(p)
  const double p = 0.3;
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, p, 1 - p;
  const MomentResult r = moment_check(FiniteKernel(antichain_ptr(2), m), {0}, 2.0, 1);
  CHECK(r.finite);
  // tau = 1 + G with G geometric(p) in trials: E[tau^2] = 1 + 2/p + (2-p)/p^2
  CHECK(r.sup_moment == doctest::Approx(1.0 + 2.0 / p + (2.0 - p) / (p * p)).epsilon(1e-9));
  CHECK(r.taboo_spectral_radius == doctest::Approx(1 - p).epsilon(1e-6));
}

TEST_CASE("support reachability closure") {
  Eigen::MatrixXd m(3, 3);
  m << 0.5, 0.5, 0, 0, 1, 0, 0, 0.5, 0.5;
  const std::vector<uint64_t> reach = support_reachability(m);
  CHECK(reach[0] == 0b011u);
  CHECK(reach[1] == 0b010u);
  CHECK(reach[2] == 0b110u);
}

TEST_CASE("recursion kernels step and validate domains") {
  const Fixture avg = build_fixture("average_chain");
  REQUIRE(avg.recursion);
  const RecursionKernel& k = *avg.recursion;
  CHECK(k.monotone_in_state());
  CHECK(std::get<double>(k.step(State(0.5), 0.5)) == doctest::Approx(0.5));
  CHECK(std::get<double>(k.step(State(0.0), 0.8)) == doctest::Approx(0.4));
  CHECK_THROWS_AS(sample_step(k, State(2.0), 0.5), DomainError);
  CHECK_THROWS_AS(k.step(State(0.5), 1.0), DomainError);
  CHECK_THROWS_AS(k.step(State(0.5), -0.1), DomainError);
}

TEST_CASE("recursion monotonicity on sampled ordered pairs") {
  Rng g(45);
  for (const char* name : {"average_chain", "layered_chain", "srw2d", "shift_chain"}) {
    const Fixture f = build_fixture(name);
    REQUIRE(f.recursion);
    const RecursionKernel& k = *f.recursion;
    REQUIRE(k.monotone_in_state());
    const OrderedSpace& space = k.space();
    for (int trial = 0; trial < 400; ++trial) {
      State a, b;
      if (space.name() == "real_interval") {
        double x = rand_unit(g), y = rand_unit(g);
        if (x > y) std::swap(x, y);
        a = x;
        b = y;
      } else if (space.name() == "int_lattice") {
        const LatticePoint base{rand_int(g, 9) - 4, rand_int(g, 9) - 4};
        a = base;
        b = LatticePoint{base[0] + rand_int(g, 3), base[1] + rand_int(g, 3)};
      } else {
        // layered: same-layer pairs plus cross-layer pairs with real margin
        const int64_t layer = rand_int(g, 3);
        const double x = 3.0 * (rand_unit(g) - 0.5);
        if (trial % 2 == 0) {
          a = LayeredPoint{layer, x};
          b = LayeredPoint{layer, x + rand_unit(g)};
        } else {
          a = LayeredPoint{layer, x};
          b = LayeredPoint{layer + 1, x + LayeredSpace::layer_gap(layer, layer + 1) * 1.5};
        }
      }
      REQUIRE(space.leq(a, b));
      const double u = rand_unit(g);
      CHECK(space.leq(k.step(a, u), k.step(b, u)));
    }
  }
}

TEST_CASE("exactify quantizes declared piecewise-constant drivers") {
  // two-state recursion: move up when u >= 0.7, down otherwise
  auto poset = chain_ptr(2);
  auto space = std::make_shared<const FinitePosetSpace>(poset);
  const RecursionKernel rec(
      space,
      [](const State& s, double u) -> State {
        const int64_t x = std::get<int64_t>(s);
        return u >= 0.7 ? std::min<int64_t>(x + 1, 1) : std::max<int64_t>(x - 1, 0);
      },
      true, "threshold_walk", std::vector<double>{0.7});
  const std::vector<State> states{State(int64_t(0)), State(int64_t(1))};
  const FiniteKernel k = exactify(rec, poset, states);
  CHECK(k.matrix()(0, 0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(k.matrix()(0, 1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(k.matrix()(1, 0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(k.matrix()(1, 1) == doctest::Approx(0.3).epsilon(1e-15));

  // undeclared breakpoints are refused
  const RecursionKernel undeclared(
      space,
      [](const State& s, double u) -> State {
        return u >= 0.7 ? State(int64_t(1)) : s;
      },
      true, "undeclared");
  CHECK_THROWS_AS(exactify(undeclared, poset, states), Error);
}
