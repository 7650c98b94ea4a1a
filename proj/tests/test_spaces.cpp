#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "momc/spaces.hpp"

using namespace momc;
using namespace momc::testhelp;

namespace {

// order axioms on sampled states: reflexive, antisymmetric, transitive
void check_axioms(const OrderedSpace& space, const std::vector<State>& pts) {
  for (const State& a : pts) CHECK(space.leq(a, a));
  for (const State& a : pts)
    for (const State& b : pts) {
      if (space.leq(a, b) && space.leq(b, a)) CHECK(state_equal(a, b));
      for (const State& c : pts)
        if (space.leq(a, b) && space.leq(b, c)) CHECK(space.leq(a, c));
    }
}

}  // namespace

TEST_CASE("finite poset space wraps the poset relation") {
  auto poset = std::make_shared<const Poset>(Poset::from_pairs(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}));
  const FinitePosetSpace space(poset);
  std::vector<State> pts;
  for (int64_t i = 0; i < 4; ++i) pts.push_back(i);
  check_axioms(space, pts);
  CHECK(space.leq(State(int64_t(0)), State(int64_t(3))));
  CHECK(!space.leq(State(int64_t(1)), State(int64_t(2))));
  CHECK(space.contains(State(int64_t(3))));
  CHECK(!space.contains(State(int64_t(4))));
  CHECK(!space.contains(State(0.5)));
}

TEST_CASE("real interval space") {
  const RealIntervalSpace space(0.0, 1.0);
  std::vector<State> pts{State(0.0), State(0.25), State(0.5), State(1.0)};
  check_axioms(space, pts);
  CHECK(space.leq(State(0.25), State(0.5)));
  CHECK(!space.leq(State(0.5), State(0.25)));
  CHECK(space.contains(State(1.0)));
  CHECK(!space.contains(State(1.5)));
  CHECK(space.distance(State(0.25), State(0.75)) == doctest::Approx(0.5));
}

TEST_CASE("integer lattice order is componentwise") {
  const IntLatticeSpace space(2);
  const State a = LatticePoint{0, 0};
  const State b = LatticePoint{1, 2};
  const State c = LatticePoint{2, 1};
  check_axioms(space, {a, b, c});
  CHECK(space.leq(a, b));
  CHECK(space.leq(a, c));
  CHECK(!space.leq(b, c));
  CHECK(!space.leq(c, b));
  CHECK(space.distance(b, c) == doctest::Approx(2.0));  // l1
  CHECK(!space.contains(State(LatticePoint{1, 2, 3})));
}

TEST_CASE("layered gaps are exact dyadics") {
  CHECK(LayeredSpace::layer_gap(0, 1) == 0.5);
  CHECK(LayeredSpace::layer_gap(0, 4) == 0.0625);
  CHECK(LayeredSpace::layer_gap(1, 2) == 0.25);
  CHECK(LayeredSpace::layer_gap(1, 3) == 0.375);
  CHECK(LayeredSpace::layer_gap(2, 5) == 0.25 - 0.03125);
  // saturates to zero far beyond representable exponents instead of raising
  CHECK(LayeredSpace::layer_gap(0, 2000) == 0.0);
  CHECK(LayeredSpace::layer_gap(1200, 2000) == 0.0);
}

TEST_CASE("layered order pinned examples") {
  const LayeredSpace space;
  // (0, x) below (1, y) exactly when y >= x + 1/2
  for (double x : {-1.0, -0.25, 0.0, 0.75}) {
    CHECK(space.leq(State(LayeredPoint{0, x}), State(LayeredPoint{1, x + 0.5})));
    CHECK(!space.leq(State(LayeredPoint{0, x}),
                     State(LayeredPoint{1, x + 0.5 - 1e-12})));
  }
  // same layer: plain real order
  CHECK(space.leq(State(LayeredPoint{3, 0.1}), State(LayeredPoint{3, 0.2})));
  CHECK(!space.leq(State(LayeredPoint{3, 0.2}), State(LayeredPoint{3, 0.1})));
  // symmetrized downward comparison: (1, y) below (0, x) iff y <= x - 1/2
  CHECK(space.leq(State(LayeredPoint{1, -0.5}), State(LayeredPoint{0, 0.0})));
  CHECK(!space.leq(State(LayeredPoint{1, -0.49}), State(LayeredPoint{0, 0.0})));
  // layers 1 < 2: gap 1/4
  CHECK(space.leq(State(LayeredPoint{1, 0.0}), State(LayeredPoint{2, 0.25})));
  CHECK(!space.leq(State(LayeredPoint{1, 0.0}), State(LayeredPoint{2, 0.2})));
}

TEST_CASE("layered order axioms on sampled points") {
  Rng g(31);
  std::vector<State> pts;
  for (int i = 0; i < 24; ++i) {
    const int64_t layer = rand_int(g, 4);
    // dyadic x values so incomparability/comparability is exact
    const double x = (rand_int(g, 33) - 16) / 8.0;
    pts.push_back(LayeredPoint{layer, x});
  }
  const LayeredSpace space;
  check_axioms(space, pts);
}

TEST_CASE("state_equal distinguishes variants and payloads") {
  CHECK(state_equal(State(int64_t(3)), State(int64_t(3))));
  CHECK(!state_equal(State(int64_t(3)), State(int64_t(4))));
  CHECK(!state_equal(State(int64_t(3)), State(3.0)));
  CHECK(state_equal(State(LatticePoint{1, 2}), State(LatticePoint{1, 2})));
  CHECK(!state_equal(State(LatticePoint{1, 2}), State(LatticePoint{2, 1})));
  CHECK(state_equal(State(LayeredPoint{2, 0.5}), State(LayeredPoint{2, 0.5})));
  CHECK(!state_equal(State(LayeredPoint{2, 0.5}), State(LayeredPoint{1, 0.5})));
}

TEST_CASE("state_to_string formats") {
  CHECK(state_to_string(State(int64_t(7))) == "7");
  CHECK(state_to_string(State(LatticePoint{1, -2})) == "(1,-2)");
  CHECK(state_to_string(State(LayeredPoint{2, 0.5})) == "(2,0.5)");
}
