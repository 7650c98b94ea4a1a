#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "momc/order.hpp"

using namespace momc;
using namespace momc::testhelp;

TEST_CASE("two-state chain by hand") {
  const Poset p = Poset::chain(2);
  const Dist lo({0.7, 0.3});
  const Dist hi({0.4, 0.6});
  CHECK(dominates(lo, hi, p));
  CHECK(!dominates(hi, lo, p));
  CHECK(order_distance(lo, hi, p) == doctest::Approx(0.3).epsilon(1e-12));

  const Coupling c = strassen_coupling(lo, hi, p);
  CHECK(c.marginal_error(lo, hi) <= 1e-12);
  CHECK(c.off_relation_mass(p) <= 1e-15);
  // mass below the diagonal is impossible on a 2-chain coupling of these laws
  CHECK(c.lambda(1, 0) == doctest::Approx(0.0).epsilon(1e-15));

  const DominanceResult bad = dominance_check(hi, lo, p);
  CHECK(!bad.dominated);
  CHECK(bad.gap == doctest::Approx(0.3).epsilon(1e-12));
  REQUIRE(bad.witness.has_value());
  CHECK(bad.witness->indices() == std::vector<int>{1});
}

TEST_CASE("dominance on the antichain is equality") {
  const Poset p = Poset::antichain(3);
  const Dist a({0.2, 0.3, 0.5});
  const Dist b({0.2, 0.5, 0.3});
  CHECK(dominates(a, a, p));
  CHECK(!dominates(a, b, p));
  CHECK(order_distance(a, b, p) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("strassen coupling on random dominated pairs") {
  Rng g(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + rand_int(g, 9);
    const Poset p = random_poset(g, n);
    const auto [mu1, mu2] = random_dominated_pair(g, p);
    REQUIRE(brute_force_dominates(mu1, mu2, p));
    REQUIRE(dominates(mu1, mu2, p));
    const Coupling c = strassen_coupling(mu1, mu2, p);
    CHECK(c.marginal_error(mu1, mu2) <= 1e-9);
    CHECK(c.off_relation_mass(p) <= 1e-12);
  }
}

TEST_CASE("non-dominated pairs produce a separating witness") {
  Rng g(22);
  int seen = 0;
  for (int trial = 0; trial < 400 && seen < 120; ++trial) {
    const int n = 2 + rand_int(g, 9);
    const Poset p = random_poset(g, n);
    const Dist mu1 = random_dist(g, n);
    const Dist mu2 = random_dist(g, n);
    const bool truth = brute_force_dominates(mu1, mu2, p);
    const DominanceResult r = dominance_check(mu1, mu2, p);
    CHECK(r.dominated == truth);
    if (truth) continue;
    ++seen;
    REQUIRE(r.witness.has_value());
    CHECK(is_up_set(p, *r.witness));
    CHECK(mu1.mass(*r.witness) - mu2.mass(*r.witness) ==
          doctest::Approx(r.gap).epsilon(1e-10));
    CHECK(r.gap > 0.0);
    CHECK_THROWS_AS(strassen_coupling(mu1, mu2, p), NotDominated);
  }
  REQUIRE(seen >= 50);
}

TEST_CASE("order distance equals the brute-force up-set maximum") {
  Rng g(23);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + rand_int(g, 9);
    const Poset p = random_poset(g, n);
    const Dist mu1 = random_dist(g, n);
    const Dist mu2 = random_dist(g, n);
    const double brute =
        std::max(brute_force_distance(mu1, mu2, p), brute_force_distance(mu2, mu1, p));
    CHECK(order_distance(mu1, mu2, p) == doctest::Approx(brute).epsilon(1e-12));
    const DistanceResult w = order_distance_witness(mu1, mu2, p);
    CHECK(w.distance == doctest::Approx(brute).epsilon(1e-12));
    CHECK(is_up_set(p, w.witness));
    CHECK(std::abs(mu1.mass(w.witness) - mu2.mass(w.witness)) ==
          doctest::Approx(w.distance).epsilon(1e-10));
  }
}

TEST_CASE("order distance is a metric") {
  Rng g(24);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + rand_int(g, 7);
    const Poset p = random_poset(g, n);
    const Dist a = random_dist(g, n);
    const Dist b = random_dist(g, n);
    const Dist c = random_dist(g, n);
    const double ab = order_distance(a, b, p);
    const double ba = order_distance(b, a, p);
    const double ac = order_distance(a, c, p);
    const double cb = order_distance(c, b, p);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= ac + cb + 1e-12);
    CHECK(order_distance(a, a, p) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("order distance is the Kolmogorov distance on a total order") {
  Rng g(25);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + rand_int(g, 9);
    const Poset p = Poset::chain(n);
    const Dist a = random_dist(g, n);
    const Dist b = random_dist(g, n);
    double kolmogorov = 0.0, fa = 0.0, fb = 0.0;
    for (int i = 0; i < n; ++i) {
      fa += a[i];
      fb += b[i];
      kolmogorov = std::max(kolmogorov, std::abs(fa - fb));
    }
    CHECK(order_distance(a, b, p) == doctest::Approx(kolmogorov).epsilon(1e-12));
  }
}

TEST_CASE("dominance is antisymmetric up to equality") {
  Rng g(26);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = 2 + rand_int(g, 7);
    const Poset p = random_poset(g, n);
    const auto [mu1, mu2] = random_dominated_pair(g, p);
    if (dominates(mu2, mu1, p)) CHECK(mu1.l1_distance(mu2) <= 1e-9);
  }
}

TEST_CASE("reusable solvers agree with the one-shot calls") {
  Rng g(27);
  const int n = 7;
  const Poset p = random_poset(g, n);
  auto pp = std::make_shared<const Poset>(p);
  ClosureSolver closure(pp);
  StrassenSolver strassen(pp);
  for (int trial = 0; trial < 60; ++trial) {
    const Dist a = random_dist(g, n);
    const Dist b = random_dist(g, n);
    CHECK(closure.distance(a.values(), b.values()) ==
          doctest::Approx(order_distance(a, b, p)).epsilon(1e-12));
    const DominanceResult r1 = strassen.check(a, b);
    const DominanceResult r2 = dominance_check(a, b, p);
    CHECK(r1.dominated == r2.dominated);
    CHECK(r1.gap == doctest::Approx(r2.gap).epsilon(1e-10));
    if (r1.dominated) {
      const Coupling c = strassen.couple(a, b);
      CHECK(c.marginal_error(a, b) <= 1e-9);
      CHECK(c.off_relation_mass(p) <= 1e-12);
    }
  }
}

TEST_CASE("max-weight closure on known instance") {
  // 0 <= 1, weights make {1} the best closure
  auto pp = std::make_shared<const Poset>(Poset::chain(2));
  ClosureSolver solver(pp);
  const ClosureResult r = solver.max_weight({-0.4, 0.9});
  CHECK(r.value == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.argmax.indices() == std::vector<int>{1});
  // all-negative weights give the empty closure
  const ClosureResult z = solver.max_weight({-0.1, -0.2});
  CHECK(z.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(z.argmax.count() == 0);
}
