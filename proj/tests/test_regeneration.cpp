#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "helpers.hpp"
#include "momc/gallery.hpp"
#include "momc/order.hpp"
#include "momc/regeneration.hpp"

using namespace momc;
using namespace momc::testhelp;

TEST_CASE("total-order bottom anchor regenerates every step") {
  const Fixture avg = build_fixture("average_chain", {.average_states = 16});
  const FiniteKernel& k = *avg.finite;
  const RegenSpec spec{0, k.size() - 1};
  const OccupationMeasure lo = pi_minus_exact(k, spec);
  CHECK(lo.mean_cycle == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lo.pi[0] == doctest::Approx(1.0).epsilon(1e-12));
  const OccupationMeasure hi = pi_plus_exact(k, spec);
  CHECK(hi.mean_cycle == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hi.pi[k.size() - 1] == doctest::Approx(1.0).epsilon(1e-12));
  const PrReport pr = check_pr(k, spec);
  CHECK(pr.holds);
  CHECK(pr.e_nu_minus == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flip chain regenerates on the two-cycle") {
  const Fixture f = build_fixture("flip_chain");
  const FiniteKernel& k = *f.finite;
  // on the antichain only equal anchors are comparable
  const RegenSpec spec{0, 0};
  const PrReport pr = check_pr(k, spec);
  CHECK(pr.holds);
  CHECK(pr.e_nu_minus == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(pr.e_nu_plus == doctest::Approx(2.0).epsilon(1e-12));
  const OccupationMeasure lo = pi_minus_exact(k, spec);
  CHECK(lo.mean_cycle == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lo.pi[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lo.pi[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("birth-death occupation measures match hand values") {
  const Fixture f = build_fixture("birth_death");
  const FiniteKernel& k = *f.finite;
  REQUIRE(f.regen.has_value());
  const RegenSpec spec = *f.regen;
  CHECK(spec.x0 == 1);
  CHECK(spec.y0 == 3);

  const PrReport pr = check_pr(k, spec);
  CHECK(pr.holds);
  // from 1: drop to 0 w.p. 1/2, then Geometric(0.3) steps at 0
  CHECK(pr.e_nu_minus == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
  // from 3: rise to 4 w.p. 0.3, then Geometric(0.5) steps at 4
  CHECK(pr.e_nu_plus == doctest::Approx(1.6).epsilon(1e-10));

  const OccupationMeasure lo = pi_minus_exact(k, spec);
  CHECK(lo.mean_cycle == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
  CHECK(lo.pi[0] == doctest::Approx(0.625).epsilon(1e-10));
  CHECK(lo.pi[1] == doctest::Approx(0.375).epsilon(1e-10));
  CHECK(lo.pi[2] == 0.0);

  const OccupationMeasure hi = pi_plus_exact(k, spec);
  CHECK(hi.mean_cycle == doctest::Approx(1.6).epsilon(1e-10));
  CHECK(hi.pi[3] == doctest::Approx(0.625).epsilon(1e-10));
  CHECK(hi.pi[4] == doctest::Approx(0.375).epsilon(1e-10));
  CHECK(hi.pi[0] == 0.0);

  // the endpoints are ordered seeds
  CHECK(dominance_check(lo.pi, hi.pi, k.poset()).dominated);
}

TEST_CASE("occupation measure agrees with the restarted chain's stationary law") {
  const Fixture f = build_fixture("birth_death");
  const FiniteKernel& k = *f.finite;
  const RegenSpec spec = *f.regen;

  const RestartedChain rc = restarted_lower(k, spec);
  REQUIRE(rc.states[0] == spec.x0);
  const StationaryReport st = stationary_report(rc.kernel);
  REQUIRE(st.unique);
  const Dist& spi = st.stationary[0];
  const OccupationMeasure lo = pi_minus_exact(k, spec);
  for (size_t i = 0; i < rc.states.size(); ++i)
    CHECK(spi[int(i)] == doctest::Approx(lo.pi[rc.states[i]]).epsilon(1e-9));
  // Kac: mean cycle is the reciprocal anchor mass in the restarted chain
  CHECK(lo.mean_cycle == doctest::Approx(1.0 / spi[0]).epsilon(1e-9));

  const RestartedChain ru = restarted_upper(k, spec);
  REQUIRE(ru.states[0] == spec.y0);
  const StationaryReport stu = stationary_report(ru.kernel);
  REQUIRE(stu.unique);
  const OccupationMeasure hi = pi_plus_exact(k, spec);
  for (size_t i = 0; i < ru.states.size(); ++i)
    CHECK(stu.stationary[0][int(i)] == doctest::Approx(hi.pi[ru.states[i]]).epsilon(1e-9));
}

TEST_CASE("restarted lower chain wires the restart into the kernel") {
  const Fixture f = build_fixture("birth_death");
  const RestartedChain rc = restarted_lower(*f.finite, *f.regen);
  // reachable under restart: the anchor 1 and the one state below it
  REQUIRE(rc.states == std::vector<int>{1, 0});
  const Eigen::MatrixXd& P = rc.kernel.matrix();
  CHECK(P(0, 0) == doctest::Approx(0.5).epsilon(1e-12));  // stay or climb: restart
  CHECK(P(0, 1) == doctest::Approx(0.5).epsilon(1e-12));  // drop below the anchor
  CHECK(P(1, 0) == doctest::Approx(0.3).epsilon(1e-12));  // climb back: restart
  CHECK(P(1, 1) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("escape to an absorbing state kills regeneration") {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.5, 0, 1;
  const FiniteKernel k(std::make_shared<const Poset>(Poset::antichain(2)), m);
  const RegenSpec spec{0, 0};
  const PrReport pr = check_pr(k, spec);
  CHECK(!pr.holds);
  CHECK_THROWS_AS(pi_minus_exact(k, spec), DivergentCycle);
}

TEST_CASE("shift chain regenerates only from the lump state") {
  const Fixture f = build_fixture("shift_chain", {.depth = 6});
  const FiniteKernel& k = *f.finite;
  // the deepest state holds with probability one, so it renews every step
  const RegenSpec deep{k.size() - 1, k.size() - 1};
  const OccupationMeasure lo = pi_minus_exact(k, deep);
  CHECK(lo.mean_cycle == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lo.pi[k.size() - 1] == doctest::Approx(1.0).epsilon(1e-12));
  // from the head the walk escapes downward and never returns
  CHECK(!check_pr(k, RegenSpec{0, 0}).holds);
  CHECK_THROWS_AS(pi_minus_exact(k, RegenSpec{0, 0}), DivergentCycle);
  // anchors must be comparable in the order
  CHECK_THROWS_AS(check_pr(k, RegenSpec{0, k.size() - 1}), Error);
}

TEST_CASE("monotone iteration climbs from the lower seed to the stationary law") {
  const Fixture f = build_fixture("birth_death");
  const FiniteKernel& k = *f.finite;
  const OccupationMeasure lo = pi_minus_exact(k, *f.regen);
  const OccupationMeasure hi = pi_plus_exact(k, *f.regen);

  const MonotoneIteration it = monotone_iteration(k, lo.pi, hi.pi);
  CHECK(it.converged_at < 10000);
  CHECK(it.limit_residual <= 1e-8);
  const StationaryReport st = stationary_report(k);
  REQUIRE(st.unique);
  for (int i = 0; i < k.size(); ++i)
    CHECK(it.limit[i] == doctest::Approx(st.stationary[0][i]).epsilon(1e-7));

  // the recorded sequence is a dominance-increasing sandwich
  REQUIRE(it.sequence.size() >= 2);
  for (size_t j = 0; j + 1 < it.sequence.size(); ++j)
    CHECK(dominance_check(it.sequence[j], it.sequence[j + 1], k.poset()).dominated);
  CHECK(dominance_check(it.sequence.back(), hi.pi, k.poset()).dominated);
}

TEST_CASE("monotone iteration converges immediately on a fixed point") {
  const Fixture f = build_fixture("flip_chain");
  const Dist pi = Dist::from_weights({1.0, 1.0});
  const MonotoneIteration it = monotone_iteration(*f.finite, pi, pi);
  CHECK(it.converged_at == 0);
  CHECK(it.limit_residual <= 1e-12);
  CHECK(it.limit[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("monotone iteration rejects seeds on the wrong side") {
  const Fixture f = build_fixture("birth_death");
  const Dist top = Dist::dirac(5, 4);
  const Dist bottom = Dist::dirac(5, 0);
  // a top seed drifts downward, violating mu_0 <= mu_1
  CHECK_THROWS_AS(monotone_iteration(*f.finite, top, bottom), MonotoneViolation);
}

TEST_CASE("monotone iteration reports non-convergence within a step budget") {
  const Fixture f = build_fixture("birth_death");
  const FiniteKernel& k = *f.finite;
  const OccupationMeasure lo = pi_minus_exact(k, *f.regen);
  const OccupationMeasure hi = pi_plus_exact(k, *f.regen);
  CHECK_THROWS_AS(monotone_iteration(k, lo.pi, hi.pi, 2), NotConverged);
}
