#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "doctest.h"
#include "helpers.hpp"
#include "momc/certify.hpp"
#include "momc/gallery.hpp"
#include "momc/order.hpp"

using namespace momc;
using namespace momc::testhelp;

TEST_CASE("rate arithmetic") {
  const RateCertificate r = make_rate(0.25, 2);
  CHECK(r.q == doctest::Approx(0.8660254037844386).epsilon(1e-15));
  CHECK(r.K == doctest::Approx(1.1547005383792515).epsilon(1e-15));
  CHECK(r.alt_q == doctest::Approx(0.9682458365518543).epsilon(1e-15));
  CHECK(r.alt_K == doctest::Approx(1.0327955589886446).epsilon(1e-15));
  CHECK(!r.exact_coupling);

  // identities for random levels
  Rng g(71);
  for (int t = 0; t < 20; ++t) {
    const double eps = 0.05 + 0.9 * rand_unit(g);
    const int64_t N = 1 + rand_int(g, 6);
    const RateCertificate c = make_rate(eps, N);
    CHECK(std::pow(c.q, double(N)) == doctest::Approx(1.0 - eps).epsilon(1e-12));
    CHECK(c.K == doctest::Approx(std::pow(c.q, -double(N - 1))).epsilon(1e-12));
    CHECK(std::pow(c.alt_q, double(N)) == doctest::Approx(1.0 - eps * eps).epsilon(1e-12));
    CHECK(c.alt_K == doctest::Approx(std::pow(c.alt_q, -double(N - 1))).epsilon(1e-12));
    CHECK(c.K * std::pow(c.q, double(N)) == doctest::Approx(c.q).epsilon(1e-12));
  }

  // a full split couples exactly after N steps
  const RateCertificate full = make_rate(1.0, 3);
  CHECK(full.exact_coupling);
  CHECK(full.q == 0.0);
  CHECK(full.K == 1.0);
}

TEST_CASE("find_split picks the best anchor") {
  // iid rows: the split level is a property of the common row
  Eigen::MatrixXd m(3, 3);
  m << 0.2, 0.5, 0.3, 0.2, 0.5, 0.3, 0.2, 0.5, 0.3;
  const FiniteKernel k(std::make_shared<const Poset>(Poset::chain(3)), m);
  const SplitCertificate c1 = find_split(k, 1);
  CHECK(c1.z0 == 1);
  CHECK(c1.eps == doctest::Approx(0.7).epsilon(1e-12));  // min(0.2+0.5, 0.5+0.3)
  CHECK(c1.N == 1);
  CHECK(c1.A.contains(0));
  CHECK(c1.A.contains(1));
  CHECK(!c1.A.contains(2));
  CHECK(!c1.B.contains(0));
  CHECK(c1.B.contains(1));
  CHECK(c1.B.contains(2));
  // the N-step law of an iid kernel is the same row
  const SplitCertificate c3 = find_split(k, 3);
  CHECK(c3.eps == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(c3.z0 == 1);
}

TEST_CASE("fixtures without a split refuse one") {
  CHECK_THROWS_AS(find_split(*build_fixture("flip_chain").finite, 1), NoSplit);
  CHECK_THROWS_AS(find_split(*build_fixture("identity01").finite, 1), NoSplit);
  CHECK_THROWS_AS(find_split(*build_fixture("identity01").finite, 5), NoSplit);
}

TEST_CASE("discretized averaging chain splits at the frozen level") {
  const Fixture f = build_fixture("average_chain");
  const RateCertificate cert = bm_certificate(*f.finite, 2);
  REQUIRE(cert.split.has_value());
  CHECK(cert.split->z0 == 31);
  CHECK(cert.eps == 0.25390625);  // 1/4 + 1/256, exact in binary
  CHECK(cert.N == 2);
  CHECK(cert.q == doctest::Approx(0.8637671850678283).epsilon(1e-15));
  CHECK(cert.K == doctest::Approx(1.1577193684678746).epsilon(1e-15));
  CHECK(cert.alt_q == doctest::Approx(0.9672288334261637).epsilon(1e-15));
  CHECK(cert.alt_K == doctest::Approx(1.0338815029508093).epsilon(1e-15));
  CHECK(!cert.exact_coupling);
}

TEST_CASE("finite certificate route needs a total order") {
  CHECK_THROWS_AS(bm_certificate(*build_fixture("flip_chain").finite, 1), Error);
}

TEST_CASE("monte carlo certificate matches the smooth chain's level") {
  const Fixture f = build_fixture("average_chain");
  BmMcOptions opt;
  opt.reps = 40000;
  opt.jobs = 4;
  const RateCertificate cert = bm_certificate(*f.recursion, 2, opt);
  REQUIRE(cert.interval.has_value());
  const IntervalSplit& s = *cert.interval;
  CHECK(s.N == 2);
  CHECK(s.reps == 40000);
  CHECK(s.grid_points == 17);
  // two-step crossing probabilities from either endpoint are exactly 1/4
  CHECK(std::abs(s.p_low_at_hi - 0.25) <= 5.0 * s.se);
  CHECK(std::abs(s.p_high_at_lo - 0.25) <= 5.0 * s.se);
  CHECK(s.se > 0.0);
  CHECK(s.se < 0.005);
  // eps keeps a 3-sigma downward margin (per start, with its own se)
  const double emp = std::min(s.p_low_at_hi, s.p_high_at_lo);
  CHECK(cert.eps < emp);
  CHECK(cert.eps >= emp - 3.0 * s.se - 1e-12);
  CHECK(cert.eps > 0.22);

  // seed-deterministic across worker counts
  BmMcOptions opt1 = opt;
  opt1.jobs = 1;
  const RateCertificate again = bm_certificate(*f.recursion, 2, opt1);
  CHECK(again.eps == cert.eps);
  CHECK(again.interval->p_low_at_hi == s.p_low_at_hi);
}

TEST_CASE("compressibility distance is bounded by the meeting tail") {
  // flip chain under independent coupling: distance and tail are both one
  const Fixture flip = build_fixture("flip_chain");
  const CompressibilityReport r = verify_compressibility_bound(
      *flip.finite, CouplingPolicy::independent(), 0, 1, 40);
  CHECK(r.ok);
  REQUIRE(int64_t(r.rows.size()) == 41);
  for (const BoundRow& row : r.rows) {
    CHECK(row.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.rhs == doctest::Approx(1.0).epsilon(1e-12));
  }

  // a contracting chain: distance decays under the bound
  // the tail side runs from (x,y) and (y,x), so the policy must accept both
  const Fixture bd = build_fixture("birth_death");
  for (const CouplingPolicy& pol :
       {CouplingPolicy::independent(), CouplingPolicy::common_noise()}) {
    const CompressibilityReport br =
        verify_compressibility_bound(*bd.finite, pol, 0, 4, 60);
    CHECK(br.ok);
    CHECK(br.rows.back().lhs <= br.rows.back().rhs + 1e-10);
    CHECK(br.rows.back().lhs < 0.05);
  }
}

TEST_CASE("compressibility of exact laws") {
  const Fixture bd = build_fixture("birth_death");
  // n = 0: the starting laws are point masses at distance one
  CHECK(compressibility_exact(*bd.finite, 0, 4, 0) == doctest::Approx(1.0).epsilon(1e-12));
  // matches an explicit order_distance of the pushed-forward laws
  const Eigen::MatrixXd P3 = n_step(*bd.finite, 3).matrix();
  const Dist a(std::vector<double>(P3.row(0).begin(), P3.row(0).end()));
  const Dist b(std::vector<double>(P3.row(4).begin(), P3.row(4).end()));
  CHECK(compressibility_exact(*bd.finite, 0, 4, 3) ==
        doctest::Approx(order_distance(a, b, bd.finite->poset())).epsilon(1e-12));
}

TEST_CASE("achievability hypotheses hold on the averaging chain") {
  const Fixture f = build_fixture("average_chain", {.average_states = 16});
  const FiniteKernel& k = *f.finite;
  const SplitCertificate cert = find_split(k, 2);
  const AchievabilityReport rep = check_achievability_hypotheses(k, cert, 2.0);
  CHECK(rep.holds);
  CHECK(rep.alpha == 2.0);
  CHECK(rep.sup_moment >= 1.0);
  CHECK(std::isfinite(rep.sup_moment));
  CHECK(rep.taboo_spectral_radius < 1.0);
}

TEST_CASE("achievability fails when the seek set is not reached") {
  // state 1 absorbs outside C = {0}
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.5, 0, 1;
  const FiniteKernel k(std::make_shared<const Poset>(Poset::chain(2)), m);
  SplitCertificate cert;
  cert.C = IndexSet::from_indices(2, {0});
  cert.z0 = 0;
  cert.A = IndexSet::from_indices(2, {0});
  cert.B = IndexSet::from_indices(2, {0, 1});
  cert.N = 1;
  cert.eps = 0.5;
  CHECK_THROWS_AS(check_achievability_hypotheses(k, cert, 2.0), HypothesisFails);
}

TEST_CASE("certified decay rate verified against exact distances") {
  const Fixture f = build_fixture("average_chain", {.average_states = 16});
  const FiniteKernel& k = *f.finite;
  const RateCertificate cert = bm_certificate(k, 2);
  const RateReport rep = verify_rate(k, cert, 80);
  CHECK(rep.ok);
  CHECK(rep.first_bad_n == -1);
  REQUIRE(int64_t(rep.rows.size()) == 81);
  for (const RateRow& row : rep.rows) {
    CHECK(row.max_distance <= row.bound + 1e-10);
    CHECK(row.alt_bound >= std::pow(cert.alt_q, double(row.n / 2)) - 1e-12);
  }
  // the bound actually bites: by n = 80 the distance is tiny
  CHECK(rep.rows.back().max_distance < 1e-3);
  CHECK(rep.rows[0].bound >= 1.0 - 1e-12);
}

TEST_CASE("a falsified certificate is caught") {
  const Fixture f = build_fixture("average_chain", {.average_states = 16});
  RateCertificate cert = bm_certificate(*f.finite, 2);
  cert.q = 0.01;  // far too fast
  cert.K = 1.0;
  const RateReport rep = verify_rate(*f.finite, cert, 40, 1e-10, false);
  CHECK(!rep.ok);
  CHECK(rep.first_bad_n >= 1);
  CHECK_THROWS_AS(verify_rate(*f.finite, cert, 40), BoundViolated);
}

TEST_CASE("rate verification needs a unique stationary law") {
  const Fixture f = build_fixture("identity01");
  const RateCertificate cert = make_rate(0.5, 1);
  CHECK_THROWS_AS(verify_rate(*f.finite, cert, 10), Error);
}

TEST_CASE("uniqueness by singleton witnesses") {
  const Fixture bd = build_fixture("birth_death");
  const UniquenessCertificate uc = uniqueness_certificate(*bd.finite);
  CHECK(uc.ok);
  CHECK(int(uc.witnesses.size()) == 25);
  for (const UniquenessWitness& w : uc.witnesses) {
    CHECK(w.a == 0);
    CHECK(w.b == 0);
  }

  const UniquenessCertificate bad = uniqueness_certificate(*build_fixture("identity01").finite);
  CHECK(!bad.ok);
  CHECK(bad.fail_x == 1);
  CHECK(bad.fail_y == 0);
}

TEST_CASE("uniqueness on the averaging chain") {
  const Fixture f = build_fixture("average_chain", {.average_states = 16});
  const UniquenessCertificate uc = uniqueness_certificate(*f.finite);
  CHECK(uc.ok);
  CHECK(int(uc.witnesses.size()) == 16 * 16);
  for (const UniquenessWitness& w : uc.witnesses) CHECK(w.a <= w.b);
}
