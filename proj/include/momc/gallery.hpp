#pragma once

#include <optional>
#include <string>
#include <vector>

#include "momc/kernel.hpp"
#include "momc/regeneration.hpp"
#include "momc/spaces.hpp"

namespace momc {

// Verdicts a fixture is expected to produce.  Unset fields are not claimed;
// the test suite checks exactly the set ones, so every fixture row doubles as
// a generated test.
struct ExpectedVerdicts {
  std::optional<bool> monotone;
  std::string achievable_policy;      // policy under which the pair meets in practice
  std::optional<int> closed_classes;  // count on the finite shadow
  std::optional<bool> unique_stationary;
  std::optional<bool> uniqueness_cert;  // singleton-witness certificate succeeds
  std::optional<bool> pr_holds;         // anchor return times almost surely finite
  std::optional<bool> compressibility;  // n-step laws from ordered starts merge
  std::optional<bool> tight;
  std::optional<bool> bmc_holds;      // bounded monotone sequences of laws converge in-space
  std::optional<bool> no_stationary;  // balance equations force equal masses
};

struct Fixture {
  std::string name;
  SpacePtr space;
  std::optional<FiniteKernel> finite;  // exact shadow (truncated where countable)
  std::shared_ptr<const RecursionKernel> recursion;
  ExpectedVerdicts expected;
  std::optional<RegenSpec> regen;  // anchors used by regeneration checks
  std::vector<int> balance_cols;   // interior columns for the balance argument
  std::string notes;
};

struct GalleryOptions {
  int depth = 512;          // truncation depth for countable chains
  int identity_points = 11; // grid size of the identity fixture
  int average_states = 64;  // discretization cells of the averaging fixture
};

std::vector<std::string> gallery_names();

// Throws UnknownFixture for names not in gallery_names().
Fixture build_fixture(const std::string& name, const GalleryOptions& opt = {});

// Cell-center discretization of the averaging recursion on [0,1]: row i is
// the uniform law of (c_i + U)/2 split over the m cells.
FiniteKernel discretize_average(int m);

// Single-inflow balance test: each listed column j must have exactly one
// off-diagonal inflow source s and satisfy pi_j (1 - P(j,j)) = pi_s P(s,j)
// with ratio exactly 1, forcing equal stationary masses along the inflow
// path.  On a truncation of a countable chain this rules out a normalizable
// stationary law.
struct BalanceReport {
  bool applicable = false;        // every listed column has a unique inflow
  bool forces_equal_mass = false; // all ratios exactly 1
  int checked = 0;
};

BalanceReport balance_check(const FiniteKernel& k, const std::vector<int>& cols);

}  // namespace momc
