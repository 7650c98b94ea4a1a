#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "momc/certify.hpp"
#include "momc/coupling.hpp"
#include "momc/gallery.hpp"
#include "momc/order.hpp"
#include "momc/regeneration.hpp"

namespace momc {

using Json = nlohmann::json;

// ---- JSON encodings (stable field names, reproducible output) ----

Json poset_to_json(const Poset& p);
Poset poset_from_json(const Json& j);

Json indexset_to_json(const IndexSet& s);
IndexSet indexset_from_json(const Json& j, int n);

Json dist_to_json(const Dist& d);
Dist dist_from_json(const Json& j);

Json kernel_to_json(const FiniteKernel& k);
FiniteKernel kernel_from_json(const Json& j);

// Recursion update composed from config: affine maps, clamps, piecewise-by-u
// tables.  Shape: {"space": {"lo": 0, "hi": 1}, "name": ..., "monotone": bool,
// "update": <expr>} where <expr> is a number, {"op": "affine", "x": a, "u": b,
// "c": c}, {"op": "clamp", "lo": l, "hi": h, "of": <expr>} or
// {"op": "piecewise_u", "breaks": [...], "pieces": [<expr>, ...]}.
// Breakpoints are declared on the kernel when the update is piecewise-constant
// in u, which makes it eligible for exactify().
std::shared_ptr<RecursionKernel> recursion_from_json(const Json& j);

Json pairset_to_json(const PairSet& s);
PairSet pairset_from_json(const Json& j, int n);

// Installs a {name: pair-set JSON} table for the lifetime of the guard; while
// active, pair-set fields may hold one of these names as a bare string.
class ScopedPairSetNames {
 public:
  explicit ScopedPairSetNames(Json names);
  ~ScopedPairSetNames();
  ScopedPairSetNames(const ScopedPairSetNames&) = delete;
  ScopedPairSetNames& operator=(const ScopedPairSetNames&) = delete;
};

Json predicate_to_json(const StoppingPredicate& p);
StoppingPredicate predicate_from_json(const Json& j, int n);

Json policy_to_json(const CouplingPolicy& p);
CouplingPolicy policy_from_json(const Json& j, int n);

Json split_to_json(const SplitCertificate& c);
SplitCertificate split_from_json(const Json& j, int n);

Json rate_to_json(const RateCertificate& c);
RateCertificate rate_from_json(const Json& j, int n);

Json uniqueness_to_json(const UniquenessCertificate& c);
Json tail_to_json(const TailEstimate& t);
Json occupation_to_json(const OccupationMeasure& m);
Json pr_to_json(const PrReport& r);
Json monotone_check_to_json(const MonotoneCheck& c);
Json dominance_to_json(const DominanceResult& r);
Json distance_to_json(const DistanceResult& r);
Json stationary_to_json(const StationaryReport& r);
Json fixture_to_json(const Fixture& f);

// ---- CSV ----

// One formatted cell; doubles print with enough digits to round-trip.
std::string csv_double(double v);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::vector<std::vector<std::string>> rate_rows(const RateReport& r);
std::vector<std::vector<std::string>> bound_rows(const CompressibilityReport& r);
std::vector<std::vector<std::string>> tail_rows(const TailEstimate& t);

}  // namespace momc
