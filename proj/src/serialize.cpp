#include "momc/serialize.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <functional>
#include <ostream>

#include "momc/errors.hpp"
#include "momc/spaces.hpp"

namespace momc {

namespace {

// Accepts "kind" (canonical) or "type" as the discriminator; bare strings
// stand for kinds with no payload.
std::string kind_of(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.contains("kind")) return j.at("kind").get<std::string>();
  if (j.contains("type")) return j.at("type").get<std::string>();
  throw ConfigError("object needs a 'kind' field");
}

std::vector<Json>& pairset_name_stack() {
  static std::vector<Json> stack;
  return stack;
}

const Json* lookup_pairset_name(const std::string& name) {
  auto& stack = pairset_name_stack();
  for (auto it = stack.rbegin(); it != stack.rend(); ++it)
    if (it->contains(name)) return &it->at(name);
  return nullptr;
}

Json basic_to_json(const BasicPolicy& b) {
  switch (b.kind) {
    case BasicPolicy::Kind::Independent:
      return Json{{"kind", "independent"}};
    case BasicPolicy::Kind::CommonNoise:
      return Json{{"kind", "common_noise"}};
    case BasicPolicy::Kind::StrassenMonotone:
      return Json{{"kind", "strassen_monotone"}};
    case BasicPolicy::Kind::JointMatrix: {
      Json rows = Json::array();
      const Eigen::MatrixXd& m = *b.joint;
      for (int64_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int64_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
      }
      return Json{{"kind", "joint_matrix"}, {"matrix", std::move(rows)}};
    }
  }
  throw ConfigError("unhandled policy kind");
}

BasicPolicy basic_from_json(const Json& j) {
  const std::string kind = kind_of(j);
  if (kind == "independent") return BasicPolicy::independent();
  if (kind == "common_noise") return BasicPolicy::common_noise();
  if (kind == "strassen_monotone") return BasicPolicy::strassen_monotone();
  if (kind == "joint_matrix") {
    const Json& rows = j.at("matrix");
    const int64_t r = int64_t(rows.size());
    if (r == 0) throw ConfigError("empty joint matrix");
    const int64_t c = int64_t(rows.at(0).size());
    Eigen::MatrixXd m(r, c);
    for (int64_t i = 0; i < r; ++i) {
      if (int64_t(rows.at(size_t(i)).size()) != c)
        throw ConfigError("ragged joint matrix");
      for (int64_t q = 0; q < c; ++q) m(i, q) = rows.at(size_t(i)).at(size_t(q)).get<double>();
    }
    return BasicPolicy::joint_matrix(std::move(m));
  }
  throw ConfigError("unknown policy kind '" + kind + "'");
}

}  // namespace

Json poset_to_json(const Poset& p) {
  Json pairs = Json::array();
  for (int i = 0; i < p.size(); ++i)
    for (int j = 0; j < p.size(); ++j)
      if (i != j && p.leq(i, j)) pairs.push_back(Json::array({i, j}));
  return Json{{"n", p.size()}, {"leq", std::move(pairs)}};
}

Poset poset_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  std::vector<std::pair<int, int>> pairs;
  for (const Json& e : j.at("leq"))
    pairs.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return Poset::from_pairs(n, pairs);
}

Json indexset_to_json(const IndexSet& s) {
  Json out = Json::array();
  for (int i : s.indices()) out.push_back(i);
  return out;
}

IndexSet indexset_from_json(const Json& j, int n) {
  IndexSet s = IndexSet::empty(n);
  for (const Json& e : j) {
    const int i = e.get<int>();
    if (i < 0 || i >= n) throw ConfigError("index " + std::to_string(i) + " out of range");
    s.add(i);
  }
  return s;
}

Json dist_to_json(const Dist& d) {
  Json out = Json::array();
  for (double v : d.values()) out.push_back(v);
  return out;
}

Dist dist_from_json(const Json& j) {
  std::vector<double> p;
  for (const Json& e : j) p.push_back(e.get<double>());
  return Dist(std::move(p));
}

Json kernel_to_json(const FiniteKernel& k) {
  Json rows = Json::array();
  for (int i = 0; i < k.size(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < k.size(); ++j) row.push_back(k.matrix()(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"poset", poset_to_json(k.poset())}, {"rows", std::move(rows)}};
}

FiniteKernel kernel_from_json(const Json& j) {
  auto poset = std::make_shared<const Poset>(poset_from_json(j.at("poset")));
  const int n = poset->size();
  const Json& rows = j.at("rows");
  if (int(rows.size()) != n) throw ConfigError("kernel rows do not match the poset size");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    if (int(rows.at(size_t(i)).size()) != n) throw ConfigError("ragged kernel rows");
    for (int q = 0; q < n; ++q) m(i, q) = rows.at(size_t(i)).at(size_t(q)).get<double>();
  }
  return FiniteKernel(std::move(poset), std::move(m));
}

namespace {

struct UpdateExpr {
  std::function<double(double, double)> eval;  // (x, u) -> next x
  bool u_enters_linearly = false;
  std::vector<double> breaks;
};

UpdateExpr update_from_json(const Json& j) {
  if (j.is_number()) {
    const double c = j.get<double>();
    return {[c](double, double) { return c; }, false, {}};
  }
  const std::string op = j.at("op").get<std::string>();
  if (op == "affine") {
    const double a = j.value("x", 0.0);
    const double b = j.value("u", 0.0);
    const double c = j.value("c", 0.0);
    return {[a, b, c](double x, double u) { return a * x + b * u + c; }, b != 0.0, {}};
  }
  if (op == "clamp") {
    const double lo = j.at("lo").get<double>();
    const double hi = j.at("hi").get<double>();
    if (!(lo <= hi)) throw ConfigError("clamp needs lo <= hi");
    UpdateExpr inner = update_from_json(j.at("of"));
    auto f = std::move(inner.eval);
    inner.eval = [lo, hi, f = std::move(f)](double x, double u) {
      return std::min(hi, std::max(lo, f(x, u)));
    };
    return inner;
  }
  if (op == "piecewise_u") {
    std::vector<double> breaks;
    for (const Json& b : j.at("breaks")) breaks.push_back(b.get<double>());
    if (!std::is_sorted(breaks.begin(), breaks.end()))
      throw ConfigError("piecewise_u breaks must be sorted");
    const Json& piece_list = j.at("pieces");
    if (piece_list.size() != breaks.size() + 1)
      throw ConfigError("piecewise_u needs one more piece than breaks");
    UpdateExpr out;
    out.breaks = breaks;
    std::vector<std::function<double(double, double)>> evals;
    evals.reserve(piece_list.size());
    for (const Json& p : piece_list) {
      UpdateExpr piece = update_from_json(p);
      out.u_enters_linearly = out.u_enters_linearly || piece.u_enters_linearly;
      out.breaks.insert(out.breaks.end(), piece.breaks.begin(), piece.breaks.end());
      evals.push_back(std::move(piece.eval));
    }
    out.eval = [breaks = std::move(breaks), evals = std::move(evals)](double x, double u) {
      const size_t i =
          size_t(std::upper_bound(breaks.begin(), breaks.end(), u) - breaks.begin());
      return evals[i](x, u);
    };
    return out;
  }
  throw ConfigError("unknown update op '" + op + "'");
}

}  // namespace

std::shared_ptr<RecursionKernel> recursion_from_json(const Json& j) {
  const Json& sp = j.at("space");
  auto space = std::make_shared<const RealIntervalSpace>(sp.at("lo").get<double>(),
                                                         sp.at("hi").get<double>());
  UpdateExpr expr = update_from_json(j.at("update"));
  const double lo = space->lo();
  const double hi = space->hi();
  auto update = [f = std::move(expr.eval), lo, hi](const State& s, double u) -> State {
    const double y = f(std::get<double>(s), u);
    if (!(y >= lo && y <= hi))
      throw DomainError("recursion update leaves the interval at x = " +
                        std::to_string(std::get<double>(s)));
    return y;
  };
  std::optional<std::vector<double>> ubreaks;
  if (!expr.breaks.empty() && !expr.u_enters_linearly) {
    std::sort(expr.breaks.begin(), expr.breaks.end());
    expr.breaks.erase(std::unique(expr.breaks.begin(), expr.breaks.end()), expr.breaks.end());
    ubreaks = std::move(expr.breaks);
  }
  return std::make_shared<RecursionKernel>(std::move(space), std::move(update),
                                           j.value("monotone", false),
                                           j.value("name", std::string("config_recursion")),
                                           std::move(ubreaks));
}

Json pairset_to_json(const PairSet& s) {
  switch (s.kind) {
    case PairSet::Kind::Diagonal:
      return Json{{"kind", "diagonal"}};
    case PairSet::Kind::InM:
      return Json{{"kind", "in_m"}};
    case PairSet::Kind::Product:
      if (s.a.ground_size() == 0)
        throw ConfigError("predicate-form product sets cannot be serialized");
      return Json{{"kind", "product"},
                  {"a", indexset_to_json(s.a)},
                  {"b", indexset_to_json(s.b)},
                  {"name", s.name}};
    case PairSet::Kind::Pairs: {
      Json pairs = Json::array();
      for (const auto& [x, y] : s.pairs) pairs.push_back(Json::array({x, y}));
      return Json{{"kind", "pairs"}, {"pairs", std::move(pairs)}, {"name", s.name}};
    }
    case PairSet::Kind::Predicate:
      throw ConfigError("predicate pair sets cannot be serialized");
  }
  throw ConfigError("unhandled pair-set kind");
}

PairSet pairset_from_json(const Json& j, int n) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name != "diagonal" && name != "in_m" && name != "everything") {
      const Json* named = lookup_pairset_name(name);
      if (!named) throw ConfigError("unknown pair-set name '" + name + "'");
      if (named->is_string())
        throw ConfigError("pair-set name '" + name + "' must map to an object");
      return pairset_from_json(*named, n);
    }
  }
  const std::string kind = kind_of(j);
  if (kind == "diagonal") return PairSet::diagonal();
  if (kind == "in_m") return PairSet::in_m();
  if (kind == "everything") return PairSet::everything();
  if (kind == "product")
    return PairSet::product(indexset_from_json(j.at("a"), n), indexset_from_json(j.at("b"), n),
                            j.value("name", std::string("product")));
  if (kind == "pairs") {
    std::vector<std::pair<int, int>> pairs;
    for (const Json& e : j.at("pairs")) pairs.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return PairSet::explicit_pairs(std::move(pairs), j.value("name", std::string("pairs")));
  }
  throw ConfigError("unknown pair-set kind '" + kind + "'");
}

ScopedPairSetNames::ScopedPairSetNames(Json names) {
  if (!names.is_object()) throw ConfigError("pair_sets must be an object of {name: pair set}");
  pairset_name_stack().push_back(std::move(names));
}

ScopedPairSetNames::~ScopedPairSetNames() { pairset_name_stack().pop_back(); }

Json predicate_to_json(const StoppingPredicate& p) {
  switch (p.kind) {
    case StoppingPredicate::Kind::Never:
      return Json{{"kind", "never"}};
    case StoppingPredicate::Kind::PairIn:
      return Json{{"kind", "pair_in"}, {"set", pairset_to_json(p.set)}};
    case StoppingPredicate::Kind::FirstCoordIn:
      if (p.cset.ground_size() == 0)
        throw ConfigError("predicate-form coordinate sets cannot be serialized");
      return Json{{"kind", "first_coord_in"}, {"indices", indexset_to_json(p.cset)}};
    case StoppingPredicate::Kind::SecondCoordIn:
      if (p.cset.ground_size() == 0)
        throw ConfigError("predicate-form coordinate sets cannot be serialized");
      return Json{{"kind", "second_coord_in"}, {"indices", indexset_to_json(p.cset)}};
    case StoppingPredicate::Kind::TimeAtLeast:
      return Json{{"kind", "time_at_least"}, {"t", p.t}};
    case StoppingPredicate::Kind::StepsInStage:
      return Json{{"kind", "steps_in_stage"}, {"t", p.t}};
    case StoppingPredicate::Kind::AllOf: {
      Json preds = Json::array();
      for (const StoppingPredicate& q : p.all) preds.push_back(predicate_to_json(q));
      return Json{{"kind", "all_of"}, {"preds", std::move(preds)}};
    }
  }
  throw ConfigError("unhandled predicate kind");
}

StoppingPredicate predicate_from_json(const Json& j, int n) {
  // shorthand: a single-key object like {"pair_in": "diagonal"} or
  // {"time_at_least": 12}, with the key as the kind and the value its payload
  if (j.is_object() && j.size() == 1 && !j.contains("kind") && !j.contains("type")) {
    const std::string key = j.begin().key();
    const Json& val = j.begin().value();
    if (key == "pair_in") return StoppingPredicate::pair_in(pairset_from_json(val, n));
    if (key == "first_coord_in")
      return StoppingPredicate::first_coord_in(indexset_from_json(val, n));
    if (key == "second_coord_in")
      return StoppingPredicate::second_coord_in(indexset_from_json(val, n));
    if (key == "time_at_least") return StoppingPredicate::time_at_least(val.get<int64_t>());
    if (key == "steps_in_stage") return StoppingPredicate::steps_in_stage(val.get<int64_t>());
    if (key == "all_of") {
      std::vector<StoppingPredicate> preds;
      for (const Json& e : val) preds.push_back(predicate_from_json(e, n));
      return StoppingPredicate::all_of(std::move(preds));
    }
    throw ConfigError("unknown predicate '" + key + "'");
  }
  const std::string kind = kind_of(j);
  if (kind == "never") return StoppingPredicate::never();
  if (kind == "pair_in") return StoppingPredicate::pair_in(pairset_from_json(j.at("set"), n));
  if (kind == "first_coord_in")
    return StoppingPredicate::first_coord_in(indexset_from_json(j.at("indices"), n));
  if (kind == "second_coord_in")
    return StoppingPredicate::second_coord_in(indexset_from_json(j.at("indices"), n));
  if (kind == "time_at_least") return StoppingPredicate::time_at_least(j.at("t").get<int64_t>());
  if (kind == "steps_in_stage") return StoppingPredicate::steps_in_stage(j.at("t").get<int64_t>());
  if (kind == "all_of") {
    std::vector<StoppingPredicate> preds;
    for (const Json& e : j.at("preds")) preds.push_back(predicate_from_json(e, n));
    return StoppingPredicate::all_of(std::move(preds));
  }
  throw ConfigError("unknown predicate kind '" + kind + "'");
}

Json policy_to_json(const CouplingPolicy& p) {
  if (p.kind == CouplingPolicy::Kind::Basic) return basic_to_json(p.basic);
  Json stages = Json::array();
  for (const SwitchStage& st : p.stages) {
    Json rules = Json::array();
    for (const SwitchRule& r : st.rules)
      rules.push_back(Json{{"when", predicate_to_json(r.when)}, {"next", r.next}});
    stages.push_back(
        Json{{"policy", basic_to_json(st.policy)}, {"rules", std::move(rules)}, {"label", st.label}});
  }
  return Json{{"kind", "switched"}, {"stages", std::move(stages)}};
}

CouplingPolicy policy_from_json(const Json& j, int n) {
  const std::string kind = kind_of(j);
  if (kind != "switched") {
    CouplingPolicy p;
    p.basic = basic_from_json(j);
    return p;
  }
  const Json& stage_list = j.at("stages");
  std::vector<SwitchStage> stages;
  int idx = 0;
  for (const Json& e : stage_list) {
    SwitchStage st;
    st.policy = basic_from_json(e.at("policy"));
    st.label = e.value("label", std::string());
    // "until" advances to the following stage once the predicate fires
    if (e.contains("until")) {
      if (size_t(idx) + 1 >= stage_list.size())
        throw ConfigError("'until' on the last stage has no stage to advance to");
      st.rules.push_back({predicate_from_json(e.at("until"), n), idx + 1});
    }
    for (const Json& r : e.value("rules", Json::array()))
      st.rules.push_back({predicate_from_json(r.at("when"), n), r.at("next").get<int>()});
    stages.push_back(std::move(st));
    ++idx;
  }
  return CouplingPolicy::switched(std::move(stages));
}

Json split_to_json(const SplitCertificate& c) {
  return Json{{"C", indexset_to_json(c.C)}, {"z0", c.z0},   {"A", indexset_to_json(c.A)},
              {"B", indexset_to_json(c.B)}, {"N", c.N},     {"eps", c.eps}};
}

SplitCertificate split_from_json(const Json& j, int n) {
  SplitCertificate c;
  c.C = indexset_from_json(j.at("C"), n);
  c.z0 = j.at("z0").get<int>();
  c.A = indexset_from_json(j.at("A"), n);
  c.B = indexset_from_json(j.at("B"), n);
  c.N = j.at("N").get<int64_t>();
  c.eps = j.at("eps").get<double>();
  return c;
}

Json rate_to_json(const RateCertificate& c) {
  Json out{{"N", c.N},         {"eps", c.eps},     {"q", c.q},
           {"K", c.K},         {"alt_q", c.alt_q}, {"alt_K", c.alt_K},
           {"exact_coupling", c.exact_coupling}};
  if (c.exact_coupling) out["note"] = "coupled after N steps";
  if (c.split) out["split"] = split_to_json(*c.split);
  if (c.interval)
    out["interval"] = Json{{"pivot", c.interval->pivot},
                           {"N", c.interval->N},
                           {"eps", c.interval->eps},
                           {"p_low_at_hi", c.interval->p_low_at_hi},
                           {"p_high_at_lo", c.interval->p_high_at_lo},
                           {"se", c.interval->se},
                           {"grid_points", c.interval->grid_points},
                           {"reps", c.interval->reps},
                           {"seed", c.interval->seed}};
  return out;
}

RateCertificate rate_from_json(const Json& j, int n) {
  RateCertificate c;
  c.N = j.at("N").get<int64_t>();
  c.eps = j.at("eps").get<double>();
  c.q = j.at("q").get<double>();
  c.K = j.at("K").get<double>();
  c.alt_q = j.at("alt_q").get<double>();
  c.alt_K = j.at("alt_K").get<double>();
  c.exact_coupling = j.value("exact_coupling", false);
  if (j.contains("split")) c.split = split_from_json(j.at("split"), n);
  if (j.contains("interval")) {
    const Json& e = j.at("interval");
    IntervalSplit s;
    s.pivot = e.at("pivot").get<double>();
    s.N = e.at("N").get<int64_t>();
    s.eps = e.at("eps").get<double>();
    s.p_low_at_hi = e.at("p_low_at_hi").get<double>();
    s.p_high_at_lo = e.at("p_high_at_lo").get<double>();
    s.se = e.at("se").get<double>();
    s.grid_points = e.at("grid_points").get<int>();
    s.reps = e.at("reps").get<int64_t>();
    s.seed = e.at("seed").get<uint64_t>();
    c.interval = s;
  }
  return c;
}

Json uniqueness_to_json(const UniquenessCertificate& c) {
  Json out{{"ok", c.ok}};
  if (c.ok) {
    Json ws = Json::array();
    for (const UniquenessWitness& w : c.witnesses)
      ws.push_back(Json{{"x", w.x}, {"y", w.y}, {"a", w.a}, {"b", w.b}});
    out["witnesses"] = std::move(ws);
  } else {
    out["fail_pair"] = Json::array({c.fail_x, c.fail_y});
  }
  return out;
}

Json tail_to_json(const TailEstimate& t) {
  Json exceed = Json::array();
  for (int64_t e : t.exceed) exceed.push_back(e);
  return Json{{"horizon", t.horizon},
              {"reps", t.reps},
              {"seed", t.seed},
              {"censored_fraction", t.censored_fraction},
              {"exceed", std::move(exceed)}};
}

Json occupation_to_json(const OccupationMeasure& m) {
  return Json{{"pi", dist_to_json(m.pi)}, {"mean_cycle", m.mean_cycle}};
}

Json pr_to_json(const PrReport& r) {
  return Json{{"e_nu_minus", r.e_nu_minus}, {"e_nu_plus", r.e_nu_plus}, {"holds", r.holds}};
}

Json monotone_check_to_json(const MonotoneCheck& c) {
  Json out{{"monotone", c.monotone}};
  if (!c.monotone) {
    out["pair"] = Json::array({c.x, c.y});
    if (c.witness) out["witness"] = indexset_to_json(*c.witness);
  }
  return out;
}

Json dominance_to_json(const DominanceResult& r) {
  Json out{{"dominated", r.dominated}, {"gap", r.gap}};
  if (r.witness) out["witness"] = indexset_to_json(*r.witness);
  return out;
}

Json distance_to_json(const DistanceResult& r) {
  return Json{{"distance", r.distance}, {"witness", indexset_to_json(r.witness)}};
}

Json stationary_to_json(const StationaryReport& r) {
  Json classes = Json::array();
  for (const auto& c : r.closed_classes) {
    Json cls = Json::array();
    for (int i : c) cls.push_back(i);
    classes.push_back(std::move(cls));
  }
  Json pis = Json::array();
  for (const Dist& d : r.stationary) pis.push_back(dist_to_json(d));
  return Json{{"closed_classes", std::move(classes)},
              {"stationary", std::move(pis)},
              {"unique", r.unique}};
}

Json fixture_to_json(const Fixture& f) {
  Json out{{"name", f.name}, {"space", f.space ? f.space->name() : ""}, {"notes", f.notes}};
  if (f.finite) out["kernel"] = kernel_to_json(*f.finite);
  if (f.recursion) out["recursion"] = f.recursion->name();
  if (f.regen) out["regen"] = Json::array({f.regen->x0, f.regen->y0});
  Json exp = Json::object();
  if (f.expected.monotone) exp["monotone"] = *f.expected.monotone;
  if (!f.expected.achievable_policy.empty())
    exp["achievable_policy"] = f.expected.achievable_policy;
  if (f.expected.closed_classes) exp["closed_classes"] = *f.expected.closed_classes;
  if (f.expected.unique_stationary) exp["unique_stationary"] = *f.expected.unique_stationary;
  if (f.expected.uniqueness_cert) exp["uniqueness_cert"] = *f.expected.uniqueness_cert;
  if (f.expected.pr_holds) exp["pr_holds"] = *f.expected.pr_holds;
  if (f.expected.compressibility) exp["compressibility"] = *f.expected.compressibility;
  if (f.expected.tight) exp["tight"] = *f.expected.tight;
  if (f.expected.bmc_holds) exp["bmc_holds"] = *f.expected.bmc_holds;
  if (f.expected.no_stationary) exp["no_stationary"] = *f.expected.no_stationary;
  out["expected"] = std::move(exp);
  return out;
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
}

std::vector<std::vector<std::string>> rate_rows(const RateReport& r) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(r.rows.size());
  for (const RateRow& row : r.rows)
    rows.push_back({std::to_string(row.n), csv_double(row.max_distance), csv_double(row.bound),
                    csv_double(row.alt_bound)});
  return rows;
}

std::vector<std::vector<std::string>> bound_rows(const CompressibilityReport& r) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(r.rows.size());
  for (const BoundRow& row : r.rows)
    rows.push_back({std::to_string(row.n), csv_double(row.lhs), csv_double(row.rhs)});
  return rows;
}

std::vector<std::vector<std::string>> tail_rows(const TailEstimate& t) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(t.exceed.size());
  for (size_t n = 0; n < t.exceed.size(); ++n)
    rows.push_back({std::to_string(n), std::to_string(t.exceed[n]),
                    csv_double(t.tail(int64_t(n)))});
  return rows;
}

}  // namespace momc
