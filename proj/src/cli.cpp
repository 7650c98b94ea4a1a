#include "momc/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "momc/errors.hpp"
#include "momc/order.hpp"
#include "momc/serialize.hpp"

namespace momc {

namespace {

Json load_json(const std::string& src) {
  const size_t first = src.find_first_not_of(" \t\r\n");
  if (first != std::string::npos &&
      (src[first] == '{' || src[first] == '[' || src[first] == '"')) {
    return Json::parse(src);
  }
  std::ifstream in(src);
  if (!in) throw ConfigError("cannot open '" + src + "'");
  Json j;
  in >> j;
  return j;
}

struct KernelArgs {
  std::string fixture;
  std::string kernel;

  FiniteKernel load() const {
    if (!fixture.empty()) {
      Fixture f = build_fixture(fixture);
      if (!f.finite)
        throw ConfigError("fixture '" + fixture + "' has no finite kernel form");
      return std::move(*f.finite);
    }
    if (!kernel.empty()) return kernel_from_json(load_json(kernel));
    throw ConfigError("pass --fixture or --kernel");
  }
};

void add_kernel_opts(CLI::App* cmd, KernelArgs& ka) {
  cmd->add_option("--fixture", ka.fixture, "gallery fixture name");
  cmd->add_option("--kernel", ka.kernel, "kernel JSON (inline or file path)");
}

PosetPtr load_poset(const std::string& poset_src, const KernelArgs& ka) {
  if (!poset_src.empty())
    return std::make_shared<const Poset>(poset_from_json(load_json(poset_src)));
  if (!ka.fixture.empty() || !ka.kernel.empty()) return ka.load().poset_ptr();
  throw ConfigError("pass --poset, --fixture or --kernel");
}

CouplingPolicy load_policy(const std::string& src, int n) {
  if (src == "independent") return CouplingPolicy::independent();
  if (src == "common_noise") return CouplingPolicy::common_noise();
  if (src == "strassen_monotone") return CouplingPolicy::strassen_monotone();
  return policy_from_json(load_json(src), n);
}

PairSet load_pairset(const std::string& src, int n) {
  if (src == "diagonal") return PairSet::diagonal();
  if (src == "in_m") return PairSet::in_m();
  return pairset_from_json(load_json(src), n);
}

// A gallery fixture name, or a recursion-DSL JSON document.
std::shared_ptr<const RecursionKernel> load_recursion(const std::string& src) {
  const std::vector<std::string> names = gallery_names();
  if (std::find(names.begin(), names.end(), src) != names.end()) {
    Fixture f = build_fixture(src);
    if (!f.recursion) throw ConfigError("fixture '" + src + "' has no recursion form");
    return f.recursion;
  }
  return recursion_from_json(load_json(src));
}

int parse_int(const std::string& s) {
  try {
    size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad integer '" + s + "'");
}

// Text forms per space: finite index "3"; real "0.25"; lattice "1,-2";
// layered "<layer>:<x>".
State parse_state(const OrderedSpace& space, const std::string& s) {
  try {
    const std::string kind = space.name();
    if (kind == "finite_poset") return int64_t(std::stoll(s));
    if (kind == "real_interval") return std::stod(s);
    if (kind == "int_lattice") {
      LatticePoint p;
      size_t pos = 0;
      while (pos < s.size()) {
        size_t used = 0;
        p.push_back(std::stoll(s.substr(pos), &used));
        pos += used;
        if (pos < s.size()) {
          if (s[pos] != ',') break;
          ++pos;
        }
      }
      if (!p.empty() && pos == s.size()) return p;
    }
    if (kind == "layered") {
      const size_t colon = s.find(':');
      if (colon != std::string::npos)
        return LayeredPoint{std::stoll(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot parse state '" + s + "' for space '" + space.name() + "'");
}

std::string csv_state(const State& s) {
  std::string text = state_to_string(s);
  if (text.find(',') != std::string::npos) return '"' + text + '"';
  return text;
}

int env_jobs() {
  const char* v = std::getenv("MONOTONE_MC_JOBS");
  if (!v || !*v) return 1;
  const int j = std::atoi(v);
  return j >= 1 ? j : 1;
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.emplace(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }

 private:
  std::optional<std::ofstream> file_;
  std::ostream& fallback_;
};

void emit_json(const Json& j, Sink& sink) { sink.stream() << j.dump(2) << '\n'; }

IndexSet full_set(int n) {
  IndexSet s = IndexSet::empty(n);
  for (int i = 0; i < n; ++i) s.add(i);
  return s;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_scenario(const Json& scenario, std::ostream& out, std::ostream& err) {
  std::optional<ScopedPairSetNames> names;
  if (scenario.contains("pair_sets")) names.emplace(scenario.at("pair_sets"));
  std::vector<std::string> args{scenario.at("op").get<std::string>()};
  const Json flags = scenario.value("flags", Json::object());
  for (const auto& [key, value] : flags.items()) {
    args.push_back("--" + key);
    if (value.is_boolean()) {
      if (!value.get<bool>()) args.pop_back();
      continue;
    }
    if (value.is_string())
      args.push_back(value.get<std::string>());
    else
      args.push_back(value.dump());
  }
  return dispatch(args, out, err);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact and Monte Carlo tooling for monotone Markov chains"};
  app.require_subcommand(1);

  // ---- check-monotone ----
  auto* c_mono = app.add_subcommand("check-monotone", "stochastic monotonicity verdict");
  KernelArgs mono_k;
  std::string mono_out;
  add_kernel_opts(c_mono, mono_k);
  c_mono->add_option("--out", mono_out, "output path");

  // ---- dominates / strassen / distance ----
  struct PairCmd {
    KernelArgs k;
    std::string poset, mu1, mu2, out;
  };
  PairCmd dom, str, dst;
  auto add_pair_opts = [](CLI::App* cmd, PairCmd& pc) {
    add_kernel_opts(cmd, pc.k);
    cmd->add_option("--poset", pc.poset, "poset JSON (inline or file path)");
    cmd->add_option("--mu1", pc.mu1, "first distribution")->required();
    cmd->add_option("--mu2", pc.mu2, "second distribution")->required();
    cmd->add_option("--out", pc.out, "output path");
  };
  add_pair_opts(app.add_subcommand("dominates", "stochastic order verdict"), dom);
  add_pair_opts(app.add_subcommand("strassen", "ordered coupling or witness"), str);
  add_pair_opts(app.add_subcommand("distance", "largest up-set gap"), dst);

  // ---- simulate ----
  auto* c_sim = app.add_subcommand("simulate", "one coupled trajectory as CSV");
  KernelArgs sim_k;
  std::string sim_policy = "independent", sim_rec, sim_x0, sim_y0, sim_out;
  int64_t sim_horizon = 100, sim_rep = 0;
  uint64_t sim_seed = 1;
  add_kernel_opts(c_sim, sim_k);
  c_sim->add_option("--recursion", sim_rec, "recursion kernel (fixture name or JSON)");
  c_sim->add_option("--policy", sim_policy, "policy name or JSON");
  c_sim->add_option("--x0", sim_x0)->required();
  c_sim->add_option("--y0", sim_y0)->required();
  c_sim->add_option("--horizon", sim_horizon);
  c_sim->add_option("--seed", sim_seed);
  c_sim->add_option("--rep", sim_rep);
  c_sim->add_option("--out", sim_out, "output path");

  // ---- tau ----
  auto* c_tau = app.add_subcommand("tau", "Monte Carlo meeting-time tails");
  KernelArgs tau_k;
  std::string tau_policy = "independent", tau_rec, tau_h = "in_m", tau_x0, tau_y0, tau_out;
  int tau_jobs = 0;
  int64_t tau_horizon = 1000, tau_reps = 1000;
  uint64_t tau_seed = 1;
  add_kernel_opts(c_tau, tau_k);
  c_tau->add_option("--recursion", tau_rec, "recursion kernel (fixture name or JSON)");
  c_tau->add_option("--policy", tau_policy);
  c_tau->add_option("--H", tau_h, "target pair set (name or JSON)");
  c_tau->add_option("--x0", tau_x0)->required();
  c_tau->add_option("--y0", tau_y0)->required();
  c_tau->add_option("--horizon", tau_horizon);
  c_tau->add_option("--reps", tau_reps);
  c_tau->add_option("--seed", tau_seed);
  c_tau->add_option("--jobs", tau_jobs, "worker count (default MONOTONE_MC_JOBS or 1)");
  c_tau->add_option("--out", tau_out);

  // ---- exact-tau ----
  auto* c_etau = app.add_subcommand("exact-tau", "exact meeting-time tails as CSV");
  KernelArgs etau_k;
  std::string etau_policy = "independent", etau_h = "in_m", etau_out;
  int etau_x0 = 0, etau_y0 = 0;
  int64_t etau_nmax = 100;
  add_kernel_opts(c_etau, etau_k);
  c_etau->add_option("--policy", etau_policy);
  c_etau->add_option("--H", etau_h);
  c_etau->add_option("--x0", etau_x0)->required();
  c_etau->add_option("--y0", etau_y0)->required();
  c_etau->add_option("--nmax", etau_nmax);
  c_etau->add_option("--out", etau_out);

  // ---- pi-regen ----
  auto* c_regen = app.add_subcommand("pi-regen", "occupation measures at the anchors");
  KernelArgs regen_k;
  std::string regen_out;
  int regen_x0 = -1, regen_y0 = -1;
  add_kernel_opts(c_regen, regen_k);
  c_regen->add_option("--x0", regen_x0, "lower anchor (fixture default otherwise)");
  c_regen->add_option("--y0", regen_y0, "upper anchor (fixture default otherwise)");
  c_regen->add_option("--out", regen_out);

  // ---- iterate ----
  auto* c_iter = app.add_subcommand("iterate", "monotone push-forward iteration");
  KernelArgs iter_k;
  std::string iter_out;
  int iter_x0 = -1, iter_y0 = -1;
  int64_t iter_nmax = 100000;
  double iter_eps = 1e-10;
  add_kernel_opts(c_iter, iter_k);
  c_iter->add_option("--x0", iter_x0);
  c_iter->add_option("--y0", iter_y0);
  c_iter->add_option("--nmax", iter_nmax);
  c_iter->add_option("--eps", iter_eps);
  c_iter->add_option("--out", iter_out);

  // ---- split ----
  auto* c_split = app.add_subcommand("split", "best canonical split certificate");
  KernelArgs split_k;
  std::string split_c, split_out;
  int64_t split_n = 1;
  add_kernel_opts(c_split, split_k);
  c_split->add_option("--N", split_n, "skeleton step count");
  c_split->add_option("--C", split_c, "restrict to this index set (JSON array)");
  c_split->add_option("--out", split_out);

  // ---- certify-rate ----
  auto* c_rate = app.add_subcommand("certify-rate", "geometric decay certificate");
  KernelArgs rate_k;
  std::string rate_out;
  int64_t rate_n = 1, rate_reps = 100000;
  bool rate_mc = false;
  uint64_t rate_seed = 715772021;
  int rate_jobs = 0;
  add_kernel_opts(c_rate, rate_k);
  c_rate->add_option("--N", rate_n);
  c_rate->add_flag("--mc", rate_mc, "Monte Carlo route on the fixture's recursion");
  c_rate->add_option("--reps", rate_reps);
  c_rate->add_option("--seed", rate_seed);
  c_rate->add_option("--jobs", rate_jobs);
  c_rate->add_option("--out", rate_out);

  // ---- verify-rate ----
  auto* c_vrate = app.add_subcommand("verify-rate", "check certified decay, CSV output");
  KernelArgs vrate_k;
  std::string vrate_cert, vrate_out;
  int64_t vrate_n = 1, vrate_nmax = 100;
  add_kernel_opts(c_vrate, vrate_k);
  c_vrate->add_option("--cert", vrate_cert, "rate certificate JSON (else built with --N)");
  c_vrate->add_option("--N", vrate_n);
  c_vrate->add_option("--nmax", vrate_nmax);
  c_vrate->add_option("--out", vrate_out);

  // ---- certify-unique ----
  auto* c_uni = app.add_subcommand("certify-unique", "singleton-witness uniqueness certificate");
  KernelArgs uni_k;
  std::string uni_out;
  add_kernel_opts(c_uni, uni_k);
  c_uni->add_option("--out", uni_out);

  // ---- gallery ----
  auto* c_gal = app.add_subcommand("gallery", "list fixtures or export one");
  std::vector<std::string> gal_args;
  std::string gal_out;
  c_gal->add_option("action", gal_args, "list | export <name>")->expected(1, 2);
  c_gal->add_option("--out", gal_out);

  // ---- run (scenario file) ----
  auto* c_run = app.add_subcommand("run", "run a JSON scenario");
  std::string run_config;
  c_run->add_option("--config", run_config, "scenario JSON (inline or file path)")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("monotone-mc");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << '\n';
    return 1;
  }

  if (c_mono->parsed()) {
    const FiniteKernel k = mono_k.load();
    Sink sink(mono_out, out);
    emit_json(monotone_check_to_json(is_monotone(k)), sink);
    return 0;
  }

  if (dom.mu1.size() || str.mu1.size() || dst.mu1.size()) {
    const bool is_dom = app.get_subcommand("dominates")->parsed();
    const bool is_str = app.get_subcommand("strassen")->parsed();
    PairCmd& pc = is_dom ? dom : (is_str ? str : dst);
    PosetPtr poset = load_poset(pc.poset, pc.k);
    const Dist mu1 = dist_from_json(load_json(pc.mu1));
    const Dist mu2 = dist_from_json(load_json(pc.mu2));
    if (mu1.size() != poset->size() || mu2.size() != poset->size())
      throw ConfigError("distribution size does not match the poset");
    Sink sink(pc.out, out);
    if (is_dom) {
      emit_json(dominance_to_json(dominance_check(mu1, mu2, *poset)), sink);
    } else if (is_str) {
      Json j;
      try {
        const Coupling c = strassen_coupling(mu1, mu2, *poset);
        Json rows = Json::array();
        for (int i = 0; i < poset->size(); ++i) {
          Json row = Json::array();
          for (int q = 0; q < poset->size(); ++q) row.push_back(c.lambda(i, q));
          rows.push_back(std::move(row));
        }
        j = Json{{"dominated", true}, {"lambda", std::move(rows)}};
      } catch (const NotDominated& nd) {
        j = Json{{"dominated", false}, {"gap", nd.gap}, {"witness", indexset_to_json(nd.witness)}};
      }
      emit_json(j, sink);
    } else {
      emit_json(distance_to_json(order_distance_witness(mu1, mu2, *poset)), sink);
    }
    return 0;
  }

  if (c_sim->parsed()) {
    Sink sink(sim_out, out);
    std::vector<std::vector<std::string>> rows;
    if (!sim_rec.empty()) {
      const auto rk = load_recursion(sim_rec);
      const CouplingPolicy pol = load_policy(sim_policy, 0);
      const RecursionCoupledPath path =
          simulate_pair(*rk, *rk, pol, parse_state(rk->space(), sim_x0),
                        parse_state(rk->space(), sim_y0), sim_horizon, sim_seed,
                        uint64_t(sim_rep));
      rows.reserve(path.x.size());
      for (size_t t = 0; t < path.x.size(); ++t)
        rows.push_back({std::to_string(t), csv_state(path.x[t]), csv_state(path.y[t]),
                        std::to_string(path.stage[t])});
    } else {
      const FiniteKernel k = sim_k.load();
      const CouplingPolicy pol = load_policy(sim_policy, k.size());
      const CoupledPath path = simulate_pair(k, k, pol, parse_int(sim_x0), parse_int(sim_y0),
                                             sim_horizon, sim_seed, uint64_t(sim_rep));
      rows.reserve(path.x.size());
      for (size_t t = 0; t < path.x.size(); ++t)
        rows.push_back({std::to_string(t), std::to_string(path.x[t]), std::to_string(path.y[t]),
                        std::to_string(path.stage[t])});
    }
    write_csv(sink.stream(), {"t", "x", "y", "stage"}, rows);
    return 0;
  }

  if (c_tau->parsed()) {
    const int jobs = tau_jobs > 0 ? tau_jobs : env_jobs();
    Sink sink(tau_out, out);
    if (!tau_rec.empty()) {
      const auto rk = load_recursion(tau_rec);
      const CouplingPolicy pol = load_policy(tau_policy, 0);
      const StoppingPredicate H = StoppingPredicate::pair_in(load_pairset(tau_h, 0));
      const TailEstimate te =
          estimate_tau(*rk, *rk, pol, H, parse_state(rk->space(), tau_x0),
                       parse_state(rk->space(), tau_y0), tau_horizon, tau_reps, tau_seed, jobs);
      emit_json(tail_to_json(te), sink);
      return 0;
    }
    const FiniteKernel k = tau_k.load();
    const CouplingPolicy pol = load_policy(tau_policy, k.size());
    const StoppingPredicate H = StoppingPredicate::pair_in(load_pairset(tau_h, k.size()));
    const TailEstimate te = estimate_tau(k, k, pol, H, parse_int(tau_x0), parse_int(tau_y0),
                                         tau_horizon, tau_reps, tau_seed, jobs);
    emit_json(tail_to_json(te), sink);
    return 0;
  }

  if (c_etau->parsed()) {
    const FiniteKernel k = etau_k.load();
    const CouplingPolicy pol = load_policy(etau_policy, k.size());
    const PairSet H = load_pairset(etau_h, k.size());
    const std::vector<double> tail = exact_tau_tail(k, k, pol, H, etau_x0, etau_y0, etau_nmax);
    Sink sink(etau_out, out);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(tail.size());
    for (size_t n = 0; n < tail.size(); ++n)
      rows.push_back({std::to_string(n), csv_double(tail[n])});
    write_csv(sink.stream(), {"n", "tail"}, rows);
    return 0;
  }

  auto anchors = [](const KernelArgs& ka, int x0, int y0) {
    RegenSpec spec{x0, y0};
    if ((x0 < 0 || y0 < 0) && !ka.fixture.empty()) {
      const Fixture f = build_fixture(ka.fixture);
      if (f.regen) spec = *f.regen;
    }
    if (spec.x0 < 0 || spec.y0 < 0) throw ConfigError("pass --x0 and --y0");
    return spec;
  };

  if (c_regen->parsed()) {
    const FiniteKernel k = regen_k.load();
    const RegenSpec spec = anchors(regen_k, regen_x0, regen_y0);
    Json j{{"pr", pr_to_json(check_pr(k, spec))},
           {"pi_minus", occupation_to_json(pi_minus_exact(k, spec))},
           {"pi_plus", occupation_to_json(pi_plus_exact(k, spec))},
           {"anchors", Json::array({spec.x0, spec.y0})}};
    Sink sink(regen_out, out);
    emit_json(j, sink);
    return 0;
  }

  if (c_iter->parsed()) {
    const FiniteKernel k = iter_k.load();
    const RegenSpec spec = anchors(iter_k, iter_x0, iter_y0);
    const OccupationMeasure lo = pi_minus_exact(k, spec);
    const OccupationMeasure hi = pi_plus_exact(k, spec);
    const MonotoneIteration it = monotone_iteration(k, lo.pi, hi.pi, iter_nmax, iter_eps);
    Json j{{"converged_at", it.converged_at},
           {"limit", dist_to_json(it.limit)},
           {"residual", it.limit_residual},
           {"anchors", Json::array({spec.x0, spec.y0})}};
    Sink sink(iter_out, out);
    emit_json(j, sink);
    return 0;
  }

  if (c_split->parsed()) {
    const FiniteKernel k = split_k.load();
    const IndexSet C =
        split_c.empty() ? full_set(k.size()) : indexset_from_json(load_json(split_c), k.size());
    Sink sink(split_out, out);
    try {
      const SplitCertificate cert = find_split(k, split_n, C);
      Json j = split_to_json(cert);
      j["found"] = true;
      emit_json(j, sink);
    } catch (const NoSplit& e) {
      emit_json(Json{{"found", false}, {"reason", e.what()}}, sink);
    }
    return 0;
  }

  if (c_rate->parsed()) {
    Sink sink(rate_out, out);
    try {
      RateCertificate cert;
      if (rate_mc) {
        if (rate_k.fixture.empty()) throw ConfigError("--mc needs --fixture");
        const Fixture f = build_fixture(rate_k.fixture);
        if (!f.recursion) throw ConfigError("fixture has no recursion form");
        BmMcOptions opt;
        opt.reps = rate_reps;
        opt.seed = rate_seed;
        opt.jobs = rate_jobs > 0 ? rate_jobs : env_jobs();
        cert = bm_certificate(*f.recursion, rate_n, opt);
      } else {
        cert = bm_certificate(rate_k.load(), rate_n);
      }
      Json j = rate_to_json(cert);
      j["found"] = true;
      emit_json(j, sink);
    } catch (const NoSplit& e) {
      emit_json(Json{{"found", false}, {"reason", e.what()}}, sink);
    }
    return 0;
  }

  if (c_vrate->parsed()) {
    const FiniteKernel k = vrate_k.load();
    const RateCertificate cert = vrate_cert.empty()
                                     ? bm_certificate(k, vrate_n)
                                     : rate_from_json(load_json(vrate_cert), k.size());
    const RateReport rep = verify_rate(k, cert, vrate_nmax);
    Sink sink(vrate_out, out);
    write_csv(sink.stream(), {"n", "max_distance", "bound", "alt_bound"}, rate_rows(rep));
    return 0;
  }

  if (c_uni->parsed()) {
    const FiniteKernel k = uni_k.load();
    Sink sink(uni_out, out);
    emit_json(uniqueness_to_json(uniqueness_certificate(k)), sink);
    return 0;
  }

  if (c_gal->parsed()) {
    if (gal_args.empty()) throw ConfigError("usage: gallery list | gallery export <name>");
    Sink sink(gal_out, out);
    if (gal_args[0] == "list") {
      for (const std::string& name : gallery_names()) sink.stream() << name << '\n';
      return 0;
    }
    if (gal_args[0] == "export") {
      if (gal_args.size() != 2) throw ConfigError("usage: gallery export <name>");
      emit_json(fixture_to_json(build_fixture(gal_args[1])), sink);
      return 0;
    }
    throw ConfigError("unknown gallery action '" + gal_args[0] + "'");
  }

  if (c_run->parsed()) return run_scenario(load_json(run_config), out, err);

  err << "no subcommand\n";
  return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace momc
