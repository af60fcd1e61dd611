#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "aqtlab/boundedness.hpp"
#include "aqtlab/io.hpp"
#include "sweep_chart.hpp"

namespace aqtlab::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (text.back() == sep) out.emplace_back();
  return out;
}

std::int64_t to_int(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(fmt::format("{}: expected an integer, got '{}'", what, text));
  return v;
}

int to_positive(const std::string& text, const std::string& what) {
  const auto v = to_int(text, what);
  if (v < 1 || v > 1 << 20) throw UsageError(fmt::format("{}: expected a positive size, got {}", what, v));
  return static_cast<int>(v);
}

Rational to_rational(const std::string& text, const std::string& what) {
  try {
    return parse_rational(text);
  } catch (const ValidationError& e) {
    throw UsageError(fmt::format("{}: {}", what, e.what()));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("AQT_LAB_SEED"); env != nullptr && *env != '\0') {
    const auto v = to_int(env, "AQT_LAB_SEED");
    if (v < 0) throw UsageError("AQT_LAB_SEED must be non-negative");
    return static_cast<std::uint64_t>(v);
  }
  return 0;
}

// Fills options that were not given on the command line from a JSON object
// whose keys are the long option names.
void apply_config(CLI::App& sub, const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("{}: invalid JSON: {}", path, e.what()));
  }
  if (!j.is_object()) throw UsageError(path + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "config") continue;
    auto* opt = sub.get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError(fmt::format("{}: unknown key '{}' for {}", path, key, sub.get_name()));
    if (opt->count() > 0) continue;
    std::vector<std::string> values;
    auto text = [](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      return v.dump();
    };
    if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + text(v);
      values.push_back(joined);
    } else {
      values.push_back(text(value));
    }
    for (const auto& v : values) opt->add_result(v);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(fmt::format("{}: key '{}': {}", path, key, e.what()));
    }
  }
}

std::string describe(const Witness& w) {
  std::string origins;
  for (int f : w.origins) origins += (origins.empty() ? "" : ",") + std::to_string(f);
  return fmt::format("edge={} rounds=[{},{}] origins={{{}}} lhs={} rhs={}", w.edge, w.rounds.first, w.rounds.last,
                     origins, to_string(w.lhs), to_string(w.rhs));
}

std::string describe(const BoundParams& p) {
  const auto lo = *std::min_element(p.beta.begin(), p.beta.end());
  const auto hi = p.max_beta();
  const auto beta = lo == hi ? "beta=" + to_string(hi) : fmt::format("beta in [{},{}]", to_string(lo), to_string(hi));
  return fmt::format("rho={} sigma={} {}", to_string(p.rho), to_string(p.sigma), beta);
}

struct ScenarioOptions {
  std::string adversary;
  std::string protocol = "oed";
  std::optional<std::int64_t> rounds;
  std::optional<std::int64_t> seed;
  std::int64_t epochs = 1;
  std::string config;
};

void add_scenario_options(CLI::App& sub, ScenarioOptions& o) {
  sub.add_option("--adversary", o.adversary, "a0:n | a1:n | wave:n | empty:n | lb:n,B,sigma | rand:n,B,sigma[,seed] | file:path");
  sub.add_option("--protocol", o.protocol, "oed or greedy")->capture_default_str();
  sub.add_option("--rounds", o.rounds, "rounds to simulate (default: the adversary's natural length)");
  sub.add_option("--seed", o.seed, "seed for rand: adversaries (default: $AQT_LAB_SEED or 0)");
  sub.add_option("--epochs", o.epochs, "epochs for rand: adversaries without --rounds")->capture_default_str();
  sub.add_option("--config", o.config, "JSON file with default values for these options");
}

std::uint64_t seed_of(const ScenarioOptions& o) {
  if (o.seed) {
    if (*o.seed < 0) throw UsageError("--seed must be non-negative");
    return static_cast<std::uint64_t>(*o.seed);
  }
  return default_seed();
}

Protocol protocol_of(const std::string& name) {
  try {
    return parse_protocol(name);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  ScenarioOptions scenario;
  std::string topology;
  int capacity = 1;
  bool check_invariants = false;
  bool events = false;
  std::string out = "run";
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  if (o.scenario.adversary.empty()) throw UsageError("simulate needs --adversary");
  const auto spec = parse_adversary_spec(o.scenario.adversary);
  auto source = make_source(spec, o.scenario.rounds, o.scenario.epochs, seed_of(o.scenario));
  const auto protocol = protocol_of(o.scenario.protocol);

  int buffers = source.adversary->buffers();
  int capacity = o.capacity;
  if (!o.topology.empty()) {
    if (o.topology.rfind("path:", 0) != 0) throw UsageError("--topology must look like path:n or path:n,C");
    const auto parts = split_list(o.topology.substr(5));
    if (parts.empty() || parts.size() > 2) throw UsageError("--topology must look like path:n or path:n,C");
    buffers = to_positive(parts[0], "--topology");
    if (parts.size() == 2) capacity = to_positive(parts[1], "--topology capacity");
  }
  if (buffers != source.adversary->buffers()) {
    throw UsageError(fmt::format("topology has {} buffers but the adversary drives {}", buffers,
                                 source.adversary->buffers()));
  }
  if (capacity < 1) throw UsageError("--capacity must be positive");
  const auto topology = make_path(buffers, capacity);

  RunOptions options;
  options.record_events = o.events;
  if (o.check_invariants) {
    InvariantConfig config;
    // The plateau invariants describe OED on unit-capacity paths.
    const bool plateau_checks = protocol == Protocol::oed && capacity == 1;
    config.persistence = config.packet_movement = config.even_plateau = plateau_checks;
    if (plateau_checks && source.declared) config.local_bound = source.declared;
    options.invariants = config;
  }
  const auto result = run(topology, *source.adversary, decision_rule(protocol), source.rounds, options);
  const auto& trace = result.trace;

  const fs::path dir(o.out);
  {
    auto f = open_out(dir / "trace.csv");
    write_trace_csv(f, trace);
  }
  {
    auto f = open_out(dir / "summary.csv");
    write_summary_csv(f, trace);
  }
  const auto realized = trace.realized_pattern();
  {
    auto f = open_out(dir / "pattern.csv");
    write_pattern_csv(f, realized);
  }
  if (source.declared) {
    auto f = open_out(dir / "declared.json");
    f << params_to_json(*source.declared) << "\n";
  }
  if (o.events) {
    auto f = open_out(dir / "events.jsonl");
    write_events_jsonl(f, trace);
  }

  int argmax = 1;
  for (int i = 1; i <= buffers; ++i) {
    if (trace.peaks()[i].max_load > trace.peaks()[argmax].max_load) argmax = i;
  }
  fmt::print(out, "rounds={} protocol={} max_load={} buffer={} round={} delivered={} in_network={}\n",
             trace.rounds(), to_string(protocol), trace.max_load(), argmax, trace.peaks()[argmax].argmax_round,
             result.final_state.delivered(), result.final_state.in_network());

  int code = kOk;
  for (const auto& v : result.violations) fmt::print(err, "invariant {} failed at round {}: {}\n", v.check, v.round, v.detail);
  if (result.violation_count > 0) {
    fmt::print(err, "{} invariant violation(s)\n", result.violation_count);
    code = kInvariant;
  }
  if (source.lower_bound != nullptr && source.lower_bound->target()) {
    const auto& lb = *source.lower_bound;
    const auto final_load = trace.load(lb.final_round(), *lb.target());
    fmt::print(out, "target={} final_load={} floor={}\n", *lb.target(), final_load,
               to_string(lb.geometry().final_floor()));
    if (!lb.phase_claims_hold() || Rational(final_load) < lb.geometry().final_floor()) {
      fmt::print(err, "lower-bound phase claim failed\n");
      code = kInvariant;
    }
  }
  if (source.declared) {
    const auto verdict = check_local(realized, *source.declared);
    if (!verdict) {
      fmt::print(err, "realized pattern breaks its declared bound ({}): {}\n", describe(*source.declared),
                 describe(*verdict.witness));
      code = kInvariant;
    }
  }
  return code;
}

// ---------------------------------------------------------------- check

struct CheckOptions {
  ScenarioOptions scenario;
  std::string pattern;
  std::optional<std::string> rho;
  std::optional<std::string> sigma;
  std::optional<std::string> burst;
  std::optional<std::string> beta;
  std::string params;
  std::string measure = "count";
};

int cmd_check(const CheckOptions& o, std::ostream& out, std::ostream&) {
  if (o.pattern.empty() == o.scenario.adversary.empty()) {
    throw UsageError("check needs exactly one of --pattern or --adversary");
  }
  std::optional<InjectionPattern> pattern;
  std::optional<BoundParams> declared;
  if (!o.pattern.empty()) {
    std::ifstream in(o.pattern);
    if (!in) throw UsageError("cannot read " + o.pattern);
    try {
      pattern = read_pattern_csv(in);
    } catch (const ParseError& e) {
      throw UsageError(o.pattern + ": " + e.what());
    }
  } else {
    const auto spec = parse_adversary_spec(o.scenario.adversary);
    auto source = make_source(spec, o.scenario.rounds, o.scenario.epochs, seed_of(o.scenario));
    declared = source.declared;
    if (auto* fixed = dynamic_cast<PatternAdversary*>(source.adversary.get())) {
      pattern = fixed->pattern();
    } else {
      // Adaptive adversaries are only defined against a protocol.
      const auto protocol = protocol_of(o.scenario.protocol);
      const auto topology = make_path(source.adversary->buffers(), 1);
      pattern = run(topology, *source.adversary, decision_rule(protocol), source.rounds).trace.realized_pattern();
    }
  }
  const int n = pattern->buffers();
  Measure measure = Measure::count;
  if (o.measure == "weight") {
    measure = Measure::weight;
  } else if (o.measure != "count") {
    throw UsageError("--measure must be count or weight");
  }

  std::optional<BoundParams> params;
  bool global_only = false;
  if (!o.params.empty()) {
    try {
      params = params_from_json(read_file(o.params), n);
    } catch (const ParseError& e) {
      throw UsageError(o.params + ": " + e.what());
    }
  } else if (o.rho) {
    params = BoundParams::uniform(n, to_rational(*o.rho, "--rho"), to_rational(o.sigma.value_or("0"), "--sigma"),
                                  Rational{0});
    if (o.burst && o.beta) throw UsageError("give --B or --beta, not both");
    if (o.burst) {
      const auto b = to_rational(*o.burst, "--B");
      for (int f = 1; f <= n; ++f) params->beta[f] = b;
    } else if (o.beta) {
      const auto items = split_list(*o.beta);
      if (static_cast<int>(items.size()) != n) {
        throw UsageError(fmt::format("--beta lists {} values for {} buffers", items.size(), n));
      }
      for (int f = 1; f <= n; ++f) params->beta[f] = to_rational(items[static_cast<std::size_t>(f - 1)], "--beta");
    } else {
      global_only = true;
    }
  } else if (declared) {
    params = declared;
  } else {
    throw UsageError("check needs --rho (with --sigma and --B/--beta) or --params");
  }
  try {
    params->validate(n);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }

  const auto verdict = global_only ? check_rho_sigma(*pattern, params->rho, params->sigma, measure)
                                   : check_local(*pattern, *params, measure);
  const auto what = global_only ? fmt::format("(rho, sigma) = ({}, {})", to_string(params->rho), to_string(params->sigma))
                                : describe(*params);
  if (verdict) {
    fmt::print(out, "ok: {} packets over rounds [0,{}] satisfy {}\n", pattern->size(), pattern->horizon(), what);
    return kOk;
  }
  fmt::print(out, "violation: {}\n  {}\n", what, describe(*verdict.witness));
  return kViolation;
}

// ---------------------------------------------------------------- sweep

struct SweepOptions {
  std::string sizes;
  int burst = 1;
  std::int64_t sigma = 0;
  std::string protocols = "oed";
  std::string adversary = "lb";
  std::int64_t epochs = 64;
  std::optional<std::int64_t> seed;
  std::string out;
  std::string svg;
  std::string config;
};

struct Trial {
  SweepRow row;
  std::string problem;  // non-empty when a proof-level guarantee failed
};

Trial sweep_trial(int n, const SweepOptions& o, Protocol protocol, std::uint64_t seed) {
  Trial t;
  t.row = SweepRow{n, o.burst, Rational(o.sigma), std::string(to_string(protocol)), 0,
                   oed_proof_bound(n, Rational(o.burst), Rational(o.sigma))};
  const auto topology = make_path(n, 1);
  if (o.adversary == "lb") {
    LowerBoundAdversary lb(n, o.burst, o.sigma);
    const auto result = run(topology, lb, decision_rule(protocol), lb.rounds_needed());
    t.row.peak_load = result.trace.max_load();
    const auto final_load = result.trace.load(lb.final_round(), *lb.target());
    if (!lb.phase_claims_hold() || Rational(final_load) < lb.geometry().final_floor()) {
      t.problem = fmt::format("n={} {}: final load {} below the floor {}", n, to_string(protocol), final_load,
                              to_string(lb.geometry().final_floor()));
    }
  } else {
    ObliviousRandomAdversary rnd(n, o.burst, o.sigma, seed, o.epochs);
    const auto result = run(topology, rnd, decision_rule(protocol), rnd.rounds_needed());
    t.row.peak_load = result.trace.max_load();
  }
  if (protocol == Protocol::oed && Rational(t.row.peak_load) > t.row.proof_bound) {
    t.problem = fmt::format("n={} oed: peak {} above the proof bound {}", n, t.row.peak_load,
                            to_string(t.row.proof_bound));
  }
  return t;
}

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  if (o.adversary != "lb" && o.adversary != "rand") throw UsageError("--adversary must be lb or rand");
  if (o.burst < 1) throw UsageError("--B must be at least 1");
  if (o.sigma < 0) throw UsageError("--sigma must be non-negative");
  if (o.epochs < 1) throw UsageError("--epochs must be positive");
  std::vector<int> sizes;
  for (const auto& s : split_list(o.sizes)) {
    const int n = to_positive(s, "--n");
    try {
      (void)lower_bound_depth(n, o.burst);
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
    sizes.push_back(n);
  }
  std::vector<Protocol> protocols;
  for (const auto& p : split_list(o.protocols)) protocols.push_back(protocol_of(p));
  if (protocols.empty()) throw UsageError("--protocol lists no protocol");
  const auto seed = o.seed ? static_cast<std::uint64_t>(*o.seed) : default_seed();

  std::vector<std::future<Trial>> pending;
  for (auto protocol : protocols) {
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      // Each trial owns its stream: (seed, trial index).
      std::seed_seq mix{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(k)};
      std::uint32_t derived[2];
      mix.generate(derived, derived + 2);
      const auto trial_seed = (static_cast<std::uint64_t>(derived[0]) << 32) | derived[1];
      pending.push_back(std::async(std::launch::async, sweep_trial, sizes[k], std::cref(o), protocol, trial_seed));
    }
  }
  std::vector<Trial> trials;
  for (auto& f : pending) trials.push_back(f.get());
  std::sort(trials.begin(), trials.end(), [](const Trial& a, const Trial& b) {
    return std::tie(a.row.protocol, a.row.n) < std::tie(b.row.protocol, b.row.n);
  });

  std::vector<SweepRow> rows;
  int code = kOk;
  for (const auto& t : trials) {
    rows.push_back(t.row);
    if (!t.problem.empty()) {
      fmt::print(err, "sanity check failed: {}\n", t.problem);
      code = kInvariant;
    }
  }
  // Against the adaptive adversary peaks should not shrink as the network
  // grows; random epochs carry no such guarantee.
  for (std::size_t k = 1; o.adversary == "lb" && k < rows.size(); ++k) {
    if (rows[k].protocol == rows[k - 1].protocol && rows[k].peak_load < rows[k - 1].peak_load) {
      fmt::print(err, "sanity check failed: {} peak drops from {} at n={} to {} at n={}\n", rows[k].protocol,
                 rows[k - 1].peak_load, rows[k - 1].n, rows[k].peak_load, rows[k].n);
      code = kInvariant;
    }
  }

  if (o.out.empty()) {
    write_sweep_csv(out, rows);
  } else {
    auto f = open_out(o.out);
    write_sweep_csv(f, rows);
  }
  if (!o.svg.empty()) {
    auto f = open_out(o.svg);
    f << render_sweep_svg(rows);
  }
  return code;
}

// ---------------------------------------------------------------- render

int cmd_render(const std::string& csv, const std::string& svg) {
  std::ifstream in(csv);
  if (!in) throw UsageError("cannot read " + csv);
  std::vector<SweepRow> rows;
  try {
    rows = read_sweep_csv(in);
  } catch (const ParseError& e) {
    throw UsageError(csv + ": " + e.what());
  }
  auto f = open_out(svg);
  f << render_sweep_svg(rows);
  return kOk;
}

}  // namespace

AdversarySpec parse_adversary_spec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("adversary spec '" + text + "' has no ':'");
  AdversarySpec spec;
  spec.kind = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);
  if (spec.kind == "file") {
    if (rest.empty()) throw UsageError("file: spec needs a path");
    spec.path = rest;
    return spec;
  }
  const auto args = split_list(rest);
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw UsageError(fmt::format("adversary spec '{}' has {} argument(s)", text, args.size()));
    }
  };
  if (spec.kind == "a0" || spec.kind == "a1" || spec.kind == "wave" || spec.kind == "empty") {
    want(1, 1);
    spec.n = to_positive(args[0], spec.kind);
  } else if (spec.kind == "lb" || spec.kind == "rand") {
    want(3, spec.kind == "rand" ? 4 : 3);
    spec.n = to_positive(args[0], spec.kind);
    spec.burst = to_positive(args[1], spec.kind + " B");
    spec.sigma = to_int(args[2], spec.kind + " sigma");
    if (spec.sigma < 0) throw UsageError("sigma must be non-negative");
    if (args.size() == 4) {
      const auto s = to_int(args[3], "rand seed");
      if (s < 0) throw UsageError("seed must be non-negative");
      spec.seed = static_cast<std::uint64_t>(s);
    }
    try {
      (void)lower_bound_depth(spec.n, spec.burst);
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
  } else {
    throw UsageError("unknown adversary kind '" + spec.kind + "'");
  }
  return spec;
}

std::optional<BoundParams> declared_params(const AdversarySpec& spec) {
  const int n = spec.n;
  if (spec.kind == "a0") return BoundParams::uniform(n, 1, n - 1, 0);
  if (spec.kind == "a1" || spec.kind == "wave") return BoundParams::uniform(n, 1, 0, 1);
  if (spec.kind == "empty") return BoundParams::uniform(n, 0, 0, 0);
  if (spec.kind == "lb" || spec.kind == "rand") return BoundParams::uniform(n, 1, spec.sigma, spec.burst);
  return std::nullopt;
}

Source make_source(const AdversarySpec& spec, std::optional<std::int64_t> rounds, std::int64_t epochs,
                   std::uint64_t seed) {
  if (rounds && *rounds < 0) throw UsageError("--rounds must be non-negative");
  Source s;
  s.declared = declared_params(spec);
  const auto horizon_for = [&](std::int64_t natural) {
    s.rounds = rounds.value_or(natural);
    return std::max<std::int64_t>(s.rounds - 1, 0);
  };
  if (spec.kind == "a0") {
    s.adversary = std::make_unique<PatternAdversary>(example_A0(spec.n, horizon_for(4 * spec.n + 1)));
  } else if (spec.kind == "a1") {
    s.adversary = std::make_unique<PatternAdversary>(example_A1(spec.n, horizon_for(4 * spec.n + 1)));
  } else if (spec.kind == "wave") {
    const auto h = horizon_for(4 * spec.n + 1);
    s.adversary = std::make_unique<PatternAdversary>(discretize(wave_flows(spec.n), h));
  } else if (spec.kind == "empty") {
    s.adversary = std::make_unique<PatternAdversary>(InjectionPattern(spec.n, horizon_for(4 * spec.n)));
  } else if (spec.kind == "lb") {
    auto lb = std::make_unique<LowerBoundAdversary>(spec.n, spec.burst, spec.sigma);
    s.rounds = rounds.value_or(lb->rounds_needed());
    s.lower_bound = lb.get();
    s.adversary = std::move(lb);
  } else if (spec.kind == "rand") {
    if (epochs < 1) throw UsageError("--epochs must be positive");
    std::int64_t count = epochs;
    if (rounds) {
      const auto length = ObliviousRandomAdversary(spec.n, spec.burst, spec.sigma, 0, 0).epoch_length();
      count = (*rounds + length - 1) / length;
    }
    auto rnd = std::make_unique<ObliviousRandomAdversary>(spec.n, spec.burst, spec.sigma, spec.seed.value_or(seed), count);
    s.rounds = rounds.value_or(rnd->rounds_needed());
    s.random = rnd.get();
    s.adversary = std::move(rnd);
  } else if (spec.kind == "file") {
    std::ifstream in(spec.path);
    if (!in) throw UsageError("cannot read " + spec.path);
    try {
      auto pattern = read_pattern_csv(in);
      s.rounds = rounds.value_or(pattern.horizon() + 1);
      s.adversary = std::make_unique<PatternAdversary>(std::move(pattern));
    } catch (const ParseError& e) {
      throw UsageError(spec.path + ": " + e.what());
    }
  } else {
    throw UsageError("unknown adversary kind '" + spec.kind + "'");
  }
  return s;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial queueing lab for single-destination paths", "aqt_lab"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "run an adversary against a protocol and write CSV traces");
  add_scenario_options(*simulate, sim.scenario);
  simulate->add_option("--topology", sim.topology, "path:n or path:n,C (default: the adversary's size)");
  simulate->add_option("--capacity", sim.capacity, "edge capacity C")->capture_default_str();
  simulate->add_flag("--check-invariants", sim.check_invariants, "verify the OED plateau invariants every round");
  simulate->add_flag("--events", sim.events, "also write events.jsonl");
  simulate->add_option("--out", sim.out, "output directory")->capture_default_str();

  CheckOptions chk;
  auto* check = app.add_subcommand("check", "verify a pattern against (rho, sigma) or (rho, sigma, beta)");
  add_scenario_options(*check, chk.scenario);
  check->add_option("--pattern", chk.pattern, "pattern CSV (round,origin,count,size)");
  check->add_option("--rho", chk.rho, "rate");
  check->add_option("--sigma", chk.sigma, "global burst (default 0)");
  check->add_option("--B", chk.burst, "uniform local burst");
  check->add_option("--beta", chk.beta, "comma-separated local bursts, one per buffer");
  check->add_option("--params", chk.params, "JSON file {rho, sigma, beta}");
  check->add_option("--measure", chk.measure, "count or weight")->capture_default_str();

  SweepOptions swp;
  auto* sweep = app.add_subcommand("sweep", "peak load against network size");
  sweep->add_option("--n", swp.sizes, "comma-separated network sizes, each a power of 2B");
  sweep->add_option("--B", swp.burst, "local burst B")->capture_default_str();
  sweep->add_option("--sigma", swp.sigma, "global burst")->capture_default_str();
  sweep->add_option("--protocol", swp.protocols, "comma-separated protocols")->capture_default_str();
  sweep->add_option("--adversary", swp.adversary, "lb or rand")->capture_default_str();
  sweep->add_option("--epochs", swp.epochs, "epochs per rand trial")->capture_default_str();
  sweep->add_option("--seed", swp.seed, "seed for rand trials (default: $AQT_LAB_SEED or 0)");
  sweep->add_option("--out", swp.out, "CSV path (default: stdout)");
  sweep->add_option("--svg", swp.svg, "also render an SVG chart");
  sweep->add_option("--config", swp.config, "JSON file with default values for these options");

  std::string render_csv, render_svg;
  auto* render = app.add_subcommand("render", "draw a sweep CSV as an SVG line chart");
  render->add_option("--csv", render_csv, "sweep CSV")->required();
  render->add_option("--svg", render_svg, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) {
      if (!sim.scenario.config.empty()) apply_config(*simulate, sim.scenario.config);
      return cmd_simulate(sim, out, err);
    }
    if (check->parsed()) {
      if (!chk.scenario.config.empty()) apply_config(*check, chk.scenario.config);
      return cmd_check(chk, out, err);
    }
    if (sweep->parsed()) {
      if (!swp.config.empty()) apply_config(*sweep, swp.config);
      return cmd_sweep(swp, out, err);
    }
    return cmd_render(render_csv, render_svg);
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const ValidationError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "internal error: {}\n", e.what());
    return kInvariant;
  }
}

}  // namespace aqtlab::cli
