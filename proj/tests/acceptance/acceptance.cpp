// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "aqtlab/adversaries.hpp"
#include "aqtlab/boundedness.hpp"
#include "aqtlab/bundling.hpp"
#include "aqtlab/engine.hpp"
#include "aqtlab/flows.hpp"
#include "aqtlab/pipelines.hpp"
#include "cli.hpp"
#include "support/generators.hpp"

namespace fs = std::filesystem;
using namespace aqtlab;
using testing::make_rng;
using testing::uniform;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail = what;  // keep the first failure
    pass = false;
  }
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> body;
};

std::string str(const Rational& q) { return to_string(q); }

std::string describe(const Witness& w) {
  std::ostringstream os;
  os << "edge " << w.edge << " rounds [" << w.rounds.first << "," << w.rounds.last << "] origins {";
  for (std::size_t k = 0; k < w.origins.size(); ++k) os << (k ? "," : "") << w.origins[k];
  os << "} lhs " << str(w.lhs) << " > rhs " << str(w.rhs);
  return os.str();
}

// ---------------------------------------------------------------------------

Outcome examples_ledger() {
  Outcome o;
  const int n = 16;
  const auto a0 = example_A0(n, 4 * n);
  const auto a1 = example_A1(n, 4 * n);
  o.require(min_sigma(a0, 1) == 15, "min_sigma(A0, 1) = " + str(min_sigma(a0, 1)));
  o.require(min_sigma(a1, 1) == 15, "min_sigma(A1, 1) = " + str(min_sigma(a1, 1)));
  o.require(check_local(a1, BoundParams::uniform(n, 1, 0, 1)).ok, "A1 not locally (1, 0, 1)-bounded");

  // Every split of a total below 15 between sigma and beta(1) fails; other
  // buffers' budgets are irrelevant because A0 only uses buffer 1.
  for (int sigma = 0; sigma <= 15; ++sigma) {
    for (int b1 = 0; sigma + b1 <= 16; ++b1) {
      auto params = BoundParams::uniform(n, 1, sigma, 3);
      params.beta[1] = b1;
      const bool ok = check_local(a0, params).ok;
      if (sigma + b1 < 15) o.require(!ok, "A0 accepted with sigma + beta(1) = " + std::to_string(sigma + b1));
      else o.require(ok, "A0 rejected with sigma + beta(1) = " + std::to_string(sigma + b1));
    }
  }

  const auto greedy = run(make_path(n), a1, greedy_decision, 4 * n + 1);
  o.require(greedy.trace.max_load() == 1, "greedy on A1 max load " + std::to_string(greedy.trace.max_load()));
  for (auto rule : {oed_decision, greedy_decision}) {
    const auto r = run(make_path(n), a0, rule, n + 1);
    o.require(r.trace.load(1, 1) == 16, "A0 L(1) at round 1 = " + std::to_string(r.trace.load(1, 1)));
  }
  if (o.pass) o.detail = "min_sigma 15/15, A1 in L(1,0,1), A0 fails iff sigma+beta(1) < 15, greedy A1 peak 1, A0 L(1)=16";
  return o;
}

Outcome discretization() {
  Outcome o;
  const int n = 16;
  const auto wave = wave_flows(n);
  const auto pattern = discretize(wave, 3 * n);
  o.require(pattern.injection_rounds() == std::vector<std::int64_t>{16, 32, 48}, "wave injects off the multiples of n");
  for (std::int64_t r : {16, 32, 48}) {
    const auto per = per_origin_utilization(pattern, n, {r, r});
    for (int f = 1; f <= n; ++f) o.require(per[f] == 1, "buffer " + std::to_string(f) + " at round " + std::to_string(r));
  }
  o.require(pattern.size() == 48, "wave pattern has " + std::to_string(pattern.size()) + " packets");
  const auto params = discretization_params(wave);
  bool shape = params.rho == 1 && params.sigma == 0;
  for (int f = 1; f <= n; ++f) shape = shape && params.beta[f] == 1;
  o.require(shape, "discretization_params is not (1, 0, 1)");
  o.require(check_local(pattern, params).ok, "discretized wave fails its derived bound");
  o.require(min_sigma(pattern, 1) == 15, "min_sigma of the discretized wave = " + str(min_sigma(pattern, 1)));
  if (o.pass) o.detail = "one packet per buffer at 16/32/48, params (1,0,1) verified, min_sigma 15";
  return o;
}

Outcome checker_oracle() {
  Outcome o;
  int agree = 0, violations = 0;
  const int trials = 600;
  for (int t = 0; t < trials; ++t) {
    auto rng = make_rng(kSeed + 3, static_cast<std::uint64_t>(t));
    const int n = static_cast<int>(uniform(rng, 1, 6));
    const auto h = uniform(rng, 0, 8);
    auto params = testing::random_params(rng, n);
    // Half arbitrary, half bounded-then-tightened so both verdicts are common.
    InjectionPattern p = t % 2 ? testing::random_pattern(rng, n, h)
                               : testing::bounded_pattern(rng, params, h);
    if (t % 2 == 0 && testing::coin(rng, 0.5)) params.sigma = params.sigma / 2;
    const auto fast = check_local(p, params);
    const auto slow = check_local_bruteforce(p, params);
    if (fast.ok == slow.ok) ++agree;
    else o.require(false, "disagreement on trial " + std::to_string(t));
    if (!fast.ok) ++violations;
  }
  o.detail = std::to_string(agree) + "/" + std::to_string(trials) + " agree (" + std::to_string(violations) +
             " violating, " + std::to_string(trials - violations) + " bounded)";
  return o;
}

Outcome bundling() {
  Outcome o;
  const int trials = 1200;
  int uniform_ok = 0, hetero_ok = 0, hetero_relaxed_ok = 0;
  std::string first_hetero_failure;
  for (int t = 0; t < trials; ++t) {
    auto rng = make_rng(kSeed + 4, static_cast<std::uint64_t>(t));
    const int c = static_cast<int>(uniform(rng, 2, 4));
    const int n = static_cast<int>(uniform(rng, 1, 6));
    const auto h = uniform(rng, 0, 12);

    // Uniform packets and jumbo bundles.
    auto params = testing::random_params(rng, n);
    const auto unit = testing::bounded_pattern(rng, params, h);
    if (verify_uniform_bundling(unit, params, c).ok) ++uniform_ok;
    else o.require(false, "uniform bundling failed on trial " + std::to_string(t));
    const auto jumbos = c_reduce_pattern(unit, c);
    const auto left = uniform_reserve(unit, c, h);
    std::int64_t reserved = 0;
    for (int f = 1; f <= n; ++f) reserved += left[f];
    o.require(static_cast<std::int64_t>(jumbos.size()) * c + reserved == static_cast<std::int64_t>(unit.size()),
              "jumbo count does not conserve packets on trial " + std::to_string(t));

    // Heterogeneous sizes, rate at most C/2.
    auto hp = params;
    hp.rho = testing::random_rational(rng, 1, 4) * Rational(c, 2);
    if (hp.rho > Rational(c, 2)) hp.rho = Rational(c, 2);
    const auto sized = testing::bounded_pattern(rng, hp, h, c);
    const auto bundles = hetero_bundle(sized, c);
    Rational reserve{0};
    for (int f = 1; f <= n; ++f) reserve += bundles.state.reserve[f];
    o.require(bundles.bundles.total_weight() + reserve == sized.total_weight(),
              "bundle weight not conserved on trial " + std::to_string(t));

    auto stated = BoundParams::uniform(n, 1, hp.sigma / c, 0);
    for (int f = 1; f <= n; ++f) stated.beta[f] = 1 + hp.beta[f] / c;
    const auto v = check_local(bundles.bundles, stated);
    if (v.ok) {
      ++hetero_ok;
    } else if (first_hetero_failure.empty()) {
      std::ostringstream os;
      os << "trial " << t << " C=" << c << " rho=" << str(hp.rho) << " sigma=" << str(hp.sigma)
         << " maxbeta=" << str(hp.max_beta()) << ": " << describe(*v.witness);
      first_hetero_failure = os.str();
    }
    if (check_local(bundles.bundles, hetero_bundle_params(hp, c)).ok) ++hetero_relaxed_ok;
  }
  o.require(hetero_ok == trials, "heterogeneous bundles break (1, sigma/C, 1+beta/C): " + first_hetero_failure);
  std::ostringstream os;
  os << "uniform " << uniform_ok << "/" << trials << ", hetero (1,s/C,1+b/C) " << hetero_ok << "/" << trials
     << ", hetero (2r/C,2s/C,1+2b/C) " << hetero_relaxed_ok << "/" << trials << ", weight conserved";
  if (o.pass) o.detail = os.str();
  else o.detail += " | " + os.str();
  return o;
}

// Criterion 5 adversaries are shared with criterion 6.
struct PlateauRun {
  int n;
  int burst;
  int sigma;
  std::int64_t max_load;
  std::uint64_t violations;
  std::string first;
};

std::vector<PlateauRun> plateau_runs() {
  static std::vector<PlateauRun> cache;
  if (!cache.empty()) return cache;
  const int sizes[] = {8, 16, 32};
  for (int t = 0; t < 210; ++t) {
    auto rng = make_rng(kSeed + 5, static_cast<std::uint64_t>(t));
    const int n = sizes[t % 3];
    const int burst = static_cast<int>(uniform(rng, 0, 3));
    const int sigma = static_cast<int>(uniform(rng, 0, 4));
    const auto params = BoundParams::uniform(n, 1, sigma, burst);
    const auto horizon = 20 * n;
    const auto pattern = testing::bounded_pattern(rng, params, horizon - 1, 0, testing::coin(rng, 0.5) ? 0.9 : 0.3);
    RunOptions opts;
    opts.invariants = InvariantConfig{};
    opts.invariants->local_bound = params;
    opts.invariants->include_zero_height = true;
    const auto r = run(make_path(n), pattern, oed_decision, horizon, opts);
    PlateauRun pr{n, burst, sigma, r.trace.max_load(), r.violation_count, ""};
    if (!r.violations.empty()) {
      const auto& v = r.violations.front();
      pr.first = v.check + " at round " + std::to_string(v.round) + ": " + v.detail;
    }
    if (!check_local(pattern, params).ok) pr.first = "generator produced an unbounded pattern";
    cache.push_back(pr);
  }
  return cache;
}

Outcome plateau_invariants() {
  Outcome o;
  std::uint64_t total = 0;
  std::int64_t peak = 0;
  const auto runs = plateau_runs();
  for (const auto& r : runs) {
    total += r.violations;
    peak = std::max(peak, r.max_load);
    o.require(r.violations == 0 && r.first.empty(),
              "n=" + std::to_string(r.n) + " B=" + std::to_string(r.burst) + " sigma=" + std::to_string(r.sigma) +
                  ": " + r.first);
  }
  const auto summary = std::to_string(runs.size()) + " adversaries on n in {8,16,32}, H=20n, " +
                       std::to_string(total) + " violations, peak load " + std::to_string(peak);
  o.detail = o.pass ? summary : o.detail + " | " + summary;
  return o;
}

Outcome oed_upper_bound() {
  Outcome o;
  Rational worst_gap{1000000};
  for (const auto& r : plateau_runs()) {
    const auto bound = oed_proof_bound(r.n, r.burst, r.sigma);
    worst_gap = std::min(worst_gap, bound - r.max_load);
    o.require(Rational(r.max_load) <= bound, "n=" + std::to_string(r.n) + " peak " + std::to_string(r.max_load) +
                                                 " above " + str(bound));
  }
  std::ostringstream lb;
  for (int burst : {1, 2}) {
    for (int sigma : {0, 4}) {
      LowerBoundAdversary adv(64, burst, sigma);
      const auto r = run(make_path(64), adv, oed_decision, adv.rounds_needed());
      const auto bound = oed_proof_bound(64, burst, sigma);
      lb << " lb(B=" << burst << ",s=" << sigma << ")=" << r.trace.max_load() << "/" << str(bound);
      o.require(Rational(r.trace.max_load()) <= bound, "lb:64," + std::to_string(burst) + "," + std::to_string(sigma) +
                                                           " peak " + std::to_string(r.trace.max_load()));
    }
  }
  if (o.pass) o.detail = "random adversaries: min slack " + str(worst_gap) + ";" + lb.str();
  return o;
}

Outcome deterministic_lower_bound() {
  Outcome o;
  std::ostringstream os;
  for (std::int64_t sigma : {0, 4}) {
    for (auto protocol : {Protocol::oed, Protocol::greedy}) {
      LowerBoundAdversary adv(64, 1, sigma);
      const auto r = run(make_path(64), adv, decision_rule(protocol), adv.rounds_needed());
      const auto target = adv.target();
      o.require(target.has_value(), "no final target");
      if (!target) continue;
      const auto final_load = r.trace.load(adv.final_round(), *target);
      const Rational floor = Rational(6) * Rational(1, 2) + Rational(sigma);
      o.require(Rational(final_load) >= floor, std::string(to_string(protocol)) + " sigma=" + std::to_string(sigma) +
                                                   ": final load " + std::to_string(final_load) + " < " + str(floor));
      o.require(adv.geometry().final_floor() == floor, "geometry floor disagrees with 6(B - 1/2) + sigma");
      const auto v = check_local(r.trace.realized_pattern(), BoundParams::uniform(64, 1, sigma, 1));
      o.require(v.ok, "realized lower-bound pattern not locally (1, sigma, 1)-bounded");
      o.require(adv.phase_claims_hold(), "phase-end claim failed");
      os << " " << to_string(protocol) << "/s=" << sigma << ":" << final_load;
    }
  }
  if (o.pass) o.detail = "final loads" + os.str() + " (floor 3+sigma), patterns bounded, phase claims hold";
  return o;
}

Outcome randomized_lower_bound() {
  Outcome o;
  const std::int64_t epochs = 2000;
  ObliviousRandomAdversary adv(16, 1, 0, kSeed, epochs);
  const auto r = run(make_path(16), adv, oed_decision, adv.rounds_needed());
  const auto records = classify_epochs(r.trace, adv);
  std::int64_t good = 0;
  for (const auto& e : records) {
    if (!e.good) continue;
    ++good;
    o.require(e.final_load >= 2, "good epoch " + std::to_string(e.epoch) + " ends at load " + std::to_string(e.final_load));
  }
  o.require(good * 32 >= epochs, "good-epoch frequency " + std::to_string(good) + "/" + std::to_string(epochs));
  const auto v = check_local(r.trace.realized_pattern(), BoundParams::uniform(16, 1, 0, 1));
  o.require(v.ok, "realized pattern not locally (1, 0, 1)-bounded");
  std::ostringstream os;
  os << good << "/" << epochs << " good epochs (" << static_cast<double>(good) / static_cast<double>(epochs)
     << ", floor 1/32), good epochs end at load >= 2, realized pattern (1,0,1)-bounded";
  o.detail = o.pass ? os.str() : o.detail + " | " + os.str();
  return o;
}

Outcome heterogeneous_infeasibility() {
  Outcome o;
  // Three 2/3 packets into buffer 1 at rounds 1, 3, ..., 59; C = 1, greedy.
  // Only one 2/3 packet fits through the edge per round, so the buffer sends
  // exactly one packet in every round from 1 on (it is never empty again).
  // At round 60, before forwarding: 30 * 3 = 90 packets injected, 59 sent
  // (rounds 1..59), 31 left, weight 31 * 2/3 = 62/3 >= 9.
  std::vector<PacketSpec> items;
  for (std::int64_t r = 1; r <= 59; r += 2) {
    for (int k = 0; k < 3; ++k) items.push_back({r, Route{1}, Rational(2, 3)});
  }
  const InjectionPattern pattern(1, 60, items);
  const auto res = run(make_path(1, 1), pattern, greedy_decision, 61);
  const auto backlog = res.trace.backlog_weight(60);
  o.require(backlog >= 9, "backlog " + str(backlog) + " < 9");
  o.require(backlog == Rational(62, 3), "backlog " + str(backlog) + " differs from the derived 62/3");
  o.require(check_rho_sigma(pattern, 1, 1, Measure::weight).ok, "pattern is not (1, 1)-bounded in weight");
  if (o.pass) o.detail = "backlog weight at round 60 = " + str(backlog) + " (derived 62/3, floor 9), rate 1 <= C";
  return o;
}

int cli_call(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "aqt_lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism_round_trip() {
  Outcome o;
  const auto root = fs::temp_directory_path() / "aqtlab_acceptance";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> scenarios = {
      {"--adversary", "rand:16,1,0", "--seed", "77", "--epochs", "20"},
      {"--adversary", "rand:16,2,3", "--seed", "5", "--epochs", "10", "--protocol", "greedy"},
      {"--adversary", "lb:64,1,4"},
      {"--adversary", "lb:16,2,0", "--protocol", "greedy"},
      {"--adversary", "a0:16"},
      {"--adversary", "a1:16", "--protocol", "greedy"},
      {"--adversary", "wave:16"},
      {"--adversary", "empty:8"},
  };
  int identical = 0, rechecked = 0;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    std::string first_text;
    const auto a = root / ("a" + std::to_string(k));
    const auto b = root / ("b" + std::to_string(k));
    auto args = scenarios[k];
    args.insert(args.begin(), "simulate");
    auto with_out = [&](const fs::path& dir) {
      auto v = args;
      v.push_back("--out");
      v.push_back(dir.string());
      return v;
    };
    const int ca = cli_call(with_out(a), &first_text);
    const int cb = cli_call(with_out(b));
    o.require(ca == 0 && cb == 0, "simulate " + scenarios[k][1] + " exited " + std::to_string(ca) + ": " + first_text);
    if (ca != 0 || cb != 0) continue;
    const bool same = slurp(a / "trace.csv") == slurp(b / "trace.csv") && !slurp(a / "trace.csv").empty();
    o.require(same, "trace CSVs differ for " + scenarios[k][1]);
    identical += same;
    std::string check_text;
    const int cc = cli_call({"check", "--pattern", (a / "pattern.csv").string(), "--params", (a / "declared.json").string()},
                            &check_text);
    o.require(cc == 0, "pattern of " + scenarios[k][1] + " fails its declared bound: " + check_text);
    rechecked += cc == 0;
  }
  fs::remove_all(root);
  std::ostringstream os;
  os << identical << "/" << scenarios.size() << " byte-identical trace pairs, " << rechecked << "/"
     << scenarios.size() << " emitted patterns re-verify under check";
  o.detail = o.pass ? os.str() : o.detail + " | " + os.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "examples ledger", 1, examples_ledger},
      {2, "discretization", 1, discretization},
      {3, "checker oracle equivalence", 60, checker_oracle},
      {4, "bundling propositions", 60, bundling},
      {5, "OED plateau invariants", 120, plateau_invariants},
      {6, "OED upper bound", 30, oed_upper_bound},
      {7, "deterministic lower bound", 10, deterministic_lower_bound},
      {8, "randomized lower bound", 120, randomized_lower_bound},
      {9, "heterogeneous infeasibility", 1, heterogeneous_infeasibility},
      {10, "determinism and round trip", 10, determinism_round_trip},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && secs > c.budget_seconds) {
      o.pass = false;
      o.detail = "over the time budget; " + o.detail;
    }
    failed += !o.pass;
    std::printf("%s [%2d] %-28s %7.2fs (< %gs)  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
