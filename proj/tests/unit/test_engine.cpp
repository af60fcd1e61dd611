#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "aqtlab/adversaries.hpp"
#include "aqtlab/boundedness.hpp"
#include "aqtlab/engine.hpp"
#include "support/generators.hpp"

using namespace aqtlab;

namespace {

// Count-only reference simulator: inject, decide on the frozen loads, move up
// to C packets per forwarding buffer.
std::vector<LoadVector> reference_loads(const InjectionPattern& p, DecisionRule rule, int capacity,
                                        std::int64_t rounds) {
  const int n = p.buffers();
  std::vector<std::int64_t> load(static_cast<std::size_t>(n) + 2, 0);
  std::vector<LoadVector> out;
  for (std::int64_t r = 0; r < rounds; ++r) {
    if (r <= p.horizon()) {
      for (const auto& item : p.at_round(r)) ++load[static_cast<std::size_t>(item.route.origin)];
    }
    LoadVector snap(n);
    for (int i = 1; i <= n; ++i) snap.set(i, load[static_cast<std::size_t>(i)]);
    out.push_back(snap);
    std::vector<std::int64_t> sent(static_cast<std::size_t>(n) + 2, 0);
    for (int i = 1; i <= n; ++i) {
      if (rule(snap, i)) sent[static_cast<std::size_t>(i)] = std::min<std::int64_t>(capacity, snap[i]);
    }
    for (int i = 1; i <= n; ++i) {
      load[static_cast<std::size_t>(i)] += sent[static_cast<std::size_t>(i - 1)] - sent[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

// The closed form with logarithms, away from exact powers.
std::int64_t proof_bound_by_logs(int n, int burst, int sigma) {
  const int b = burst + burst % 2;
  const auto m = static_cast<std::int64_t>(
      std::ceil(std::log(static_cast<long double>(n)) / std::log((b + 2.0L) / (b + 1.0L)) - 1e-12L));
  return (b + 2) * m + b + 2 * sigma + 3;
}

SimState state_with(const std::vector<std::int64_t>& loads) {
  const int n = static_cast<int>(loads.size());
  SimState s(make_path(n));
  std::vector<PacketSpec> items;
  for (int i = 1; i <= n; ++i) {
    for (std::int64_t k = 0; k < loads[static_cast<std::size_t>(i - 1)]; ++k) items.push_back({0, Route{i}, Rational{1}});
  }
  // A rule that never forwards puts the packets in place without moving them.
  return step(s, items, [](const LoadVector&, int) { return false; });
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("load vectors carry a zero sentinel") {
  const LoadVector l{3, 1, 4};
  CHECK(l.buffers() == 3);
  CHECK(l[1] == 3);
  CHECK(l[4] == 0);
  CHECK(l.max() == 4);
  CHECK(l.total() == 8);
  CHECK_THROWS(l[5]);
  LoadVector m(2);
  m.set(2, 7);
  CHECK(m[2] == 7);
  CHECK_THROWS(m.set(3, 1));
}

TEST_CASE("decision rules") {
  CHECK(oed_decision(LoadVector{2, 1}, 1));
  CHECK(oed_decision(LoadVector{1, 1}, 1));
  CHECK_FALSE(oed_decision(LoadVector{2, 2}, 1));
  CHECK_FALSE(oed_decision(LoadVector{1, 2}, 1));
  CHECK_FALSE(oed_decision(LoadVector{0, 0}, 1));
  CHECK(oed_decision(LoadVector{0, 1}, 2));

  CHECK(greedy_decision(LoadVector{1}, 1));
  CHECK_FALSE(greedy_decision(LoadVector{0}, 1));
  CHECK(greedy_decision(LoadVector{5, 9}, 1));

  CHECK(parse_protocol("oed") == Protocol::oed);
  CHECK(parse_protocol("greedy") == Protocol::greedy);
  CHECK(to_string(Protocol::oed) == "oed");
  CHECK(decision_rule(Protocol::greedy) == &greedy_decision);
  CHECK_THROWS_AS(parse_protocol("fifo"), ValidationError);
}

TEST_CASE("single steps") {
  auto s = step(state_with({1, 0}), {}, oed_decision);
  CHECK(s.loads() == LoadVector{0, 1});

  s = step(state_with({2, 2, 0}), {}, oed_decision);
  CHECK(s.loads() == LoadVector{2, 1, 1});

  const SimState empty(make_path(3));
  const auto same = step(empty, {}, oed_decision);
  CHECK(same.loads() == LoadVector{0, 0, 0});
  CHECK(same.round() == 1);

  const std::vector<PacketSpec> late{{5, Route{1}, Rational{1}}};
  CHECK_THROWS_AS(step(empty, late, oed_decision), ValidationError);
  const std::vector<PacketSpec> heavy{{0, Route{1}, Rational{2}}};
  CHECK_THROWS_AS(step(empty, heavy, oed_decision), ValidationError);
}

TEST_CASE("LIFO: the newest packet leaves first") {
  SimState s(make_path(2));
  s = step(s, std::vector<PacketSpec>{{0, Route{1}, Rational{1}}}, [](const LoadVector&, int) { return false; });
  Simulator sim(s, greedy_decision, ForwardingLimits{});
  const auto rec = sim.advance(std::vector<PacketSpec>{{1, Route{1}, Rational{1}}});
  REQUIRE(sim.state().stack(1).size() == 1);
  CHECK(sim.state().stack(1)[0].id == 0);
  REQUIRE(sim.state().stack(2).size() == 1);
  CHECK(sim.state().stack(2)[0].id == 1);
  CHECK(rec.before_injection == LoadVector{1, 0});
  CHECK(rec.loads == LoadVector{2, 0});
  CHECK(rec.after == LoadVector{1, 1});
}

TEST_CASE("path examples") {
  const auto a1 = run(make_path(16), example_A1(16, 63), greedy_decision, 64);
  CHECK(a1.trace.max_load() == 1);
  for (auto rule : {oed_decision, greedy_decision}) {
    const auto a0 = run(make_path(16), example_A0(16, 16), rule, 17);
    CHECK(a0.trace.load(1, 1) == 16);
  }
  const auto idle = run(make_path(8), InjectionPattern(8, 0), oed_decision, 50);
  CHECK(idle.trace.max_load() == 0);
  CHECK(idle.trace.rounds() == 50);
}

TEST_CASE("simulator matches the reference loads") {
  auto rng = testing::make_rng(51, 0);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = static_cast<int>(testing::uniform(rng, 1, 8));
    const int c = static_cast<int>(testing::uniform(rng, 1, 3));
    const auto p = testing::random_pattern(rng, n, testing::uniform(rng, 0, 15), 3, 0.3);
    const auto rule = testing::coin(rng, 0.5) ? oed_decision : greedy_decision;
    const auto rounds = p.horizon() + 10;
    const auto r = run(make_path(n, c), p, rule, rounds);
    const auto expected = reference_loads(p, rule, c, rounds);
    for (std::int64_t t = 0; t < rounds; ++t) CHECK(r.trace.loads(t) == expected[static_cast<std::size_t>(t)]);
  }
}

TEST_CASE("plateaus") {
  const LoadVector l{0, 1, 0, 3, 4, 5, 2, 2, 1, 0};
  const auto ps = plateaus(l, 2);
  REQUIRE(ps.size() == 1);
  CHECK(ps[0] == Plateau{4, 8, 2});
  CHECK(load_above(l, ps[0]) == 6);
  CHECK(plateaus(l, 0) == std::vector<Plateau>{{1, 10, 0}});
  CHECK(plateaus(LoadVector{0, 0, 0}, 1).empty());
  CHECK(plateaus(l, 1) == std::vector<Plateau>{{2, 2, 1}, {4, 9, 1}});

  CHECK(load_above(LoadVector{2, 2, 0}, Plateau{1, 2, 2}) == 0);
  CHECK(load_above(LoadVector{0, 5, 0}, Plateau{2, 2, 2}) == 3);
  CHECK_THROWS_AS(load_above(l, Plateau{4, 7, 2}), ValidationError);
  CHECK_THROWS_AS(load_above(l, Plateau{3, 8, 2}), ValidationError);
}

TEST_CASE("proof bound") {
  CHECK(oed_proof_bound(64, Rational{2}, Rational{0}) == 65);
  CHECK(oed_proof_bound(2, Rational{0}, Rational{0}) == 5);
  CHECK(oed_proof_bound(64, Rational{2}, Rational{3}) - oed_proof_bound(64, Rational{2}, Rational{0}) == 6);
  // Odd bursts round up to the next even value.
  CHECK(oed_proof_bound(64, Rational{1}, Rational{0}) == oed_proof_bound(64, Rational{2}, Rational{0}));
  CHECK(oed_proof_bound(64, Rational(1, 2), Rational{0}) == oed_proof_bound(64, Rational{2}, Rational{0}));
  for (int n : {3, 5, 10, 17, 64, 100, 1000}) {
    for (int b : {0, 1, 2, 3, 4}) CHECK(oed_proof_bound(n, Rational{b}, Rational{1}) == proof_bound_by_logs(n, b, 1));
  }
}

TEST_CASE("events replay to the final state") {
  auto rng = testing::make_rng(52, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(testing::uniform(rng, 1, 8));
    const auto p = testing::random_pattern(rng, n, testing::uniform(rng, 0, 12));
    RunOptions opts;
    opts.record_events = true;
    const auto r = run(make_path(n), p, oed_decision, p.horizon() + 5, opts);
    CHECK(replay(r.trace.events(), n) == r.final_state.loads());
  }
}

TEST_CASE("runs are deterministic") {
  const auto p = example_A0(8, 40);
  const auto a = run(make_path(8), p, oed_decision, 41);
  const auto b = run(make_path(8), p, oed_decision, 41);
  for (std::int64_t t = 0; t < 41; ++t) CHECK(a.trace.loads(t) == b.trace.loads(t));
}

TEST_CASE("realized pattern and trace accessors") {
  const auto p = example_A1(4, 12);
  const auto r = run(make_path(4), p, greedy_decision, 13);
  CHECK(r.trace.realized_pattern() == p);
  CHECK(r.trace.forwarded(1, 4));
  CHECK_FALSE(r.trace.forwarded(0, 4));
  CHECK(r.trace.backlog_weight(1) == 4);
  CHECK(r.trace.peaks()[2].max_load == 1);
  CHECK(r.trace.peaks()[2].argmax_round == 1);
  CHECK_THROWS_AS(r.trace.load(13, 1), ValidationError);
}

TEST_CASE("weighted forwarding respects the capacity") {
  // Two 2/3 packets: only one fits through a unit edge per round.
  const InjectionPattern p(1, 0, {{0, Route{1}, Rational(2, 3)}, {0, Route{1}, Rational(2, 3)}});
  const auto r = run(make_path(1), p, greedy_decision, 3);
  CHECK(r.trace.load(0, 1) == 2);
  CHECK(r.trace.load(1, 1) == 1);
  CHECK(r.trace.load(2, 1) == 0);
  CHECK(r.trace.backlog_weight(1) == Rational(2, 3));

  // Packet limit 1 on capacity 2: one slot per round even if two would fit.
  RunOptions opts;
  opts.limits = ForwardingLimits{Rational{2}, 1};
  const InjectionPattern q(1, 0, std::vector<PacketSpec>(2, PacketSpec{0, Route{1}, Rational{1}}));
  CHECK(run(make_path(1, 2), q, greedy_decision, 2, opts).trace.load(1, 1) == 1);
  CHECK(run(make_path(1, 2), q, greedy_decision, 2).trace.load(1, 1) == 0);
}

TEST_CASE("invariant monitor stays quiet under OED") {
  auto rng = testing::make_rng(53, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(testing::uniform(rng, 2, 12));
    const auto params = BoundParams::uniform(n, Rational{1}, Rational{testing::uniform(rng, 0, 3)},
                                             Rational{testing::uniform(rng, 0, 2)});
    const auto p = testing::bounded_pattern(rng, params, 10 * n);
    RunOptions opts;
    opts.invariants = InvariantConfig{};
    opts.invariants->local_bound = params;
    const auto r = run(make_path(n), p, oed_decision, 12 * n, opts);
    CHECK(r.violation_count == 0);
  }
}

TEST_CASE("invariant monitor catches greedy breaking persistence") {
  // Loads (2, 2, 0): greedy drains buffer 1 below the plateau height.
  const InjectionPattern p(3, 0, {{0, Route{1}, Rational{1}}, {0, Route{1}, Rational{1}},
                                  {0, Route{2}, Rational{1}}, {0, Route{2}, Rational{1}}});
  RunOptions opts;
  opts.invariants = InvariantConfig{};
  const auto r = run(make_path(3), p, greedy_decision, 1, opts);
  REQUIRE(r.violation_count > 0);
  CHECK(r.violations.front().check == "persistence");
  CHECK(run(make_path(3), p, oed_decision, 1, opts).violation_count == 0);
}

TEST_CASE("invariant monitor checks the upper-load bound") {
  const InjectionPattern p(2, 0, std::vector<PacketSpec>(6, PacketSpec{0, Route{2}, Rational{1}}));
  RunOptions opts;
  opts.invariants = InvariantConfig{};
  opts.invariants->global_sigma = Rational{1};
  const auto r = run(make_path(2), p, oed_decision, 1, opts);
  REQUIRE(r.violation_count > 0);
  CHECK(r.violations.front().check == "upper-load-global");
}

}
