#include "aqtlab/pipelines.hpp"

#include <functional>
#include <string>

namespace aqtlab {

namespace {

// Cumulative original weight injected at each origin through a round.
using Cumulative = std::function<BufferMap<Rational>(std::int64_t round)>;

Cumulative pattern_cumulative(const InjectionPattern& pattern) {
  auto items = pattern.items();
  return [items, n = pattern.buffers()](std::int64_t round) {
    BufferMap<Rational> sum(n, Rational{0});
    for (const auto& p : items) {
      if (p.round > round) break;
      sum[p.route.origin] += p.size;
    }
    return sum;
  };
}

// Runs OED on the reduced pattern. `scale` converts a reduced packet's size to
// original units; the reserve of buffer i is whatever it received originally
// but has not yet emitted as reduced packets.
PipelineResult drive(InjectionPattern reduced, BoundParams reduced_params, Rational scale,
                     ForwardingLimits limits, int capacity, std::int64_t rounds,
                     const Cumulative& original, Rational reserve_allowance) {
  const int n = reduced.buffers();
  const auto topology = make_path(n, capacity);
  Simulator sim(topology, &oed_decision, limits);
  PatternAdversary adversary(reduced);
  Trace trace(n);

  BufferMap<Rational> emitted(n, Rational{0});
  Rational max_occupancy{0};
  std::int64_t max_slots = 0;
  for (std::int64_t r = 0; r < rounds; ++r) {
    const auto injections = adversary.injections(r, sim.state().loads());
    BufferMap<Rational> stacked(n, Rational{0});
    for (int i = 1; i <= n; ++i) stacked[i] = sim.state().weight(i) * scale;
    for (const auto& p : injections) {
      stacked[p.route.origin] += p.size * scale;
      emitted[p.route.origin] += p.size * scale;
    }
    const auto cumulative = original(r);
    for (int i = 1; i <= n; ++i) {
      const auto reserve = cumulative[i] - emitted[i];
      if (reserve < 0) throw std::logic_error("reduced pattern emitted more than was injected");
      max_occupancy = std::max(max_occupancy, stacked[i] + reserve);
    }
    const auto rec = sim.advance(injections);
    for (int i = 1; i <= n; ++i) max_slots = std::max(max_slots, rec.loads[i]);
    trace.record(rec);
  }

  PipelineResult out{std::move(reduced), reduced_params, RunResult{std::move(trace), sim.state(), {}, 0}};
  out.max_slots = max_slots;
  out.max_occupancy = max_occupancy;
  out.slot_bound = oed_proof_bound(n, reduced_params.max_beta(), reduced_params.sigma);
  out.occupancy_bound = Rational(capacity) * out.slot_bound + reserve_allowance;
  return out;
}

}  // namespace

PipelineResult run_general_capacity(const InjectionPattern& pattern, const BoundParams& params,
                                    int capacity, std::int64_t rounds) {
  params.validate(pattern.buffers());
  if (params.rho > capacity) throw ValidationError("rate exceeds the edge capacity");
  auto jumbos = c_reduce_pattern(pattern, capacity);
  return drive(std::move(jumbos), uniform_bundle_params(params, capacity), Rational{capacity},
               ForwardingLimits{Rational{1}, std::nullopt}, 1, rounds, pattern_cumulative(pattern),
               Rational{capacity});
}

PipelineResult run_continuous(const FlowFamily& family, int capacity, std::int64_t rounds) {
  if (family.rate > capacity) throw ValidationError("rate exceeds the edge capacity");
  if (rounds < 1) throw ValidationError("need at least one round");
  auto reduced = c_reduce_flows(family, capacity);
  auto params = discretization_params(reduced);
  auto jumbos = discretize(reduced, rounds - 1);
  Cumulative fluid = [&family](std::int64_t round) {
    BufferMap<Rational> sum(family.buffers, Rational{0});
    for (const auto& f : family.flows) sum[f.route.origin] += f.curve.at(Rational{round});
    return sum;
  };
  // Each flow keeps less than one jumbo in reserve.
  Rational allowance{0};
  BufferMap<int> per_origin(family.buffers, 0);
  for (const auto& f : family.flows) ++per_origin[f.route.origin];
  for (int c : per_origin) allowance = std::max(allowance, Rational(c * capacity));
  return drive(std::move(jumbos), std::move(params), Rational{capacity},
               ForwardingLimits{Rational{1}, std::nullopt}, 1, rounds, fluid, allowance);
}

BoundParams hetero_bundle_params(const BoundParams& params, int capacity) {
  if (capacity < 1) throw ValidationError("capacity must be positive");
  const Rational k(2, capacity);
  BoundParams out{params.rho * k, params.sigma * k, params.beta};
  for (int f = 1; f <= out.beta.buffers(); ++f) out.beta[f] = 1 + params.beta[f] * k;
  return out;
}

PipelineResult run_heterogeneous(const InjectionPattern& pattern, const BoundParams& params,
                                 int capacity, std::int64_t rounds) {
  params.validate(pattern.buffers());
  if (params.rho * 2 > capacity) throw ValidationError("heterogeneous bundling needs rho <= C/2");
  auto bundled = hetero_bundle(pattern, capacity);
  return drive(std::move(bundled.bundles), hetero_bundle_params(params, capacity), Rational{1},
               ForwardingLimits{Rational{capacity}, 1}, capacity, rounds, pattern_cumulative(pattern),
               Rational(capacity, 2));
}

}  // namespace aqtlab
