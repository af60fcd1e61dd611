#include "aqtlab/engine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace aqtlab {

LoadVector::LoadVector(int buffers) : values_(static_cast<std::size_t>(std::max(buffers, 0)) + 1, 0) {}

LoadVector::LoadVector(std::initializer_list<std::int64_t> loads) : values_(loads) {
  values_.push_back(0);
}

LoadVector::LoadVector(std::span<const std::int64_t> loads) : values_(loads.begin(), loads.end()) {
  values_.push_back(0);
}

void LoadVector::set(int i, std::int64_t load) {
  if (i < 1 || i > buffers()) throw ValidationError("load index " + std::to_string(i) + " out of range");
  if (load < 0) throw ValidationError("loads must be non-negative");
  values_[static_cast<std::size_t>(i - 1)] = load;
}

std::int64_t LoadVector::max() const {
  const auto v = values();
  return v.empty() ? 0 : *std::max_element(v.begin(), v.end());
}

std::int64_t LoadVector::total() const {
  const auto v = values();
  return std::accumulate(v.begin(), v.end(), std::int64_t{0});
}

bool oed_decision(const LoadVector& loads, int buffer) {
  const auto here = loads[buffer];
  const auto next = loads[buffer + 1];
  return here > next || (here == next && here % 2 == 1);
}

bool greedy_decision(const LoadVector& loads, int buffer) { return loads[buffer] > 0; }

DecisionRule decision_rule(Protocol p) {
  return p == Protocol::oed ? &oed_decision : &greedy_decision;
}

std::string_view to_string(Protocol p) { return p == Protocol::oed ? "oed" : "greedy"; }

Protocol parse_protocol(std::string_view name) {
  if (name == "oed") return Protocol::oed;
  if (name == "greedy") return Protocol::greedy;
  throw ValidationError("unknown protocol '" + std::string(name) + "' (expected oed or greedy)");
}

std::vector<Plateau> plateaus(const LoadVector& loads, std::int64_t height) {
  if (height < 0) throw ValidationError("plateau height must be non-negative");
  std::vector<Plateau> out;
  const int n = loads.buffers();
  for (int i = 1; i <= n; ++i) {
    if (loads[i] < height) continue;
    int j = i;
    while (j < n && loads[j + 1] >= height) ++j;
    out.push_back(Plateau{i, j, height});
    i = j;
  }
  return out;
}

std::int64_t load_above(const LoadVector& loads, const Plateau& plateau) {
  const int n = loads.buffers();
  const auto h = plateau.height;
  bool valid = h >= 0 && plateau.first >= 1 && plateau.last <= n && plateau.first <= plateau.last;
  if (valid) {
    for (int i = plateau.first; i <= plateau.last; ++i) valid = valid && loads[i] >= h;
    valid = valid && (plateau.first == 1 || loads[plateau.first - 1] < h);
    valid = valid && (plateau.last == n || loads[plateau.last + 1] < h);
  }
  if (!valid) {
    throw ValidationError("[" + std::to_string(plateau.first) + ", " + std::to_string(plateau.last) +
                          "] is not a plateau of height " + std::to_string(h));
  }
  std::int64_t sum = 0;
  for (int i = plateau.first; i <= plateau.last; ++i) sum += loads[i] - h;
  return sum;
}

Rational oed_proof_bound(int buffers, Rational burst, Rational sigma) {
  if (buffers < 1) throw ValidationError("need at least one buffer");
  if (burst < 0 || sigma < 0) throw ValidationError("burst and sigma must be non-negative");
  auto b = ceil(burst);
  if (b % 2 != 0) ++b;
  using boost::multiprecision::cpp_int;
  // Least m with (b+2)^m >= n (b+1)^m.
  std::int64_t m = 0;
  cpp_int up = 1, down = buffers;
  while (up < down) {
    up *= b + 2;
    down *= b + 1;
    ++m;
  }
  return Rational((b + 2) * m + b + 3) + 2 * sigma;
}

std::string_view to_string(PacketEvent::Kind kind) {
  switch (kind) {
    case PacketEvent::Kind::injected:
      return "injected";
    case PacketEvent::Kind::forwarded:
      return "forwarded";
    case PacketEvent::Kind::delivered:
      return "delivered";
  }
  return "?";
}

SimState::SimState(PathTopology topology)
    : topology_(topology), stacks_(static_cast<std::size_t>(topology.buffers()) + 1) {}

std::span<const PacketRecord> SimState::stack(int buffer) const {
  if (!topology_.has_buffer(buffer)) throw ValidationError("no buffer " + std::to_string(buffer));
  return stacks_[static_cast<std::size_t>(buffer)];
}

std::int64_t SimState::load(int buffer) const {
  if (buffer == topology_.destination()) return 0;
  return static_cast<std::int64_t>(stack(buffer).size());
}

Rational SimState::weight(int buffer) const {
  Rational w{0};
  for (const auto& p : stack(buffer)) w += p.size;
  return w;
}

LoadVector SimState::loads() const {
  LoadVector out(topology_.buffers());
  for (int i = 1; i <= topology_.buffers(); ++i) {
    out.set(i, static_cast<std::int64_t>(stacks_[static_cast<std::size_t>(i)].size()));
  }
  return out;
}

Simulator::Simulator(PathTopology topology, DecisionRule rule, ForwardingLimits limits)
    : Simulator(SimState(topology), rule, limits) {}

Simulator::Simulator(SimState state, DecisionRule rule, ForwardingLimits limits)
    : state_(std::move(state)), rule_(rule), limits_(limits) {
  if (rule_ == nullptr) throw ValidationError("missing decision rule");
  if (limits_.capacity <= 0) throw ValidationError("forwarding capacity must be positive");
  if (limits_.packet_limit && *limits_.packet_limit < 1) {
    throw ValidationError("packet limit must be positive");
  }
}

Simulator::Simulator(PathTopology topology, DecisionRule rule)
    : Simulator(topology, rule, ForwardingLimits{Rational{topology.capacity()}, std::nullopt}) {}

StepRecord Simulator::advance(std::span<const PacketSpec> injections) {
  auto& s = state_;
  const int n = s.topology_.buffers();
  StepRecord rec;
  rec.round = s.round_;
  rec.before_injection = s.loads();

  for (const auto& p : injections) {
    if (p.round != s.round_) {
      throw ValidationError("injection for round " + std::to_string(p.round) + " during round " +
                            std::to_string(s.round_));
    }
    if (!s.topology_.has_buffer(p.route.origin)) {
      throw ValidationError("injection origin " + std::to_string(p.route.origin) + " is not a buffer");
    }
    if (p.size <= 0 || p.size > limits_.capacity) {
      throw ValidationError("packet size " + to_string(p.size) + " does not fit capacity " +
                            to_string(limits_.capacity));
    }
    auto& stack = s.stacks_[static_cast<std::size_t>(p.route.origin)];
    const int height = static_cast<int>(stack.size()) + 1;
    stack.push_back(PacketRecord{s.next_id_, s.round_, height, p.route.origin, p.size, height});
    rec.events.push_back(
        PacketEvent{PacketEvent::Kind::injected, s.round_, s.next_id_, p.route.origin, height});
    ++s.next_id_;
    s.injected_weight_ += p.size;
    rec.injected.push_back(p);
  }
  rec.loads = s.loads();
  rec.backlog_weight = s.in_network_weight();
  if (monitor_ != nullptr) monitor_->before_forwarding(s, rec.loads);

  // Decide everything from the frozen snapshot, then pop, then push.
  rec.forwarded.assign(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<PacketRecord>> moving(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) {
    if (rec.loads[i] == 0 || !rule_(rec.loads, i)) continue;
    auto& stack = s.stacks_[static_cast<std::size_t>(i)];
    auto& out = moving[static_cast<std::size_t>(i)];
    Rational sent{0};
    while (!stack.empty() && sent + stack.back().size <= limits_.capacity &&
           (!limits_.packet_limit || static_cast<int>(out.size()) < *limits_.packet_limit)) {
      sent += stack.back().size;
      out.push_back(std::move(stack.back()));
      stack.pop_back();
    }
    rec.forwarded[static_cast<std::size_t>(i - 1)] = out.empty() ? 0 : 1;
  }
  for (int i = 1; i <= n; ++i) {
    auto& out = moving[static_cast<std::size_t>(i)];
    // Popped top-first; land them in their original relative order.
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (i == n) {
        ++s.delivered_;
        s.delivered_weight_ += it->size;
        rec.events.push_back(PacketEvent{PacketEvent::Kind::delivered, s.round_, it->id, i, 0});
        continue;
      }
      auto& next = s.stacks_[static_cast<std::size_t>(i + 1)];
      const int height = static_cast<int>(next.size()) + 1;
      it->lowest_height = std::min(it->lowest_height, height);
      rec.events.push_back(PacketEvent{PacketEvent::Kind::forwarded, s.round_, it->id, i, height});
      next.push_back(std::move(*it));
    }
  }
  rec.after = s.loads();
  ++s.round_;
  return rec;
}

namespace {

ForwardingLimits default_limits(const PathTopology& topology) {
  return ForwardingLimits{Rational{topology.capacity()}, std::nullopt};
}

}  // namespace

SimState step(const SimState& state, std::span<const PacketSpec> injections, DecisionRule rule,
              std::optional<ForwardingLimits> limits) {
  Simulator sim(state, rule, limits.value_or(default_limits(state.topology())));
  sim.advance(injections);
  return sim.state();
}

std::optional<std::uint64_t> Adversary::pending_after(std::int64_t) const { return std::nullopt; }

PatternAdversary::PatternAdversary(InjectionPattern pattern) : pattern_(std::move(pattern)) {}

std::vector<PacketSpec> PatternAdversary::injections(std::int64_t round, const LoadVector&) {
  const auto items = pattern_.at_round(round);
  return {items.begin(), items.end()};
}

std::optional<std::uint64_t> PatternAdversary::pending_after(std::int64_t round) const {
  const auto items = pattern_.items();
  auto it = std::upper_bound(items.begin(), items.end(), round,
                             [](std::int64_t r, const PacketSpec& p) { return r < p.round; });
  return static_cast<std::uint64_t>(items.end() - it);
}

InvariantMonitor::InvariantMonitor(InvariantConfig config) : config_(std::move(config)) {}

void InvariantMonitor::report(std::string check, std::int64_t round, std::string detail) {
  ++count_;
  if (violations_.size() < config_.max_reported) {
    violations_.push_back(InvariantViolation{std::move(check), round, std::move(detail)});
  }
}

void InvariantMonitor::before_forwarding(const SimState& state, const LoadVector& loads) {
  const bool bounds = config_.local_bound.has_value() || config_.global_sigma.has_value();
  if (!config_.even_plateau && !bounds) return;
  if (config_.local_bound) config_.local_bound->validate(loads.buffers());
  const auto top = loads.max();
  for (auto h = lowest_height(); h <= top; h += 2) {
    for (const auto& plateau : plateaus(loads, h)) {
      if (bounds) {
        const auto above = Rational(load_above(loads, plateau));
        const Rational size(plateau.length());
        if (config_.local_bound) {
          auto limit = size + config_.local_bound->sigma;
          for (int i = plateau.first; i <= plateau.last; ++i) limit += config_.local_bound->beta[i];
          if (above > limit) {
            std::ostringstream os;
            os << "L_" << h << "[" << plateau.first << "," << plateau.last << "] = " << to_string(above)
               << " > " << to_string(limit);
            report("upper-load", state.round(), os.str());
          }
        }
        if (config_.global_sigma && above > size + *config_.global_sigma) {
          std::ostringstream os;
          os << "L_" << h << "[" << plateau.first << "," << plateau.last << "] = " << to_string(above)
             << " > " << to_string(size + *config_.global_sigma);
          report("upper-load-global", state.round(), os.str());
        }
      }
      if (!config_.even_plateau) continue;
      for (int j = plateau.first; j <= plateau.last; ++j) {
        const auto stack = state.stack(j);
        for (auto k = static_cast<std::size_t>(h); k < stack.size(); ++k) {
          const auto& p = stack[k];
          if (p.origin < plateau.first || p.injection_height <= h) {
            std::ostringstream os;
            os << "packet " << p.id << " at buffer " << j << " height " << k + 1 << " above [" << plateau.first
               << "," << plateau.last << "]@" << h << " has origin " << p.origin << ", injection height "
               << p.injection_height;
            report("even-plateau", state.round(), os.str());
          }
        }
      }
    }
  }
}

void InvariantMonitor::after_forwarding(const SimState& state, const StepRecord& step,
                                        std::optional<std::uint64_t> pending_after) {
  const int n = state.topology().buffers();
  if (config_.persistence) {
    const auto top = step.loads.max();
    for (std::int64_t h = 2; h <= top; h += 2) {
      for (const auto& plateau : plateaus(step.loads, h)) {
        for (int i = plateau.first; i < plateau.last; ++i) {
          if (step.after[i] < h) {
            std::ostringstream os;
            os << "buffer " << i << " fell to " << step.after[i] << " inside [" << plateau.first << ","
               << plateau.last << "]@" << h;
            report("persistence", step.round, os.str());
          }
        }
      }
    }
  }
  if (config_.packet_movement) {
    for (int i = 1; i <= n; ++i) {
      const auto stack = state.stack(i);
      for (std::size_t k = 0; k < stack.size(); ++k) {
        const auto& p = stack[k];
        const auto ceiling = p.lowest_height + (p.lowest_height % 2);
        if (static_cast<int>(k) + 1 > ceiling) {
          std::ostringstream os;
          os << "packet " << p.id << " rose to height " << k + 1 << " after reaching " << p.lowest_height;
          report("packet-movement", step.round, os.str());
        }
      }
    }
  }
  if (config_.conservation) {
    std::uint64_t stacked = 0;
    for (int i = 1; i <= n; ++i) stacked += state.stack(i).size();
    if (stacked != state.in_network()) {
      report("conservation", step.round,
             std::to_string(stacked) + " packets stacked, " + std::to_string(state.in_network()) + " expected");
    }
    if (pending_after) {
      const auto total = state.injected() + *pending_after;
      if (!total_) total_ = total;
      if (total != *total_) {
        report("conservation", step.round,
               "delivered + in-network + pending = " + std::to_string(total) + ", pattern has " +
                   std::to_string(*total_));
      }
    }
  }
}

Trace::Trace(int buffers, std::int64_t first_round)
    : buffers_(buffers), first_round_(first_round), peaks_(buffers, BufferPeak{}) {}

std::int64_t Trace::load(std::int64_t round, int buffer) const {
  if (round < first_round_ || round - first_round_ >= rounds() || buffer < 1 || buffer > buffers_) {
    throw ValidationError("trace has no load for round " + std::to_string(round) + ", buffer " +
                          std::to_string(buffer));
  }
  return loads_[static_cast<std::size_t>((round - first_round_) * buffers_ + buffer - 1)];
}

LoadVector Trace::loads(std::int64_t round) const {
  LoadVector out(buffers_);
  for (int i = 1; i <= buffers_; ++i) out.set(i, load(round, i));
  return out;
}

bool Trace::forwarded(std::int64_t round, int buffer) const {
  (void)load(round, buffer);
  return forwarded_[static_cast<std::size_t>((round - first_round_) * buffers_ + buffer - 1)] != 0;
}

Rational Trace::backlog_weight(std::int64_t round) const {
  if (round < first_round_ || round - first_round_ >= rounds()) {
    throw ValidationError("trace has no round " + std::to_string(round));
  }
  return backlog_[static_cast<std::size_t>(round - first_round_)];
}

InjectionPattern Trace::realized_pattern() const {
  const auto horizon = std::max<std::int64_t>(first_round_ + rounds() - 1, 0);
  return InjectionPattern(buffers_, horizon, injections_);
}

std::int64_t Trace::max_load() const {
  std::int64_t best = 0;
  for (const auto& p : peaks_) best = std::max(best, p.max_load);
  return best;
}

void Trace::record(const StepRecord& step) {
  if (step.round != first_round_ + rounds()) throw ValidationError("trace rounds must be consecutive");
  for (int i = 1; i <= buffers_; ++i) {
    const auto l = step.loads[i];
    loads_.push_back(l);
    forwarded_.push_back(step.forwarded[static_cast<std::size_t>(i - 1)]);
    if (l > peaks_[i].max_load) peaks_[i] = BufferPeak{l, step.round};
  }
  backlog_.push_back(step.backlog_weight);
  injections_.insert(injections_.end(), step.injected.begin(), step.injected.end());
  if (record_events_) events_.insert(events_.end(), step.events.begin(), step.events.end());
}

LoadVector replay(std::span<const PacketEvent> events, int buffers) {
  std::vector<std::int64_t> loads(static_cast<std::size_t>(buffers) + 2, 0);
  auto at = [&](int i) -> std::int64_t& {
    if (i < 1 || i > buffers) throw ValidationError("event refers to buffer " + std::to_string(i));
    return loads[static_cast<std::size_t>(i)];
  };
  for (const auto& e : events) {
    switch (e.kind) {
      case PacketEvent::Kind::injected:
        ++at(e.buffer);
        break;
      case PacketEvent::Kind::forwarded:
        --at(e.buffer);
        ++at(e.buffer + 1);
        break;
      case PacketEvent::Kind::delivered:
        --at(e.buffer);
        break;
    }
  }
  LoadVector out(buffers);
  for (int i = 1; i <= buffers; ++i) out.set(i, loads[static_cast<std::size_t>(i)]);
  return out;
}

RunResult run(const PathTopology& topology, Adversary& adversary, DecisionRule rule,
              std::int64_t rounds, const RunOptions& options) {
  if (adversary.buffers() != topology.buffers()) {
    throw ValidationError("adversary drives " + std::to_string(adversary.buffers()) +
                          " buffers, topology has " + std::to_string(topology.buffers()));
  }
  if (rounds < 0) throw ValidationError("round count must be non-negative");
  Simulator sim(topology, rule, options.limits.value_or(ForwardingLimits{Rational{topology.capacity()}, std::nullopt}));
  std::optional<InvariantMonitor> monitor;
  if (options.invariants) {
    monitor.emplace(*options.invariants);
    sim.attach(&*monitor);
  }
  Trace trace(topology.buffers());
  if (options.record_events) trace.enable_events();
  for (std::int64_t r = 0; r < rounds; ++r) {
    const auto injections = adversary.injections(r, sim.state().loads());
    const auto rec = sim.advance(injections);
    if (monitor) monitor->after_forwarding(sim.state(), rec, adversary.pending_after(r));
    trace.record(rec);
  }
  RunResult result{std::move(trace), sim.state(), {}, 0};
  if (monitor) {
    result.violations.assign(monitor->violations().begin(), monitor->violations().end());
    result.violation_count = monitor->violation_count();
  }
  return result;
}

RunResult run(const PathTopology& topology, const InjectionPattern& pattern, DecisionRule rule,
              std::int64_t rounds, const RunOptions& options) {
  PatternAdversary adversary(pattern);
  return run(topology, adversary, rule, rounds, options);
}

}  // namespace aqtlab
