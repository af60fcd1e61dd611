#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aqtlab/injection.hpp"

namespace aqtlab {

/// Per-buffer loads L(1..n) plus the sentinel L(n+1) = 0.
class LoadVector {
 public:
  LoadVector() = default;
  explicit LoadVector(int buffers);
  LoadVector(std::initializer_list<std::int64_t> loads);
  explicit LoadVector(std::span<const std::int64_t> loads);

  int buffers() const noexcept { return static_cast<int>(values_.size()) - 1; }

  /// 1 <= i <= n + 1; index n + 1 reads the sentinel.
  std::int64_t operator[](int i) const { return values_.at(static_cast<std::size_t>(i - 1)); }
  void set(int i, std::int64_t load);

  std::span<const std::int64_t> values() const noexcept {
    return std::span<const std::int64_t>(values_).first(values_.size() - 1);
  }
  std::int64_t max() const;
  std::int64_t total() const;

  friend bool operator==(const LoadVector&, const LoadVector&) = default;

 private:
  std::vector<std::int64_t> values_{0};
};

using DecisionRule = bool (*)(const LoadVector& loads, int buffer);

/// Forward iff L(i) > L(i+1), or L(i) == L(i+1) and L(i) is odd.
bool oed_decision(const LoadVector& loads, int buffer);
/// Forward iff L(i) > 0.
bool greedy_decision(const LoadVector& loads, int buffer);

enum class Protocol { oed, greedy };

DecisionRule decision_rule(Protocol p);
std::string_view to_string(Protocol p);
/// "oed" or "greedy"; throws ValidationError otherwise.
Protocol parse_protocol(std::string_view name);

struct Plateau {
  int first = 1;
  int last = 1;
  std::int64_t height = 0;

  int length() const noexcept { return last - first + 1; }
  bool contains(int i) const noexcept { return i >= first && i <= last; }

  friend bool operator==(const Plateau&, const Plateau&) = default;
};

/// Maximal runs of buffers with L(i) >= h, left to right.
std::vector<Plateau> plateaus(const LoadVector& loads, std::int64_t height);

/// L_h(I) = sum over I of (L(i) - h). Throws ValidationError if I is not a plateau of `loads`.
std::int64_t load_above(const LoadVector& loads, const Plateau& plateau);

/// (B'+2) m + B' + 2 sigma + 3, with B' = B rounded up to an even integer and
/// m the least integer with ((B'+2)/(B'+1))^m >= n.
Rational oed_proof_bound(int buffers, Rational burst, Rational sigma);

struct PacketRecord {
  std::uint64_t id = 0;
  std::int64_t injection_round = 0;
  int injection_height = 0;
  int origin = 1;
  Rational size{1};
  int lowest_height = 0;  // smallest height held so far
};

/// How much a buffer may send per round. Buffers pop their top packets while
/// the forwarded weight stays within `capacity`; `packet_limit` optionally caps
/// the number of packets (1 turns bundles into unit slots).
struct ForwardingLimits {
  Rational capacity{1};
  std::optional<int> packet_limit;
};

struct PacketEvent {
  enum class Kind { injected, forwarded, delivered };
  Kind kind = Kind::injected;
  std::int64_t round = 0;
  std::uint64_t packet = 0;
  int buffer = 1;  // where the packet sits (injected), or the buffer it left
  int height = 0;  // height after the event; 0 for delivered
};

std::string_view to_string(PacketEvent::Kind kind);

class SimState {
 public:
  explicit SimState(PathTopology topology);

  const PathTopology& topology() const noexcept { return topology_; }
  std::int64_t round() const noexcept { return round_; }

  /// Bottom to top.
  std::span<const PacketRecord> stack(int buffer) const;
  std::int64_t load(int buffer) const;  // packets; 0 at n + 1
  Rational weight(int buffer) const;
  LoadVector loads() const;

  std::uint64_t injected() const noexcept { return next_id_; }
  std::uint64_t delivered() const noexcept { return delivered_; }
  Rational delivered_weight() const noexcept { return delivered_weight_; }
  std::uint64_t in_network() const noexcept { return next_id_ - delivered_; }
  Rational in_network_weight() const noexcept { return injected_weight_ - delivered_weight_; }

 private:
  friend class Simulator;

  PathTopology topology_;
  std::int64_t round_ = 0;
  std::vector<std::vector<PacketRecord>> stacks_;  // index 0 unused
  std::uint64_t next_id_ = 0;
  std::uint64_t delivered_ = 0;
  Rational injected_weight_{0};
  Rational delivered_weight_{0};
};

class InvariantMonitor;

/// What one round did.
struct StepRecord {
  std::int64_t round = 0;
  LoadVector before_injection;
  LoadVector loads;  // after injection, before forwarding: L^t
  LoadVector after;  // after forwarding
  std::vector<char> forwarded;  // index i-1: buffer i forwarded at least one packet
  std::vector<PacketSpec> injected;
  Rational backlog_weight{0};  // in-network weight at L^t
  std::vector<PacketEvent> events;
};

class Simulator {
 public:
  Simulator(PathTopology topology, DecisionRule rule, ForwardingLimits limits);
  /// Limits default to the topology's capacity with no packet cap.
  Simulator(PathTopology topology, DecisionRule rule);
  /// Continues from an existing state.
  Simulator(SimState state, DecisionRule rule, ForwardingLimits limits);

  const SimState& state() const noexcept { return state_; }

  /// Called between injection and forwarding; not owned, may be null.
  void attach(InvariantMonitor* monitor) noexcept { monitor_ = monitor; }

  /// One round: push `injections` (all for the current round) on top of their
  /// origin stacks, freeze the loads, decide every buffer, then move the top
  /// packets. Throws ValidationError for an injection of another round or a
  /// packet heavier than the capacity.
  StepRecord advance(std::span<const PacketSpec> injections);

 private:
  SimState state_;
  DecisionRule rule_;
  ForwardingLimits limits_;
  InvariantMonitor* monitor_ = nullptr;
};

/// Functional form of Simulator::advance.
SimState step(const SimState& state, std::span<const PacketSpec> injections, DecisionRule rule,
              std::optional<ForwardingLimits> limits = std::nullopt);

/// Source of injections for run(). `loads` is the configuration at the start
/// of `round`, before anything is injected.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual int buffers() const = 0;
  virtual std::vector<PacketSpec> injections(std::int64_t round, const LoadVector& loads) = 0;
  /// Packets the adversary will still inject after `round`, when it knows.
  virtual std::optional<std::uint64_t> pending_after(std::int64_t round) const;
};

/// Replays a fixed pattern.
class PatternAdversary final : public Adversary {
 public:
  explicit PatternAdversary(InjectionPattern pattern);

  int buffers() const override { return pattern_.buffers(); }
  std::vector<PacketSpec> injections(std::int64_t round, const LoadVector& loads) override;
  std::optional<std::uint64_t> pending_after(std::int64_t round) const override;

  const InjectionPattern& pattern() const noexcept { return pattern_; }

 private:
  InjectionPattern pattern_;
};

struct InvariantViolation {
  std::string check;
  std::int64_t round = 0;
  std::string detail;
};

/// Switchable checks of the OED plateau invariants and of packet conservation.
struct InvariantConfig {
  bool persistence = true;
  bool packet_movement = true;
  bool even_plateau = true;
  bool conservation = true;
  /// L_h(I) <= |I| + sigma + sum_{i in I} beta(i) for every even plateau.
  std::optional<BoundParams> local_bound;
  /// L_h(I) <= |I| + sigma, for adversaries known to be (rho, sigma)-bounded.
  std::optional<Rational> global_sigma;
  /// Also examine plateaus of height 0 (the whole path).
  bool include_zero_height = false;
  std::size_t max_reported = 32;
};

class InvariantMonitor {
 public:
  explicit InvariantMonitor(InvariantConfig config);

  /// Plateau corollaries on the configuration L^t (after injection).
  void before_forwarding(const SimState& state, const LoadVector& loads);
  /// Persistence, packet movement and conservation once the round is done.
  void after_forwarding(const SimState& state, const StepRecord& step,
                        std::optional<std::uint64_t> pending_after);

  std::span<const InvariantViolation> violations() const noexcept { return violations_; }
  std::uint64_t violation_count() const noexcept { return count_; }
  bool ok() const noexcept { return count_ == 0; }

 private:
  void report(std::string check, std::int64_t round, std::string detail);
  std::int64_t lowest_height() const noexcept { return config_.include_zero_height ? 0 : 2; }

  InvariantConfig config_;
  std::vector<InvariantViolation> violations_;
  std::uint64_t count_ = 0;
  std::optional<std::uint64_t> total_;
};

struct BufferPeak {
  std::int64_t max_load = 0;
  std::int64_t argmax_round = 0;
};

/// Everything a run recorded. Loads are the post-injection, pre-forwarding
/// configuration of each round.
class Trace {
 public:
  Trace(int buffers, std::int64_t first_round = 0);

  int buffers() const noexcept { return buffers_; }
  std::int64_t rounds() const noexcept { return static_cast<std::int64_t>(backlog_.size()); }
  std::int64_t first_round() const noexcept { return first_round_; }

  std::int64_t load(std::int64_t round, int buffer) const;
  LoadVector loads(std::int64_t round) const;
  bool forwarded(std::int64_t round, int buffer) const;
  Rational backlog_weight(std::int64_t round) const;  // in-network weight, pre-forwarding

  std::span<const PacketSpec> injections() const noexcept { return injections_; }
  /// The injections that actually happened, as a pattern over the run's rounds.
  InjectionPattern realized_pattern() const;

  std::span<const PacketEvent> events() const noexcept { return events_; }
  bool has_events() const noexcept { return record_events_; }

  const BufferMap<BufferPeak>& peaks() const noexcept { return peaks_; }
  std::int64_t max_load() const;

  void record(const StepRecord& step);
  void enable_events() { record_events_ = true; }

 private:
  int buffers_;
  std::int64_t first_round_;
  std::vector<std::int64_t> loads_;  // rounds x buffers
  std::vector<char> forwarded_;
  std::vector<Rational> backlog_;
  std::vector<PacketSpec> injections_;
  std::vector<PacketEvent> events_;
  BufferMap<BufferPeak> peaks_;
  bool record_events_ = false;
};

/// Loads after applying `events` in order to an empty path.
LoadVector replay(std::span<const PacketEvent> events, int buffers);

struct RunOptions {
  std::optional<ForwardingLimits> limits;  // topology capacity when unset
  bool record_events = false;
  std::optional<InvariantConfig> invariants;
};

struct RunResult {
  Trace trace;
  SimState final_state;
  std::vector<InvariantViolation> violations;
  std::uint64_t violation_count = 0;
};

/// Simulates rounds 0 .. rounds-1 on `topology`.
RunResult run(const PathTopology& topology, Adversary& adversary, DecisionRule rule,
              std::int64_t rounds, const RunOptions& options = {});
RunResult run(const PathTopology& topology, const InjectionPattern& pattern, DecisionRule rule,
              std::int64_t rounds, const RunOptions& options = {});

}  // namespace aqtlab
