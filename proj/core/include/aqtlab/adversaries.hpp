#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aqtlab/engine.hpp"
#include "aqtlab/flows.hpp"

namespace aqtlab {

/// n packets into buffer 1 at rounds 1, n+1, 2n+1, ... <= horizon.
InjectionPattern example_A0(int buffers, std::int64_t horizon);
/// One packet into every buffer at rounds 1, n+1, 2n+1, ... <= horizon.
InjectionPattern example_A1(int buffers, std::int64_t horizon);

/// n flows, flow i starting at buffer i with a(t) = t / n and no burst; family (1, 0).
FlowFamily wave_flows(int buffers);

/// Buffer interval [first, last].
struct Span {
  int first = 1;
  int last = 1;

  int length() const noexcept { return last - first + 1; }
  friend bool operator==(const Span&, const Span&) = default;
};

/// Round arithmetic shared by the lower-bound adversaries for n = (2B)^m.
///
/// Phase k = 1..m covers |I_k| = n / (2B)^(k-1) buffers and lasts
/// tau_k = |I_k| / 2 rounds, starting at offset s_k = tau_1 + ... + tau_(k-1).
/// The final single buffer I_(m+1) receives sigma extra packets at offset
/// s_(m+1) = s_m + tau_m.
class PhaseGeometry {
 public:
  /// Throws ValidationError unless B >= 1, sigma >= 0 and n is a power of 2B with m >= 1.
  PhaseGeometry(int buffers, int burst, std::int64_t sigma);

  int buffers() const noexcept { return n_; }
  int burst() const noexcept { return burst_; }
  std::int64_t sigma() const noexcept { return sigma_; }
  int phases() const noexcept { return m_; }
  int split() const noexcept { return 2 * burst_; }

  int interval_size(int k) const;  // 1 <= k <= m + 1
  std::int64_t tau(int k) const;   // 1 <= k <= m
  std::int64_t phase_start(int k) const;  // 1 <= k <= m + 1
  std::int64_t final_offset() const { return phase_start(m_ + 1); }
  /// Rounds from the first phase through the sigma round.
  std::int64_t active_rounds() const { return final_offset() + 1; }

  /// The k-th nested interval containing buffer `target`.
  Span interval_of(int target, int k) const;

  /// Proof-level floor m (B - 1/2) + sigma on the final buffer.
  Rational final_floor() const;

 private:
  int n_;
  int burst_;
  std::int64_t sigma_;
  int m_;
};

/// m with n = (2B)^m; throws ValidationError if there is none with m >= 1.
int lower_bound_depth(int buffers, int burst);

/// The adaptive adversary A_F: injects B packets into every buffer of I_k at
/// the start of phase k, where I_k is the sub-interval of I_(k-1) (one of 2B
/// equal parts) with the largest load at that moment, ties to the left. After
/// phase m it picks the most loaded single buffer of I_m and injects sigma
/// there. Rounds before `start` and after the sigma round are idle.
class LowerBoundAdversary final : public Adversary {
 public:
  LowerBoundAdversary(int buffers, int burst, std::int64_t sigma, std::int64_t start = 0);

  int buffers() const override { return geometry_.buffers(); }
  std::vector<PacketSpec> injections(std::int64_t round, const LoadVector& loads) override;

  const PhaseGeometry& geometry() const noexcept { return geometry_; }
  std::int64_t start() const noexcept { return start_; }
  std::int64_t final_round() const { return start_ + geometry_.final_offset(); }
  std::int64_t rounds_needed() const { return final_round() + 1; }

  /// Intervals chosen so far: I_1 .. I_(m+1).
  std::span<const Span> intervals() const noexcept { return intervals_; }
  /// L(I_k) at the end of phase k, for phases already finished.
  std::span<const std::int64_t> phase_end_loads() const noexcept { return phase_end_; }
  /// The buffer that received the sigma round; nullopt before it happened.
  std::optional<int> target() const;

  /// L(I_k) >= k (B - 1/2) |I_k| for every finished phase.
  bool phase_claims_hold() const;

 private:
  PhaseGeometry geometry_;
  std::int64_t start_;
  std::vector<Span> intervals_;
  std::vector<std::int64_t> phase_end_;
};

/// The oblivious randomized adversary A_rand over a fixed number of epochs.
///
/// Each epoch draws a target i uniformly from [1, n], replays the pattern A_i
/// (the lower-bound schedule whose nested intervals all contain i), then idles
/// for B n + sigma rounds. Targets come from one mt19937_64 stream seeded with
/// `seed`, so the whole pattern is fixed before the run starts.
class ObliviousRandomAdversary final : public Adversary {
 public:
  ObliviousRandomAdversary(int buffers, int burst, std::int64_t sigma, std::uint64_t seed,
                           std::int64_t epochs);

  int buffers() const override { return geometry_.buffers(); }
  std::vector<PacketSpec> injections(std::int64_t round, const LoadVector& loads) override;
  std::optional<std::uint64_t> pending_after(std::int64_t round) const override;

  const PhaseGeometry& geometry() const noexcept { return geometry_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::int64_t epochs() const noexcept { return static_cast<std::int64_t>(targets_.size()); }
  std::int64_t epoch_length() const;
  std::int64_t epoch_start(std::int64_t epoch) const { return epoch * epoch_length(); }
  std::int64_t rounds_needed() const { return epochs() * epoch_length(); }
  std::span<const int> targets() const noexcept { return targets_; }
  const InjectionPattern& pattern() const noexcept { return replay_.pattern(); }

 private:
  PhaseGeometry geometry_;
  std::uint64_t seed_;
  std::vector<int> targets_;
  PatternAdversary replay_;
};

/// A_i for one target, with phase 1 starting at `start`.
std::vector<PacketSpec> targeted_schedule(const PhaseGeometry& geometry, int target,
                                          std::int64_t start);

struct EpochRecord {
  std::int64_t epoch = 0;
  int target = 1;
  std::vector<bool> phase_good;  // phases 2 .. m+1 of the schedule
  bool good = false;
  std::int64_t final_load = 0;   // L(target) in the sigma round, after injection
  std::int64_t peak_load = 0;    // largest load anywhere during the epoch
};

/// Good-phase accounting on a trace of `adversary`. A phase j >= 2 is good
/// when, before its injections, L(I_j) / |I_j| >= L(I_(j-1)) / |I_(j-1)|.
/// Throws ValidationError if the trace does not cover every epoch or was not
/// produced from this adversary's pattern.
std::vector<EpochRecord> classify_epochs(const Trace& trace, const ObliviousRandomAdversary& adversary);

}  // namespace aqtlab
