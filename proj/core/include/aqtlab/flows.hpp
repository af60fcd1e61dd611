#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aqtlab/injection.hpp"

namespace aqtlab {

/// One corner of a piecewise-linear arrival curve. `left` is the limit from
/// the left at `time`; `value` is the (right-continuous) value there. They
/// differ exactly at jumps.
struct Breakpoint {
  Rational time{0};
  Rational left{0};
  Rational value{0};

  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Non-decreasing, right-continuous, piecewise-linear cumulative arrivals.
///
/// a(t) = 0 before the first breakpoint. Between breakpoints k and k+1 the
/// curve runs linearly from value_k to left_{k+1}; after the last breakpoint
/// it grows with `tail_slope`. With no breakpoints, a(t) = tail_slope * t for
/// t >= 0. Breakpoints may start at t = -1 so that mass injected at round 0
/// can arrive over (-1, 0] like every later round; a(-1) is always 0.
class ArrivalCurve {
 public:
  ArrivalCurve() = default;
  explicit ArrivalCurve(std::vector<Breakpoint> points, Rational tail_slope = Rational{0});

  /// a(t) = slope * t for t >= 0.
  static ArrivalCurve linear(Rational slope);

  Rational at(Rational t) const;
  Rational left_limit(Rational t) const;

  std::span<const Breakpoint> breakpoints() const noexcept { return points_; }
  Rational tail_slope() const noexcept { return tail_slope_; }

  ArrivalCurve scaled(Rational factor) const;

  friend bool operator==(const ArrivalCurve&, const ArrivalCurve&) = default;

 private:
  std::vector<Breakpoint> points_;
  Rational tail_slope_{0};
};

/// A flow: arrivals along the route starting at `route.origin`, with its own
/// rate and local burst parameter b_phi.
struct Flow {
  ArrivalCurve curve;
  Route route;
  Rational rate{0};
  Rational burst{0};
};

/// Flows on a path plus the family-level dependent rate bound and global burst.
struct FlowFamily {
  int buffers = 1;
  std::vector<Flow> flows;
  Rational rate{0};
  Rational sigma{0};
};

/// Envelope violation: the increments over (s, t] exceed the allowance. `s` is
/// approached from the left, so a jump at s itself is included in the window.
struct EnvelopeWitness {
  int edge = 0;
  Rational s{0};
  Rational t{0};
  std::vector<std::size_t> flows;
  Rational lhs{0};
  Rational rhs{0};
};

struct EnvelopeVerdict {
  bool ok = true;
  std::optional<EnvelopeWitness> witness;

  explicit operator bool() const noexcept { return ok; }
};

/// a(t) - a(s) <= rate (t - s) + burst for all real s < t.
EnvelopeVerdict check_curve(const ArrivalCurve& curve, Rational rate, Rational burst);

/// sum_{phi in Psi} (a_phi(t) - a_phi(s)) <= r (t - s) + sigma + sum_{phi in Psi} b_phi
/// for every edge e, every Psi among the flows crossing e, and all s < t.
EnvelopeVerdict check_dependent(const FlowFamily& family);

/// One flow per origin carrying the cumulative injections of the pattern.
///
/// The curve equals the cumulative count at every integer round and ramps
/// linearly across (k-1, k] when round k injects (for round 0 that is
/// (-1, 0]). Flow rate and burst come from `params` (rho and
/// beta(origin)); the family gets (rho, sigma).
FlowFamily flows_from_pattern(const InjectionPattern& pattern, const BoundParams& params);
FlowFamily flows_from_pattern(const InjectionPattern& pattern);

/// floor(a(t)) - floor(a(t-1)) unit packets per flow for every round t in [0, horizon].
InjectionPattern discretize(const FlowFamily& family, std::int64_t horizon);

/// (r, sigma, beta) with beta(e) = sum over flows starting at e of (1 + b_phi).
/// Throws ValidationError when the family fails check_dependent.
BoundParams discretization_params(const FlowFamily& family);

}  // namespace aqtlab
