#include "aqtlab/adversaries.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

namespace aqtlab {

namespace {

InjectionPattern periodic(int buffers, std::int64_t horizon, bool all_into_first) {
  if (buffers < 1) throw ValidationError("need at least one buffer");
  if (horizon < 0) throw ValidationError("horizon must be non-negative");
  std::vector<PacketSpec> items;
  for (std::int64_t r = 1; r <= horizon; r += buffers) {
    for (int i = 1; i <= buffers; ++i) items.push_back(PacketSpec{r, Route{all_into_first ? 1 : i}, Rational{1}});
  }
  return InjectionPattern(buffers, horizon, std::move(items));
}

std::int64_t interval_load(const LoadVector& loads, Span s) {
  std::int64_t sum = 0;
  for (int i = s.first; i <= s.last; ++i) sum += loads[i];
  return sum;
}

// Uniform draw from [0, bound) by rejection, so the result does not depend on
// the standard library's distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
  for (;;) {
    const auto x = rng();
    if (x < limit) return x % bound;
  }
}

}  // namespace

InjectionPattern example_A0(int buffers, std::int64_t horizon) { return periodic(buffers, horizon, true); }

InjectionPattern example_A1(int buffers, std::int64_t horizon) { return periodic(buffers, horizon, false); }

FlowFamily wave_flows(int buffers) {
  if (buffers < 1) throw ValidationError("need at least one buffer");
  FlowFamily family{buffers, {}, Rational{1}, Rational{0}};
  for (int i = 1; i <= buffers; ++i) {
    family.flows.push_back(Flow{ArrivalCurve::linear(Rational(1, buffers)), Route{i}, Rational(1, buffers), Rational{0}});
  }
  return family;
}

int lower_bound_depth(int buffers, int burst) {
  if (burst < 1) throw ValidationError("lower-bound adversary needs B >= 1");
  const std::int64_t base = 2 * static_cast<std::int64_t>(burst);
  std::int64_t size = 1;
  int m = 0;
  while (size < buffers) {
    size *= base;
    ++m;
  }
  if (size != buffers || m < 1) {
    throw ValidationError("network size " + std::to_string(buffers) + " is not a positive power of 2B = " +
                          std::to_string(base));
  }
  return m;
}

PhaseGeometry::PhaseGeometry(int buffers, int burst, std::int64_t sigma)
    : n_(buffers), burst_(burst), sigma_(sigma), m_(lower_bound_depth(buffers, burst)) {
  if (sigma < 0) throw ValidationError("sigma must be non-negative");
}

int PhaseGeometry::interval_size(int k) const {
  if (k < 1 || k > m_ + 1) throw ValidationError("phase " + std::to_string(k) + " out of range");
  int size = n_;
  for (int j = 1; j < k; ++j) size /= split();
  return size;
}

std::int64_t PhaseGeometry::tau(int k) const {
  if (k < 1 || k > m_) throw ValidationError("phase " + std::to_string(k) + " has no duration");
  return interval_size(k) / 2;
}

std::int64_t PhaseGeometry::phase_start(int k) const {
  if (k < 1 || k > m_ + 1) throw ValidationError("phase " + std::to_string(k) + " out of range");
  std::int64_t start = 0;
  for (int j = 1; j < k; ++j) start += tau(j);
  return start;
}

Span PhaseGeometry::interval_of(int target, int k) const {
  if (target < 1 || target > n_) throw ValidationError("target " + std::to_string(target) + " is not a buffer");
  const int size = interval_size(k);
  const int first = (target - 1) / size * size + 1;
  return Span{first, first + size - 1};
}

Rational PhaseGeometry::final_floor() const {
  return Rational(m_) * (Rational(burst_) - Rational(1, 2)) + Rational(sigma_);
}

LowerBoundAdversary::LowerBoundAdversary(int buffers, int burst, std::int64_t sigma, std::int64_t start)
    : geometry_(buffers, burst, sigma), start_(start) {
  if (start < 0) throw ValidationError("start round must be non-negative");
}

std::vector<PacketSpec> LowerBoundAdversary::injections(std::int64_t round, const LoadVector& loads) {
  const auto& g = geometry_;
  const auto offset = round - start_;
  const int k = static_cast<int>(intervals_.size()) + 1;  // next phase to open
  if (k > g.phases() + 1 || offset != g.phase_start(k)) return {};

  // The phase that just ended is measured on the same snapshot the next choice uses.
  if (k > 1) phase_end_.push_back(interval_load(loads, intervals_.back()));

  Span chosen{1, g.buffers()};
  if (k > 1) {
    const auto parent = intervals_.back();
    const int size = g.interval_size(k);
    std::int64_t best = -1;
    for (int first = parent.first; first <= parent.last; first += size) {
      const Span part{first, first + size - 1};
      const auto load = interval_load(loads, part);
      if (load > best) {
        best = load;
        chosen = part;
      }
    }
  }
  intervals_.push_back(chosen);

  std::vector<PacketSpec> out;
  if (k <= g.phases()) {
    for (int i = chosen.first; i <= chosen.last; ++i) {
      for (int b = 0; b < g.burst(); ++b) out.push_back(PacketSpec{round, Route{i}, Rational{1}});
    }
  } else {
    for (std::int64_t s = 0; s < g.sigma(); ++s) out.push_back(PacketSpec{round, Route{chosen.first}, Rational{1}});
  }
  return out;
}

std::optional<int> LowerBoundAdversary::target() const {
  if (static_cast<int>(intervals_.size()) <= geometry_.phases()) return std::nullopt;
  return intervals_.back().first;
}

bool LowerBoundAdversary::phase_claims_hold() const {
  const Rational step = Rational(geometry_.burst()) - Rational(1, 2);
  for (std::size_t j = 0; j < phase_end_.size(); ++j) {
    const int k = static_cast<int>(j) + 1;
    if (Rational(phase_end_[j]) < Rational(k) * step * intervals_[j].length()) return false;
  }
  return true;
}

std::vector<PacketSpec> targeted_schedule(const PhaseGeometry& geometry, int target, std::int64_t start) {
  std::vector<PacketSpec> out;
  for (int k = 1; k <= geometry.phases(); ++k) {
    const auto span = geometry.interval_of(target, k);
    const auto round = start + geometry.phase_start(k);
    for (int i = span.first; i <= span.last; ++i) {
      for (int b = 0; b < geometry.burst(); ++b) out.push_back(PacketSpec{round, Route{i}, Rational{1}});
    }
  }
  for (std::int64_t s = 0; s < geometry.sigma(); ++s) {
    out.push_back(PacketSpec{start + geometry.final_offset(), Route{target}, Rational{1}});
  }
  return out;
}

namespace {

InjectionPattern build_random(const PhaseGeometry& g, std::uint64_t seed, std::int64_t epochs,
                              std::vector<int>& targets) {
  if (epochs < 0) throw ValidationError("epoch count must be non-negative");
  std::mt19937_64 rng(seed);
  const auto length = g.active_rounds() + static_cast<std::int64_t>(g.burst()) * g.buffers() + g.sigma();
  std::vector<PacketSpec> items;
  for (std::int64_t e = 0; e < epochs; ++e) {
    const int target = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(g.buffers()))) + 1;
    targets.push_back(target);
    auto part = targeted_schedule(g, target, e * length);
    items.insert(items.end(), part.begin(), part.end());
  }
  return InjectionPattern(g.buffers(), std::max<std::int64_t>(epochs * length - 1, 0), std::move(items));
}

}  // namespace

ObliviousRandomAdversary::ObliviousRandomAdversary(int buffers, int burst, std::int64_t sigma,
                                                   std::uint64_t seed, std::int64_t epochs)
    : geometry_(buffers, burst, sigma),
      seed_(seed),
      replay_(build_random(geometry_, seed, epochs, targets_)) {}

std::vector<PacketSpec> ObliviousRandomAdversary::injections(std::int64_t round, const LoadVector& loads) {
  return replay_.injections(round, loads);
}

std::optional<std::uint64_t> ObliviousRandomAdversary::pending_after(std::int64_t round) const {
  return replay_.pending_after(round);
}

std::int64_t ObliviousRandomAdversary::epoch_length() const {
  return geometry_.active_rounds() + static_cast<std::int64_t>(geometry_.burst()) * geometry_.buffers() +
         geometry_.sigma();
}

std::vector<EpochRecord> classify_epochs(const Trace& trace, const ObliviousRandomAdversary& adversary) {
  const auto& g = adversary.geometry();
  if (trace.buffers() != g.buffers()) throw ValidationError("trace and adversary disagree on the network size");
  if (trace.first_round() != 0 || trace.rounds() < adversary.rounds_needed()) {
    throw ValidationError("trace does not cover all " + std::to_string(adversary.epochs()) + " epochs");
  }
  const auto expected = adversary.pattern().items();
  const auto seen = trace.injections();
  if (seen.size() < expected.size() || !std::equal(expected.begin(), expected.end(), seen.begin())) {
    throw ValidationError("trace injections do not match the adversary's pattern");
  }

  auto before_injection = [&](std::int64_t round) {
    auto loads = trace.loads(round);
    for (const auto& p : adversary.pattern().at_round(round)) {
      loads.set(p.route.origin, loads[p.route.origin] - 1);
    }
    return loads;
  };

  std::vector<EpochRecord> out;
  for (std::int64_t e = 0; e < adversary.epochs(); ++e) {
    EpochRecord rec;
    rec.epoch = e;
    rec.target = adversary.targets()[static_cast<std::size_t>(e)];
    const auto start = adversary.epoch_start(e);
    for (int j = 2; j <= g.phases() + 1; ++j) {
      const auto loads = before_injection(start + g.phase_start(j));
      const auto inner = g.interval_of(rec.target, j);
      const auto outer = g.interval_of(rec.target, j - 1);
      const auto lhs = interval_load(loads, inner) * outer.length();
      const auto rhs = interval_load(loads, outer) * inner.length();
      rec.phase_good.push_back(lhs >= rhs);
    }
    rec.good = std::all_of(rec.phase_good.begin(), rec.phase_good.end(), [](bool b) { return b; });
    rec.final_load = trace.load(start + g.final_offset(), rec.target);
    for (std::int64_t r = start; r < start + adversary.epoch_length(); ++r) {
      rec.peak_load = std::max(rec.peak_load, trace.loads(r).max());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace aqtlab
