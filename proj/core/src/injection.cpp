#include "aqtlab/injection.hpp"

#include <algorithm>
#include <string>

namespace aqtlab {

InjectionPattern::InjectionPattern(int buffers, std::int64_t horizon, std::vector<PacketSpec> items)
    : buffers_(buffers), horizon_(horizon), items_(std::move(items)) {
  if (buffers < 1) throw ValidationError("pattern needs at least one buffer");
  if (horizon < 0) throw ValidationError("horizon must be non-negative");
  for (const auto& p : items_) {
    if (p.round < 0 || p.round > horizon) {
      throw ValidationError("injection round " + std::to_string(p.round) + " outside [0, " +
                            std::to_string(horizon) + "]");
    }
    if (p.route.origin < 1 || p.route.origin > buffers) {
      throw ValidationError("injection origin " + std::to_string(p.route.origin) + " outside [1, " +
                            std::to_string(buffers) + "]");
    }
    if (p.size <= 0) throw ValidationError("packet size must be positive, got " + to_string(p.size));
  }
  std::stable_sort(items_.begin(), items_.end(),
                   [](const PacketSpec& a, const PacketSpec& b) { return a.round < b.round; });
}

std::span<const PacketSpec> InjectionPattern::at_round(std::int64_t round) const {
  auto cmp = [](const PacketSpec& p, std::int64_t r) { return p.round < r; };
  auto lo = std::lower_bound(items_.begin(), items_.end(), round, cmp);
  auto hi = lo;
  while (hi != items_.end() && hi->round == round) ++hi;
  return {lo, hi};
}

std::vector<std::int64_t> InjectionPattern::injection_rounds() const {
  std::vector<std::int64_t> rounds;
  for (const auto& p : items_) {
    if (rounds.empty() || rounds.back() != p.round) rounds.push_back(p.round);
  }
  return rounds;
}

bool InjectionPattern::unit_sizes() const {
  return std::all_of(items_.begin(), items_.end(), [](const PacketSpec& p) { return p.size == 1; });
}

Rational InjectionPattern::total_weight() const {
  Rational total{0};
  for (const auto& p : items_) total += p.size;
  return total;
}

BoundParams BoundParams::uniform(int buffers, Rational rho, Rational sigma, Rational burst) {
  return BoundParams{rho, sigma, BufferMap<Rational>(buffers, burst)};
}

void BoundParams::validate(int buffers) const {
  if (rho < 0) throw ValidationError("rho must be non-negative");
  if (sigma < 0) throw ValidationError("sigma must be non-negative");
  if (beta.buffers() != buffers) {
    throw ValidationError("beta has " + std::to_string(beta.buffers()) + " entries, expected " +
                          std::to_string(buffers));
  }
  for (const auto& b : beta) {
    if (b < 0) throw ValidationError("beta entries must be non-negative");
  }
}

Rational BoundParams::max_beta() const {
  Rational best{0};
  for (const auto& b : beta) best = std::max(best, b);
  return best;
}

namespace {

void validate_query(const InjectionPattern& pattern, int edge, RoundInterval rounds) {
  if (edge < 1 || edge > pattern.buffers()) {
    throw ValidationError("edge " + std::to_string(edge) + " outside [1, " +
                          std::to_string(pattern.buffers()) + "]");
  }
  if (rounds.first < 0 || rounds.last > pattern.horizon() || rounds.first > rounds.last) {
    throw ValidationError("round interval [" + std::to_string(rounds.first) + ", " +
                          std::to_string(rounds.last) + "] not inside [0, " +
                          std::to_string(pattern.horizon()) + "]");
  }
}

}  // namespace

BufferMap<Rational> per_origin_utilization(const InjectionPattern& pattern, int edge,
                                           RoundInterval rounds, Measure measure) {
  validate_query(pattern, edge, rounds);
  BufferMap<Rational> out(pattern.buffers(), Rational{0});
  for (const auto& p : pattern.items()) {
    if (!rounds.contains(p.round) || !p.route.contains(edge)) continue;
    out[p.route.origin] += measure == Measure::weight ? p.size : Rational{1};
  }
  return out;
}

Rational utilization(const InjectionPattern& pattern, int edge, RoundInterval rounds,
                     std::span<const int> origins, Measure measure) {
  const auto split = per_origin_utilization(pattern, edge, rounds, measure);
  std::vector<bool> seen(static_cast<std::size_t>(pattern.buffers()) + 1, false);
  Rational total{0};
  for (int f : origins) {
    if (f < 1 || f > pattern.buffers()) {
      throw ValidationError("origin " + std::to_string(f) + " is not a buffer");
    }
    if (seen[static_cast<std::size_t>(f)]) continue;  // S is a set
    seen[static_cast<std::size_t>(f)] = true;
    total += split[f];
  }
  return total;
}

}  // namespace aqtlab
