#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aqtlab/rational.hpp"
#include "aqtlab/topology.hpp"

namespace aqtlab {

/// Values keyed by 1-based buffer index.
template <class T>
class BufferMap {
 public:
  BufferMap() = default;
  explicit BufferMap(int buffers, T init = T{}) : values_(static_cast<std::size_t>(buffers), init) {}

  int buffers() const noexcept { return static_cast<int>(values_.size()); }

  T& operator[](int buffer) { return values_.at(static_cast<std::size_t>(buffer - 1)); }
  const T& operator[](int buffer) const { return values_.at(static_cast<std::size_t>(buffer - 1)); }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const BufferMap&, const BufferMap&) = default;

 private:
  std::vector<T> values_;
};

struct PacketSpec {
  std::int64_t round = 0;
  Route route;
  Rational size{1};

  friend bool operator==(const PacketSpec&, const PacketSpec&) = default;
};

/// Closed interval of rounds [first, last].
struct RoundInterval {
  std::int64_t first = 0;
  std::int64_t last = 0;

  std::int64_t length() const noexcept { return last - first + 1; }
  bool contains(std::int64_t r) const noexcept { return r >= first && r <= last; }

  friend bool operator==(const RoundInterval&, const RoundInterval&) = default;
};

/// Whether utilization counts packets or sums their sizes.
enum class Measure { count, weight };

/// A finite multiset of timed, routed, sized injections over rounds [0, horizon].
///
/// Items are kept sorted by round; within a round the insertion order is
/// preserved (bundling uses it for deterministic FIFO tie-breaks).
class InjectionPattern {
 public:
  InjectionPattern(int buffers, std::int64_t horizon, std::vector<PacketSpec> items = {});

  int buffers() const noexcept { return buffers_; }
  std::int64_t horizon() const noexcept { return horizon_; }
  std::span<const PacketSpec> items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  std::span<const PacketSpec> at_round(std::int64_t round) const;

  /// Distinct rounds that carry at least one injection, ascending.
  std::vector<std::int64_t> injection_rounds() const;

  bool unit_sizes() const;
  Rational total_weight() const;

  friend bool operator==(const InjectionPattern&, const InjectionPattern&) = default;

 private:
  int buffers_;
  std::int64_t horizon_;
  std::vector<PacketSpec> items_;
};

/// (rho, sigma, beta). Plain (rho, sigma)-boundedness is the case beta == 0.
struct BoundParams {
  Rational rho{0};
  Rational sigma{0};
  BufferMap<Rational> beta;

  static BoundParams uniform(int buffers, Rational rho, Rational sigma, Rational burst);

  /// Throws ValidationError on negative entries or a beta map of the wrong size.
  void validate(int buffers) const;

  Rational max_beta() const;
};

/// N_S^T(e): packets (or weight, for Measure::weight) injected during `rounds`
/// at an origin in `origins` whose route crosses `edge`.
Rational utilization(const InjectionPattern& pattern, int edge, RoundInterval rounds,
                     std::span<const int> origins, Measure measure = Measure::count);

/// The same counter split by origin: entry f is utilization(..., {f}, ...).
BufferMap<Rational> per_origin_utilization(const InjectionPattern& pattern, int edge,
                                           RoundInterval rounds, Measure measure = Measure::count);

}  // namespace aqtlab
