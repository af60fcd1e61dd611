#pragma once

// Single-destination path networks. Buffer i is the edge (i, i+1); node n+1
// is the common destination, so a buffer index doubles as an edge index.

namespace aqtlab {

class PathTopology {
 public:
  /// Throws ValidationError unless buffers >= 1 and capacity >= 1.
  PathTopology(int buffers, int capacity);

  int buffers() const noexcept { return buffers_; }
  int capacity() const noexcept { return capacity_; }
  int destination() const noexcept { return buffers_ + 1; }
  bool has_buffer(int i) const noexcept { return i >= 1 && i <= buffers_; }

  friend bool operator==(const PathTopology&, const PathTopology&) = default;

 private:
  int buffers_;
  int capacity_;
};

/// On a path a route is fixed by where it starts: origin, origin+1, ..., n.
struct Route {
  int origin = 1;

  bool contains(int edge) const noexcept { return origin <= edge; }

  friend auto operator<=>(const Route&, const Route&) = default;
};

PathTopology make_path(int buffers, int capacity = 1);

inline bool route_contains(Route r, int edge) noexcept { return r.contains(edge); }

}  // namespace aqtlab
