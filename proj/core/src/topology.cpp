#include "aqtlab/topology.hpp"

#include <string>

#include "aqtlab/rational.hpp"

namespace aqtlab {

PathTopology::PathTopology(int buffers, int capacity) : buffers_(buffers), capacity_(capacity) {
  if (buffers < 1) throw ValidationError("path needs at least one buffer, got " + std::to_string(buffers));
  if (capacity < 1) throw ValidationError("edge capacity must be positive, got " + std::to_string(capacity));
}

PathTopology make_path(int buffers, int capacity) { return PathTopology(buffers, capacity); }

}  // namespace aqtlab
