#pragma once

#include <cstddef>
#include <vector>

#include "aqtlab/boundedness.hpp"
#include "aqtlab/flows.hpp"

namespace aqtlab {

/// Scales every curve, the family rate/sigma and each flow's rate/burst by 1/C.
FlowFamily c_reduce_flows(const FlowFamily& family, int capacity);

/// Jumbo packets: each output packet stands for `capacity` unit packets.
/// Equal to discretize(c_reduce_flows(flows_from_pattern(pattern), capacity)).
/// Throws ValidationError on non-unit packet sizes.
InjectionPattern c_reduce_pattern(const InjectionPattern& pattern, int capacity);

/// (rho / C, sigma / C, 1 + beta / C).
BoundParams uniform_bundle_params(const BoundParams& params, int capacity);

/// Checks the C-reduced pattern against uniform_bundle_params. Throws
/// ValidationError if `pattern` itself fails check_local(params).
Verdict verify_uniform_bundling(const InjectionPattern& pattern, const BoundParams& params,
                                int capacity);

/// Unbundled originals left in each buffer's reserve after `round`.
BufferMap<std::int64_t> uniform_reserve(const InjectionPattern& pattern, int capacity,
                                        std::int64_t round);

struct Bundle {
  std::int64_t round = 0;
  int origin = 1;
  Rational weight{0};
  std::vector<std::size_t> members;  // indices into the source pattern's items()
};

struct BundleState {
  BufferMap<Rational> reserve;       // after the last round
  BufferMap<Rational> peak_reserve;  // largest reserve seen at a round boundary
  std::vector<Bundle> bundles;
};

struct BundleResult {
  InjectionPattern bundles;  // one packet per bundle, size = bundle weight
  BundleState state;
};

/// Bundling for indivisible packets of arbitrary size <= C.
///
/// Injected packets wait in a per-buffer FIFO reserve. While the reserve
/// weight strictly exceeds C/2 a bundle is cut from it:
///  - if the oldest packet weighs at least C/2 it is a bundle on its own;
///  - otherwise packets lighter than C/2 are taken oldest-first until the
///    bundle reaches C/2 (it then weighs less than C);
///  - if those light packets cannot reach C/2, the oldest packet weighing at
///    least C/2 is bundled alone.
/// Every bundle therefore weighs in [C/2, C], and each reserve ends a round at
/// weight <= C/2.
BundleResult hetero_bundle(const InjectionPattern& pattern, int capacity);

}  // namespace aqtlab
