#pragma once

#include <cstdint>

#include "aqtlab/bundling.hpp"
#include "aqtlab/engine.hpp"

namespace aqtlab {

/// Bundling followed by OED on the bundles, reporting occupancy in original units.
struct PipelineResult {
  InjectionPattern reduced;       // jumbo packets or bundles
  BoundParams reduced_params;     // their local bound
  RunResult run;                  // OED on the reduced pattern
  std::int64_t max_slots = 0;     // largest bundle count in a buffer
  Rational max_occupancy{0};      // largest buffered weight plus reserve, original units
  Rational slot_bound{0};         // oed_proof_bound for the reduced pattern
  Rational occupancy_bound{0};    // C * slot_bound + reserve allowance
};

/// Unit packets on a capacity-C path, locally (rho, sigma, beta)-bounded with rho <= C.
PipelineResult run_general_capacity(const InjectionPattern& pattern, const BoundParams& params,
                                    int capacity, std::int64_t rounds);

/// Flows with a locally dependent rate bound, r <= C: C-reduce, discretize, run.
PipelineResult run_continuous(const FlowFamily& family, int capacity, std::int64_t rounds);

/// Packets of size <= C, locally (rho, sigma, beta)-bounded in weight with rho <= C/2.
/// Bundles travel as unit slots. The bundle pattern is checked against
/// (1, 2 sigma / C, 1 + 2 beta / C): every bundle weighs at least C/2.
PipelineResult run_heterogeneous(const InjectionPattern& pattern, const BoundParams& params,
                                 int capacity, std::int64_t rounds);

/// (rho, sigma, beta) -> (2 rho / C, 2 sigma / C, 1 + 2 beta / C) for bundles of weight >= C/2.
BoundParams hetero_bundle_params(const BoundParams& params, int capacity);

}  // namespace aqtlab
