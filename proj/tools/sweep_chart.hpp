#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aqtlab/rational.hpp"

namespace aqtlab::cli {

struct SweepRow {
  int n = 0;
  int burst = 0;
  Rational sigma{0};
  std::string protocol;
  std::int64_t peak_load = 0;
  Rational proof_bound{0};
};

/// Header `n,B,sigma,protocol,peak_load,proof_bound`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Throws ParseError on a malformed file.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// Peak load against log2 n: one polyline per protocol in first-seen order, a
/// circle per point, and the proof bound as a dashed path. Byte-stable for a
/// given input.
std::string render_sweep_svg(const std::vector<SweepRow>& rows);

}  // namespace aqtlab::cli
