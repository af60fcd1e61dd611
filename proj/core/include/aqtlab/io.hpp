#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "aqtlab/engine.hpp"
#include "aqtlab/flows.hpp"

namespace aqtlab {

/// Raised for malformed input files; carries the line (or 0) where parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Pattern CSV:
//   # buffers=<n> horizon=<H>
//   round,origin,count,size
//   1,1,16,1
// Consecutive identical (round, origin, size) injections share a row. Sizes
// are rationals written "p" or "p/q". Without the comment line the buffer
// count and horizon are the largest origin and round seen.
void write_pattern_csv(std::ostream& out, const InjectionPattern& pattern);
InjectionPattern read_pattern_csv(std::istream& in);

// Flow family JSON:
//   {"buffers": n, "rate": "1", "sigma": "0",
//    "flows": [{"origin": 1, "rate": "1/16", "burst": "0", "tail_slope": "1/16",
//               "breakpoints": [{"t": "0", "left": "0", "value": "0"}]}]}
// "left" defaults to "value" (no jump).
void write_flows_json(std::ostream& out, const FlowFamily& family);
FlowFamily read_flows_json(std::istream& in);

/// Bound parameters as JSON: {"rho": "1", "sigma": "0", "beta": ["1", ...]}.
std::string params_to_json(const BoundParams& params);
BoundParams params_from_json(const std::string& text, int buffers);

/// round,buffer,load for every recorded round and buffer.
void write_trace_csv(std::ostream& out, const Trace& trace);
/// buffer,max_load,argmax_round.
void write_summary_csv(std::ostream& out, const Trace& trace);
/// One JSON object per packet event.
void write_events_jsonl(std::ostream& out, const Trace& trace);

}  // namespace aqtlab
