#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "aqtlab/adversaries.hpp"

namespace aqtlab::cli {

enum Exit : int { kOk = 0, kViolation = 1, kUsage = 2, kInvariant = 3 };

/// Bad flags, specs or input files.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `a0:n`, `a1:n`, `wave:n`, `empty:n`, `lb:n,B,sigma`, `rand:n,B,sigma[,seed]`, `file:path`.
struct AdversarySpec {
  std::string kind;
  int n = 0;
  int burst = 0;
  std::int64_t sigma = 0;
  std::optional<std::uint64_t> seed;
  std::string path;
};

AdversarySpec parse_adversary_spec(const std::string& text);

/// The bound each construction is known to satisfy; nullopt for files.
std::optional<BoundParams> declared_params(const AdversarySpec& spec);

/// A ready-to-run adversary with its bookkeeping.
struct Source {
  std::unique_ptr<Adversary> adversary;
  std::int64_t rounds = 0;
  std::optional<BoundParams> declared;
  LowerBoundAdversary* lower_bound = nullptr;
  ObliviousRandomAdversary* random = nullptr;
};

/// `rounds` overrides the construction's natural length; `epochs` sizes rand:
/// adversaries when no round count is given.
Source make_source(const AdversarySpec& spec, std::optional<std::int64_t> rounds, std::int64_t epochs,
                   std::uint64_t seed);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aqtlab::cli
