#pragma once

#include <optional>
#include <vector>

#include "aqtlab/injection.hpp"

namespace aqtlab {

/// A concrete (edge, interval, origin set) where the bound fails: lhs > rhs.
struct Witness {
  int edge = 1;
  RoundInterval rounds;
  std::vector<int> origins;
  Rational lhs{0};
  Rational rhs{0};
};

struct Verdict {
  bool ok = true;
  std::optional<Witness> witness;

  explicit operator bool() const noexcept { return ok; }
};

/// Checks N^T(e) <= rho |T| + sigma for every edge and every closed round
/// interval inside [0, H]. |T| counts rounds, so a single round has |T| = 1.
Verdict check_rho_sigma(const InjectionPattern& pattern, Rational rho, Rational sigma,
                        Measure measure = Measure::count);

/// Smallest sigma >= 0 for which check_rho_sigma succeeds.
Rational min_sigma(const InjectionPattern& pattern, Rational rho, Measure measure = Measure::count);

/// Checks N_S^T(e) <= rho |T| + sigma + sum_{f in S} beta(f) for all e, T and S.
///
/// The quantifier over S is removed with the extremal set
/// S*(e, T) = { f : N_{f}^T(e) > beta(f) }, which is valid because every packet
/// has exactly one origin. Only intervals whose endpoints carry injections are
/// visited: trimming idle rounds off either end lowers |T| and keeps N fixed.
Verdict check_local(const InjectionPattern& pattern, const BoundParams& params,
                    Measure measure = Measure::count);

/// Direct transcription of the definition: every interval in [0, H], every
/// edge, all 2^n origin sets. Test oracle only; requires n <= 12 and H <= 12.
Verdict check_local_bruteforce(const InjectionPattern& pattern, const BoundParams& params,
                               Measure measure = Measure::count);

/// Smallest sigma >= 0 with check_local(pattern, {rho, sigma, beta}) ok.
Rational min_global_burst(const InjectionPattern& pattern, Rational rho,
                          const BufferMap<Rational>& beta, Measure measure = Measure::count);

struct GlobalBound {
  Rational rho{0};
  Rational sigma{0};
};

/// Every locally (rho, sigma, beta)-bounded pattern is (rho, sigma + sum beta)-bounded.
GlobalBound local_implies_global(const BoundParams& params);

}  // namespace aqtlab
