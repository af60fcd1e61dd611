#include "aqtlab/boundedness.hpp"

#include <algorithm>
#include <limits>

namespace aqtlab {

namespace {

// Every quantity of one scan multiplied by a common denominator so the inner
// loops stay in int64.
struct ScaledScan {
  std::int64_t scale = 1;
  std::int64_t rho = 0;
  std::int64_t sigma = 0;
  std::vector<std::int64_t> beta;          // index f-1
  std::vector<std::int64_t> rounds;        // distinct injection rounds
  std::vector<std::int64_t> prefix;        // (rounds.size()+1) x n, row-major
  int n = 0;

  std::int64_t as_int(const Rational& q) const { return q.numerator() * (scale / q.denominator()); }

  std::int64_t window(std::size_t a, std::size_t b, int f) const {
    const auto col = static_cast<std::size_t>(f - 1);
    const auto stride = static_cast<std::size_t>(n);
    return prefix[(b + 1) * stride + col] - prefix[a * stride + col];
  }
};

ScaledScan prepare(const InjectionPattern& pattern, Rational rho, Rational sigma,
                   const BufferMap<Rational>* beta, Measure measure) {
  ScaledScan s;
  s.n = pattern.buffers();
  s.scale = lcm_checked(rho.denominator(), sigma.denominator());
  if (beta != nullptr) {
    for (const auto& b : *beta) s.scale = lcm_checked(s.scale, b.denominator());
  }
  if (measure == Measure::weight) {
    for (const auto& p : pattern.items()) s.scale = lcm_checked(s.scale, p.size.denominator());
  }
  s.rho = s.as_int(rho);
  s.sigma = s.as_int(sigma);
  s.beta.assign(static_cast<std::size_t>(s.n), 0);
  if (beta != nullptr) {
    for (int f = 1; f <= s.n; ++f) s.beta[static_cast<std::size_t>(f - 1)] = s.as_int((*beta)[f]);
  }
  s.rounds = pattern.injection_rounds();
  const auto stride = static_cast<std::size_t>(s.n);
  s.prefix.assign((s.rounds.size() + 1) * stride, 0);
  std::size_t k = 0;
  auto items = pattern.items();
  for (std::size_t idx = 0; idx < items.size();) {
    const auto round = items[idx].round;
    std::copy_n(s.prefix.begin() + static_cast<std::ptrdiff_t>(k * stride), stride,
                s.prefix.begin() + static_cast<std::ptrdiff_t>((k + 1) * stride));
    for (; idx < items.size() && items[idx].round == round; ++idx) {
      const auto& p = items[idx];
      const auto w = measure == Measure::weight ? s.as_int(p.size) : s.scale;
      s.prefix[(k + 1) * stride + static_cast<std::size_t>(p.route.origin - 1)] += w;
    }
    ++k;
  }
  return s;
}

// Visits every (interval, edge) pair and reports sum_f max(0, N_f - beta_f)
// minus the rate allowance. Origins f <= e are exactly the routes crossing e,
// so the excess sum for edge e extends the one for e-1 by origin e.
template <class Visit>
void scan(const ScaledScan& s, Visit&& visit) {
  const auto k = s.rounds.size();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const auto length = s.rounds[b] - s.rounds[a] + 1;
      const auto allowance = s.rho * length;
      std::int64_t excess = 0;
      for (int e = 1; e <= s.n; ++e) {
        const auto over = s.window(a, b, e) - s.beta[static_cast<std::size_t>(e - 1)];
        if (over > 0) excess += over;
        if (!visit(a, b, e, excess - allowance)) return;
      }
    }
  }
}

Witness make_witness(const InjectionPattern& pattern, const ScaledScan& s, std::size_t a,
                     std::size_t b, int edge, Rational rho, Rational sigma,
                     const BufferMap<Rational>* beta, Measure measure) {
  Witness w;
  w.edge = edge;
  w.rounds = RoundInterval{s.rounds[a], s.rounds[b]};
  if (beta == nullptr) {
    for (int f = 1; f <= pattern.buffers(); ++f) w.origins.push_back(f);
  } else {
    for (int f = 1; f <= edge; ++f) {
      if (s.window(a, b, f) > s.beta[static_cast<std::size_t>(f - 1)]) w.origins.push_back(f);
    }
  }
  w.lhs = utilization(pattern, edge, w.rounds, w.origins, measure);
  w.rhs = rho * w.rounds.length() + sigma;
  if (beta != nullptr) {
    for (int f : w.origins) w.rhs += (*beta)[f];
  }
  return w;
}

Verdict run_check(const InjectionPattern& pattern, Rational rho, Rational sigma,
                  const BufferMap<Rational>* beta, Measure measure) {
  const auto s = prepare(pattern, rho, sigma, beta, measure);
  Verdict verdict;
  std::size_t wa = 0, wb = 0;
  int we = 0;
  scan(s, [&](std::size_t a, std::size_t b, int e, std::int64_t slack) {
    if (slack > s.sigma) {
      verdict.ok = false;
      wa = a;
      wb = b;
      we = e;
      return false;
    }
    return true;
  });
  if (!verdict.ok) {
    verdict.witness = make_witness(pattern, s, wa, wb, we, rho, sigma, beta, measure);
  }
  return verdict;
}

Rational run_min(const InjectionPattern& pattern, Rational rho, const BufferMap<Rational>* beta,
                 Measure measure) {
  const auto s = prepare(pattern, rho, Rational{0}, beta, measure);
  std::int64_t best = 0;
  scan(s, [&](std::size_t, std::size_t, int, std::int64_t slack) {
    best = std::max(best, slack);
    return true;
  });
  return Rational(best, s.scale);
}

}  // namespace

Verdict check_rho_sigma(const InjectionPattern& pattern, Rational rho, Rational sigma,
                        Measure measure) {
  if (rho < 0 || sigma < 0) throw ValidationError("rho and sigma must be non-negative");
  return run_check(pattern, rho, sigma, nullptr, measure);
}

Rational min_sigma(const InjectionPattern& pattern, Rational rho, Measure measure) {
  if (rho < 0) throw ValidationError("rho must be non-negative");
  return run_min(pattern, rho, nullptr, measure);
}

Verdict check_local(const InjectionPattern& pattern, const BoundParams& params, Measure measure) {
  params.validate(pattern.buffers());
  return run_check(pattern, params.rho, params.sigma, &params.beta, measure);
}

Rational min_global_burst(const InjectionPattern& pattern, Rational rho,
                          const BufferMap<Rational>& beta, Measure measure) {
  BoundParams{rho, Rational{0}, beta}.validate(pattern.buffers());
  return run_min(pattern, rho, &beta, measure);
}

Verdict check_local_bruteforce(const InjectionPattern& pattern, const BoundParams& params,
                               Measure measure) {
  params.validate(pattern.buffers());
  const int n = pattern.buffers();
  const auto horizon = pattern.horizon();
  if (n > 12 || horizon > 12) {
    throw ValidationError("brute-force checker limited to n <= 12 and H <= 12");
  }
  for (std::int64_t first = 0; first <= horizon; ++first) {
    for (std::int64_t last = first; last <= horizon; ++last) {
      for (int e = 1; e <= n; ++e) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
          Rational lhs{0};
          for (const auto& p : pattern.items()) {
            if (p.round < first || p.round > last) continue;
            if ((mask & (1u << (p.route.origin - 1))) == 0) continue;
            if (!p.route.contains(e)) continue;
            lhs += measure == Measure::weight ? p.size : Rational{1};
          }
          Rational rhs = params.rho * (last - first + 1) + params.sigma;
          std::vector<int> origins;
          for (int f = 1; f <= n; ++f) {
            if (mask & (1u << (f - 1))) {
              rhs += params.beta[f];
              origins.push_back(f);
            }
          }
          if (lhs > rhs) {
            return Verdict{false, Witness{e, RoundInterval{first, last}, std::move(origins), lhs, rhs}};
          }
        }
      }
    }
  }
  return Verdict{};
}

GlobalBound local_implies_global(const BoundParams& params) {
  Rational total = params.sigma;
  for (const auto& b : params.beta) total += b;
  return GlobalBound{params.rho, total};
}

}  // namespace aqtlab
