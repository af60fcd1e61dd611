#include "aqtlab/flows.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace aqtlab {

ArrivalCurve::ArrivalCurve(std::vector<Breakpoint> points, Rational tail_slope)
    : points_(std::move(points)), tail_slope_(tail_slope) {
  if (tail_slope_ < 0) throw ValidationError("arrival curve tail slope must be non-negative");
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const auto& p = points_[k];
    if (p.time < -1) throw ValidationError("arrival curve breakpoints must not precede t = -1");
    if (p.value < p.left) throw ValidationError("arrival curve jumps must be upward");
    if (k == 0) {
      if (p.left != 0) throw ValidationError("arrival curve must start from zero");
      continue;
    }
    const auto& q = points_[k - 1];
    if (!(q.time < p.time)) throw ValidationError("arrival curve times must strictly increase");
    if (p.left < q.value) throw ValidationError("arrival curve must be non-decreasing");
  }
}

ArrivalCurve ArrivalCurve::linear(Rational slope) {
  return ArrivalCurve({Breakpoint{Rational{0}, Rational{0}, Rational{0}}}, slope);
}

Rational ArrivalCurve::at(Rational t) const {
  if (points_.empty()) return t > 0 ? tail_slope_ * t : Rational{0};
  if (t < points_.front().time) return Rational{0};
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](const Rational& x, const Breakpoint& p) { return x < p.time; });
  const auto& k = *std::prev(it);  // last breakpoint with time <= t
  if (k.time == t) return k.value;
  if (it == points_.end()) return k.value + tail_slope_ * (t - k.time);
  return k.value + (it->left - k.value) * (t - k.time) / (it->time - k.time);
}

Rational ArrivalCurve::left_limit(Rational t) const {
  if (points_.empty()) return t > 0 ? tail_slope_ * t : Rational{0};
  if (t <= points_.front().time) return Rational{0};
  auto it = std::lower_bound(points_.begin(), points_.end(), t,
                             [](const Breakpoint& p, const Rational& x) { return p.time < x; });
  const auto& k = *std::prev(it);  // last breakpoint with time < t
  if (it == points_.end()) return k.value + tail_slope_ * (t - k.time);
  return k.value + (it->left - k.value) * (t - k.time) / (it->time - k.time);
}

ArrivalCurve ArrivalCurve::scaled(Rational factor) const {
  if (factor < 0) throw ValidationError("curve scale factor must be non-negative");
  auto points = points_;
  for (auto& p : points) {
    p.left *= factor;
    p.value *= factor;
  }
  return ArrivalCurve(std::move(points), tail_slope_ * factor);
}

namespace {

struct Member {
  const ArrivalCurve* curve;
  Rational burst;
  int origin;
  std::size_t index;
};

// Shared decision procedure for check_curve and check_dependent. For each
// (s, t) the excess sum_phi max(0, a_phi(t) - a_phi(s-) - b_phi) is convex and
// piecewise linear in each variable, so its supremum over s < t sits at
// breakpoint left limits for s and breakpoint values for t; beyond the last
// breakpoint it is unbounded exactly when the tail slopes outrun the rate.
EnvelopeVerdict check_members(std::vector<Member> members, int buffers, Rational rate,
                              Rational sigma) {
  std::stable_sort(members.begin(), members.end(),
                   [](const Member& a, const Member& b) { return a.origin < b.origin; });

  std::vector<Rational> times{Rational{-1}};
  for (const auto& m : members) {
    for (const auto& p : m.curve->breakpoints()) times.push_back(p.time);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const auto nt = times.size();
  std::vector<std::vector<Rational>> left(members.size()), right(members.size());
  for (std::size_t j = 0; j < members.size(); ++j) {
    left[j].reserve(nt);
    right[j].reserve(nt);
    for (const auto& u : times) {
      left[j].push_back(members[j].curve->left_limit(u));
      right[j].push_back(members[j].curve->at(u));
    }
  }

  auto witness_at = [&](int edge, Rational s, Rational t, auto&& inc_of, std::size_t upto) {
    EnvelopeWitness w;
    w.edge = edge;
    w.s = s;
    w.t = t;
    w.rhs = rate * (t - s) + sigma;
    for (std::size_t j = 0; j < upto; ++j) {
      const auto inc = inc_of(j);
      if (inc > members[j].burst) {
        w.flows.push_back(members[j].index);
        w.lhs += inc;
        w.rhs += members[j].burst;
      }
    }
    std::sort(w.flows.begin(), w.flows.end());
    return EnvelopeVerdict{false, std::move(w)};
  };

  for (std::size_t a = 0; a < nt; ++a) {
    for (std::size_t b = a; b < nt; ++b) {
      const Rational allowance = rate * (times[b] - times[a]) + sigma;
      Rational excess{0};
      std::size_t j = 0;
      for (int e = 1; e <= buffers; ++e) {
        for (; j < members.size() && members[j].origin <= e; ++j) {
          const auto over = right[j][b] - left[j][a] - members[j].burst;
          if (over > 0) excess += over;
        }
        if (excess > allowance) {
          return witness_at(e, times[a], times[b],
                            [&](std::size_t k) { return right[k][b] - left[k][a]; }, j);
        }
      }
    }
  }

  // Tail: after the last breakpoint every curve is linear.
  Rational slope{0}, bursts{0};
  std::size_t j = 0;
  for (int e = 1; e <= buffers; ++e) {
    for (; j < members.size() && members[j].origin <= e; ++j) {
      if (members[j].curve->tail_slope() > 0) {
        slope += members[j].curve->tail_slope();
        bursts += members[j].burst;
      }
    }
    if (slope > rate) {
      const Rational s = times.back();
      const Rational tau = Rational(floor((sigma + bursts) / (slope - rate)) + 1);
      const Rational t = s + tau;
      return witness_at(e, s, t,
                        [&](std::size_t k) {
                          return members[k].curve->at(t) - members[k].curve->left_limit(s);
                        },
                        j);
    }
  }
  return EnvelopeVerdict{};
}

}  // namespace

EnvelopeVerdict check_curve(const ArrivalCurve& curve, Rational rate, Rational burst) {
  if (rate < 0 || burst < 0) throw ValidationError("rate and burst must be non-negative");
  return check_members({Member{&curve, burst, 1, 0}}, 1, rate, Rational{0});
}

EnvelopeVerdict check_dependent(const FlowFamily& family) {
  if (family.rate < 0 || family.sigma < 0) {
    throw ValidationError("family rate and sigma must be non-negative");
  }
  std::vector<Member> members;
  for (std::size_t i = 0; i < family.flows.size(); ++i) {
    const auto& f = family.flows[i];
    if (f.route.origin < 1 || f.route.origin > family.buffers) {
      throw ValidationError("flow origin " + std::to_string(f.route.origin) + " is not a buffer");
    }
    if (f.burst < 0) throw ValidationError("flow burst must be non-negative");
    members.push_back(Member{&f.curve, f.burst, f.route.origin, i});
  }
  return check_members(std::move(members), family.buffers, family.rate, family.sigma);
}

FlowFamily flows_from_pattern(const InjectionPattern& pattern, const BoundParams& params) {
  params.validate(pattern.buffers());
  std::map<int, std::map<std::int64_t, std::int64_t>> per_origin;
  for (const auto& p : pattern.items()) ++per_origin[p.route.origin][p.round];

  FlowFamily family{pattern.buffers(), {}, params.rho, params.sigma};
  for (const auto& [origin, counts] : per_origin) {
    // Breakpoints at k-1 and k for each injecting round k; between them the
    // curve interpolates the cumulative count, so it has no jumps.
    std::map<std::int64_t, std::int64_t> cumulative;
    for (const auto& [round, c] : counts) {
      cumulative.emplace(round - 1, 0);
      cumulative.emplace(round, 0);
    }
    std::int64_t running = 0;
    auto next = counts.begin();
    for (auto& [time, value] : cumulative) {
      while (next != counts.end() && next->first <= time) running += (next++)->second;
      value = running;
    }
    std::vector<Breakpoint> points;
    for (const auto& [time, value] : cumulative) {
      points.push_back(Breakpoint{Rational{time}, Rational{value}, Rational{value}});
    }
    family.flows.push_back(
        Flow{ArrivalCurve(std::move(points)), Route{origin}, params.rho, params.beta[origin]});
  }
  return family;
}

FlowFamily flows_from_pattern(const InjectionPattern& pattern) {
  return flows_from_pattern(pattern, BoundParams::uniform(pattern.buffers(), 0, 0, 0));
}

InjectionPattern discretize(const FlowFamily& family, std::int64_t horizon) {
  if (horizon < 0) throw ValidationError("horizon must be non-negative");
  std::vector<PacketSpec> items;
  for (const auto& f : family.flows) {
    std::int64_t previous = 0;  // floor(a(-1)) = 0
    for (std::int64_t t = 0; t <= horizon; ++t) {
      const auto current = floor(f.curve.at(Rational{t}));
      for (auto k = previous; k < current; ++k) items.push_back(PacketSpec{t, f.route, Rational{1}});
      previous = current;
    }
  }
  return InjectionPattern(family.buffers, horizon, std::move(items));
}

BoundParams discretization_params(const FlowFamily& family) {
  if (!check_dependent(family)) {
    throw ValidationError("flow family violates its locally dependent rate bound");
  }
  auto params = BoundParams::uniform(family.buffers, family.rate, family.sigma, 0);
  for (const auto& f : family.flows) params.beta[f.route.origin] += 1 + f.burst;
  return params;
}

}  // namespace aqtlab
