#include "aqtlab/bundling.hpp"

#include <deque>
#include <string>

namespace aqtlab {

namespace {

void require_capacity(int capacity) {
  if (capacity < 1) throw ValidationError("capacity must be positive, got " + std::to_string(capacity));
}

}  // namespace

FlowFamily c_reduce_flows(const FlowFamily& family, int capacity) {
  require_capacity(capacity);
  const Rational k(1, capacity);
  FlowFamily out{family.buffers, {}, family.rate * k, family.sigma * k};
  out.flows.reserve(family.flows.size());
  for (const auto& f : family.flows) {
    out.flows.push_back(Flow{f.curve.scaled(k), f.route, f.rate * k, f.burst * k});
  }
  return out;
}

InjectionPattern c_reduce_pattern(const InjectionPattern& pattern, int capacity) {
  require_capacity(capacity);
  if (!pattern.unit_sizes()) {
    throw ValidationError("C-reduction needs unit packet sizes; use hetero_bundle instead");
  }
  return discretize(c_reduce_flows(flows_from_pattern(pattern), capacity), pattern.horizon());
}

BoundParams uniform_bundle_params(const BoundParams& params, int capacity) {
  require_capacity(capacity);
  const Rational k(1, capacity);
  BoundParams out{params.rho * k, params.sigma * k, params.beta};
  for (int f = 1; f <= out.beta.buffers(); ++f) out.beta[f] = 1 + params.beta[f] * k;
  return out;
}

Verdict verify_uniform_bundling(const InjectionPattern& pattern, const BoundParams& params,
                                int capacity) {
  if (!check_local(pattern, params)) {
    throw ValidationError("pattern is not locally bounded by the given parameters");
  }
  return check_local(c_reduce_pattern(pattern, capacity), uniform_bundle_params(params, capacity));
}

BufferMap<std::int64_t> uniform_reserve(const InjectionPattern& pattern, int capacity,
                                        std::int64_t round) {
  require_capacity(capacity);
  BufferMap<std::int64_t> total(pattern.buffers(), 0);
  for (const auto& p : pattern.items()) {
    if (p.round > round) break;
    ++total[p.route.origin];
  }
  BufferMap<std::int64_t> reserve(pattern.buffers(), 0);
  for (int f = 1; f <= pattern.buffers(); ++f) reserve[f] = total[f] % capacity;
  return reserve;
}

BundleResult hetero_bundle(const InjectionPattern& pattern, int capacity) {
  require_capacity(capacity);
  const Rational cap{capacity};
  const Rational half(capacity, 2);
  const int n = pattern.buffers();
  const auto items = pattern.items();

  struct Pending {
    std::size_t index;
    Rational weight;
  };
  std::vector<std::deque<Pending>> queues(static_cast<std::size_t>(n) + 1);
  BundleState state{BufferMap<Rational>(n, Rational{0}), BufferMap<Rational>(n, Rational{0}), {}};

  auto cut = [&](std::deque<Pending>& q) {
    std::vector<std::size_t> taken;  // positions in q
    if (q.front().weight >= half) {
      taken.push_back(0);
    } else {
      Rational sum{0};
      for (std::size_t k = 0; k < q.size() && sum < half; ++k) {
        if (q[k].weight >= half) continue;
        taken.push_back(k);
        sum += q[k].weight;
      }
      if (sum < half) {
        taken.clear();
        for (std::size_t k = 0; k < q.size(); ++k) {
          if (q[k].weight >= half) {
            taken.push_back(k);
            break;
          }
        }
      }
    }
    Bundle b;
    for (auto k : taken) {
      b.members.push_back(q[k].index);
      b.weight += q[k].weight;
    }
    for (auto it = taken.rbegin(); it != taken.rend(); ++it) {
      q.erase(q.begin() + static_cast<std::ptrdiff_t>(*it));
    }
    return b;
  };

  std::vector<PacketSpec> out;
  for (std::size_t idx = 0; idx < items.size();) {
    const auto round = items[idx].round;
    for (; idx < items.size() && items[idx].round == round; ++idx) {
      const auto& p = items[idx];
      if (p.size > cap) {
        throw ValidationError("packet of size " + to_string(p.size) + " can never cross an edge of capacity " +
                              std::to_string(capacity));
      }
      queues[static_cast<std::size_t>(p.route.origin)].push_back(Pending{idx, p.size});
      state.reserve[p.route.origin] += p.size;
    }
    for (int f = 1; f <= n; ++f) {
      auto& q = queues[static_cast<std::size_t>(f)];
      while (state.reserve[f] > half) {
        auto b = cut(q);
        b.round = round;
        b.origin = f;
        state.reserve[f] -= b.weight;
        out.push_back(PacketSpec{round, Route{f}, b.weight});
        state.bundles.push_back(std::move(b));
      }
      state.peak_reserve[f] = std::max(state.peak_reserve[f], state.reserve[f]);
    }
  }
  return BundleResult{InjectionPattern(n, pattern.horizon(), std::move(out)), std::move(state)};
}

}  // namespace aqtlab
