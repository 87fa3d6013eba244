#include "consecrm/oracle.hpp"

#include <algorithm>

namespace consecrm {

namespace {

using State = std::uint32_t;

State interval_mask(const Interval& iv) {
  if (iv.is_empty()) return 0;
  return ((State{1} << iv.length()) - 1) << (iv.lo - 1);
}

void require_single_resource_reject(const Instance& instance) {
  if (instance.scenario != Scenario::reject_or_accept)
    fail(Errc::wrong_shape, "single-resource DP expects the reject-or-accept scenario");
  if (instance.resource_count != 1)
    fail(Errc::wrong_shape, "single-resource DP expects M = 1, got M = " +
                                std::to_string(instance.resource_count));
}

}  // namespace

ExactValue naive_dp(const Instance& instance, int max_slots) {
  require_single_resource_reject(instance);
  const int n = instance.slot_count;
  if (n > max_slots)
    fail(Errc::too_large, "naive DP state space 2^" + std::to_string(n) + " exceeds cap 2^" +
                              std::to_string(max_slots));

  const std::size_t states = std::size_t{1} << n;
  std::vector<double> next(states, 0.0), current(states, 0.0);
  long visited = 0;
  for (int t = instance.horizon; t >= 1; --t) {
    const RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
    const State demand = interval_mask(req.interval);
    const double w = req.rewards[0];
    for (State s = 0; s < states; ++s) {
      ++visited;
      const double keep = next[s];
      if ((s & demand) == demand) {
        const double accept = w + next[s & ~demand];
        current[s] = (1.0 - req.p) * keep + req.p * std::max(accept, keep);
      } else {
        current[s] = keep;
      }
    }
    std::swap(next, current);
  }
  const State full = static_cast<State>(states - 1);
  return ExactValue{next[full], visited};
}

std::vector<std::vector<double>> naive_dp_table(const Instance& instance, int max_slots) {
  require_single_resource_reject(instance);
  const int n = instance.slot_count;
  if (n > max_slots)
    fail(Errc::too_large, "naive DP state space 2^" + std::to_string(n) + " exceeds cap 2^" +
                              std::to_string(max_slots));
  const std::size_t states = std::size_t{1} << n;
  std::vector<std::vector<double>> table(static_cast<std::size_t>(instance.horizon + 1),
                                         std::vector<double>(states, 0.0));
  for (int t = instance.horizon; t >= 1; --t) {
    const RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
    const State demand = interval_mask(req.interval);
    const auto& next = table[static_cast<std::size_t>(t)];
    auto& current = table[static_cast<std::size_t>(t - 1)];
    for (State s = 0; s < states; ++s) {
      const double keep = next[s];
      if ((s & demand) == demand)
        current[s] =
            (1.0 - req.p) * keep + req.p * std::max(req.rewards[0] + next[s & ~demand], keep);
      else
        current[s] = keep;
    }
  }
  return table;
}

DdpTable ddp(const Instance& instance) {
  require_single_resource_reject(instance);
  const int n = instance.slot_count;
  DdpTable table(n, instance.horizon);
  // Row T+1 is zero-initialized; recurse downward.
  for (int t = instance.horizon; t >= 1; --t) {
    const RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
    const double w = req.rewards[0];
    for (int a = 1; a <= n; ++a) {
      for (int b = a; b <= n; ++b) {
        const Interval iv{a, b};
        const double keep = table.value(t + 1, iv);
        double value = keep;
        if (iv.contains(req.interval)) {
          const auto [left, right] = split_effect(iv, req.interval);
          const double accept = w + table.value(t + 1, left) + table.value(t + 1, right);
          value = (1.0 - req.p) * keep + req.p * std::max(accept, keep);
        }
        table.at(t, interval_index(n, iv)) = value;
      }
    }
  }
  return table;
}

bool ddp_policy_act(const DdpTable& table, int t, const SlotState& state, bool arrived,
                    const RequestType& request) {
  if (!arrived) return false;
  for (const Interval& seq : maximal_sequences(state)) {
    if (!seq.contains(request.interval)) continue;
    const auto [left, right] = split_effect(seq, request.interval);
    const double accept =
        request.rewards[0] + table.value(t + 1, left) + table.value(t + 1, right);
    return accept >= table.value(t + 1, seq);  // ties accept
  }
  return false;
}

ExactValue exact_online_reject(const Instance& instance, int max_state_bits) {
  if (instance.scenario != Scenario::reject_or_accept)
    fail(Errc::wrong_scenario, "exact_online_reject expects a reject-or-accept instance");
  const int m = instance.resource_count, n = instance.slot_count;
  if (m * n > max_state_bits)
    fail(Errc::too_large, "joint state space 2^" + std::to_string(m * n) + " exceeds cap 2^" +
                              std::to_string(max_state_bits));

  const std::size_t states = std::size_t{1} << (m * n);
  std::vector<double> next(states, 0.0), current(states, 0.0);
  long visited = 0;
  for (int t = instance.horizon; t >= 1; --t) {
    const RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
    const State demand = interval_mask(req.interval);
    for (State s = 0; s < states; ++s) {
      ++visited;
      const double keep = next[s];
      double best = keep;
      for (int j = 0; j < m; ++j) {
        const State resource_bits = (s >> (j * n)) & ((State{1} << n) - 1);
        if ((resource_bits & demand) != demand) continue;
        const State after = s & ~(demand << (j * n));
        best = std::max(best, req.rewards[static_cast<std::size_t>(j)] + next[after]);
      }
      current[s] = (1.0 - req.p) * keep + req.p * best;
    }
    std::swap(next, current);
  }
  return ExactValue{next[states - 1], visited};
}

ExactValue exact_online_choice(const Instance& instance, int max_resources, int max_state_bits) {
  if (instance.scenario != Scenario::choice_based)
    fail(Errc::wrong_scenario, "exact_online_choice expects a choice-based instance");
  const int m = instance.resource_count, n = instance.slot_count;
  if (m > max_resources)
    fail(Errc::too_large, "assortment enumeration capped at M = " + std::to_string(max_resources));
  if (m * n > max_state_bits)
    fail(Errc::too_large, "joint state space 2^" + std::to_string(m * n) + " exceeds cap 2^" +
                              std::to_string(max_state_bits));

  const std::size_t states = std::size_t{1} << (m * n);
  std::vector<double> next(states, 0.0), current(states, 0.0);
  long visited = 0;
  for (int t = instance.horizon; t >= 1; --t) {
    const RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
    const State demand = interval_mask(req.interval);
    for (State s = 0; s < states; ++s) {
      ++visited;
      const double keep = next[s];
      // Resources that can host the demand and have positive attraction; only
      // those are offerable.
      std::uint32_t offerable = 0;
      for (int j = 0; j < m; ++j) {
        const State resource_bits = (s >> (j * n)) & ((State{1} << n) - 1);
        if ((resource_bits & demand) == demand &&
            req.attractions[static_cast<std::size_t>(j)] > 0.0)
          offerable |= std::uint32_t{1} << j;
      }
      double best = keep;  // empty assortment
      for (std::uint32_t assort = offerable; assort != 0; assort = (assort - 1) & offerable) {
        double total = req.outside_attraction;
        for (int j = 0; j < m; ++j)
          if (assort & (std::uint32_t{1} << j)) total += req.attractions[static_cast<std::size_t>(j)];
        double value = req.outside_attraction / total * keep;
        for (int j = 0; j < m; ++j) {
          if (!(assort & (std::uint32_t{1} << j))) continue;
          const State after = s & ~(demand << (j * n));
          value += req.attractions[static_cast<std::size_t>(j)] / total *
                   (req.rewards[static_cast<std::size_t>(j)] + next[after]);
        }
        best = std::max(best, value);
      }
      current[s] = (1.0 - req.p) * keep + req.p * best;
    }
    std::swap(next, current);
  }
  return ExactValue{next[states - 1], visited};
}

}  // namespace consecrm
