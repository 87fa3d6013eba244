#pragma once

#include <vector>

#include "consecrm/core.hpp"

namespace consecrm {

struct ExactValue {
  double value = 0.0;
  long states_visited = 0;  // number of (period, state) cells evaluated
};

// Decomposed DP table: F_t([a,b]) for t in [1, T+1] and every non-empty
// interval; the empty interval and the t = T+1 row are zero by definition.
class DdpTable {
 public:
  DdpTable(int slot_count, int horizon)
      : slot_count_(slot_count),
        horizon_(horizon),
        values_(static_cast<std::size_t>(horizon + 1) *
                    static_cast<std::size_t>(interval_count(slot_count)),
                0.0) {}

  int slot_count() const { return slot_count_; }
  int horizon() const { return horizon_; }

  double value(int t, const Interval& iv) const {
    if (iv.is_empty() || t > horizon_) return 0.0;
    return values_[cell(t, interval_index(slot_count_, iv))];
  }

  double& at(int t, int interval_idx) { return values_[cell(t, interval_idx)]; }

 private:
  std::size_t cell(int t, int interval_idx) const {
    return static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(interval_count(slot_count_)) +
           static_cast<std::size_t>(interval_idx);
  }

  int slot_count_;
  int horizon_;
  std::vector<double> values_;
};

// Backward recursion over all 2^N availability states of the single resource.
// Throws WrongShape unless M = 1 and the scenario is reject-or-accept;
// TooLarge if N exceeds `max_slots`.
ExactValue naive_dp(const Instance& instance, int max_slots = 16);

// Full table of the same recursion: result[t-1][state] for t in [1, T+1],
// states as slot bitmasks (bit i-1 = slot i available).
std::vector<std::vector<double>> naive_dp_table(const Instance& instance, int max_slots = 16);

// O(T N^2) decomposed recursion over maximal-sequence intervals.
DdpTable ddp(const Instance& instance);

// Optimal single-resource action: accept iff the request arrived, fits inside
// a maximal sequence [a,b] of `state`, and the reward plus the split
// continuation is at least the keep continuation (ties accept).
bool ddp_policy_act(const DdpTable& table, int t, const SlotState& state, bool arrived,
                    const RequestType& request);

// Exact online optimum by backward induction over joint states (2^{M N}).
// Throws TooLarge when M*N exceeds `max_state_bits`.
ExactValue exact_online_reject(const Instance& instance, int max_state_bits = 12);

// Exact online optimum for the choice-based scenario: each period's action is
// an assortment of feasible resources with positive attraction; transitions
// follow basic-attraction-model choice probabilities.
ExactValue exact_online_choice(const Instance& instance, int max_resources = 4,
                               int max_state_bits = 12);

}  // namespace consecrm
