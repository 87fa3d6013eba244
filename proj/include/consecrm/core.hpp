#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "consecrm/errors.hpp"

namespace consecrm {

// Closed slot interval [lo, hi], 1-based. lo > hi encodes the empty interval,
// which is a first-class value (split fragments may be empty and their DP
// value is zero by the boundary conditions).
struct Interval {
  int lo = 1;
  int hi = 0;

  static Interval empty() { return Interval{1, 0}; }
  bool is_empty() const { return lo > hi; }
  int length() const { return is_empty() ? 0 : hi - lo + 1; }

  // other subset-of-or-equal this; the empty interval is contained in anything.
  bool contains(const Interval& other) const {
    if (other.is_empty()) return true;
    return !is_empty() && lo <= other.lo && other.hi <= hi;
  }

  friend bool operator==(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) return a.is_empty() && b.is_empty();
    return a.lo == b.lo && a.hi == b.hi;
  }

  std::string to_string() const;
};

// Lexicographic index of the non-empty intervals [a,b], 1 <= a <= b <= N.
inline int interval_count(int slot_count) { return slot_count * (slot_count + 1) / 2; }

inline int interval_index(int slot_count, const Interval& iv) {
  const int a = iv.lo, b = iv.hi;
  return (a - 1) * slot_count - (a - 1) * (a - 2) / 2 + (b - a);
}

Interval interval_at(int slot_count, int index);

enum class Scenario { reject_or_accept, choice_based };

const char* to_string(Scenario s);

// One period's request type. `attractions`/`outside_attraction` are only
// meaningful in the choice-based scenario; reject-or-accept instances carry
// an empty attraction vector.
struct RequestType {
  double p = 0.0;
  Interval interval;
  std::vector<double> rewards;      // w_tj, one per resource
  std::vector<double> attractions;  // v_tj, one per resource (choice only)
  double outside_attraction = 0.0;  // v_t0 (choice only)

  friend bool operator==(const RequestType&, const RequestType&) = default;
};

struct Instance {
  Scenario scenario = Scenario::reject_or_accept;
  int resource_count = 0;  // M
  int slot_count = 0;      // N
  int horizon = 0;         // T
  std::vector<RequestType> requests;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// Availability bit vector of one resource. Slot indices are 1-based at the
// interface; positions 0 and N+1 act as unavailable sentinels.
class SlotState {
 public:
  SlotState() = default;
  explicit SlotState(int slot_count, bool available = true)
      : bits_(static_cast<std::size_t>(slot_count), available ? 1 : 0) {}

  // Parses strings like "110110" (leftmost char = slot 1).
  static SlotState from_string(const std::string& bits);

  int slot_count() const { return static_cast<int>(bits_.size()); }
  bool available(int slot) const {
    return slot >= 1 && slot <= slot_count() && bits_[static_cast<std::size_t>(slot - 1)] != 0;
  }
  bool contains(const Interval& iv) const;
  int available_count() const;
  bool none_available() const { return available_count() == 0; }

  void set(int slot, bool available) { bits_[static_cast<std::size_t>(slot - 1)] = available ? 1 : 0; }

  std::string to_string() const;

  friend bool operator==(const SlotState&, const SlotState&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Slot-wise comparison: a <= b iff every slot available in a is available in b.
bool dominated_by(const SlotState& a, const SlotState& b);

// The maximal sequences of `state`: runs of available slots bounded by
// unavailable slots (or the boundary) on both sides, sorted by lo.
std::vector<Interval> maximal_sequences(const SlotState& state);

// Marks every slot of `iv` unavailable. Throws OccupiedSlot if any slot of
// `iv` is already unavailable (an infeasible allocation is a policy bug).
SlotState allocate(const SlotState& state, const Interval& iv);

// Fragments left over when `iv` is carved out of the containing sequence
// `seq`: ([seq.lo, iv.lo-1], [iv.hi+1, seq.hi]). Throws NotContained.
std::pair<Interval, Interval> split_effect(const Interval& seq, const Interval& iv);

// Every invariant violation, each with a path-like locator. Empty means ok.
std::vector<std::string> validate(const Instance& instance);

// Embeds a reject-or-accept instance into the choice scenario: unit
// attractions and a zero outside option make the customer's pick
// deterministic for singleton assortments. Throws WrongScenario.
Instance reduce_to_choice(const Instance& instance);

}  // namespace consecrm
