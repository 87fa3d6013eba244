#include "consecrm/core.hpp"

#include <cmath>
#include <sstream>

namespace consecrm {

std::string Interval::to_string() const {
  if (is_empty()) return "[]";
  return "[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
}

Interval interval_at(int slot_count, int index) {
  for (int a = 1; a <= slot_count; ++a) {
    const int block = slot_count - a + 1;
    if (index < block) return Interval{a, a + index};
    index -= block;
  }
  fail(Errc::bad_input, "interval index out of range");
}

const char* to_string(Scenario s) {
  return s == Scenario::reject_or_accept ? "reject" : "choice";
}

SlotState SlotState::from_string(const std::string& bits) {
  SlotState state(static_cast<int>(bits.size()), false);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') fail(Errc::bad_input, "slot state strings are over {0,1}");
    state.bits_[i] = bits[i] == '1' ? 1 : 0;
  }
  return state;
}

bool SlotState::contains(const Interval& iv) const {
  if (iv.is_empty()) return true;
  if (iv.lo < 1 || iv.hi > slot_count()) return false;
  for (int s = iv.lo; s <= iv.hi; ++s)
    if (!available(s)) return false;
  return true;
}

int SlotState::available_count() const {
  int n = 0;
  for (auto b : bits_) n += b != 0;
  return n;
}

std::string SlotState::to_string() const {
  std::string out(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out[i] = '1';
  return out;
}

bool dominated_by(const SlotState& a, const SlotState& b) {
  if (a.slot_count() != b.slot_count()) return false;
  for (int s = 1; s <= a.slot_count(); ++s)
    if (a.available(s) && !b.available(s)) return false;
  return true;
}

std::vector<Interval> maximal_sequences(const SlotState& state) {
  std::vector<Interval> runs;
  const int n = state.slot_count();
  int run_start = 0;
  for (int s = 1; s <= n + 1; ++s) {
    const bool avail = s <= n && state.available(s);
    if (avail && run_start == 0) run_start = s;
    if (!avail && run_start != 0) {
      runs.push_back(Interval{run_start, s - 1});
      run_start = 0;
    }
  }
  return runs;
}

SlotState allocate(const SlotState& state, const Interval& iv) {
  if (iv.is_empty()) return state;
  if (iv.lo < 1 || iv.hi > state.slot_count())
    fail(Errc::occupied_slot, "interval " + iv.to_string() + " outside [1," +
                                  std::to_string(state.slot_count()) + "]");
  SlotState next = state;
  for (int s = iv.lo; s <= iv.hi; ++s) {
    if (!state.available(s))
      fail(Errc::occupied_slot, "slot " + std::to_string(s) + " already unavailable in " +
                                    state.to_string());
    next.set(s, false);
  }
  return next;
}

std::pair<Interval, Interval> split_effect(const Interval& seq, const Interval& iv) {
  if (iv.is_empty() || !seq.contains(iv))
    fail(Errc::not_contained, iv.to_string() + " not contained in " + seq.to_string());
  return {Interval{seq.lo, iv.lo - 1}, Interval{iv.hi + 1, seq.hi}};
}

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

std::vector<std::string> validate(const Instance& instance) {
  std::vector<std::string> violations;
  auto note = [&violations](const std::string& where, const std::string& what) {
    violations.push_back(where + ": " + what);
  };

  if (instance.resource_count < 1) note("M", "resource count must be >= 1");
  if (instance.slot_count < 1) note("N", "slot count must be >= 1");
  if (instance.horizon < 0) note("T", "horizon must be >= 0");
  if (static_cast<int>(instance.requests.size()) != instance.horizon)
    note("requests", "length " + std::to_string(instance.requests.size()) +
                         " does not match T=" + std::to_string(instance.horizon));

  const bool choice = instance.scenario == Scenario::choice_based;
  for (std::size_t i = 0; i < instance.requests.size(); ++i) {
    const RequestType& r = instance.requests[i];
    const std::string at = "requests[" + std::to_string(i) + "]";
    if (!(std::isfinite(r.p) && r.p >= 0.0 && r.p <= 1.0))
      note(at + ".p", "arrival probability " + std::to_string(r.p) + " outside [0,1]");
    if (r.interval.is_empty())
      note(at + ".interval", "demand interval must be non-empty");
    else if (r.interval.lo < 1 || r.interval.hi > instance.slot_count ||
             r.interval.lo > r.interval.hi)
      note(at + ".interval", "demand " + r.interval.to_string() + " not within [1," +
                                 std::to_string(instance.slot_count) + "]");
    if (static_cast<int>(r.rewards.size()) != instance.resource_count)
      note(at + ".w", "expected " + std::to_string(instance.resource_count) + " rewards");
    for (std::size_t j = 0; j < r.rewards.size(); ++j)
      if (!finite_nonneg(r.rewards[j]))
        note(at + ".w[" + std::to_string(j) + "]", "rewards must be finite and >= 0");
    if (choice) {
      if (static_cast<int>(r.attractions.size()) != instance.resource_count)
        note(at + ".v", "expected " + std::to_string(instance.resource_count) + " attractions");
      for (std::size_t j = 0; j < r.attractions.size(); ++j)
        if (!finite_nonneg(r.attractions[j]))
          note(at + ".v[" + std::to_string(j) + "]", "attractions must be finite and >= 0");
      if (!finite_nonneg(r.outside_attraction))
        note(at + ".v0", "outside attraction must be finite and >= 0");
    } else {
      if (!r.attractions.empty() || r.outside_attraction != 0.0)
        note(at, "reject-or-accept requests carry no attraction fields");
    }
  }
  return violations;
}

Instance reduce_to_choice(const Instance& instance) {
  if (instance.scenario != Scenario::reject_or_accept)
    fail(Errc::wrong_scenario, "reduce_to_choice expects a reject-or-accept instance");
  Instance reduced = instance;
  reduced.scenario = Scenario::choice_based;
  for (RequestType& r : reduced.requests) {
    r.attractions.assign(static_cast<std::size_t>(instance.resource_count), 1.0);
    r.outside_attraction = 0.0;
  }
  return reduced;
}

}  // namespace consecrm
