#pragma once

#include <optional>
#include <vector>

#include "consecrm/core.hpp"
#include "consecrm/fluid.hpp"
#include "consecrm/rng.hpp"

namespace consecrm {

// Counters for invariant monitoring. A correct run keeps all of these at
// zero; episodes keep running when one fires so the failure is accounted.
struct ViolationCounters {
  long lower_bound_breaches = 0;
  long occupied_slot_errors = 0;
  long coupler_condition_breaches = 0;
  long ratio_clamp_warnings = 0;  // proposal ratio outside [0,1] by more than 1e-6

  void add(const ViolationCounters& other) {
    lower_bound_breaches += other.lower_bound_breaches;
    occupied_slot_errors += other.occupied_slot_errors;
    coupler_condition_breaches += other.coupler_condition_breaches;
    ratio_clamp_warnings += other.ratio_clamp_warnings;
  }
  bool clean() const {
    return lower_bound_breaches == 0 && occupied_slot_errors == 0 &&
           coupler_condition_breaches == 0;
  }
};

// Per-resource virtual statuses maintained by a policy, next to the real
// statuses. Property (i): virtual <= real slot-wise, at all times.
class VirtualLedger {
 public:
  VirtualLedger(int resource_count, int slot_count)
      : virtual_(static_cast<std::size_t>(resource_count), SlotState(slot_count, true)),
        real_(static_cast<std::size_t>(resource_count), SlotState(slot_count, true)) {}

  int resource_count() const { return static_cast<int>(virtual_.size()); }
  const SlotState& virtual_status(int j) const { return virtual_[static_cast<std::size_t>(j - 1)]; }
  const SlotState& real_status(int j) const { return real_[static_cast<std::size_t>(j - 1)]; }
  int period() const { return period_; }
  void advance() { ++period_; }

  void downdate_virtual(int j, const Interval& iv) {
    SlotState& s = virtual_[static_cast<std::size_t>(j - 1)];
    for (int slot = iv.lo; slot <= iv.hi; ++slot) s.set(slot, false);
  }
  // Real allocation keeps allocate()'s OccupiedSlot contract.
  void allocate_real(int j, const Interval& iv) {
    real_[static_cast<std::size_t>(j - 1)] = allocate(real_[static_cast<std::size_t>(j - 1)], iv);
  }

  bool lower_bound_holds() const {
    for (std::size_t j = 0; j < virtual_.size(); ++j)
      if (!dominated_by(virtual_[j], real_[j])) return false;
    return true;
  }

 private:
  std::vector<SlotState> virtual_;
  std::vector<SlotState> real_;
  int period_ = 1;
};

struct StepOutcome {
  std::vector<int> proposals;  // the set P, ascending
  int chosen = 0;              // j*, 0 = none
  bool allocated = false;
  double revenue = 0.0;
};

// Proposal/allocation policy guided by the fluid solution: each resource
// whose virtual status can host the request volunteers independently with
// probability y/(x p); the highest-reward proposer serves an arriving
// request, and non-selected proposers shadow the allocation with
// probability p to keep virtual marginals aligned with the fluid x.
class RejectPolicy {
 public:
  RejectPolicy(const Instance& instance, const FluidSolution& fluid);

  std::vector<int> proposal_stage(int t, const EpisodeRng& rng);
  StepOutcome allocation_stage(int t, const std::vector<int>& proposals, bool arrived,
                               const EpisodeRng& rng);

  const VirtualLedger& ledger() const { return ledger_; }
  ViolationCounters& counters() { return counters_; }
  int period() const { return ledger_.period(); }

  // Ratio from the printed proposal rule, with the degenerate-state and
  // clamping conventions applied; exposed for tests.
  double proposal_probability(int j, int t) const;

 private:
  const Instance& instance_;
  const FluidSolution& fluid_;
  VirtualLedger ledger_;
  mutable ViolationCounters counters_;
};

}  // namespace consecrm
