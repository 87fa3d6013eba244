#include "consecrm/policy_reject.hpp"

#include <algorithm>

namespace consecrm {

namespace {

constexpr double kDegenerate = 1e-12;  // states with ~zero fluid mass never propose
constexpr double kClampWarn = 1e-6;

void check_dimensions(const Instance& instance, const FluidSolution& fluid) {
  if (fluid.resource_count != instance.resource_count || fluid.slot_count != instance.slot_count ||
      fluid.horizon != instance.horizon || fluid.scenario != instance.scenario)
    fail(Errc::mismatch, "fluid solution dimensions disagree with the instance");
}

}  // namespace

RejectPolicy::RejectPolicy(const Instance& instance, const FluidSolution& fluid)
    : instance_(instance),
      fluid_(fluid),
      ledger_(instance.resource_count, instance.slot_count) {
  if (instance.scenario != Scenario::reject_or_accept)
    fail(Errc::wrong_scenario, "RejectPolicy drives reject-or-accept instances");
  check_dimensions(instance, fluid);
}

double RejectPolicy::proposal_probability(int j, int t) const {
  const RequestType& req = instance_.requests[static_cast<std::size_t>(t - 1)];
  for (const Interval& seq : maximal_sequences(ledger_.virtual_status(j))) {
    if (!seq.contains(req.interval)) continue;
    const double denom = fluid_.x_at(j, t, seq) * req.p;
    if (denom <= kDegenerate) return 0.0;
    const double ratio = fluid_.y_at(j, t, seq) / denom;
    if (ratio > 1.0 + kClampWarn || ratio < -kClampWarn) counters_.ratio_clamp_warnings++;
    return std::min(1.0, std::max(0.0, ratio));
  }
  return 0.0;  // no containing maximal sequence
}

std::vector<int> RejectPolicy::proposal_stage(int t, const EpisodeRng& rng) {
  if (t != ledger_.period()) fail(Errc::mismatch, "proposal_stage called out of order");
  std::vector<int> proposals;
  for (int j = 1; j <= instance_.resource_count; ++j) {
    const double prob = proposal_probability(j, t);
    if (prob > 0.0 && rng.uniform(t, j, Draw::proposal) < prob) proposals.push_back(j);
  }
  return proposals;
}

StepOutcome RejectPolicy::allocation_stage(int t, const std::vector<int>& proposals, bool arrived,
                                           const EpisodeRng& rng) {
  if (t != ledger_.period()) fail(Errc::mismatch, "allocation_stage called out of order");
  const RequestType& req = instance_.requests[static_cast<std::size_t>(t - 1)];

  StepOutcome outcome;
  outcome.proposals = proposals;
  if (!proposals.empty()) {
    int best = proposals.front();  // ties -> lowest index
    for (int j : proposals)
      if (req.rewards[static_cast<std::size_t>(j - 1)] >
          req.rewards[static_cast<std::size_t>(best - 1)])
        best = j;
    outcome.chosen = best;
  }

  if (outcome.chosen != 0 && arrived) {
    try {
      ledger_.allocate_real(outcome.chosen, req.interval);
      outcome.allocated = true;
      outcome.revenue = req.rewards[static_cast<std::size_t>(outcome.chosen - 1)];
    } catch (const Error& e) {
      if (e.code() != Errc::occupied_slot) throw;
      counters_.occupied_slot_errors++;  // must never fire; keep accounting
    }
    ledger_.downdate_virtual(outcome.chosen, req.interval);
  }
  for (int j : proposals) {
    if (j == outcome.chosen) continue;
    if (rng.uniform(t, j, Draw::downdate) < req.p) ledger_.downdate_virtual(j, req.interval);
  }

  ledger_.advance();
  if (!ledger_.lower_bound_holds()) counters_.lower_bound_breaches++;
  return outcome;
}

}  // namespace consecrm
