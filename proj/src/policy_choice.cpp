#include "consecrm/policy_choice.hpp"

#include <algorithm>
#include <cmath>

namespace consecrm {

namespace {

constexpr double kDegenerate = 1e-12;
constexpr double kClampWarn = 1e-6;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

bool coupler_condition_holds(const std::vector<double>& q, const std::vector<double>& q_prime,
                             double tol) {
  const int m = static_cast<int>(q.size());
  double suffix = 0.0;  // sum of q'_{j'} for j' > j
  for (int j = m; j >= 1; --j) {
    const double denom = 1.0 - suffix;
    const double qp = q_prime[static_cast<std::size_t>(j - 1)];
    if (denom > kDegenerate && qp / denom > q[static_cast<std::size_t>(j - 1)] + tol) return false;
    if (denom <= kDegenerate && qp > tol) return false;
    suffix += qp;
  }
  return true;
}

std::vector<int> random_coupler(const CouplerInput& input,
                                const std::function<double(int)>& unif_for_resource) {
  const int m = static_cast<int>(input.q.size());
  if (static_cast<int>(input.q_prime.size()) != m)
    fail(Errc::mismatch, "q and q' have different lengths");

  std::vector<int> included;
  double suffix = 0.0;  // sum of q'_{j'} over j' > j, built walking downward
  for (int j = m; j >= 1; --j) {
    const double qj = input.q[static_cast<std::size_t>(j - 1)];
    if (j > input.chosen) {
      // Only this branch evaluates z_j; the other branches never need it, so
      // a degenerate denominator there must not fault legitimate inputs.
      const double denom = 1.0 - suffix;
      if (denom <= kDegenerate)
        fail(Errc::zero_denominator, "residual q' mass at resource " + std::to_string(j) +
                                         " leaves no probability for earlier choices");
      const double z = input.q_prime[static_cast<std::size_t>(j - 1)] / denom;
      if (z >= 1.0 - kDegenerate)
        fail(Errc::zero_denominator, "z = 1 at resource " + std::to_string(j));
      const double prob = clamp01((qj - z) / (1.0 - z));
      if (unif_for_resource(j) < prob) included.push_back(j);
    } else if (j == input.chosen) {
      included.push_back(j);
    } else {
      if (unif_for_resource(j) < qj) included.push_back(j);
    }
    suffix += input.q_prime[static_cast<std::size_t>(j - 1)];
  }
  std::reverse(included.begin(), included.end());
  return included;
}

std::vector<double> coupler_exact_distribution(const std::vector<double>& q,
                                               const std::vector<double>& q_prime) {
  const int m = static_cast<int>(q.size());
  if (m > 12) fail(Errc::too_large, "exact coupler distribution capped at M = 12");
  if (static_cast<int>(q_prime.size()) != m) fail(Errc::mismatch, "q and q' length mismatch");

  double total_prime = 0.0;
  for (double v : q_prime) total_prime += v;

  std::vector<double> dist(std::size_t{1} << m, 0.0);
  // Sum over the realized choice; entries with zero probability under the
  // q'-induced distribution are skipped (their branch terms are undefined).
  for (int chosen = 0; chosen <= m; ++chosen) {
    const double p_choice =
        chosen == 0 ? 1.0 - total_prime : q_prime[static_cast<std::size_t>(chosen - 1)];
    if (p_choice <= 0.0) continue;

    // Inclusion probability of each resource given this choice.
    std::vector<double> incl(static_cast<std::size_t>(m), 0.0);
    double suffix = 0.0;
    for (int j = m; j >= 1; --j) {
      const double qj = q[static_cast<std::size_t>(j - 1)];
      if (j > chosen) {
        const double denom = 1.0 - suffix;
        if (denom <= kDegenerate)
          fail(Errc::zero_denominator, "degenerate residual q' mass in exact distribution");
        const double z = q_prime[static_cast<std::size_t>(j - 1)] / denom;
        if (z >= 1.0 - kDegenerate)
          fail(Errc::zero_denominator, "z = 1 in exact distribution");
        incl[static_cast<std::size_t>(j - 1)] = clamp01((qj - z) / (1.0 - z));
      } else if (j == chosen) {
        incl[static_cast<std::size_t>(j - 1)] = 1.0;
      } else {
        incl[static_cast<std::size_t>(j - 1)] = qj;
      }
      suffix += q_prime[static_cast<std::size_t>(j - 1)];
    }

    for (std::size_t subset = 0; subset < dist.size(); ++subset) {
      double prob = p_choice;
      for (int j = 1; j <= m && prob > 0.0; ++j) {
        const bool in = subset & (std::size_t{1} << (j - 1));
        prob *= in ? incl[static_cast<std::size_t>(j - 1)]
                   : 1.0 - incl[static_cast<std::size_t>(j - 1)];
      }
      dist[subset] += prob;
    }
  }
  return dist;
}

std::vector<int> build_assortment(const std::vector<int>& proposals, double gamma,
                                  const std::function<double(int)>& unif_for_resource) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    fail(Errc::bad_gamma, "gamma = " + std::to_string(gamma) + " outside [0,1]");
  std::vector<int> assortment;
  for (int j : proposals)
    if (unif_for_resource(j) < gamma) assortment.push_back(j);
  return assortment;
}

int simulate_choice(const std::vector<int>& assortment, const RequestType& request, bool arrived,
                    double uniform_draw) {
  if (!arrived || assortment.empty()) return 0;
  double total = request.outside_attraction;
  for (int j : assortment) {
    const double v = request.attractions[static_cast<std::size_t>(j - 1)];
    if (v <= 0.0)
      fail(Errc::zero_attraction, "resource " + std::to_string(j) + " offered with v = 0");
    total += v;
  }
  double cumulative = 0.0;
  for (int j : assortment) {
    cumulative += request.attractions[static_cast<std::size_t>(j - 1)] / total;
    if (uniform_draw < cumulative) return j;
  }
  // With no outside attraction the choice probabilities sum to one; do not
  // let rounding in the cumulative sum leak mass to the outside option.
  if (request.outside_attraction == 0.0) return assortment.back();
  return 0;
}

ChoicePolicy::ChoicePolicy(const Instance& instance, const FluidSolution& fluid, double gamma)
    : instance_(instance),
      fluid_(fluid),
      gamma_(gamma),
      ledger_(instance.resource_count, instance.slot_count) {
  if (instance.scenario != Scenario::choice_based)
    fail(Errc::wrong_scenario, "ChoicePolicy drives choice-based instances");
  if (!(gamma > 0.0 && gamma <= 0.5))
    fail(Errc::bad_gamma, "policy gamma must lie in (0, 1/2]; the guarantee peaks at 1/4");
  if (fluid.resource_count != instance.resource_count || fluid.slot_count != instance.slot_count ||
      fluid.horizon != instance.horizon || fluid.scenario != instance.scenario)
    fail(Errc::mismatch, "fluid solution dimensions disagree with the instance");
}

double ChoicePolicy::proposal_probability(int j, int t) const {
  const RequestType& req = instance_.requests[static_cast<std::size_t>(t - 1)];
  for (const Interval& seq : maximal_sequences(ledger_.virtual_status(j))) {
    if (!seq.contains(req.interval)) continue;
    const double denom = fluid_.x_at(j, t, seq) * req.p;
    if (denom <= kDegenerate) return 0.0;
    const double ratio = (fluid_.y0_at(j, t, seq) + fluid_.y_at(j, t, seq)) / denom;
    if (ratio > 1.0 + kClampWarn || ratio < -kClampWarn) counters_.ratio_clamp_warnings++;
    return clamp01(ratio);
  }
  return 0.0;
}

std::vector<int> ChoicePolicy::proposal_stage_choice(int t, const EpisodeRng& rng) {
  if (t != ledger_.period()) fail(Errc::mismatch, "proposal_stage_choice called out of order");
  std::vector<int> proposals;
  for (int j = 1; j <= instance_.resource_count; ++j) {
    const double prob = proposal_probability(j, t);
    if (prob > 0.0 && rng.uniform(t, j, Draw::proposal) < prob) proposals.push_back(j);
  }
  return proposals;
}

ChoiceStepOutcome ChoicePolicy::choice_step(int t, bool arrived, const EpisodeRng& rng) {
  const RequestType& req = instance_.requests[static_cast<std::size_t>(t - 1)];
  ChoiceStepOutcome outcome;
  outcome.proposals = proposal_stage_choice(t, rng);
  outcome.assortment = build_assortment(outcome.proposals, gamma_, [&](int j) {
    return rng.uniform(t, j, Draw::assortment);
  });
  outcome.chosen =
      simulate_choice(outcome.assortment, req, arrived, rng.uniform(t, 0, Draw::customer));

  CouplerInput input;
  input.q.assign(static_cast<std::size_t>(instance_.resource_count), 0.0);
  input.q_prime.assign(static_cast<std::size_t>(instance_.resource_count), 0.0);
  input.chosen = outcome.chosen;
  for (int j : outcome.proposals) {
    const double v = req.attractions[static_cast<std::size_t>(j - 1)];
    input.q[static_cast<std::size_t>(j - 1)] = req.p * v / (req.outside_attraction + v);
  }
  double offered_total = req.outside_attraction;
  for (int j : outcome.assortment)
    offered_total += req.attractions[static_cast<std::size_t>(j - 1)];
  for (int j : outcome.assortment)
    input.q_prime[static_cast<std::size_t>(j - 1)] =
        req.p * req.attractions[static_cast<std::size_t>(j - 1)] / offered_total;

  if (!coupler_condition_holds(input.q, input.q_prime)) counters_.coupler_condition_breaches++;

  outcome.update_set =
      random_coupler(input, [&](int j) { return rng.uniform(t, j, Draw::coupler); });
  for (int j : outcome.update_set) ledger_.downdate_virtual(j, req.interval);

  if (outcome.chosen != 0) {
    try {
      ledger_.allocate_real(outcome.chosen, req.interval);
      outcome.revenue = req.rewards[static_cast<std::size_t>(outcome.chosen - 1)];
    } catch (const Error& e) {
      if (e.code() != Errc::occupied_slot) throw;
      counters_.occupied_slot_errors++;
    }
  }

  ledger_.advance();
  if (!ledger_.lower_bound_holds()) counters_.lower_bound_breaches++;
  return outcome;
}

}  // namespace consecrm
