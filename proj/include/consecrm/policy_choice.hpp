#pragma once

#include <functional>
#include <vector>

#include "consecrm/policy_reject.hpp"

namespace consecrm {

// Inputs of the coupling sampler. q drives the unconditional inclusion
// probabilities, q_prime is the distribution the realized choice was drawn
// from, and `chosen` is that realized choice (0 = outside / no arrival).
struct CouplerInput {
  std::vector<double> q;
  std::vector<double> q_prime;
  int chosen = 0;
};

// Condition linking q and q_prime under which the coupler's output is
// independent Bernoulli(q): q'_j / (1 - sum_{j'>j} q'_{j'}) <= q_j for all j.
bool coupler_condition_holds(const std::vector<double>& q, const std::vector<double>& q_prime,
                             double tol = 1e-9);

// Markov-chain coupling sampler: walks resources M down to 1, always includes
// the realized choice, and randomizes the rest so that when `chosen` is drawn
// from the q'-induced distribution the output is independent Bernoulli(q).
// `unif_for_resource(j)` supplies one uniform per resource. Throws
// ZeroDenominator only when a branch actually needs a degenerate z_j.
std::vector<int> random_coupler(const CouplerInput& input,
                                const std::function<double(int)>& unif_for_resource);

// Exact output distribution of random_coupler with the choice drawn from the
// q'-induced distribution, as a vector over subset bitmasks (bit j-1 =
// resource j included). Throws TooLarge for M > 12.
std::vector<double> coupler_exact_distribution(const std::vector<double>& q,
                                               const std::vector<double>& q_prime);

// Each proposer kept independently with probability gamma. Throws BadGamma.
std::vector<int> build_assortment(const std::vector<int>& proposals, double gamma,
                                  const std::function<double(int)>& unif_for_resource);

// Basic-attraction-model draw over assortment + outside option; returns the
// chosen resource or 0. `uniform_draw` is a single uniform in [0,1). Throws
// ZeroAttraction if a zero-attraction resource was offered.
int simulate_choice(const std::vector<int>& assortment, const RequestType& request, bool arrived,
                    double uniform_draw);

struct ChoiceStepOutcome {
  std::vector<int> proposals;   // P
  std::vector<int> assortment;  // S, subset of P
  std::vector<int> update_set;  // Q
  int chosen = 0;               // j*, 0 = outside
  double revenue = 0.0;
};

// Assortment policy guided by the sales-based fluid solution; gamma defaults
// to 1/4 (the proof bound gamma(1-2 gamma) peaks there).
class ChoicePolicy {
 public:
  ChoicePolicy(const Instance& instance, const FluidSolution& fluid, double gamma = 0.25);

  std::vector<int> proposal_stage_choice(int t, const EpisodeRng& rng);
  ChoiceStepOutcome choice_step(int t, bool arrived, const EpisodeRng& rng);

  const VirtualLedger& ledger() const { return ledger_; }
  ViolationCounters& counters() { return counters_; }
  int period() const { return ledger_.period(); }
  double gamma() const { return gamma_; }

  double proposal_probability(int j, int t) const;

 private:
  const Instance& instance_;
  const FluidSolution& fluid_;
  double gamma_;
  VirtualLedger ledger_;
  mutable ViolationCounters counters_;
};

}  // namespace consecrm
