#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "consecrm/fluid.hpp"
#include "consecrm/oracle.hpp"
#include "consecrm/policy_choice.hpp"

namespace consecrm {

enum class PolicyKind { reject, choice, ddp };

const char* to_string(PolicyKind k);

// Everything a single episode needs. `fluid` drives the reject/choice
// policies; `table` (plus the naive DP value as the target) drives the
// single-resource optimal policy.
struct EvalContext {
  const Instance* instance = nullptr;
  PolicyKind kind = PolicyKind::reject;
  const FluidSolution* fluid = nullptr;
  const DdpTable* table = nullptr;
  double gamma = 0.25;
};

struct TraceStep {
  int t = 0;
  bool arrived = false;
  std::vector<int> proposals;
  std::vector<int> assortment;  // choice only
  std::vector<int> update_set;  // choice only
  int j_star = 0;
  bool allocated = false;
  double revenue = 0.0;
};

// Per-(resource, period, interval) indicator counts of the event
// "[a,b] is a maximal sequence of the virtual status at the start of t".
struct MarginalStats {
  int resource_count = 0, slot_count = 0, horizon = 0;
  long episodes = 0;
  std::vector<long> counts;

  void init(int m, int n, int t);
  std::size_t cell(int j, int t, int interval_idx) const {
    return (static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(horizon) +
            static_cast<std::size_t>(t - 1)) *
               static_cast<std::size_t>(interval_count(slot_count)) +
           static_cast<std::size_t>(interval_idx);
  }
};

// Joint counts for every unordered resource pair, for the independence gate.
struct PairStats {
  int resource_count = 0, slot_count = 0, horizon = 0;
  long episodes = 0;
  std::vector<long> joint;  // (pair, t, idx_a, idx_b)

  void init(int m, int n, int t);
  std::size_t cell(int pair, int t, int idx_a, int idx_b) const {
    const std::size_t k = static_cast<std::size_t>(interval_count(slot_count));
    return ((static_cast<std::size_t>(pair) * static_cast<std::size_t>(horizon) +
             static_cast<std::size_t>(t - 1)) *
                k +
            static_cast<std::size_t>(idx_a)) *
               k +
           static_cast<std::size_t>(idx_b);
  }
};

struct EpisodeOutput {
  double revenue = 0.0;
  ViolationCounters violations;
};

// Samples arrivals, drives the policy over the horizon, asserts the ledger
// invariants after every step. Breaches are recorded, not thrown, so the
// episode completes for accounting.
EpisodeOutput run_episode(const EvalContext& context, std::uint64_t seed,
                          MarginalStats* marginals = nullptr, PairStats* pairs = nullptr,
                          std::vector<TraceStep>* trace = nullptr);

struct MarginalCell {
  int j = 0, t = 0, interval_idx = 0;
  Interval interval;
  double empirical = 0.0, fluid_x = 0.0, z = 0.0;
};

struct SimReport {
  PolicyKind kind = PolicyKind::reject;
  long episodes = 0;
  double mean_revenue = 0.0;
  double std_error = 0.0;
  double lp_bound = 0.0;      // fluid objective; DP optimum for the ddp policy
  double ratio_target = 0.0;  // 1-1/e, 0.125, or 1.0 for ddp
  double ratio_lhs = 0.0;     // mean - 3 std errors
  bool two_sided = false;     // ddp compares |mean - bound| <= 3 SE instead
  bool verdict = false;
  ViolationCounters violations;
  std::vector<MarginalCell> marginal_table;
  double gamma = 0.25;
  std::uint64_t base_seed = 0;
};

// Solves the matching fluid model (or DP) once, runs `episodes` independent
// episodes, aggregates in fixed episode order. Throws BadInput for episodes
// < 100 and LpNotOptimal when the fluid solve fails.
SimReport evaluate(const Instance& instance, PolicyKind kind, long episodes,
                   std::uint64_t base_seed, double gamma = 0.25);

struct MarginalGateResult {
  bool pass = false;
  long cells = 0;         // cells with fluid x in (0,1)
  long failed = 0;        // cells beyond 4 sigma
  long exact_failures = 0;  // x in {0,1} cells that must match exactly
  std::vector<MarginalCell> worst;  // 10 worst |z|
};

// 4-sigma per-cell gate at a 99% pass rate over cells with x in (0,1);
// cells with x exactly 0 or 1 must match exactly. Requires episodes >= 1e4.
MarginalGateResult marginal_gate(const SimReport& report);

struct IndependenceGateResult {
  bool pass = false;
  long cells = 0;
  long failed = 0;
  double worst_deviation_se = 0.0;  // |joint - product| in pooled SEs
  long episodes = 0;
  ViolationCounters violations;
};

// Pairwise joint-vs-product check over all resource pairs and interval pairs
// with interior marginals, within 4 pooled standard errors.
IndependenceGateResult independence_gate(const Instance& instance, PolicyKind kind, long episodes,
                                         std::uint64_t base_seed, double gamma = 0.25);

std::string report_to_json_string(const SimReport& report, int indent = 2);
std::string marginal_table_csv(const SimReport& report);

}  // namespace consecrm
