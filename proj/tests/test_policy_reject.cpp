#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "consecrm/generate.hpp"
#include "consecrm/policy_reject.hpp"

using namespace consecrm;

namespace {

Instance make_instance(std::uint64_t seed, int m, int n, int t) {
  return generate(seed, GenSpec::fixed(Scenario::reject_or_accept, m, n, t));
}

}  // namespace

TEST_CASE("init: ledger starts fully available on both sides") {
  const Instance instance = make_instance(1, 3, 4, 5);
  const FluidSolution fluid = solve_fluid(instance);
  RejectPolicy policy(instance, fluid);
  CHECK(policy.period() == 1);
  CHECK(policy.ledger().resource_count() == 3);
  for (int j = 1; j <= 3; ++j) {
    CHECK(policy.ledger().virtual_status(j).to_string() == "1111");
    CHECK(policy.ledger().real_status(j).to_string() == "1111");
  }

  // T = 0: construction succeeds, no steps possible.
  Instance empty = instance;
  empty.horizon = 0;
  empty.requests.clear();
  const FluidSolution empty_fluid = solve_fluid(empty);
  RejectPolicy idle(empty, empty_fluid);
  CHECK(idle.period() == 1);

  // Mismatched fluid dimensions are rejected.
  const Instance other = make_instance(2, 2, 4, 5);
  CHECK_THROWS_AS(RejectPolicy(other, fluid), Error);
}

TEST_CASE("degenerate and saturated proposal ratios") {
  Instance instance;
  instance.scenario = Scenario::reject_or_accept;
  instance.resource_count = 1;
  instance.slot_count = 1;
  instance.horizon = 1;
  instance.requests = {RequestType{1.0, {1, 1}, {5.0}, {}, 0.0}};
  const FluidSolution fluid = solve_fluid(instance);
  RejectPolicy policy(instance, fluid);
  // Optimal fluid puts y = x p on the full sequence: proposal probability 1.
  CHECK(policy.proposal_probability(1, 1) == 1.0);
  const EpisodeRng rng{12345};
  CHECK(policy.proposal_stage(1, rng) == std::vector<int>{1});

  // y = 0 everywhere (zero rewards make any optimum y-free in revenue terms):
  FluidSolution zeroed = fluid;
  std::fill(zeroed.y.begin(), zeroed.y.end(), 0.0);
  RejectPolicy never(instance, zeroed);
  CHECK(never.proposal_probability(1, 1) == 0.0);
  CHECK(never.proposal_stage(1, rng).empty());
}

TEST_CASE("allocation stage follows the printed rules") {
  Instance instance;
  instance.scenario = Scenario::reject_or_accept;
  instance.resource_count = 2;
  instance.slot_count = 3;
  instance.horizon = 1;
  instance.requests = {RequestType{1.0, {2, 3}, {7.0, 7.0}, {}, 0.0}};
  const FluidSolution fluid = solve_fluid(instance);
  const EpisodeRng rng{99};

  SUBCASE("no proposals means no allocation") {
    RejectPolicy policy(instance, fluid);
    const StepOutcome outcome = policy.allocation_stage(1, {}, true, rng);
    CHECK(outcome.chosen == 0);
    CHECK(!outcome.allocated);
    CHECK(outcome.revenue == 0.0);
    CHECK(policy.ledger().virtual_status(1).to_string() == "111");
    CHECK(policy.ledger().real_status(2).to_string() == "111");
    CHECK(policy.period() == 2);
  }

  SUBCASE("single proposer serves the arrival") {
    RejectPolicy policy(instance, fluid);
    const StepOutcome outcome = policy.allocation_stage(1, {2}, true, rng);
    CHECK(outcome.chosen == 2);
    CHECK(outcome.allocated);
    CHECK(outcome.revenue == 7.0);
    CHECK(policy.ledger().virtual_status(2).to_string() == "100");
    CHECK(policy.ledger().real_status(2).to_string() == "100");
    CHECK(policy.ledger().real_status(1).to_string() == "111");
  }

  SUBCASE("reward ties break toward the lowest index") {
    RejectPolicy policy(instance, fluid);
    const StepOutcome outcome = policy.allocation_stage(1, {1, 2}, true, rng);
    CHECK(outcome.chosen == 1);
  }

  SUBCASE("no arrival: selected resource keeps its virtual status") {
    RejectPolicy policy(instance, fluid);
    const StepOutcome outcome = policy.allocation_stage(1, {1}, false, rng);
    CHECK(!outcome.allocated);
    CHECK(outcome.revenue == 0.0);
    CHECK(policy.ledger().virtual_status(1).to_string() == "111");
  }
}

TEST_CASE("proposal marginal matches the fluid mass, by Monte Carlo") {
  const Instance instance = make_instance(7, 2, 3, 3);
  const FluidSolution fluid = solve_fluid(instance);
  const long episodes = 40'000;

  std::vector<std::vector<long>> proposed(4, std::vector<long>(3, 0));  // [t][j-1]
  for (long ep = 0; ep < episodes; ++ep) {
    RejectPolicy policy(instance, fluid);
    const EpisodeRng rng{episode_seed(555, ep)};
    for (int t = 1; t <= instance.horizon; ++t) {
      const auto proposals = policy.proposal_stage(t, rng);
      for (int j : proposals) ++proposed[static_cast<std::size_t>(t)][static_cast<std::size_t>(j - 1)];
      const bool arrived =
          rng.uniform(t, 0, Draw::arrival) < instance.requests[static_cast<std::size_t>(t - 1)].p;
      policy.allocation_stage(t, proposals, arrived, rng);
    }
    CHECK(policy.counters().clean());
  }

  const int k = interval_count(instance.slot_count);
  for (int t = 1; t <= instance.horizon; ++t) {
    const double p = instance.requests[static_cast<std::size_t>(t - 1)].p;
    for (int j = 1; j <= instance.resource_count; ++j) {
      double mass = 0.0;
      for (int idx = 0; idx < k; ++idx) mass += fluid.y[fluid.cell(j, t, idx)];
      const double expected = mass / p;
      const double freq =
          static_cast<double>(proposed[static_cast<std::size_t>(t)][static_cast<std::size_t>(j - 1)]) /
          static_cast<double>(episodes);
      const double se = std::sqrt(std::max(expected * (1.0 - expected), 1e-12) /
                                  static_cast<double>(episodes));
      CHECK(std::abs(freq - expected) <= 4.0 * se + 1e-9);
    }
  }
}

TEST_CASE("virtual stays below real across random episodes") {
  const Instance instance = make_instance(31, 3, 4, 8);
  const FluidSolution fluid = solve_fluid(instance);
  for (long ep = 0; ep < 2'000; ++ep) {
    RejectPolicy policy(instance, fluid);
    const EpisodeRng rng{episode_seed(777, ep)};
    for (int t = 1; t <= instance.horizon; ++t) {
      const auto proposals = policy.proposal_stage(t, rng);
      const bool arrived =
          rng.uniform(t, 0, Draw::arrival) < instance.requests[static_cast<std::size_t>(t - 1)].p;
      policy.allocation_stage(t, proposals, arrived, rng);
      CHECK(policy.ledger().lower_bound_holds());
    }
    CHECK(policy.counters().lower_bound_breaches == 0);
    CHECK(policy.counters().occupied_slot_errors == 0);
  }
}

TEST_CASE("episodes replay identically for equal seeds") {
  const Instance instance = make_instance(13, 2, 4, 6);
  const FluidSolution fluid = solve_fluid(instance);
  auto run = [&](std::uint64_t seed) {
    std::vector<StepOutcome> outcomes;
    RejectPolicy policy(instance, fluid);
    const EpisodeRng rng{seed};
    for (int t = 1; t <= instance.horizon; ++t) {
      const auto proposals = policy.proposal_stage(t, rng);
      const bool arrived =
          rng.uniform(t, 0, Draw::arrival) < instance.requests[static_cast<std::size_t>(t - 1)].p;
      outcomes.push_back(policy.allocation_stage(t, proposals, arrived, rng));
    }
    return outcomes;
  };
  const auto a = run(4242), b = run(4242), c = run(4243);
  REQUIRE(a.size() == b.size());
  bool all_equal = true, any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    all_equal = all_equal && a[i].proposals == b[i].proposals && a[i].chosen == b[i].chosen &&
                a[i].revenue == b[i].revenue;
    any_diff = any_diff || a[i].proposals != c[i].proposals || a[i].chosen != c[i].chosen;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}
