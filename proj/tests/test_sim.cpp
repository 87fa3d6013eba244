#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "consecrm/generate.hpp"
#include "consecrm/sim.hpp"

using namespace consecrm;

TEST_CASE("run_episode basics") {
  // All arrival probabilities zero: nothing is ever allocated.
  Instance silent = generate(1, GenSpec::fixed(Scenario::reject_or_accept, 2, 3, 4));
  for (auto& req : silent.requests) req.p = 0.0;
  const FluidSolution silent_fluid = solve_fluid(silent);
  EvalContext context;
  context.instance = &silent;
  context.kind = PolicyKind::reject;
  context.fluid = &silent_fluid;
  for (long ep = 0; ep < 50; ++ep)
    CHECK(run_episode(context, episode_seed(5, ep)).revenue == 0.0);

  // Deterministic single-period accept: revenue equals the reward exactly.
  Instance sure;
  sure.scenario = Scenario::reject_or_accept;
  sure.resource_count = 1;
  sure.slot_count = 2;
  sure.horizon = 1;
  sure.requests = {RequestType{1.0, {1, 2}, {6.5}, {}, 0.0}};
  const FluidSolution sure_fluid = solve_fluid(sure);
  EvalContext sure_context;
  sure_context.instance = &sure;
  sure_context.kind = PolicyKind::reject;
  sure_context.fluid = &sure_fluid;
  CHECK(run_episode(sure_context, episode_seed(9, 0)).revenue == 6.5);

  // Identical (instance, seed) pairs produce identical traces.
  const Instance instance = generate(44, GenSpec::fixed(Scenario::choice_based, 2, 3, 5));
  const FluidSolution fluid = solve_fluid(instance);
  EvalContext choice_context;
  choice_context.instance = &instance;
  choice_context.kind = PolicyKind::choice;
  choice_context.fluid = &fluid;
  std::vector<TraceStep> trace_a, trace_b;
  run_episode(choice_context, 777, nullptr, nullptr, &trace_a);
  run_episode(choice_context, 777, nullptr, nullptr, &trace_b);
  REQUIRE(trace_a.size() == trace_b.size());
  for (std::size_t i = 0; i < trace_a.size(); ++i) {
    CHECK(trace_a[i].arrived == trace_b[i].arrived);
    CHECK(trace_a[i].proposals == trace_b[i].proposals);
    CHECK(trace_a[i].assortment == trace_b[i].assortment);
    CHECK(trace_a[i].update_set == trace_b[i].update_set);
    CHECK(trace_a[i].j_star == trace_b[i].j_star);
    CHECK(trace_a[i].revenue == trace_b[i].revenue);
  }
}

TEST_CASE("evaluate sanity and reproducibility") {
  const Instance instance = generate(10, GenSpec::fixed(Scenario::reject_or_accept, 2, 3, 5));
  CHECK_THROWS_AS(evaluate(instance, PolicyKind::reject, 50, 1), Error);

  const SimReport report = evaluate(instance, PolicyKind::reject, 2'000, 33);
  double bound = 0.0;
  for (const RequestType& req : instance.requests) {
    double best = 0.0;
    for (double w : req.rewards) best = std::max(best, w);
    bound += req.p * best;
  }
  CHECK(report.mean_revenue >= 0.0);
  CHECK(report.mean_revenue <= bound + 1e-9);
  CHECK(report.violations.clean());
  CHECK(report.std_error > 0.0);

  const SimReport again = evaluate(instance, PolicyKind::reject, 2'000, 33);
  CHECK(report_to_json_string(report) == report_to_json_string(again));
}

TEST_CASE("ratio verdicts on small runs") {
  const Instance reject = generate(21, GenSpec::fixed(Scenario::reject_or_accept, 3, 4, 8));
  const SimReport r = evaluate(reject, PolicyKind::reject, 4'000, 7);
  CHECK(r.ratio_target == doctest::Approx(1.0 - 1.0 / std::exp(1.0)));
  CHECK(r.ratio_lhs == doctest::Approx(r.mean_revenue - 3.0 * r.std_error));
  CHECK(r.verdict);

  const Instance choice = generate(22, GenSpec::fixed(Scenario::choice_based, 3, 3, 6));
  const SimReport c = evaluate(choice, PolicyKind::choice, 4'000, 7);
  CHECK(c.ratio_target == 0.125);
  CHECK(c.verdict);
}

TEST_CASE("ddp policy simulates to the DP optimum") {
  const Instance instance = generate(30, GenSpec::fixed(Scenario::reject_or_accept, 1, 4, 6));
  const SimReport report = evaluate(instance, PolicyKind::ddp, 10'000, 11);
  CHECK(report.two_sided);
  CHECK(std::abs(report.mean_revenue - report.lp_bound) <= 3.0 * report.std_error + 1e-9);
  CHECK(report.verdict);
}

TEST_CASE("marginal gate on a designated-size run") {
  const Instance instance = generate(101, GenSpec::fixed(Scenario::reject_or_accept, 2, 3, 4));
  const SimReport report = evaluate(instance, PolicyKind::reject, 20'000, 99);
  const MarginalGateResult gate = marginal_gate(report);
  CHECK(gate.pass);
  CHECK(gate.exact_failures == 0);
  CHECK(gate.worst.size() <= 10);

  // Period-1 cells: the full interval has empirical frequency exactly 1.
  for (const MarginalCell& cell : report.marginal_table)
    if (cell.t == 1)
      CHECK(cell.empirical == (cell.interval == Interval{1, 3} ? 1.0 : 0.0));

  SimReport small = report;
  small.episodes = 500;
  CHECK_THROWS_AS(marginal_gate(small), Error);
}

TEST_CASE("independence gate on a tiny instance") {
  const Instance instance = generate(301, GenSpec::fixed(Scenario::reject_or_accept, 2, 3, 4));
  const IndependenceGateResult gate = independence_gate(instance, PolicyKind::reject, 20'000, 404);
  CHECK(gate.cells > 0);
  CHECK(gate.pass);
}

TEST_CASE("csv marginal table shape") {
  const Instance instance = generate(101, GenSpec::fixed(Scenario::reject_or_accept, 2, 2, 2));
  const SimReport report = evaluate(instance, PolicyKind::reject, 500, 3);
  const std::string csv = marginal_table_csv(report);
  CHECK(csv.rfind("j,t,a,b,empirical,x,z\n", 0) == 0);
  // Header plus one row per (resource, period, interval) cell.
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        1 + 2 * 2 * interval_count(2));
}
