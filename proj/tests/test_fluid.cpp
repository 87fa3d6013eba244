#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "consecrm/fluid.hpp"
#include "consecrm/generate.hpp"
#include "consecrm/oracle.hpp"

using namespace consecrm;

namespace {

Instance tiny_reject() {
  Instance instance;
  instance.scenario = Scenario::reject_or_accept;
  instance.resource_count = 1;
  instance.slot_count = 1;
  instance.horizon = 1;
  instance.requests = {RequestType{1.0, {1, 1}, {5.0}, {}, 0.0}};
  return instance;
}

Instance tiny_choice() {
  Instance instance;
  instance.scenario = Scenario::choice_based;
  instance.resource_count = 1;
  instance.slot_count = 1;
  instance.horizon = 1;
  instance.requests = {RequestType{1.0, {1, 1}, {4.0}, {1.0}, 1.0}};
  return instance;
}

}  // namespace

TEST_CASE("variable counts match the printed models exactly") {
  GenSpec spec;
  spec.resource_range = {2, 2};
  spec.slot_range = {3, 3};
  spec.horizon_range = {4, 4};
  const Instance reject = generate(5, spec);
  const int k = interval_count(3);
  CHECK(build_lp(reject).model.var_count() == 2 * 2 * 4 * k);

  spec.scenario = Scenario::choice_based;
  const Instance choice = generate(6, spec);
  CHECK(build_sblp(choice).model.var_count() == 3 * 2 * 4 * k + 4);
}

TEST_CASE("hand-solvable fluid LP") {
  const Instance instance = tiny_reject();
  const FluidModel fm = build_lp(instance);
  const lp::Solution solution = lp::solve(fm.model);
  REQUIRE(solution.status == lp::Status::optimal);
  CHECK(solution.objective == doctest::Approx(5.0).epsilon(1e-9));
  const FluidSolution fs = extract(instance, fm, solution);
  CHECK(fs.x_at(1, 1, Interval{1, 1}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fs.y_at(1, 1, Interval{1, 1}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("hand-solvable sales-based LP") {
  const Instance instance = tiny_choice();
  const FluidSolution fs = solve_fluid(instance);
  CHECK(fs.objective == doctest::Approx(2.0).epsilon(1e-9));
  // Scale forces the offered-outside mass to track the sales mass.
  CHECK(fs.y_at(1, 1, Interval{1, 1}) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(fs.y0_at(1, 1, Interval{1, 1}) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("zero attractions zero the objective") {
  Instance instance = tiny_choice();
  instance.requests[0].attractions = {0.0};
  CHECK(solve_fluid(instance).objective == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("empty horizon gives an empty model") {
  Instance instance = tiny_reject();
  instance.horizon = 0;
  instance.requests.clear();
  const FluidModel fm = build_lp(instance);
  CHECK(fm.model.var_count() == 0);
  const FluidSolution fs = solve_fluid(instance);
  CHECK(fs.objective == 0.0);
  CHECK(fs.y.empty());
}

TEST_CASE("wrong scenario is rejected") {
  CHECK_THROWS_AS(build_lp(tiny_choice()), Error);
  CHECK_THROWS_AS(build_sblp(tiny_reject()), Error);
}

TEST_CASE("extract demands an optimal solution") {
  const Instance instance = tiny_reject();
  const FluidModel fm = build_lp(instance);
  lp::Solution bogus;
  bogus.status = lp::Status::iteration_limit;
  CHECK_THROWS_AS(extract(instance, fm, bogus), Error);
}

TEST_CASE("LP dominates the exact online optimum (reject)") {
  for (std::uint64_t seed = 20; seed < 32; ++seed) {
    GenSpec spec;
    spec.resource_range = {1, 2};
    spec.slot_range = {2, 4};
    spec.horizon_range = {1, 5};
    const Instance instance = generate(seed, spec);
    CHECK(solve_fluid(instance).objective >= exact_online_reject(instance).value - 1e-6);
  }
  // Single resource: LP also dominates the naive DP value.
  for (std::uint64_t seed = 40; seed < 46; ++seed) {
    GenSpec spec;
    spec.resource_range = {1, 1};
    spec.slot_range = {2, 4};
    spec.horizon_range = {1, 5};
    const Instance instance = generate(seed, spec);
    CHECK(solve_fluid(instance).objective >= naive_dp(instance).value - 1e-6);
  }
}

TEST_CASE("SBLP dominates the exact online optimum (choice)") {
  for (std::uint64_t seed = 60; seed < 70; ++seed) {
    GenSpec spec;
    spec.scenario = Scenario::choice_based;
    spec.resource_range = {1, 2};
    spec.slot_range = {2, 3};
    spec.horizon_range = {1, 4};
    const Instance instance = generate(seed, spec);
    CHECK(solve_fluid(instance).objective >= exact_online_choice(instance).value - 1e-6);
  }
}

TEST_CASE("fluid solution invariants") {
  GenSpec spec;
  spec.scenario = Scenario::choice_based;
  spec.resource_range = {2, 2};
  spec.slot_range = {3, 3};
  spec.horizon_range = {4, 4};
  const Instance instance = generate(77, spec);
  const FluidSolution fs = solve_fluid(instance);
  const int k = interval_count(fs.slot_count);

  // Boundary row is exact after extraction.
  for (int j = 1; j <= fs.resource_count; ++j)
    for (int idx = 0; idx < k; ++idx)
      CHECK(fs.x[fs.cell(j, 1, idx)] ==
            (interval_at(fs.slot_count, idx) == Interval{1, 3} ? 1.0 : 0.0));

  // Scale identity within extraction tolerance on every entry.
  for (int j = 1; j <= fs.resource_count; ++j)
    for (int t = 1; t <= fs.horizon; ++t) {
      const RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
      for (int idx = 0; idx < k; ++idx)
        CHECK(std::abs(req.outside_attraction * fs.y[fs.cell(j, t, idx)] -
                       req.attractions[static_cast<std::size_t>(j - 1)] *
                           fs.y0[fs.cell(j, t, idx)]) <= 1e-7);
    }

  // Balance implies the available slot-mass never grows.
  for (int j = 1; j <= fs.resource_count; ++j) {
    double previous = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= fs.horizon; ++t) {
      double mass = 0.0;
      for (int idx = 0; idx < k; ++idx)
        mass += fs.x[fs.cell(j, t, idx)] * interval_at(fs.slot_count, idx).length();
      CHECK(mass <= previous + 1e-7);
      previous = mass;
    }
  }
}

TEST_CASE("fluid JSON round trip") {
  GenSpec spec;
  spec.scenario = Scenario::choice_based;
  spec.resource_range = {2, 2};
  spec.slot_range = {2, 2};
  spec.horizon_range = {3, 3};
  const Instance instance = generate(99, spec);
  const FluidSolution fs = solve_fluid(instance);
  const FluidSolution back = fluid_from_json_string(to_json_string(fs));
  CHECK(back.objective == fs.objective);
  CHECK(back.x == fs.x);
  CHECK(back.y == fs.y);
  CHECK(back.y0 == fs.y0);
  CHECK(back.y_out == fs.y_out);

  const FluidSolution reject = solve_fluid(generate(98, GenSpec::fixed(
      Scenario::reject_or_accept, 2, 3, 3)));
  const FluidSolution reject_back = fluid_from_json_string(to_json_string(reject));
  CHECK(reject_back.x == reject.x);
  CHECK(reject_back.y == reject.y);
}
