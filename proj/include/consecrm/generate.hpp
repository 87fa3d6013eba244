#pragma once

#include <cstdint>
#include <utility>

#include "consecrm/core.hpp"

namespace consecrm {

// Generator parameters. Every range is inclusive. Rewards default to [1,10];
// attractions are drawn from {0} with probability `zero_attraction_prob` and
// uniformly from `attraction_range` otherwise, so the zero-attraction
// exclusion path gets exercised. The outside attraction is drawn from
// `attraction_range` (never zeroed). Ranges are artifact choices; nothing in
// the model bounds rewards.
struct GenSpec {
  Scenario scenario = Scenario::reject_or_accept;
  std::pair<int, int> resource_range{1, 3};   // M
  std::pair<int, int> slot_range{2, 6};       // N
  std::pair<int, int> horizon_range{0, 8};    // T
  std::pair<double, double> p_range{0.1, 1.0};
  std::pair<double, double> reward_range{1.0, 10.0};
  std::pair<double, double> attraction_range{0.1, 5.0};
  double zero_attraction_prob = 0.15;

  static GenSpec fixed(Scenario scenario, int resources, int slots, int horizon) {
    GenSpec spec;
    spec.scenario = scenario;
    spec.resource_range = {resources, resources};
    spec.slot_range = {slots, slots};
    spec.horizon_range = {horizon, horizon};
    return spec;
  }
};

// Deterministic function of (seed, spec): equal arguments yield byte-identical
// instances. Throws BadSpec for empty or malformed ranges.
Instance generate(std::uint64_t seed, const GenSpec& spec);

}  // namespace consecrm
