#include "consecrm/generate.hpp"

#include <cmath>

#include "consecrm/rng.hpp"

namespace consecrm {

namespace {

void check_int_range(std::pair<int, int> range, int min_lo, const char* name) {
  if (range.first > range.second || range.first < min_lo)
    fail(Errc::bad_spec, std::string(name) + " range [" + std::to_string(range.first) + "," +
                             std::to_string(range.second) + "] is empty or below " +
                             std::to_string(min_lo));
}

void check_real_range(std::pair<double, double> range, double min_lo, const char* name) {
  if (!(std::isfinite(range.first) && std::isfinite(range.second)) ||
      range.first > range.second || range.first < min_lo)
    fail(Errc::bad_spec, std::string(name) + " range is empty, non-finite, or below bound");
}

}  // namespace

Instance generate(std::uint64_t seed, const GenSpec& spec) {
  check_int_range(spec.resource_range, 1, "M");
  check_int_range(spec.slot_range, 1, "N");
  check_int_range(spec.horizon_range, 0, "T");
  check_real_range(spec.p_range, 0.0, "p");
  if (spec.p_range.second > 1.0) fail(Errc::bad_spec, "p range exceeds 1");
  check_real_range(spec.reward_range, 0.0, "reward");
  check_real_range(spec.attraction_range, 0.0, "attraction");
  if (spec.zero_attraction_prob < 0.0 || spec.zero_attraction_prob > 1.0)
    fail(Errc::bad_spec, "zero attraction probability outside [0,1]");

  RandomStream rng(hash64(seed));
  Instance instance;
  instance.scenario = spec.scenario;
  instance.resource_count =
      static_cast<int>(rng.uniform_int(spec.resource_range.first, spec.resource_range.second));
  instance.slot_count =
      static_cast<int>(rng.uniform_int(spec.slot_range.first, spec.slot_range.second));
  instance.horizon =
      static_cast<int>(rng.uniform_int(spec.horizon_range.first, spec.horizon_range.second));

  const bool choice = spec.scenario == Scenario::choice_based;
  for (int t = 0; t < instance.horizon; ++t) {
    RequestType r;
    r.p = rng.uniform(spec.p_range.first, spec.p_range.second);
    // Uniform over all pairs 1 <= l <= r <= N.
    const int index = static_cast<int>(rng.uniform_int(0, interval_count(instance.slot_count) - 1));
    r.interval = interval_at(instance.slot_count, index);
    for (int j = 0; j < instance.resource_count; ++j)
      r.rewards.push_back(rng.uniform(spec.reward_range.first, spec.reward_range.second));
    if (choice) {
      for (int j = 0; j < instance.resource_count; ++j) {
        const bool zero = rng.uniform01() < spec.zero_attraction_prob;
        const double v = rng.uniform(spec.attraction_range.first, spec.attraction_range.second);
        r.attractions.push_back(zero ? 0.0 : v);
      }
      r.outside_attraction = rng.uniform(spec.attraction_range.first, spec.attraction_range.second);
    }
    instance.requests.push_back(std::move(r));
  }
  return instance;
}

}  // namespace consecrm
