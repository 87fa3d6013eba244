#pragma once

// Test-only oracles: expectimax over the full scenario tree with raw
// per-resource boolean vectors. No bitmask encoding, no memoization, no
// maximal-sequence machinery; deliberately independent of the library's DP
// implementations. Exponential in the horizon, so keep T small.

#include <algorithm>
#include <vector>

#include "consecrm/core.hpp"

namespace brute {

using Avail = std::vector<std::vector<char>>;  // [resource][slot-1]

inline Avail full_availability(const consecrm::Instance& instance) {
  return Avail(static_cast<std::size_t>(instance.resource_count),
               std::vector<char>(static_cast<std::size_t>(instance.slot_count), 1));
}

inline bool fits(const Avail& avail, int j, const consecrm::Interval& iv) {
  for (int s = iv.lo; s <= iv.hi; ++s)
    if (!avail[static_cast<std::size_t>(j)][static_cast<std::size_t>(s - 1)]) return false;
  return true;
}

inline void occupy(Avail& avail, int j, const consecrm::Interval& iv, char value) {
  for (int s = iv.lo; s <= iv.hi; ++s)
    avail[static_cast<std::size_t>(j)][static_cast<std::size_t>(s - 1)] = value;
}

inline double expectimax_reject(const consecrm::Instance& instance, int t, Avail& avail) {
  if (t > instance.horizon) return 0.0;
  const consecrm::RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
  const double keep = expectimax_reject(instance, t + 1, avail);
  double best = keep;
  for (int j = 0; j < instance.resource_count; ++j) {
    if (!fits(avail, j, req.interval)) continue;
    occupy(avail, j, req.interval, 0);
    best = std::max(best, req.rewards[static_cast<std::size_t>(j)] +
                              expectimax_reject(instance, t + 1, avail));
    occupy(avail, j, req.interval, 1);
  }
  return (1.0 - req.p) * keep + req.p * best;
}

inline double expectimax_choice(const consecrm::Instance& instance, int t, Avail& avail) {
  if (t > instance.horizon) return 0.0;
  const consecrm::RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
  const double keep = expectimax_choice(instance, t + 1, avail);

  std::vector<int> offerable;
  for (int j = 0; j < instance.resource_count; ++j)
    if (fits(avail, j, req.interval) && req.attractions[static_cast<std::size_t>(j)] > 0.0)
      offerable.push_back(j);

  double best = keep;  // empty assortment
  const std::size_t subsets = std::size_t{1} << offerable.size();
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    double total = req.outside_attraction;
    for (std::size_t i = 0; i < offerable.size(); ++i)
      if (mask & (std::size_t{1} << i))
        total += req.attractions[static_cast<std::size_t>(offerable[i])];
    double value = req.outside_attraction / total * keep;
    for (std::size_t i = 0; i < offerable.size(); ++i) {
      if (!(mask & (std::size_t{1} << i))) continue;
      const int j = offerable[i];
      occupy(avail, j, req.interval, 0);
      value += req.attractions[static_cast<std::size_t>(j)] / total *
               (req.rewards[static_cast<std::size_t>(j)] +
                expectimax_choice(instance, t + 1, avail));
      occupy(avail, j, req.interval, 1);
    }
    best = std::max(best, value);
  }
  return (1.0 - req.p) * keep + req.p * best;
}

inline double optimal_reject(const consecrm::Instance& instance) {
  Avail avail = full_availability(instance);
  return expectimax_reject(instance, 1, avail);
}

inline double optimal_choice(const consecrm::Instance& instance) {
  Avail avail = full_availability(instance);
  return expectimax_choice(instance, 1, avail);
}

}  // namespace brute
