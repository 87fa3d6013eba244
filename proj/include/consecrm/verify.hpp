#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace consecrm::verify {

// Verification suites. Every function is a pure function of its arguments
// (reports carry no timing or environment data), so reruns with equal seeds
// are byte-identical. Each returns {"suite": ..., "pass": bool, ...details}.

nlohmann::json decomposability(long trials, std::uint64_t seed);
nlohmann::json lp_dominance(long trials, std::uint64_t seed);
nlohmann::json sblp_dominance(long trials, std::uint64_t seed);
nlohmann::json coupler_suite(long exact_draws, long mc_calls, std::uint64_t seed);
nlohmann::json marginal_suite(long episodes, std::uint64_t seed);
nlohmann::json independence_suite(long episodes, std::uint64_t seed);
nlohmann::json ratio_reject(long instances, long episodes, std::uint64_t seed);
nlohmann::json ratio_choice(long instances, long episodes, std::uint64_t seed);
nlohmann::json ratio_ddp(long instances, long episodes, std::uint64_t seed);
nlohmann::json lemma1_reduction(long trials, long episodes, std::uint64_t seed);

// Named suite dispatch for the CLI: decomposability, lp-dominance,
// sblp-dominance, coupler-exact, marginal-gate, ratio-gates,
// lemma1-reduction, all. Negative trials/episodes select per-suite defaults.
nlohmann::json run_suite(const std::string& name, long trials, long episodes, std::uint64_t seed);

}  // namespace consecrm::verify
