#include "consecrm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "consecrm/generate.hpp"
#include "consecrm/sim.hpp"

namespace consecrm::verify {

namespace {

using nlohmann::json;

// Designated instances for the statistical gates: small enough that the
// fluid models solve instantly, rich enough that many cells have interior
// probabilities.
struct Designated {
  std::uint64_t seed;
  int m, n, t;
};
constexpr Designated kMarginalReject[] = {
    {101, 2, 3, 4}, {102, 3, 4, 6}, {103, 2, 4, 5}, {104, 3, 3, 6}, {105, 4, 4, 5}};
constexpr Designated kMarginalChoice[] = {
    {201, 2, 3, 4}, {202, 3, 3, 5}, {203, 2, 4, 5}, {204, 3, 4, 4}, {205, 4, 3, 5}};
constexpr Designated kIndependence[] = {{301, 2, 3, 4}, {302, 2, 2, 3}};

Instance designated_instance(const Designated& d, Scenario scenario) {
  return generate(d.seed, GenSpec::fixed(scenario, d.m, d.n, d.t));
}

// Valid coupler inputs: q uniform, then q'_j = u_j q_j (1 - suffix) backward,
// which satisfies the independence condition by construction.
void draw_coupler_inputs(RandomStream& rng, int m, std::vector<double>& q,
                         std::vector<double>& q_prime) {
  q.assign(static_cast<std::size_t>(m), 0.0);
  q_prime.assign(static_cast<std::size_t>(m), 0.0);
  for (double& v : q) v = rng.uniform01();
  double suffix = 0.0;
  for (int j = m; j >= 1; --j) {
    q_prime[static_cast<std::size_t>(j - 1)] =
        rng.uniform01() * q[static_cast<std::size_t>(j - 1)] * (1.0 - suffix);
    suffix += q_prime[static_cast<std::size_t>(j - 1)];
  }
}

}  // namespace

json decomposability(long trials, std::uint64_t seed) {
  double max_gap = 0.0;
  long states_checked = 0;
  for (long i = 0; i < trials; ++i) {
    GenSpec spec;
    spec.scenario = Scenario::reject_or_accept;
    spec.resource_range = {1, 1};
    spec.slot_range = {2, 6};
    spec.horizon_range = {1, 8};
    const Instance instance = generate(mix(seed, static_cast<std::uint64_t>(i)), spec);
    const auto g = naive_dp_table(instance);
    const DdpTable f = ddp(instance);
    const std::size_t states = std::size_t{1} << instance.slot_count;
    for (int t = 1; t <= instance.horizon + 1; ++t)
      for (std::size_t s = 0; s < states; ++s) {
        SlotState state(instance.slot_count, false);
        for (int slot = 1; slot <= instance.slot_count; ++slot)
          if (s & (std::size_t{1} << (slot - 1))) state.set(slot, true);
        double sum = 0.0;
        for (const Interval& seq : maximal_sequences(state)) sum += f.value(t, seq);
        max_gap = std::max(max_gap,
                           std::abs(g[static_cast<std::size_t>(t - 1)][s] - sum));
        ++states_checked;
      }
  }
  return json{{"suite", "decomposability"},
              {"trials", trials},
              {"states_checked", states_checked},
              {"max_abs_gap", max_gap},
              {"tolerance", 1e-9},
              {"pass", max_gap <= 1e-9}};
}

json lp_dominance(long trials, std::uint64_t seed) {
  double min_margin = std::numeric_limits<double>::infinity();
  long failures = 0;
  for (long i = 0; i < trials; ++i) {
    GenSpec spec;
    spec.scenario = Scenario::reject_or_accept;
    spec.resource_range = {1, 2};
    spec.slot_range = {2, 4};
    spec.horizon_range = {1, 5};
    const Instance instance = generate(mix(seed, static_cast<std::uint64_t>(i)), spec);
    const double lp_value = solve_fluid(instance).objective;
    const double exact = exact_online_reject(instance).value;
    const double margin = lp_value - exact;
    min_margin = std::min(min_margin, margin);
    if (margin < -1e-6) ++failures;
  }
  return json{{"suite", "lp-dominance"},
              {"trials", trials},
              {"min_margin", min_margin},
              {"tolerance", 1e-6},
              {"failures", failures},
              {"pass", failures == 0}};
}

json sblp_dominance(long trials, std::uint64_t seed) {
  double min_margin = std::numeric_limits<double>::infinity();
  long failures = 0;
  for (long i = 0; i < trials; ++i) {
    GenSpec spec;
    spec.scenario = Scenario::choice_based;
    spec.resource_range = {1, 2};
    spec.slot_range = {2, 3};
    spec.horizon_range = {1, 4};
    const Instance instance = generate(mix(seed, static_cast<std::uint64_t>(i)), spec);
    const double sblp_value = solve_fluid(instance).objective;
    const double exact = exact_online_choice(instance).value;
    const double margin = sblp_value - exact;
    min_margin = std::min(min_margin, margin);
    if (margin < -1e-6) ++failures;
  }
  return json{{"suite", "sblp-dominance"},
              {"trials", trials},
              {"min_margin", min_margin},
              {"tolerance", 1e-6},
              {"failures", failures},
              {"pass", failures == 0}};
}

json coupler_suite(long exact_draws, long mc_calls, std::uint64_t seed) {
  RandomStream rng(hash64(seed));
  std::vector<double> q, q_prime;

  // (a) Inclusion: a realized resource choice is always in the output.
  long inclusion_calls = 0, inclusion_failures = 0;
  while (inclusion_calls < mc_calls) {
    const int m = static_cast<int>(rng.uniform_int(1, 4));
    draw_coupler_inputs(rng, m, q, q_prime);
    const int chosen = static_cast<int>(rng.uniform_int(1, m));
    CouplerInput input{q, q_prime, chosen};
    const auto included =
        random_coupler(input, [&rng](int) { return rng.uniform01(); });
    if (std::find(included.begin(), included.end(), chosen) == included.end())
      ++inclusion_failures;
    ++inclusion_calls;
  }

  // (b) Exact distribution vs the independent-Bernoulli product.
  double worst_exact = 0.0;
  for (long i = 0; i < exact_draws; ++i) {
    const int m = static_cast<int>(rng.uniform_int(1, 3));
    draw_coupler_inputs(rng, m, q, q_prime);
    const auto dist = coupler_exact_distribution(q, q_prime);
    for (std::size_t subset = 0; subset < dist.size(); ++subset) {
      double product = 1.0;
      for (int j = 1; j <= m; ++j)
        product *= subset & (std::size_t{1} << (j - 1)) ? q[static_cast<std::size_t>(j - 1)]
                                                        : 1.0 - q[static_cast<std::size_t>(j - 1)];
      worst_exact = std::max(worst_exact, std::abs(dist[subset] - product));
    }
  }

  // (c) Monte Carlo marginals with the choice drawn from the q'-induced
  // distribution: per-resource inclusion frequency within 4 sigma of q_j.
  long mc_cells = 0, mc_failures = 0;
  double worst_mc_z = 0.0;
  const long calls_per_config = mc_calls;
  for (int config = 0; config < 10; ++config) {
    const int m = static_cast<int>(rng.uniform_int(1, 3));
    draw_coupler_inputs(rng, m, q, q_prime);
    double total_prime = 0.0;
    for (double v : q_prime) total_prime += v;
    std::vector<long> hits(static_cast<std::size_t>(m), 0);
    for (long call = 0; call < calls_per_config; ++call) {
      const double u = rng.uniform01();
      int chosen = 0;
      double cumulative = 0.0;
      for (int j = 1; j <= m; ++j) {
        cumulative += q_prime[static_cast<std::size_t>(j - 1)];
        if (u < cumulative) {
          chosen = j;
          break;
        }
      }
      CouplerInput input{q, q_prime, chosen};
      for (int j : random_coupler(input, [&rng](int) { return rng.uniform01(); }))
        ++hits[static_cast<std::size_t>(j - 1)];
    }
    for (int j = 1; j <= m; ++j) {
      const double qj = q[static_cast<std::size_t>(j - 1)];
      const double freq =
          static_cast<double>(hits[static_cast<std::size_t>(j - 1)]) /
          static_cast<double>(calls_per_config);
      const double se = std::sqrt(qj * (1.0 - qj) / static_cast<double>(calls_per_config));
      ++mc_cells;
      if (se == 0.0) {
        if (freq != qj) ++mc_failures;
        continue;
      }
      const double z = std::abs(freq - qj) / se;
      worst_mc_z = std::max(worst_mc_z, z);
      if (z > 4.0) ++mc_failures;
    }
  }

  const bool pass = inclusion_failures == 0 && worst_exact <= 1e-12 && mc_failures == 0;
  return json{{"suite", "coupler-exact"},
              {"inclusion_calls", inclusion_calls},
              {"inclusion_failures", inclusion_failures},
              {"exact_draws", exact_draws},
              {"max_exact_deviation", worst_exact},
              {"exact_tolerance", 1e-12},
              {"mc_configs", 10},
              {"mc_calls_per_config", calls_per_config},
              {"mc_cells", mc_cells},
              {"mc_failures", mc_failures},
              {"worst_mc_z", worst_mc_z},
              {"pass", pass}};
}

namespace {

json marginal_one(const Instance& instance, PolicyKind kind, long episodes, std::uint64_t seed) {
  const SimReport report = evaluate(instance, kind, episodes, seed);
  const MarginalGateResult gate = marginal_gate(report);
  double worst_z = 0.0;
  json worst = json::array();
  for (const MarginalCell& cell : gate.worst) {
    if (std::isfinite(cell.z)) worst_z = std::max(worst_z, std::abs(cell.z));
    worst.push_back(json{{"j", cell.j},
                         {"t", cell.t},
                         {"a", cell.interval.lo},
                         {"b", cell.interval.hi},
                         {"empirical", cell.empirical},
                         {"x", cell.fluid_x},
                         {"z", std::isfinite(cell.z) ? cell.z : 1e308}});
  }
  return json{{"policy", to_string(kind)},
              {"cells", gate.cells},
              {"failed", gate.failed},
              {"exact_failures", gate.exact_failures},
              {"worst_abs_z", worst_z},
              {"worst_cells", std::move(worst)},
              {"violations_clean", report.violations.clean()},
              {"pass", gate.pass && report.violations.clean()}};
}

}  // namespace

json marginal_suite(long episodes, std::uint64_t seed) {
  json runs = json::array();
  bool pass = true;
  for (const Designated& d : kMarginalReject) {
    json run = marginal_one(designated_instance(d, Scenario::reject_or_accept),
                            PolicyKind::reject, episodes, mix(seed, d.seed));
    run["instance_seed"] = d.seed;
    pass = pass && run["pass"].get<bool>();
    runs.push_back(std::move(run));
  }
  for (const Designated& d : kMarginalChoice) {
    json run = marginal_one(designated_instance(d, Scenario::choice_based), PolicyKind::choice,
                            episodes, mix(seed, d.seed));
    run["instance_seed"] = d.seed;
    pass = pass && run["pass"].get<bool>();
    runs.push_back(std::move(run));
  }
  return json{{"suite", "marginal-gate"}, {"episodes", episodes}, {"runs", runs}, {"pass", pass}};
}

json independence_suite(long episodes, std::uint64_t seed) {
  json runs = json::array();
  bool pass = true;
  const PolicyKind kinds[] = {PolicyKind::reject, PolicyKind::choice};
  for (int i = 0; i < 2; ++i) {
    const Designated& d = kIndependence[i];
    const Scenario scenario =
        kinds[i] == PolicyKind::reject ? Scenario::reject_or_accept : Scenario::choice_based;
    const Instance instance = designated_instance(d, scenario);
    const IndependenceGateResult gate =
        independence_gate(instance, kinds[i], episodes, mix(seed, d.seed));
    pass = pass && gate.pass;
    runs.push_back(json{{"policy", to_string(kinds[i])},
                        {"instance_seed", d.seed},
                        {"cells", gate.cells},
                        {"failed", gate.failed},
                        {"worst_deviation_se", gate.worst_deviation_se},
                        {"violations_clean", gate.violations.clean()},
                        {"pass", gate.pass}});
  }
  return json{
      {"suite", "independence"}, {"episodes", episodes}, {"runs", runs}, {"pass", pass}};
}

namespace {

json ratio_gate(const char* suite, Scenario scenario, PolicyKind kind, long instances,
                long episodes, std::uint64_t seed, const GenSpec& base_spec) {
  json runs = json::array();
  bool pass = true;
  for (long i = 0; i < instances; ++i) {
    const Instance instance = generate(mix(seed, static_cast<std::uint64_t>(i)), base_spec);
    (void)scenario;
    const SimReport report =
        evaluate(instance, kind, episodes, mix(seed, 7777 + static_cast<std::uint64_t>(i)));
    pass = pass && report.verdict;
    runs.push_back(json{{"M", instance.resource_count},
                        {"N", instance.slot_count},
                        {"T", instance.horizon},
                        {"mean", report.mean_revenue},
                        {"std_error", report.std_error},
                        {"bound", report.lp_bound},
                        {"ratio_lhs", report.ratio_lhs},
                        {"target", report.ratio_target * report.lp_bound},
                        {"violations_clean", report.violations.clean()},
                        {"pass", report.verdict}});
  }
  return json{{"suite", suite},
              {"instances", instances},
              {"episodes", episodes},
              {"runs", runs},
              {"pass", pass}};
}

}  // namespace

json ratio_reject(long instances, long episodes, std::uint64_t seed) {
  GenSpec spec;
  spec.scenario = Scenario::reject_or_accept;
  spec.resource_range = {1, 5};
  spec.slot_range = {2, 6};
  spec.horizon_range = {4, 20};
  return ratio_gate("ratio-reject", Scenario::reject_or_accept, PolicyKind::reject, instances,
                    episodes, seed, spec);
}

json ratio_choice(long instances, long episodes, std::uint64_t seed) {
  GenSpec spec;
  spec.scenario = Scenario::choice_based;
  spec.resource_range = {1, 5};
  spec.slot_range = {2, 6};
  spec.horizon_range = {4, 20};
  return ratio_gate("ratio-choice", Scenario::choice_based, PolicyKind::choice, instances,
                    episodes, seed, spec);
}

json ratio_ddp(long instances, long episodes, std::uint64_t seed) {
  GenSpec spec;
  spec.scenario = Scenario::reject_or_accept;
  spec.resource_range = {1, 1};
  spec.slot_range = {2, 6};
  spec.horizon_range = {2, 8};
  return ratio_gate("ratio-ddp", Scenario::reject_or_accept, PolicyKind::ddp, instances, episodes,
                    seed, spec);
}

json lemma1_reduction(long trials, long episodes, std::uint64_t seed) {
  double max_gap = 0.0;
  bool pass = true;
  json runs = json::array();
  for (long i = 0; i < trials; ++i) {
    GenSpec spec;
    spec.scenario = Scenario::reject_or_accept;
    spec.resource_range = {1, 3};
    spec.slot_range = {2, 3};
    spec.horizon_range = {1, 4};
    const Instance instance = generate(mix(seed, static_cast<std::uint64_t>(i)), spec);
    const Instance reduced = reduce_to_choice(instance);
    const double reject_value = exact_online_reject(instance).value;
    const double choice_value = exact_online_choice(reduced).value;
    const double gap = std::abs(choice_value - reject_value);
    max_gap = std::max(max_gap, gap);
    if (gap > 1e-9) pass = false;
  }
  // Algorithm 2 on reduced instances still clears the 0.125 SBLP gate.
  for (long i = 0; i < 3; ++i) {
    GenSpec spec;
    spec.scenario = Scenario::reject_or_accept;
    spec.resource_range = {2, 3};
    spec.slot_range = {2, 3};
    spec.horizon_range = {3, 5};
    const Instance reduced =
        reduce_to_choice(generate(mix(seed, 9000 + static_cast<std::uint64_t>(i)), spec));
    const SimReport report = evaluate(reduced, PolicyKind::choice, episodes,
                                      mix(seed, 9100 + static_cast<std::uint64_t>(i)));
    pass = pass && report.verdict;
    runs.push_back(json{{"mean", report.mean_revenue},
                        {"bound", report.lp_bound},
                        {"ratio_lhs", report.ratio_lhs},
                        {"target", report.ratio_target * report.lp_bound},
                        {"pass", report.verdict}});
  }
  return json{{"suite", "lemma1-reduction"},
              {"trials", trials},
              {"max_abs_gap", max_gap},
              {"tolerance", 1e-9},
              {"policy_runs", runs},
              {"pass", pass}};
}

json run_suite(const std::string& name, long trials, long episodes, std::uint64_t seed) {
  const long t_or = trials >= 0 ? trials : -1;
  const long e_or = episodes >= 0 ? episodes : -1;
  auto pick = [](long v, long fallback) { return v >= 0 ? v : fallback; };

  if (name == "decomposability") return decomposability(pick(t_or, 100), seed);
  if (name == "lp-dominance") return lp_dominance(pick(t_or, 50), seed);
  if (name == "sblp-dominance") return sblp_dominance(pick(t_or, 30), seed);
  if (name == "coupler-exact") return coupler_suite(pick(t_or, 1000), pick(e_or, 100'000), seed);
  if (name == "marginal-gate") {
    json marginal = marginal_suite(pick(e_or, 100'000), seed);
    json independence = independence_suite(pick(e_or, 100'000), seed);
    const bool pass = marginal["pass"].get<bool>() && independence["pass"].get<bool>();
    return json{{"suite", "marginal-gate"},
                {"marginal", std::move(marginal)},
                {"independence", std::move(independence)},
                {"pass", pass}};
  }
  if (name == "ratio-gates") {
    json reject = ratio_reject(pick(t_or, 10), pick(e_or, 10'000), seed);
    json choice = ratio_choice(pick(t_or, 10), pick(e_or, 10'000), seed);
    json ddp_gate = ratio_ddp(pick(t_or, 20), pick(e_or, 10'000), seed);
    const bool pass = reject["pass"].get<bool>() && choice["pass"].get<bool>() &&
                      ddp_gate["pass"].get<bool>();
    return json{{"suite", "ratio-gates"},
                {"reject", std::move(reject)},
                {"choice", std::move(choice)},
                {"ddp", std::move(ddp_gate)},
                {"pass", pass}};
  }
  if (name == "lemma1-reduction") return lemma1_reduction(pick(t_or, 20), pick(e_or, 10'000), seed);
  if (name == "all") {
    const char* names[] = {"decomposability", "lp-dominance",   "sblp-dominance",
                           "coupler-exact",   "marginal-gate",  "ratio-gates",
                           "lemma1-reduction"};
    json suites = json::array();
    bool pass = true;
    for (const char* suite : names) {
      json result = run_suite(suite, trials, episodes, seed);
      pass = pass && result["pass"].get<bool>();
      suites.push_back(std::move(result));
    }
    return json{{"suite", "all"}, {"suites", std::move(suites)}, {"pass", pass}};
  }
  fail(Errc::bad_input, "unknown verify suite \"" + name + "\"");
}

}  // namespace consecrm::verify
