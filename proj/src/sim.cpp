#include "consecrm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace consecrm {

const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::reject: return "reject";
    case PolicyKind::choice: return "choice";
    case PolicyKind::ddp: return "ddp";
  }
  return "unknown";
}

void MarginalStats::init(int m, int n, int t) {
  resource_count = m;
  slot_count = n;
  horizon = t;
  episodes = 0;
  counts.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(t) *
                    static_cast<std::size_t>(interval_count(n)),
                0);
}

void PairStats::init(int m, int n, int t) {
  resource_count = m;
  slot_count = n;
  horizon = t;
  episodes = 0;
  const std::size_t k = static_cast<std::size_t>(interval_count(n));
  joint.assign(static_cast<std::size_t>(m * (m - 1) / 2) * static_cast<std::size_t>(t) * k * k, 0);
}

namespace {

// Unordered pair (j,k), j < k, both 1-based, packed row-major.
int pair_slot(int m, int j, int k) {
  int index = 0;
  for (int a = 1; a < j; ++a) index += m - a;
  return index + (k - j - 1);
}

template <typename Ledger>
void record_stats(const Ledger& ledger, int m, int n, int t, MarginalStats* marginals,
                  PairStats* pairs) {
  if (marginals == nullptr && pairs == nullptr) return;
  std::vector<std::vector<int>> seqs(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j)
    for (const Interval& iv : maximal_sequences(ledger.virtual_status(j)))
      seqs[static_cast<std::size_t>(j - 1)].push_back(interval_index(n, iv));
  if (marginals != nullptr)
    for (int j = 1; j <= m; ++j)
      for (int idx : seqs[static_cast<std::size_t>(j - 1)]) ++marginals->counts[marginals->cell(j, t, idx)];
  if (pairs != nullptr)
    for (int j = 1; j <= m; ++j)
      for (int k = j + 1; k <= m; ++k)
        for (int ia : seqs[static_cast<std::size_t>(j - 1)])
          for (int ib : seqs[static_cast<std::size_t>(k - 1)])
            ++pairs->joint[pairs->cell(pair_slot(m, j, k), t, ia, ib)];
}

}  // namespace

EpisodeOutput run_episode(const EvalContext& context, std::uint64_t seed, MarginalStats* marginals,
                          PairStats* pairs, std::vector<TraceStep>* trace) {
  const Instance& instance = *context.instance;
  const EpisodeRng rng{seed};
  EpisodeOutput out;

  if (context.kind == PolicyKind::ddp) {
    SlotState state(instance.slot_count, true);
    for (int t = 1; t <= instance.horizon; ++t) {
      const RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
      const bool arrived = rng.uniform(t, 0, Draw::arrival) < req.p;
      const bool accept = ddp_policy_act(*context.table, t, state, arrived, req);
      TraceStep step;
      step.t = t;
      step.arrived = arrived;
      if (accept) {
        state = allocate(state, req.interval);
        out.revenue += req.rewards[0];
        step.j_star = 1;
        step.allocated = true;
        step.revenue = req.rewards[0];
      }
      if (trace != nullptr) trace->push_back(std::move(step));
    }
    return out;
  }

  if (context.kind == PolicyKind::reject) {
    RejectPolicy policy(instance, *context.fluid);
    for (int t = 1; t <= instance.horizon; ++t) {
      record_stats(policy.ledger(), instance.resource_count, instance.slot_count, t, marginals,
                   pairs);
      const bool arrived =
          rng.uniform(t, 0, Draw::arrival) < instance.requests[static_cast<std::size_t>(t - 1)].p;
      const auto proposals = policy.proposal_stage(t, rng);
      const StepOutcome step = policy.allocation_stage(t, proposals, arrived, rng);
      out.revenue += step.revenue;
      if (trace != nullptr)
        trace->push_back(TraceStep{t, arrived, step.proposals, {}, {}, step.chosen, step.allocated,
                                   step.revenue});
    }
    out.violations = policy.counters();
    return out;
  }

  ChoicePolicy policy(instance, *context.fluid, context.gamma);
  for (int t = 1; t <= instance.horizon; ++t) {
    record_stats(policy.ledger(), instance.resource_count, instance.slot_count, t, marginals,
                 pairs);
    const bool arrived =
        rng.uniform(t, 0, Draw::arrival) < instance.requests[static_cast<std::size_t>(t - 1)].p;
    const ChoiceStepOutcome step = policy.choice_step(t, arrived, rng);
    out.revenue += step.revenue;
    if (trace != nullptr)
      trace->push_back(TraceStep{t, arrived, step.proposals, step.assortment, step.update_set,
                                 step.chosen, step.chosen != 0, step.revenue});
  }
  out.violations = policy.counters();
  return out;
}

namespace {

SimReport aggregate(const Instance& instance, PolicyKind kind, long episodes,
                    std::uint64_t base_seed, double gamma, const EvalContext& context,
                    double bound, MarginalStats* marginals, PairStats* pairs) {
  std::vector<double> revenues;
  revenues.reserve(static_cast<std::size_t>(episodes));
  ViolationCounters violations;
  for (long ep = 0; ep < episodes; ++ep) {
    if (marginals != nullptr) ++marginals->episodes;
    if (pairs != nullptr) ++pairs->episodes;
    const EpisodeOutput out =
        run_episode(context, episode_seed(base_seed, ep), marginals, pairs, nullptr);
    revenues.push_back(out.revenue);
    violations.add(out.violations);
  }

  double mean = 0.0;
  for (double r : revenues) mean += r;
  mean /= static_cast<double>(episodes);
  double ss = 0.0;
  for (double r : revenues) ss += (r - mean) * (r - mean);
  const double stddev = episodes > 1 ? std::sqrt(ss / static_cast<double>(episodes - 1)) : 0.0;

  SimReport report;
  report.kind = kind;
  report.episodes = episodes;
  report.mean_revenue = mean;
  report.std_error = stddev / std::sqrt(static_cast<double>(episodes));
  report.lp_bound = bound;
  report.gamma = gamma;
  report.base_seed = base_seed;
  report.violations = violations;
  report.ratio_lhs = mean - 3.0 * report.std_error;
  switch (kind) {
    case PolicyKind::reject: report.ratio_target = 1.0 - 1.0 / std::exp(1.0); break;
    case PolicyKind::choice: report.ratio_target = 0.125; break;
    case PolicyKind::ddp: report.ratio_target = 1.0; report.two_sided = true; break;
  }
  if (report.two_sided)  // optimal policy: estimate must straddle the DP value
    report.verdict = std::abs(mean - bound) <= 3.0 * report.std_error + 1e-9;
  else
    report.verdict = report.ratio_lhs >= report.ratio_target * bound;
  report.verdict = report.verdict && violations.clean();

  if (marginals != nullptr && context.fluid != nullptr) {
    const FluidSolution& fluid = *context.fluid;
    const int k = interval_count(instance.slot_count);
    for (int j = 1; j <= instance.resource_count; ++j)
      for (int t = 1; t <= instance.horizon; ++t)
        for (int idx = 0; idx < k; ++idx) {
          MarginalCell cell;
          cell.j = j;
          cell.t = t;
          cell.interval_idx = idx;
          cell.interval = interval_at(instance.slot_count, idx);
          cell.empirical =
              static_cast<double>(marginals->counts[marginals->cell(j, t, idx)]) /
              static_cast<double>(episodes);
          cell.fluid_x = fluid.x[fluid.cell(j, t, idx)];
          if (cell.fluid_x > 0.0 && cell.fluid_x < 1.0)
            cell.z = (cell.empirical - cell.fluid_x) /
                     std::sqrt(cell.fluid_x * (1.0 - cell.fluid_x) /
                               static_cast<double>(episodes));
          else
            cell.z = cell.empirical == cell.fluid_x ? 0.0 : std::numeric_limits<double>::infinity();
          report.marginal_table.push_back(cell);
        }
  }
  return report;
}

}  // namespace

SimReport evaluate(const Instance& instance, PolicyKind kind, long episodes,
                   std::uint64_t base_seed, double gamma) {
  if (episodes < 100) fail(Errc::bad_input, "evaluate needs episodes >= 100");

  EvalContext context;
  context.instance = &instance;
  context.kind = kind;
  context.gamma = gamma;

  FluidSolution fluid;
  DdpTable table(instance.slot_count, instance.horizon);
  double bound = 0.0;
  MarginalStats marginals;
  MarginalStats* marginals_ptr = nullptr;
  if (kind == PolicyKind::ddp) {
    if (instance.resource_count != 1 || instance.scenario != Scenario::reject_or_accept)
      fail(Errc::wrong_shape, "ddp policy evaluation needs a single-resource reject instance");
    table = ddp(instance);
    context.table = &table;
    bound = naive_dp(instance).value;
  } else {
    fluid = solve_fluid(instance);  // throws LpNotOptimal on failure
    context.fluid = &fluid;
    bound = fluid.objective;
    marginals.init(instance.resource_count, instance.slot_count, instance.horizon);
    marginals_ptr = &marginals;
  }

  return aggregate(instance, kind, episodes, base_seed, gamma, context, bound, marginals_ptr,
                   nullptr);
}

MarginalGateResult marginal_gate(const SimReport& report) {
  if (report.episodes < 10'000) fail(Errc::bad_input, "marginal gate needs >= 1e4 episodes");
  MarginalGateResult result;
  for (const MarginalCell& cell : report.marginal_table) {
    if (cell.fluid_x > 0.0 && cell.fluid_x < 1.0) {
      ++result.cells;
      if (std::abs(cell.z) > 4.0) ++result.failed;
    } else if (cell.empirical != cell.fluid_x) {
      // Probability-zero (or -one) events must match exactly.
      ++result.exact_failures;
    }
  }
  std::vector<MarginalCell> sorted = report.marginal_table;
  std::sort(sorted.begin(), sorted.end(), [](const MarginalCell& a, const MarginalCell& b) {
    return std::abs(a.z) > std::abs(b.z);
  });
  if (sorted.size() > 10) sorted.resize(10);
  result.worst = std::move(sorted);
  result.pass = result.exact_failures == 0 &&
                (result.cells == 0 ||
                 static_cast<double>(result.cells - result.failed) >=
                     0.99 * static_cast<double>(result.cells));
  return result;
}

IndependenceGateResult independence_gate(const Instance& instance, PolicyKind kind, long episodes,
                                         std::uint64_t base_seed, double gamma) {
  if (kind == PolicyKind::ddp) fail(Errc::bad_input, "independence gate applies to fluid policies");
  if (instance.resource_count < 2)
    fail(Errc::bad_input, "independence gate needs at least two resources");

  EvalContext context;
  context.instance = &instance;
  context.kind = kind;
  context.gamma = gamma;
  const FluidSolution fluid = solve_fluid(instance);
  context.fluid = &fluid;

  MarginalStats marginals;
  marginals.init(instance.resource_count, instance.slot_count, instance.horizon);
  PairStats pairs;
  pairs.init(instance.resource_count, instance.slot_count, instance.horizon);
  IndependenceGateResult result;
  result.episodes = episodes;
  for (long ep = 0; ep < episodes; ++ep) {
    ++marginals.episodes;
    ++pairs.episodes;
    result.violations.add(
        run_episode(context, episode_seed(base_seed, ep), &marginals, &pairs, nullptr).violations);
  }
  const double n = static_cast<double>(episodes);
  const int k = interval_count(instance.slot_count);
  for (int j = 1; j <= instance.resource_count; ++j)
    for (int kk = j + 1; kk <= instance.resource_count; ++kk)
      for (int t = 1; t <= instance.horizon; ++t)
        for (int ia = 0; ia < k; ++ia) {
          const double pa =
              static_cast<double>(marginals.counts[marginals.cell(j, t, ia)]) / n;
          if (pa <= 0.0 || pa >= 1.0) continue;
          for (int ib = 0; ib < k; ++ib) {
            const double pb =
                static_cast<double>(marginals.counts[marginals.cell(kk, t, ib)]) / n;
            if (pb <= 0.0 || pb >= 1.0) continue;
            const double joint =
                static_cast<double>(
                    pairs.joint[pairs.cell(pair_slot(instance.resource_count, j, kk), t, ia, ib)]) /
                n;
            // Delta-method pooled standard error for joint - pa*pb; slightly
            // conservative, which the 4-sigma gate absorbs.
            const double variance = joint * (1.0 - joint) + pb * pb * pa * (1.0 - pa) +
                                    pa * pa * pb * (1.0 - pb);
            const double se = std::sqrt(variance / n);
            if (se == 0.0) continue;
            const double dev = std::abs(joint - pa * pb) / se;
            ++result.cells;
            result.worst_deviation_se = std::max(result.worst_deviation_se, dev);
            if (dev > 4.0) ++result.failed;
          }
        }
  result.pass = result.failed == 0 && result.violations.clean();
  return result;
}

namespace {

using nlohmann::json;

json violations_json(const ViolationCounters& v) {
  return json{{"lower_bound_breaches", v.lower_bound_breaches},
              {"occupied_slot_errors", v.occupied_slot_errors},
              {"coupler_condition_breaches", v.coupler_condition_breaches},
              {"ratio_clamp_warnings", v.ratio_clamp_warnings}};
}

}  // namespace

std::string report_to_json_string(const SimReport& report, int indent) {
  json marginal = json::array();
  for (const MarginalCell& cell : report.marginal_table) {
    marginal.push_back(json{{"j", cell.j},
                            {"t", cell.t},
                            {"a", cell.interval.lo},
                            {"b", cell.interval.hi},
                            {"empirical", cell.empirical},
                            {"x", cell.fluid_x},
                            {"z", std::isfinite(cell.z) ? cell.z : 1e308}});
  }
  json doc{{"policy", to_string(report.kind)},
           {"episodes", report.episodes},
           {"mean_revenue", report.mean_revenue},
           {"std_error", report.std_error},
           {"lp_bound", report.lp_bound},
           {"ratio_target", report.ratio_target},
           {"ratio_lhs", report.ratio_lhs},
           {"comparison", report.two_sided ? "match" : "ratio"},
           {"verdict", report.verdict ? "pass" : "fail"},
           {"invariant_violations", violations_json(report.violations)},
           {"gamma", report.gamma},
           {"seed", report.base_seed},
           {"marginal_table", std::move(marginal)}};
  return doc.dump(indent);
}

std::string marginal_table_csv(const SimReport& report) {
  std::ostringstream out;
  out << "j,t,a,b,empirical,x,z\n";
  for (const MarginalCell& cell : report.marginal_table) {
    out << cell.j << "," << cell.t << ",";
    out << cell.interval.lo << "," << cell.interval.hi << ",";
    out << cell.empirical << "," << cell.fluid_x << "," << cell.z << "\n";
  }
  return out.str();
}

}  // namespace consecrm
