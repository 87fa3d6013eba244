// Command-line front door: generate instances, build/solve the fluid models,
// run the exact oracles, evaluate policies, probe the coupling sampler, and
// run the verification suites. Exit codes: 0 success (and gates pass),
// 1 gate failure, 2 usage or I/O errors.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "consecrm/fluid.hpp"
#include "consecrm/generate.hpp"
#include "consecrm/instance_io.hpp"
#include "consecrm/oracle.hpp"
#include "consecrm/sim.hpp"
#include "consecrm/verify.hpp"
#include "json.hpp"

namespace {

using namespace consecrm;
using nlohmann::json;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) fail(Errc::bad_input, "cannot write " + out_path);
  out << text << "\n";
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CONSEC_RM_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

json trace_to_json(const TraceStep& step, bool choice) {
  json doc{{"t", step.t}, {"arrived", step.arrived}, {"proposals", step.proposals},
           {"j_star", step.j_star}, {"revenue", step.revenue}};
  if (choice) {
    doc["assortment"] = step.assortment;
    doc["Q"] = step.update_set;
  } else {
    doc["allocated"] = step.allocated;
  }
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network revenue management with consecutive stays: fluid relaxations, "
               "proposal-based policies, exact oracles, and verification gates"};
  app.require_subcommand(1);
  app.fallthrough();  // common flags (--seed, --out, --format) work after a subcommand

  std::uint64_t seed = default_seed();
  std::string out_path;
  std::string format = "json";
  app.add_option("--seed", seed, "Random seed (CONSEC_RM_SEED overrides the default)");
  app.add_option("--out", out_path, "Write output to this file instead of stdout");
  app.add_option("--format", format, "Output format: json or csv (flat tables only)")
      ->check(CLI::IsMember({"json", "csv"}));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  int gen_m = 2, gen_n = 4, gen_t = 6;
  std::string gen_scenario = "reject";
  std::pair<double, double> p_range{0.1, 1.0}, w_range{1.0, 10.0}, v_range{0.1, 5.0};
  double zero_v_prob = 0.15;
  gen->add_option("--M", gen_m, "Resource count");
  gen->add_option("--N", gen_n, "Slot count");
  gen->add_option("--T", gen_t, "Horizon");
  gen->add_option("--scenario", gen_scenario, "reject or choice")
      ->check(CLI::IsMember({"reject", "choice"}));
  gen->add_option("--p-range", p_range, "Arrival probability range (lo hi)");
  gen->add_option("--w-range", w_range, "Reward range (lo hi)");
  gen->add_option("--v-range", v_range, "Attraction range (lo hi, choice only)");
  gen->add_option("--zero-v-prob", zero_v_prob, "Probability an attraction is zeroed");

  // lp / sblp
  auto* lp_cmd = app.add_subcommand("lp", "Build and solve the reject-scenario fluid relaxation");
  auto* sblp_cmd = app.add_subcommand("sblp", "Build and solve the sales-based relaxation");
  std::string lp_instance, lp_dump, sblp_instance, sblp_dump;
  lp_cmd->add_option("--instance", lp_instance, "Instance JSON file")->required();
  lp_cmd->add_option("--dump-model", lp_dump, "Also write the model in LP text format");
  sblp_cmd->add_option("--instance", sblp_instance, "Instance JSON file")->required();
  sblp_cmd->add_option("--dump-model", sblp_dump, "Also write the model in LP text format");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Run an exact dynamic program");
  std::string oracle_instance, oracle_kind;
  oracle_cmd->add_option("--instance", oracle_instance, "Instance JSON file")->required();
  oracle_cmd->add_option("--kind", oracle_kind, "naive | ddp | exact-reject | exact-choice")
      ->required()
      ->check(CLI::IsMember({"naive", "ddp", "exact-reject", "exact-choice"}));

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo policy evaluation");
  std::string sim_instance, sim_policy = "reject";
  long sim_episodes = 10'000;
  double sim_gamma = 0.25;
  bool sim_trace = false;
  sim_cmd->add_option("--instance", sim_instance, "Instance JSON file")->required();
  sim_cmd->add_option("--policy", sim_policy, "reject | choice | ddp")
      ->check(CLI::IsMember({"reject", "choice", "ddp"}));
  sim_cmd->add_option("--episodes", sim_episodes, "Episode count (>= 100)");
  sim_cmd->add_option("--gamma", sim_gamma, "Assortment inclusion probability, in (0, 1/2]");
  sim_cmd->add_flag("--trace", sim_trace, "Stream episode 0 as JSON lines to stderr");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites");
  std::string suite = "all";
  long verify_trials = -1, verify_episodes = -1;
  verify_cmd->add_option("--suite", suite,
                         "decomposability | lp-dominance | sblp-dominance | coupler-exact | "
                         "marginal-gate | ratio-gates | lemma1-reduction | all");
  verify_cmd->add_option("--trials", verify_trials, "Override per-suite trial count");
  verify_cmd->add_option("--episodes", verify_episodes, "Override per-suite episode count");

  // coupler-test
  auto* coupler_cmd = app.add_subcommand("coupler-test", "Probe the coupling sampler directly");
  std::vector<double> q_in, q_prime_in;
  long coupler_trials = 100'000;
  bool coupler_exact = false;
  coupler_cmd->add_option("--q", q_in, "Inclusion probabilities q_1..q_M")->required();
  coupler_cmd->add_option("--q-prime", q_prime_in, "Choice-distribution weights q'_1..q'_M")
      ->required();
  coupler_cmd->add_option("--trials", coupler_trials, "Monte Carlo calls");
  coupler_cmd->add_flag("--exact", coupler_exact, "Also report the exact output distribution");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2; --help stays 0
  }

  try {
    if (gen->parsed()) {
      GenSpec spec = GenSpec::fixed(
          gen_scenario == "choice" ? Scenario::choice_based : Scenario::reject_or_accept, gen_m,
          gen_n, gen_t);
      spec.p_range = p_range;
      spec.reward_range = w_range;
      spec.attraction_range = v_range;
      spec.zero_attraction_prob = zero_v_prob;
      emit(to_json_string(generate(seed, spec)), out_path);
      return 0;
    }

    if (lp_cmd->parsed() || sblp_cmd->parsed()) {
      const bool is_lp = lp_cmd->parsed();
      const Instance instance = load_instance(is_lp ? lp_instance : sblp_instance);
      const FluidModel fm = is_lp ? build_lp(instance) : build_sblp(instance);
      const std::string dump = is_lp ? lp_dump : sblp_dump;
      if (!dump.empty()) {
        std::ofstream model_out(dump);
        if (!model_out) fail(Errc::bad_input, "cannot write " + dump);
        lp::write_lp_text(fm.model, model_out, is_lp ? "fluid-lp" : "fluid-sblp");
      }
      const lp::Solution solution = lp::solve(fm.model);
      if (solution.status != lp::Status::optimal)
        fail(Errc::lp_not_optimal, std::string("status ") + lp::to_string(solution.status));
      emit(to_json_string(extract(instance, fm, solution)), out_path);
      return 0;
    }

    if (oracle_cmd->parsed()) {
      const Instance instance = load_instance(oracle_instance);
      json doc;
      if (oracle_kind == "naive") {
        const ExactValue v = naive_dp(instance);
        doc = json{{"kind", "naive"}, {"value", v.value}, {"states_visited", v.states_visited}};
      } else if (oracle_kind == "ddp") {
        const DdpTable table = ddp(instance);
        doc = json{{"kind", "ddp"},
                   {"value", table.value(1, Interval{1, instance.slot_count})},
                   {"horizon", table.horizon()}};
      } else if (oracle_kind == "exact-reject") {
        const ExactValue v = exact_online_reject(instance);
        doc = json{{"kind", "exact-reject"}, {"value", v.value},
                   {"states_visited", v.states_visited}};
      } else {
        const ExactValue v = exact_online_choice(instance);
        doc = json{{"kind", "exact-choice"}, {"value", v.value},
                   {"states_visited", v.states_visited}};
      }
      emit(doc.dump(2), out_path);
      return 0;
    }

    if (sim_cmd->parsed()) {
      const Instance instance = load_instance(sim_instance);
      const PolicyKind kind = sim_policy == "reject" ? PolicyKind::reject
                              : sim_policy == "choice" ? PolicyKind::choice
                                                       : PolicyKind::ddp;
      if (sim_trace) {
        EvalContext context;
        context.instance = &instance;
        context.kind = kind;
        context.gamma = sim_gamma;
        FluidSolution fluid;
        DdpTable table(instance.slot_count, instance.horizon);
        if (kind == PolicyKind::ddp) {
          table = ddp(instance);
          context.table = &table;
        } else {
          fluid = solve_fluid(instance);
          context.fluid = &fluid;
        }
        std::vector<TraceStep> trace;
        run_episode(context, episode_seed(seed, 0), nullptr, nullptr, &trace);
        for (const TraceStep& step : trace)
          std::cerr << trace_to_json(step, kind == PolicyKind::choice).dump() << "\n";
      }
      const SimReport report = evaluate(instance, kind, sim_episodes, seed, sim_gamma);
      if (format == "csv")
        emit(marginal_table_csv(report), out_path);
      else
        emit(report_to_json_string(report), out_path);
      return report.verdict ? 0 : 1;
    }

    if (verify_cmd->parsed()) {
      const json report = verify::run_suite(suite, verify_trials, verify_episodes, seed);
      emit(report.dump(2), out_path);
      return report["pass"].get<bool>() ? 0 : 1;
    }

    if (coupler_cmd->parsed()) {
      if (q_in.size() != q_prime_in.size())
        fail(Errc::bad_input, "--q and --q-prime need the same length");
      RandomStream rng(hash64(seed));
      const int m = static_cast<int>(q_in.size());
      double total_prime = 0.0;
      for (double v : q_prime_in) total_prime += v;
      std::vector<long> hits(q_in.size(), 0);
      long inclusion_failures = 0;
      for (long call = 0; call < coupler_trials; ++call) {
        const double u = rng.uniform01();
        int chosen = 0;
        double cumulative = 0.0;
        for (int j = 1; j <= m; ++j) {
          cumulative += q_prime_in[static_cast<std::size_t>(j - 1)];
          if (u < cumulative) {
            chosen = j;
            break;
          }
        }
        CouplerInput input{q_in, q_prime_in, chosen};
        const auto included = random_coupler(input, [&rng](int) { return rng.uniform01(); });
        if (chosen != 0 &&
            std::find(included.begin(), included.end(), chosen) == included.end())
          ++inclusion_failures;
        for (int j : included) ++hits[static_cast<std::size_t>(j - 1)];
      }
      json freq = json::array();
      bool pass = inclusion_failures == 0;
      for (int j = 1; j <= m; ++j) {
        const double qj = q_in[static_cast<std::size_t>(j - 1)];
        const double f = static_cast<double>(hits[static_cast<std::size_t>(j - 1)]) /
                         static_cast<double>(coupler_trials);
        const double se = std::sqrt(qj * (1.0 - qj) / static_cast<double>(coupler_trials));
        const double z = se > 0.0 ? (f - qj) / se : (f == qj ? 0.0 : 1e308);
        if (std::abs(z) > 4.0) pass = false;
        freq.push_back(json{{"resource", j}, {"frequency", f}, {"q", qj}, {"z", z}});
      }
      json doc{{"condition_regular", coupler_condition_holds(q_in, q_prime_in)},
               {"trials", coupler_trials},
               {"inclusion_failures", inclusion_failures},
               {"frequencies", std::move(freq)},
               {"pass", pass}};
      if (coupler_exact) {
        const auto dist = coupler_exact_distribution(q_in, q_prime_in);
        json exact = json::object();
        for (std::size_t subset = 0; subset < dist.size(); ++subset)
          exact[std::to_string(subset)] = dist[subset];
        doc["exact_distribution"] = std::move(exact);
      }
      emit(doc.dump(2), out_path);
      return pass ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
