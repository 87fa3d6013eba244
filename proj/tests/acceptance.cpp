// Acceptance suite: runs every gate at its stated size and tolerance and
// prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <cstdio>
#include <string>

#include "consecrm/verify.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

int failures = 0;

void report(int criterion, const std::string& label, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, label.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string num(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.3g", v);
  return buffer;
}

bool runs_clean(const json& gate) {
  for (const json& run : gate.at("runs"))
    if (!run.at("violations_clean").get<bool>()) return false;
  return true;
}

}  // namespace

int main() {
  constexpr std::uint64_t kSeed = 20250809;

  // 1. Decomposability: G equals the maximal-sequence sum of F everywhere.
  {
    const json r = consecrm::verify::decomposability(100, kSeed);
    report(1, "decomposability over 100 single-resource instances", r.at("pass").get<bool>(),
           "max |G - sum F| = " + num(r.at("max_abs_gap").get<double>()) + " <= 1e-9, " +
               std::to_string(r.at("states_checked").get<long>()) + " states");
  }

  // 2. Single-resource optimality: simulated decomposed-DP policy matches
  //    the naive DP value within 3 standard errors on 20 instances.
  json ddp_gate;
  {
    ddp_gate = consecrm::verify::ratio_ddp(20, 10'000, kSeed);
    report(2, "ddp policy mean within 3 SE of the DP optimum on 20 instances",
           ddp_gate.at("pass").get<bool>(),
           std::to_string(ddp_gate.at("runs").size()) + " runs, 1e4 episodes each");
  }

  // 3. LP dominance on 50 tiny instances.
  {
    const json r = consecrm::verify::lp_dominance(50, kSeed);
    report(3, "fluid LP dominates the exact online optimum (reject)", r.at("pass").get<bool>(),
           "min margin = " + num(r.at("min_margin").get<double>()) + " >= -1e-6");
  }

  // 4. SBLP dominance on 30 tiny instances.
  {
    const json r = consecrm::verify::sblp_dominance(30, kSeed);
    report(4, "sales-based LP dominates the exact online optimum (choice)",
           r.at("pass").get<bool>(),
           "min margin = " + num(r.at("min_margin").get<double>()) + " >= -1e-6");
  }

  // 5/6. Approximation-ratio gates: Monte Carlo mean minus 3 SE clears the
  //      guaranteed fraction of the fluid bound on 10 instances each.
  json reject_gate, choice_gate;
  {
    reject_gate = consecrm::verify::ratio_reject(10, 10'000, kSeed);
    report(5, "(1 - 1/e) gate for the reject policy", reject_gate.at("pass").get<bool>(),
           "10 instances, 1e4 episodes each");
    choice_gate = consecrm::verify::ratio_choice(10, 10'000, kSeed);
    report(6, "0.125 gate for the choice policy", choice_gate.at("pass").get<bool>(),
           "10 instances, 1e4 episodes each");
  }

  // 7. Virtual-status properties: zero invariant violations anywhere, the
  //    4-sigma marginal gate on the designated instances for both policies,
  //    and pairwise independence on the two tiny designated instances.
  {
    const json marginal = consecrm::verify::marginal_suite(100'000, kSeed);
    const json independence = consecrm::verify::independence_suite(100'000, kSeed);
    const bool clean = runs_clean(ddp_gate) && runs_clean(reject_gate) && runs_clean(choice_gate);
    const bool pass =
        marginal.at("pass").get<bool>() && independence.at("pass").get<bool>() && clean;
    report(7, "virtual-status lower-bound/marginal/independence gates", pass,
           std::string("marginals ") + (marginal.at("pass").get<bool>() ? "ok" : "FAIL") +
               ", independence " + (independence.at("pass").get<bool>() ? "ok" : "FAIL") +
               ", violations " + (clean ? "0" : "NONZERO"));
  }

  // 8. Coupler correctness: inclusion, exact distribution, Monte Carlo.
  {
    const json r = consecrm::verify::coupler_suite(1'000, 100'000, kSeed);
    report(8, "coupling sampler: inclusion / exact distribution / marginals",
           r.at("pass").get<bool>(),
           "inclusion failures " + std::to_string(r.at("inclusion_failures").get<long>()) +
               ", max exact dev = " + num(r.at("max_exact_deviation").get<double>()) +
               " <= 1e-12, worst MC z = " + num(r.at("worst_mc_z").get<double>()));
  }

  // 9. Reduction: the unit-attraction construction preserves the exact
  //    optimum, and the choice policy still clears its gate on reduced
  //    instances.
  {
    const json r = consecrm::verify::lemma1_reduction(20, 10'000, kSeed);
    report(9, "reject-to-choice reduction (unit attractions, zero outside)",
           r.at("pass").get<bool>(),
           "max |choice - reject| = " + num(r.at("max_abs_gap").get<double>()) + " <= 1e-9");
  }

  // 10. Determinism: every suite rerun with identical seeds yields a
  //     byte-identical report (reduced sizes; the property is seed-driven).
  {
    bool identical = true;
    const char* suites[] = {"decomposability", "lp-dominance",  "sblp-dominance",
                            "coupler-exact",   "marginal-gate", "ratio-gates",
                            "lemma1-reduction"};
    for (const char* suite : suites) {
      const long trials = 3;
      const long episodes = 10'000;
      const std::string a = consecrm::verify::run_suite(suite, trials, episodes, kSeed).dump();
      const std::string b = consecrm::verify::run_suite(suite, trials, episodes, kSeed).dump();
      if (a != b) identical = false;
    }
    report(10, "byte-identical suite reruns with equal seeds", identical,
           "7 suites rerun and compared");
  }

  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
