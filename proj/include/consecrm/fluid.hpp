#pragma once

#include <string>
#include <vector>

#include "consecrm/core.hpp"
#include "consecrm/lp.hpp"

namespace consecrm {

// Structured optimum of the fluid relaxation. Entries are addressed by
// (resource j in [1,M], period t in [1,T], interval index); y0/y_out only
// exist for the choice-based (sales-based) relaxation.
struct FluidSolution {
  Scenario scenario = Scenario::reject_or_accept;
  int resource_count = 0;
  int slot_count = 0;
  int horizon = 0;
  double objective = 0.0;
  std::vector<double> x;      // probability [a,b] is a maximal sequence
  std::vector<double> y;      // allocation / choice mass on the sequence
  std::vector<double> y0;     // offered-but-outside mass (choice only)
  std::vector<double> y_out;  // per-period outside mass (choice only)
  double max_clamp = 0.0;     // worst adjustment applied during extraction

  std::size_t cell(int j, int t, int interval_idx) const {
    const std::size_t k = static_cast<std::size_t>(interval_count(slot_count));
    return (static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(horizon) +
            static_cast<std::size_t>(t - 1)) *
               k +
           static_cast<std::size_t>(interval_idx);
  }
  double x_at(int j, int t, const Interval& iv) const {
    return x[cell(j, t, interval_index(slot_count, iv))];
  }
  double y_at(int j, int t, const Interval& iv) const {
    return y[cell(j, t, interval_index(slot_count, iv))];
  }
  double y0_at(int j, int t, const Interval& iv) const {
    return y0[cell(j, t, interval_index(slot_count, iv))];
  }
};

// Handles into the variables of a built model, for extraction and tests.
struct FluidModel {
  lp::Model model;
  Scenario scenario;
  int resource_count, slot_count, horizon;
  std::vector<lp::VarId> x_vars, y_vars, y0_vars, y_out_vars;  // same cell layout
};

// Fluid relaxation of the reject-or-accept scenario: variables x/y over every
// (resource, period, interval) cell; Online, Feasibility, Balance, Boundary
// and Capacity constraint families. Throws WrongScenario.
FluidModel build_lp(const Instance& instance);

// Sales-based relaxation of the choice-based scenario: adds y0/y_out
// variables, the Scale and Opt-out families, and makes Capacity an equality.
FluidModel build_sblp(const Instance& instance);

// Maps an Optimal solution back by cell, clamps values into [0,1] (clamping
// magnitude recorded and bounded by 1e-7) and verifies the FluidSolution
// invariants. Throws NotOptimal / InvariantBreach.
FluidSolution extract(const Instance& instance, const FluidModel& fluid_model,
                      const lp::Solution& solution);

// Convenience: build, solve, extract. Throws LpNotOptimal if the solve fails.
FluidSolution solve_fluid(const Instance& instance);

// JSON round-trip, keyed by "j:t:a:b" strings (zero entries omitted).
std::string to_json_string(const FluidSolution& fs, int indent = 2);
FluidSolution fluid_from_json_string(const std::string& text);

}  // namespace consecrm
