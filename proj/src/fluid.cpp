#include "consecrm/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace consecrm {

namespace {

std::string cell_name(const char* prefix, int j, int t, int a, int b) {
  return std::string(prefix) + "_" + std::to_string(j) + "_" + std::to_string(t) + "_" +
         std::to_string(a) + "_" + std::to_string(b);
}

void require_valid(const Instance& instance) {
  const auto violations = validate(instance);
  if (!violations.empty())
    fail(Errc::bad_input, "instance invalid: " + violations.front() +
                              (violations.size() > 1 ? " (+ more)" : ""));
}

// Shared skeleton of (LP) and (SBLP): variables in lexicographic (j,t,a,b)
// order, equality families first (Boundary, then Balance by period) so the
// solver's triangular crash finds a feasible start.
struct Builder {
  const Instance& instance;
  FluidModel out;
  int m, n, horizon, k;
  bool choice;

  explicit Builder(const Instance& inst, Scenario expect) : instance(inst) {
    if (inst.scenario != expect)
      fail(Errc::wrong_scenario, std::string("builder expects the ") +
                                     (expect == Scenario::reject_or_accept ? "reject-or-accept"
                                                                           : "choice-based") +
                                     " scenario");
    require_valid(inst);
    m = inst.resource_count;
    n = inst.slot_count;
    horizon = inst.horizon;
    k = interval_count(n);
    choice = expect == Scenario::choice_based;
    out.scenario = inst.scenario;
    out.resource_count = m;
    out.slot_count = n;
    out.horizon = horizon;
  }

  std::size_t cell(int j, int t, int idx) const {
    return (static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(horizon) +
            static_cast<std::size_t>(t - 1)) *
               static_cast<std::size_t>(k) +
           static_cast<std::size_t>(idx);
  }

  const RequestType& request(int t) const {
    return instance.requests[static_cast<std::size_t>(t - 1)];
  }

  void add_vars() {
    auto add_block = [&](const char* prefix, std::vector<lp::VarId>& vars) {
      for (int j = 1; j <= m; ++j)
        for (int t = 1; t <= horizon; ++t)
          for (int a = 1; a <= n; ++a)
            for (int b = a; b <= n; ++b)
              vars.push_back(out.model.add_var(cell_name(prefix, j, t, a, b)));
    };
    add_block("x", out.x_vars);
    add_block("y", out.y_vars);
    if (choice) {
      add_block("yo", out.y0_vars);
      for (int t = 1; t <= horizon; ++t)
        out.y_out_vars.push_back(out.model.add_var("yout_" + std::to_string(t)));
    }
  }

  void add_boundary() {
    if (horizon == 0) return;
    const Interval full{1, n};
    for (int j = 1; j <= m; ++j)
      for (int a = 1; a <= n; ++a)
        for (int b = a; b <= n; ++b) {
          const int idx = interval_index(n, Interval{a, b});
          const double rhs = Interval{a, b} == full ? 1.0 : 0.0;
          out.model.add_constraint({{out.x_vars[cell(j, 1, idx)], 1.0}}, lp::Rel::eq, rhs,
                                   cell_name("boundary", j, 1, a, b));
        }
  }

  void add_balance() {
    for (int t = 2; t <= horizon; ++t) {
      const RequestType& prev = request(t - 1);
      const int l = prev.interval.lo, r = prev.interval.hi;
      for (int j = 1; j <= m; ++j)
        for (int a = 1; a <= n; ++a)
          for (int b = a; b <= n; ++b) {
            const int idx = interval_index(n, Interval{a, b});
            std::vector<lp::Term> terms{{out.x_vars[cell(j, t, idx)], 1.0},
                                        {out.x_vars[cell(j, t - 1, idx)], -1.0},
                                        {out.y_vars[cell(j, t - 1, idx)], 1.0}};
            if (b + 1 == l)  // [a,b] is the left fragment of a split of [a,b']
              for (int bp = r; bp <= n; ++bp)
                terms.push_back({out.y_vars[cell(j, t - 1, interval_index(n, Interval{a, bp}))], -1.0});
            if (r == a - 1)  // [a,b] is the right fragment of a split of [a',b]
              for (int ap = 1; ap <= l; ++ap)
                terms.push_back({out.y_vars[cell(j, t - 1, interval_index(n, Interval{ap, b}))], -1.0});
            out.model.add_constraint(std::move(terms), lp::Rel::eq, 0.0,
                                     cell_name("balance", j, t, a, b));
          }
    }
  }

  void add_scale() {
    for (int t = 1; t <= horizon; ++t) {
      const RequestType& req = request(t);
      for (int j = 1; j <= m; ++j) {
        const double v = req.attractions[static_cast<std::size_t>(j - 1)];
        for (int a = 1; a <= n; ++a)
          for (int b = a; b <= n; ++b) {
            const int idx = interval_index(n, Interval{a, b});
            out.model.add_constraint({{out.y_vars[cell(j, t, idx)], req.outside_attraction},
                                      {out.y0_vars[cell(j, t, idx)], -v}},
                                     lp::Rel::eq, 0.0, cell_name("scale", j, t, a, b));
          }
      }
    }
  }

  void add_capacity() {
    for (int t = 1; t <= horizon; ++t) {
      std::vector<lp::Term> terms;
      if (choice) terms.push_back({out.y_out_vars[static_cast<std::size_t>(t - 1)], 1.0});
      for (int j = 1; j <= m; ++j)
        for (int idx = 0; idx < k; ++idx) terms.push_back({out.y_vars[cell(j, t, idx)], 1.0});
      out.model.add_constraint(std::move(terms), choice ? lp::Rel::eq : lp::Rel::le, request(t).p,
                               "capacity_" + std::to_string(t));
    }
  }

  void add_online_and_feasibility() {
    for (int j = 1; j <= m; ++j)
      for (int t = 1; t <= horizon; ++t) {
        const RequestType& req = request(t);
        for (int a = 1; a <= n; ++a)
          for (int b = a; b <= n; ++b) {
            const int idx = interval_index(n, Interval{a, b});
            std::vector<lp::Term> lhs{{out.y_vars[cell(j, t, idx)], 1.0}};
            if (choice) lhs.push_back({out.y0_vars[cell(j, t, idx)], 1.0});

            std::vector<lp::Term> online = lhs;
            online.push_back({out.x_vars[cell(j, t, idx)], -req.p});
            out.model.add_constraint(std::move(online), lp::Rel::le, 0.0,
                                     cell_name("online", j, t, a, b));

            bool feasible = Interval{a, b}.contains(req.interval);
            if (choice) feasible = feasible && req.attractions[static_cast<std::size_t>(j - 1)] > 0.0;
            out.model.add_constraint(std::move(lhs), lp::Rel::le, feasible ? 1.0 : 0.0,
                                     cell_name("feasibility", j, t, a, b));
          }
      }
  }

  void add_opt_out() {
    for (int j = 1; j <= m; ++j)
      for (int t = 1; t <= horizon; ++t) {
        std::vector<lp::Term> terms;
        for (int idx = 0; idx < k; ++idx) terms.push_back({out.y0_vars[cell(j, t, idx)], 1.0});
        terms.push_back({out.y_out_vars[static_cast<std::size_t>(t - 1)], -1.0});
        out.model.add_constraint(std::move(terms), lp::Rel::le, 0.0,
                                 "optout_" + std::to_string(j) + "_" + std::to_string(t));
      }
  }

  void add_objective() {
    std::vector<lp::Term> terms;
    for (int j = 1; j <= m; ++j)
      for (int t = 1; t <= horizon; ++t) {
        const double w = request(t).rewards[static_cast<std::size_t>(j - 1)];
        for (int idx = 0; idx < k; ++idx) terms.push_back({out.y_vars[cell(j, t, idx)], w});
      }
    out.model.set_objective(std::move(terms));
  }
};

}  // namespace

FluidModel build_lp(const Instance& instance) {
  Builder builder(instance, Scenario::reject_or_accept);
  builder.add_vars();
  builder.add_boundary();
  builder.add_balance();
  builder.add_online_and_feasibility();
  builder.add_capacity();
  builder.add_objective();
  return std::move(builder.out);
}

FluidModel build_sblp(const Instance& instance) {
  Builder builder(instance, Scenario::choice_based);
  builder.add_vars();
  builder.add_boundary();
  builder.add_balance();
  builder.add_scale();
  builder.add_capacity();
  builder.add_online_and_feasibility();
  builder.add_opt_out();
  builder.add_objective();
  return std::move(builder.out);
}

FluidSolution extract(const Instance& instance, const FluidModel& fm,
                      const lp::Solution& solution) {
  if (solution.status != lp::Status::optimal)
    fail(Errc::not_optimal, std::string("solution status is ") + lp::to_string(solution.status));
  if (fm.resource_count != instance.resource_count || fm.slot_count != instance.slot_count ||
      fm.horizon != instance.horizon || fm.scenario != instance.scenario)
    fail(Errc::mismatch, "model was built from a different instance");

  constexpr double kTol = 1e-7;
  FluidSolution fs;
  fs.scenario = fm.scenario;
  fs.resource_count = fm.resource_count;
  fs.slot_count = fm.slot_count;
  fs.horizon = fm.horizon;
  fs.objective = solution.objective;

  double worst = 0.0;
  auto clamp01 = [&worst](double v) {
    const double c = std::min(1.0, std::max(0.0, v));
    worst = std::max(worst, std::abs(c - v));
    return c;
  };
  auto pull = [&](const std::vector<lp::VarId>& vars, std::vector<double>& dst) {
    dst.resize(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i)
      dst[i] = clamp01(solution.values[static_cast<std::size_t>(vars[i])]);
  };
  pull(fm.x_vars, fs.x);
  pull(fm.y_vars, fs.y);
  if (fm.scenario == Scenario::choice_based) {
    pull(fm.y0_vars, fs.y0);
    pull(fm.y_out_vars, fs.y_out);
  }
  if (worst > kTol)
    fail(Errc::invariant_breach,
         "solver values leave [0,1] by " + std::to_string(worst) + " (> 1e-7)");

  const int k = interval_count(fs.slot_count);
  double breach = 0.0;
  // Boundary: x_1 must be the [1,N] indicator; snap after verifying.
  if (fs.horizon >= 1) {
    const int full_idx = interval_index(fs.slot_count, Interval{1, fs.slot_count});
    for (int j = 1; j <= fs.resource_count; ++j)
      for (int idx = 0; idx < k; ++idx) {
        const double want = idx == full_idx ? 1.0 : 0.0;
        double& got = fs.x[fs.cell(j, 1, idx)];
        breach = std::max(breach, std::abs(got - want));
        got = want;
      }
  }
  worst = std::max(worst, breach);

  for (int j = 1; j <= fs.resource_count; ++j)
    for (int t = 1; t <= fs.horizon; ++t) {
      const RequestType& req = instance.requests[static_cast<std::size_t>(t - 1)];
      for (int idx = 0; idx < k; ++idx) {
        const std::size_t c = fs.cell(j, t, idx);
        const double online_lhs =
            fs.y[c] + (fs.scenario == Scenario::choice_based ? fs.y0[c] : 0.0);
        breach = std::max(breach, online_lhs - fs.x[c] * req.p);
        if (fs.scenario == Scenario::choice_based) {
          const double v = req.attractions[static_cast<std::size_t>(j - 1)];
          breach = std::max(breach, std::abs(req.outside_attraction * fs.y[c] - v * fs.y0[c]));
        }
      }
    }
  for (int t = 1; t <= fs.horizon; ++t) {
    double total = fs.scenario == Scenario::choice_based
                       ? fs.y_out[static_cast<std::size_t>(t - 1)]
                       : 0.0;
    for (int j = 1; j <= fs.resource_count; ++j)
      for (int idx = 0; idx < k; ++idx) total += fs.y[fs.cell(j, t, idx)];
    const double p = instance.requests[static_cast<std::size_t>(t - 1)].p;
    breach = std::max(breach, fs.scenario == Scenario::choice_based ? std::abs(total - p)
                                                                    : total - p);
  }
  if (fs.objective < -kTol) fail(Errc::invariant_breach, "negative objective");
  if (breach > kTol)
    fail(Errc::invariant_breach,
         "fluid invariant violated by " + std::to_string(breach) + " (> 1e-7)");
  fs.max_clamp = std::max(worst, breach);
  return fs;
}

FluidSolution solve_fluid(const Instance& instance) {
  const FluidModel fm = instance.scenario == Scenario::reject_or_accept ? build_lp(instance)
                                                                        : build_sblp(instance);
  const lp::Solution solution = lp::solve(fm.model);
  if (solution.status != lp::Status::optimal)
    fail(Errc::lp_not_optimal,
         std::string("fluid relaxation solve ended with status ") + lp::to_string(solution.status));
  return extract(instance, fm, solution);
}

namespace {

using nlohmann::json;

json block_to_json(const FluidSolution& fs, const std::vector<double>& values) {
  json out = json::object();
  const int k = interval_count(fs.slot_count);
  for (int j = 1; j <= fs.resource_count; ++j)
    for (int t = 1; t <= fs.horizon; ++t)
      for (int idx = 0; idx < k; ++idx) {
        const double v = values[fs.cell(j, t, idx)];
        if (v == 0.0) continue;
        const Interval iv = interval_at(fs.slot_count, idx);
        out[std::to_string(j) + ":" + std::to_string(t) + ":" + std::to_string(iv.lo) + ":" +
            std::to_string(iv.hi)] = v;
      }
  return out;
}

void block_from_json(const json& obj, FluidSolution& fs, std::vector<double>& values) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    int j, t, a, b;
    if (std::sscanf(it.key().c_str(), "%d:%d:%d:%d", &j, &t, &a, &b) != 4)
      fail(Errc::bad_input, "bad fluid cell key \"" + it.key() + "\"");
    values[fs.cell(j, t, interval_index(fs.slot_count, Interval{a, b}))] = it.value().get<double>();
  }
}

}  // namespace

std::string to_json_string(const FluidSolution& fs, int indent) {
  json doc{{"scenario", to_string(fs.scenario)},
           {"M", fs.resource_count},
           {"N", fs.slot_count},
           {"T", fs.horizon},
           {"objective", fs.objective},
           {"x", block_to_json(fs, fs.x)},
           {"y", block_to_json(fs, fs.y)}};
  if (fs.scenario == Scenario::choice_based) {
    doc["y0"] = block_to_json(fs, fs.y0);
    json outside = json::object();
    for (int t = 1; t <= fs.horizon; ++t) {
      const double v = fs.y_out[static_cast<std::size_t>(t - 1)];
      if (v != 0.0) outside[std::to_string(t)] = v;
    }
    doc["y_out"] = std::move(outside);
  }
  return doc.dump(indent);
}

FluidSolution fluid_from_json_string(const std::string& text) {
  json doc = json::parse(text);
  FluidSolution fs;
  const std::string scenario = doc.at("scenario").get<std::string>();
  fs.scenario = scenario == "choice" ? Scenario::choice_based : Scenario::reject_or_accept;
  fs.resource_count = doc.at("M").get<int>();
  fs.slot_count = doc.at("N").get<int>();
  fs.horizon = doc.at("T").get<int>();
  fs.objective = doc.at("objective").get<double>();
  const std::size_t cells = static_cast<std::size_t>(fs.resource_count) *
                            static_cast<std::size_t>(fs.horizon) *
                            static_cast<std::size_t>(interval_count(fs.slot_count));
  fs.x.assign(cells, 0.0);
  fs.y.assign(cells, 0.0);
  block_from_json(doc.at("x"), fs, fs.x);
  block_from_json(doc.at("y"), fs, fs.y);
  if (fs.scenario == Scenario::choice_based) {
    fs.y0.assign(cells, 0.0);
    fs.y_out.assign(static_cast<std::size_t>(fs.horizon), 0.0);
    block_from_json(doc.at("y0"), fs, fs.y0);
    for (auto it = doc.at("y_out").begin(); it != doc.at("y_out").end(); ++it)
      fs.y_out[static_cast<std::size_t>(std::stoi(it.key()) - 1)] = it.value().get<double>();
  }
  return fs;
}

}  // namespace consecrm
