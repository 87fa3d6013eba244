#include "consecrm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace consecrm::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "Optimal";
    case Status::infeasible: return "Infeasible";
    case Status::unbounded: return "Unbounded";
    case Status::iteration_limit: return "IterationLimit";
  }
  return "Unknown";
}

VarId Model::add_var(const std::string& name, double lower, double upper) {
  if (by_name_.count(name)) fail(Errc::duplicate_name, "variable \"" + name + "\" already declared");
  if (!std::isfinite(lower) || std::isnan(upper) || lower > upper)
    fail(Errc::bad_bounds, "variable \"" + name + "\" has lower > upper or non-finite lower");
  const VarId id = var_count();
  names_.push_back(name);
  lower_.push_back(lower);
  upper_.push_back(upper);
  by_name_.emplace(name, id);
  return id;
}

void Model::check_terms(const std::vector<Term>& terms) const {
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= var_count())
      fail(Errc::bad_input, "term references undeclared variable id " + std::to_string(t.var));
    if (!std::isfinite(t.coef)) fail(Errc::bad_input, "non-finite coefficient");
  }
}

namespace {

std::vector<Term> merge_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  return merged;
}

}  // namespace

void Model::add_constraint(std::vector<Term> terms, Rel rel, double rhs, std::string name) {
  check_terms(terms);
  if (!std::isfinite(rhs)) fail(Errc::bad_input, "non-finite right-hand side");
  rows_.push_back(Constraint{merge_terms(std::move(terms)), rel, rhs, std::move(name)});
}

void Model::set_objective(std::vector<Term> terms) {
  check_terms(terms);
  objective_ = merge_terms(std::move(terms));
}

double Model::objective_value(const std::vector<double>& values) const {
  double total = 0.0;
  for (const Term& t : objective_) total += t.coef * values[static_cast<std::size_t>(t.var)];
  return total;
}

void write_lp_text(const Model& model, std::ostream& out, const std::string& title) {
  auto write_expr = [&out](const std::vector<Term>& terms, const Model& m) {
    bool first = true;
    for (const Term& t : terms) {
      if (t.coef == 0.0) continue;
      if (first) {
        if (t.coef < 0.0) out << "- ";
        first = false;
      } else {
        out << (t.coef < 0.0 ? " - " : " + ");
      }
      const double mag = std::abs(t.coef);
      if (mag != 1.0) out << mag << " ";
      out << m.var_name(t.var);
    }
    if (first) out << "0 " << (m.var_count() > 0 ? m.var_name(0) : "x");
  };

  out << "\\ " << title << "\n";
  out << "Maximize\n obj: ";
  write_expr(model.objective(), model);
  out << "\nSubject To\n";
  int index = 0;
  for (const Constraint& c : model.constraints()) {
    out << " " << (c.name.empty() ? "c" + std::to_string(index) : c.name) << ": ";
    write_expr(c.terms, model);
    out << (c.rel == Rel::le ? " <= " : " = ") << c.rhs << "\n";
    ++index;
  }
  out << "Bounds\n";
  for (VarId v = 0; v < model.var_count(); ++v) {
    out << " " << model.lower(v) << " <= " << model.var_name(v);
    if (model.upper(v) < kInf) out << " <= " << model.upper(v);
    out << "\n";
  }
  out << "End\n";
}

}  // namespace consecrm::lp
