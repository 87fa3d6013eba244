#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "consecrm/errors.hpp"

namespace consecrm::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using VarId = int;

struct Term {
  VarId var;
  double coef;
};

enum class Rel { le, eq };

struct Constraint {
  std::vector<Term> terms;
  Rel rel = Rel::le;
  double rhs = 0.0;
  std::string name;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(Status s);

struct Solution {
  Status status = Status::iteration_limit;
  double objective = 0.0;
  std::vector<double> values;  // indexed by VarId
  long iterations = 0;
  double max_constraint_violation = 0.0;
  double duality_gap = 0.0;  // relative, from the final basis
};

// Maximization model over continuous box-bounded variables. Duplicate terms
// on one row are merged; every term must reference a declared variable and
// carry a finite coefficient.
class Model {
 public:
  VarId add_var(const std::string& name, double lower = 0.0, double upper = kInf);
  void add_constraint(std::vector<Term> terms, Rel rel, double rhs, std::string name = {});
  void set_objective(std::vector<Term> terms);

  int var_count() const { return static_cast<int>(lower_.size()); }
  int constraint_count() const { return static_cast<int>(rows_.size()); }
  const std::string& var_name(VarId v) const { return names_[static_cast<std::size_t>(v)]; }
  double lower(VarId v) const { return lower_[static_cast<std::size_t>(v)]; }
  double upper(VarId v) const { return upper_[static_cast<std::size_t>(v)]; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  const std::vector<Term>& objective() const { return objective_; }

  double objective_value(const std::vector<double>& values) const;

 private:
  void check_terms(const std::vector<Term>& terms) const;

  std::vector<std::string> names_;
  std::vector<double> lower_, upper_;
  std::unordered_map<std::string, VarId> by_name_;
  std::vector<Constraint> rows_;
  std::vector<Term> objective_;
};

struct SolveOptions {
  double feas_tol = 1e-7;   // bound/constraint feasibility
  double opt_tol = 1e-9;    // reduced-cost optimality
  long max_iterations = 1'000'000;
};

// Reference solver: bounded-variable revised primal simplex with Bland's rule
// as the anti-cycling safeguard. Deterministic for a fixed model.
Solution solve(const Model& model, const SolveOptions& options = {});

// CPLEX-style LP interchange text, for cross-checking with external solvers.
void write_lp_text(const Model& model, std::ostream& out, const std::string& title = "model");

}  // namespace consecrm::lp
