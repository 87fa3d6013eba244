#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "consecrm/lp.hpp"

// Bounded-variable revised primal simplex. Dantzig pricing with Bland's rule
// as the anti-cycling fallback on degenerate stalls; explicit dense basis
// inverse maintained by product-form updates. Presolve handles empty rows,
// singleton rows (turned into bounds), forcing rows, and fixed variables.
// The initial basis comes from a triangular crash (slack-first), so the fluid
// models start primal feasible and phase 1 is only needed for generic models.

namespace consecrm::lp {

namespace {

constexpr double kPivTol = 1e-9;    // smallest usable ratio-test pivot
constexpr double kPivAccept = 1e-8; // smallest acceptable chosen pivot
constexpr double kTieTol = 1e-12;
constexpr int kStallLimit = 200;    // degenerate steps before Bland kicks in
constexpr int kSyncPeriod = 500;    // iterations between x/y recomputes

struct ReducedRow {
  std::vector<Term> terms;  // reduced variable ids
  Rel rel = Rel::le;
  double rhs = 0.0;
};

struct Presolved {
  bool infeasible = false;
  std::vector<double> lb, ub, cost;  // per reduced var; cost is minimization
  std::vector<VarId> orig;           // reduced -> model id
  std::vector<ReducedRow> rows;
  std::vector<double> fixed_value;   // per model id; only meaningful if fixed
  std::vector<char> fixed;
};

Presolved presolve(const Model& model, double feas_tol) {
  const int n = model.var_count();
  Presolved out;
  out.fixed.assign(static_cast<std::size_t>(n), 0);
  out.fixed_value.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<double> lb(static_cast<std::size_t>(n)), ub(static_cast<std::size_t>(n));
  for (VarId v = 0; v < n; ++v) {
    lb[static_cast<std::size_t>(v)] = model.lower(v);
    ub[static_cast<std::size_t>(v)] = model.upper(v);
  }

  auto fix = [&](VarId v, double value) {
    out.fixed[static_cast<std::size_t>(v)] = 1;
    out.fixed_value[static_cast<std::size_t>(v)] =
        std::min(std::max(value, lb[static_cast<std::size_t>(v)]), ub[static_cast<std::size_t>(v)]);
  };

  std::vector<char> dropped(model.constraints().size(), 0);
  bool changed = true;
  while (changed && !out.infeasible) {
    changed = false;
    for (std::size_t r = 0; r < model.constraints().size(); ++r) {
      if (dropped[r]) continue;
      const Constraint& row = model.constraints()[r];
      double rhs = row.rhs;
      std::vector<Term> live;
      for (const Term& t : row.terms) {
        if (t.coef == 0.0) continue;
        if (out.fixed[static_cast<std::size_t>(t.var)])
          rhs -= t.coef * out.fixed_value[static_cast<std::size_t>(t.var)];
        else
          live.push_back(t);
      }

      if (live.empty()) {
        const bool ok = row.rel == Rel::le ? rhs >= -feas_tol : std::abs(rhs) <= feas_tol;
        if (!ok) out.infeasible = true;
        dropped[r] = 1;
        changed = true;
        continue;
      }

      if (live.size() == 1) {
        const VarId v = live[0].var;
        const double c = live[0].coef;
        const double bound = rhs / c;
        auto& l = lb[static_cast<std::size_t>(v)];
        auto& u = ub[static_cast<std::size_t>(v)];
        if (row.rel == Rel::eq) {
          if (bound < l - feas_tol || bound > u + feas_tol) out.infeasible = true;
          fix(v, bound);
        } else {
          if (c > 0.0)
            u = std::min(u, bound);
          else
            l = std::max(l, bound);
          if (l > u + feas_tol) out.infeasible = true;
          if (u - l <= 1e-12 && !out.fixed[static_cast<std::size_t>(v)]) fix(v, (l + u) / 2.0);
        }
        dropped[r] = 1;
        changed = true;
        continue;
      }

      if (row.rel == Rel::le) {
        // Forcing row: the smallest achievable activity already meets the rhs,
        // so every participating variable is pinned at its min-side bound.
        double min_activity = 0.0;
        bool bounded = true;
        for (const Term& t : live) {
          const double side = t.coef > 0.0 ? lb[static_cast<std::size_t>(t.var)]
                                           : ub[static_cast<std::size_t>(t.var)];
          if (!std::isfinite(side)) {
            bounded = false;
            break;
          }
          min_activity += t.coef * side;
        }
        if (bounded) {
          if (min_activity > rhs + feas_tol) {
            out.infeasible = true;
          } else if (min_activity >= rhs - 1e-12) {
            for (const Term& t : live)
              fix(t.var, t.coef > 0.0 ? lb[static_cast<std::size_t>(t.var)]
                                      : ub[static_cast<std::size_t>(t.var)]);
            dropped[r] = 1;
            changed = true;
          }
        }
      }
    }
  }
  if (out.infeasible) return out;

  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  for (VarId v = 0; v < n; ++v) {
    if (out.fixed[static_cast<std::size_t>(v)]) continue;
    remap[static_cast<std::size_t>(v)] = static_cast<int>(out.orig.size());
    out.orig.push_back(v);
    out.lb.push_back(lb[static_cast<std::size_t>(v)]);
    out.ub.push_back(ub[static_cast<std::size_t>(v)]);
    out.cost.push_back(0.0);
  }
  for (const Term& t : model.objective())
    if (!out.fixed[static_cast<std::size_t>(t.var)])
      out.cost[static_cast<std::size_t>(remap[static_cast<std::size_t>(t.var)])] -= t.coef;

  for (std::size_t r = 0; r < model.constraints().size(); ++r) {
    if (dropped[r]) continue;
    const Constraint& row = model.constraints()[r];
    ReducedRow reduced;
    reduced.rel = row.rel;
    reduced.rhs = row.rhs;
    for (const Term& t : row.terms) {
      if (t.coef == 0.0) continue;
      if (out.fixed[static_cast<std::size_t>(t.var)])
        reduced.rhs -= t.coef * out.fixed_value[static_cast<std::size_t>(t.var)];
      else
        reduced.terms.push_back(Term{remap[static_cast<std::size_t>(t.var)], t.coef});
    }
    out.rows.push_back(std::move(reduced));
  }
  return out;
}

class Simplex {
 public:
  Simplex(const Presolved& p, const SolveOptions& opt) : p_(p), opt_(opt) {
    build_columns();
  }

  Status run() {
    crash_basis();
    if (need_phase1_) {
      phase1_ = true;
      set_phase_costs();
      recompute_duals();
      const Status s = iterate();
      if (s != Status::optimal) return s == Status::unbounded ? Status::iteration_limit : s;
      if (phase1_objective() > opt_.feas_tol) return Status::infeasible;
      // Artificials are pinned at zero for phase 2; basic ones stay at ~0.
      for (int a : artificials_) ub_[static_cast<std::size_t>(a)] = 0.0;
      phase1_ = false;
      set_phase_costs();
      recompute_duals();
    }
    Status s = iterate();
    if (s != Status::optimal) return s;

    // Clean-up: resync x and duals, then re-price; drift can hide candidates.
    for (int round = 0; round < 3; ++round) {
      resync();
      if (price(true).entering < 0) break;
      s = iterate();
      if (s != Status::optimal) return s;
    }
    return Status::optimal;
  }

  // Value of reduced variable j after run().
  double value(int j) const {
    const int row = pos_in_basis_[static_cast<std::size_t>(j)];
    if (row >= 0) return xB_(row);
    return at_upper_[static_cast<std::size_t>(j)] ? ub_[static_cast<std::size_t>(j)]
                                                  : lb_[static_cast<std::size_t>(j)];
  }

  long iterations() const { return iterations_; }

  double duality_gap() const {
    // With y from the final basis: c'x = y'b + sum_nonbasic d_j x_j holds
    // exactly in exact arithmetic; the dual estimate clamps wrong-signed
    // reduced costs, so the difference measures optimality drift.
    double primal = 0.0;
    for (int j = 0; j < ncols_; ++j) primal += cost_[static_cast<std::size_t>(j)] * value(j);
    double dual = y_.dot(b_);
    for (int j = 0; j < ncols_; ++j) {
      if (pos_in_basis_[static_cast<std::size_t>(j)] >= 0) continue;
      if (lb_[static_cast<std::size_t>(j)] == ub_[static_cast<std::size_t>(j)]) {
        dual += reduced_cost(j) * lb_[static_cast<std::size_t>(j)];
        continue;
      }
      const double d = reduced_cost(j);
      if (at_upper_[static_cast<std::size_t>(j)])
        dual += std::min(d, 0.0) * ub_[static_cast<std::size_t>(j)];
      else
        dual += std::max(d, 0.0) * lb_[static_cast<std::size_t>(j)];
    }
    return std::abs(primal - dual) / std::max(1.0, std::abs(primal));
  }

 private:
  struct PriceResult {
    int entering = -1;
    double reduced = 0.0;
  };

  void build_columns() {
    m_ = static_cast<int>(p_.rows.size());
    nstruct_ = static_cast<int>(p_.lb.size());
    lb_ = p_.lb;
    ub_ = p_.ub;
    cost_ = p_.cost;
    cols_.assign(static_cast<std::size_t>(nstruct_), {});
    b_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      b_(r) = p_.rows[static_cast<std::size_t>(r)].rhs;
      for (const Term& t : p_.rows[static_cast<std::size_t>(r)].terms)
        cols_[static_cast<std::size_t>(t.var)].push_back({r, t.coef});
    }
    slack_of_row_.assign(static_cast<std::size_t>(m_), -1);
    for (int r = 0; r < m_; ++r) {
      if (p_.rows[static_cast<std::size_t>(r)].rel != Rel::le) continue;
      slack_of_row_[static_cast<std::size_t>(r)] = add_column({{r, 1.0}}, 0.0, kInf, 0.0);
    }
    ncols_ = static_cast<int>(cols_.size());
  }

  int add_column(std::vector<std::pair<int, double>> entries, double lo, double hi, double c) {
    cols_.push_back(std::move(entries));
    lb_.push_back(lo);
    ub_.push_back(hi);
    cost_.push_back(c);
    ncols_ = static_cast<int>(cols_.size());
    return ncols_ - 1;
  }

  double nonbasic_value(int j) const {
    return at_upper_[static_cast<std::size_t>(j)] ? ub_[static_cast<std::size_t>(j)]
                                                  : lb_[static_cast<std::size_t>(j)];
  }

  // b minus the contribution of every nonbasic column.
  Eigen::VectorXd effective_rhs() const {
    Eigen::VectorXd rhs = b_;
    for (int j = 0; j < ncols_; ++j) {
      if (pos_in_basis_[static_cast<std::size_t>(j)] >= 0) continue;
      const double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)]) rhs(row) -= coef * v;
    }
    return rhs;
  }

  void crash_basis() {
    basis_.assign(static_cast<std::size_t>(m_), -1);
    at_upper_.assign(static_cast<std::size_t>(ncols_), 0);

    // First row each column touches; a column whose first nonzero sits in row
    // r can serve as a triangular pivot for r.
    std::vector<int> first_row(static_cast<std::size_t>(ncols_), m_);
    for (int j = 0; j < ncols_; ++j)
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)])
        first_row[static_cast<std::size_t>(j)] = std::min(first_row[static_cast<std::size_t>(j)], row);

    std::vector<std::vector<int>> candidates(static_cast<std::size_t>(m_));
    for (int j = 0; j < ncols_; ++j)
      if (first_row[static_cast<std::size_t>(j)] < m_)
        candidates[static_cast<std::size_t>(first_row[static_cast<std::size_t>(j)])].push_back(j);

    for (int r = 0; r < m_; ++r) {
      int pick = -1;
      double pick_mag = 0.0;
      for (int j : candidates[static_cast<std::size_t>(r)]) {
        const double coef = coef_at(j, r);
        if (std::abs(coef) < 1e-7) continue;
        if (j == slack_of_row_[static_cast<std::size_t>(r)]) {  // slack wins outright
          pick = j;
          break;
        }
        if (std::abs(coef) > pick_mag + kTieTol) {
          pick = j;
          pick_mag = std::abs(coef);
        }
      }
      basis_[static_cast<std::size_t>(r)] = pick;
    }

    // Uncovered rows get artificials, sign-matched to the residual below.
    artificials_.clear();
    for (int r = 0; r < m_; ++r)
      if (basis_[static_cast<std::size_t>(r)] < 0) {
        const int a = add_column({{r, 1.0}}, 0.0, kInf, 0.0);
        artificials_.push_back(a);
        basis_[static_cast<std::size_t>(r)] = a;
      }
    at_upper_.assign(static_cast<std::size_t>(ncols_), 0);
    rebuild_positions();

    if (!forward_solve_feasible()) {
      // Crash produced an out-of-bounds basic solution; fall back to the
      // classic slack/artificial start.
      for (int a : artificials_) cols_[static_cast<std::size_t>(a)].clear();
      artificials_.clear();
      for (int r = 0; r < m_; ++r) {
        const int slack = slack_of_row_[static_cast<std::size_t>(r)];
        basis_[static_cast<std::size_t>(r)] = slack;  // may be -1 for eq rows
      }
      rebuild_positions();
      const Eigen::VectorXd rhs = effective_rhs_nonbasic_only();
      for (int r = 0; r < m_; ++r) {
        const int slack = basis_[static_cast<std::size_t>(r)];
        if (slack >= 0 && rhs(r) >= 0.0) continue;
        const double sign = rhs(r) >= 0.0 ? 1.0 : -1.0;
        const int a = add_column({{r, sign}}, 0.0, kInf, 0.0);
        artificials_.push_back(a);
        basis_[static_cast<std::size_t>(r)] = a;
      }
      at_upper_.assign(static_cast<std::size_t>(ncols_), 0);
      rebuild_positions();
      const bool ok = forward_solve_feasible();
      (void)ok;  // diagonal basis with signed artificials is always feasible
    }

    build_triangular_inverse();
    xB_ = Binv_ * effective_rhs();
    need_phase1_ = false;
    for (int a : artificials_) {
      const int row = pos_in_basis_[static_cast<std::size_t>(a)];
      if (row >= 0 && xB_(row) > opt_.feas_tol) need_phase1_ = true;
    }
    if (!artificials_.empty() && !need_phase1_)
      for (int a : artificials_) ub_[static_cast<std::size_t>(a)] = 0.0;
    set_phase_costs();
    recompute_duals();
  }

  double coef_at(int j, int row) const {
    for (const auto& [r, c] : cols_[static_cast<std::size_t>(j)])
      if (r == row) return c;
    return 0.0;
  }

  void rebuild_positions() {
    pos_in_basis_.assign(static_cast<std::size_t>(ncols_), -1);
    for (int r = 0; r < m_; ++r)
      if (basis_[static_cast<std::size_t>(r)] >= 0)
        pos_in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = r;
  }

  Eigen::VectorXd effective_rhs_nonbasic_only() const { return effective_rhs(); }

  // Solves B xB = rhs by forward substitution (valid for the triangular crash
  // bases), flipping artificial signs so their values are nonnegative.
  // Returns false if a structural/slack basic value lands out of bounds.
  bool forward_solve_feasible() {
    const Eigen::VectorXd rhs = effective_rhs();
    std::vector<std::vector<std::pair<int, double>>> basic_in_row(static_cast<std::size_t>(m_));
    for (int r = 0; r < m_; ++r) {
      const int j = basis_[static_cast<std::size_t>(r)];
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)])
        basic_in_row[static_cast<std::size_t>(row)].push_back({r, coef});
    }
    xB_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      double s = rhs(r);
      double diag = 0.0;
      for (const auto& [pivot_row, coef] : basic_in_row[static_cast<std::size_t>(r)]) {
        if (pivot_row == r)
          diag = coef;
        else if (pivot_row < r)
          s -= coef * xB_(pivot_row);
        else
          return false;  // not triangular; caller falls back
      }
      if (std::abs(diag) < 1e-12) return false;
      xB_(r) = s / diag;
    }
    bool feasible = true;
    for (int r = 0; r < m_ && feasible; ++r) {
      const int j = basis_[static_cast<std::size_t>(r)];
      const bool artificial =
          std::find(artificials_.begin(), artificials_.end(), j) != artificials_.end();
      if (artificial) {
        if (xB_(r) < 0.0) {  // flip the artificial's sign
          auto& entries = cols_[static_cast<std::size_t>(j)];
          entries[0].second = -entries[0].second;
          xB_(r) = -xB_(r);
        }
        continue;
      }
      if (xB_(r) < lb_[static_cast<std::size_t>(j)] - opt_.feas_tol ||
          xB_(r) > ub_[static_cast<std::size_t>(j)] + opt_.feas_tol)
        feasible = false;
    }
    return feasible;
  }

  void build_triangular_inverse() {
    std::vector<std::vector<std::pair<int, double>>> basic_in_row(static_cast<std::size_t>(m_));
    std::vector<double> diag(static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
      const int j = basis_[static_cast<std::size_t>(r)];
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)]) {
        if (row == r)
          diag[static_cast<std::size_t>(r)] = coef;
        else
          basic_in_row[static_cast<std::size_t>(row)].push_back({r, coef});
      }
    }
    Binv_.setZero(m_, m_);
    for (int c = 0; c < m_; ++c) {
      auto col = Binv_.col(c);
      col(c) = 1.0 / diag[static_cast<std::size_t>(c)];
      for (int r = c + 1; r < m_; ++r) {
        double s = 0.0;
        for (const auto& [pivot_row, coef] : basic_in_row[static_cast<std::size_t>(r)])
          if (pivot_row >= c) s -= coef * col(pivot_row);
        if (s != 0.0) col(r) = s / diag[static_cast<std::size_t>(r)];
      }
    }
  }

  void refactor() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
    for (int r = 0; r < m_; ++r) {
      const int j = basis_[static_cast<std::size_t>(r)];
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)]) B(row, r) = coef;
    }
    Binv_ = B.partialPivLu().inverse();
    resync();
  }

  void resync() {
    xB_ = Binv_ * effective_rhs();
    recompute_duals();
  }

  void set_phase_costs() {
    active_cost_.assign(static_cast<std::size_t>(ncols_), 0.0);
    if (phase1_) {
      for (int a : artificials_) active_cost_[static_cast<std::size_t>(a)] = 1.0;
    } else {
      for (int j = 0; j < nstruct_; ++j)
        active_cost_[static_cast<std::size_t>(j)] = cost_[static_cast<std::size_t>(j)];
    }
  }

  void recompute_duals() {
    Eigen::VectorXd cB(m_);
    for (int r = 0; r < m_; ++r)
      cB(r) = active_cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
    y_ = Binv_.transpose() * cB;
  }

  double reduced_cost(int j) const {
    double d = active_cost_[static_cast<std::size_t>(j)];
    for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)]) d -= y_(row) * coef;
    return d;
  }

  double phase1_objective() const {
    double total = 0.0;
    for (int a : artificials_) {
      const int row = pos_in_basis_[static_cast<std::size_t>(a)];
      if (row >= 0) total += xB_(row);
    }
    return total;
  }

  PriceResult price(bool bland) const {
    PriceResult best;
    for (int j = 0; j < ncols_; ++j) {
      if (pos_in_basis_[static_cast<std::size_t>(j)] >= 0) continue;
      if (lb_[static_cast<std::size_t>(j)] == ub_[static_cast<std::size_t>(j)]) continue;
      if (banned_.count(j)) continue;
      const double d = reduced_cost(j);
      double violation = 0.0;
      if (!at_upper_[static_cast<std::size_t>(j)] && d < -opt_.opt_tol)
        violation = -d;
      else if (at_upper_[static_cast<std::size_t>(j)] && d > opt_.opt_tol)
        violation = d;
      if (violation == 0.0) continue;
      if (bland) return {j, d};  // lowest index
      if (violation > std::abs(best.reduced) + kTieTol) best = {j, d};
    }
    return best;
  }

  Status iterate() {
    int stall = 0;
    bool bland = false;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return Status::iteration_limit;
      const PriceResult pr = price(bland);
      if (pr.entering < 0) {
        banned_.clear();
        return Status::optimal;
      }
      const int q = pr.entering;

      // FTRAN: direction of basic variables as x_q moves.
      Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(q)])
        w += coef * Binv_.col(row);

      const double sigma = at_upper_[static_cast<std::size_t>(q)] ? -1.0 : 1.0;
      double best_delta = ub_[static_cast<std::size_t>(q)] - lb_[static_cast<std::size_t>(q)];
      int leaving_row = -1;
      bool leaving_to_upper = false;
      double leaving_pivot_mag = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double g = sigma * w(i);
        const int bj = basis_[static_cast<std::size_t>(i)];
        if (g > kPivTol) {
          const double room = std::max(0.0, xB_(i) - lb_[static_cast<std::size_t>(bj)]);
          const double delta = room / g;
          if (delta < best_delta - kTieTol ||
              (delta < best_delta + kTieTol && better_leaving(bland, i, std::abs(w(i)),
                                                              leaving_row, leaving_pivot_mag))) {
            best_delta = delta;
            leaving_row = i;
            leaving_to_upper = false;
            leaving_pivot_mag = std::abs(w(i));
          }
        } else if (g < -kPivTol && std::isfinite(ub_[static_cast<std::size_t>(bj)])) {
          const double room = std::max(0.0, ub_[static_cast<std::size_t>(bj)] - xB_(i));
          const double delta = room / -g;
          if (delta < best_delta - kTieTol ||
              (delta < best_delta + kTieTol && better_leaving(bland, i, std::abs(w(i)),
                                                              leaving_row, leaving_pivot_mag))) {
            best_delta = delta;
            leaving_row = i;
            leaving_to_upper = true;
            leaving_pivot_mag = std::abs(w(i));
          }
        }
      }

      if (!std::isfinite(best_delta) && leaving_row < 0) {
        return phase1_ ? Status::iteration_limit : Status::unbounded;
      }

      ++iterations_;
      if (best_delta <= kTieTol) {
        if (++stall > kStallLimit) bland = true;
      } else {
        stall = 0;
        bland = false;
      }

      if (leaving_row < 0) {
        // Bound flip: x_q jumps to its other bound, basis unchanged.
        xB_ -= (sigma * best_delta) * w;
        at_upper_[static_cast<std::size_t>(q)] ^= 1;
        banned_.clear();
        continue;
      }

      if (leaving_pivot_mag < kPivAccept) {
        banned_.insert(q);  // numerically unusable column this round
        --iterations_;
        continue;
      }

      pivot(q, leaving_row, w, sigma, best_delta, leaving_to_upper, pr.reduced);
      banned_.clear();
      if (iterations_ % kSyncPeriod == 0) resync();
    }
  }

  bool better_leaving(bool bland, int row, double mag, int current_row, double current_mag) const {
    if (current_row < 0) return true;
    if (bland)  // smallest basic variable index, per Bland
      return basis_[static_cast<std::size_t>(row)] < basis_[static_cast<std::size_t>(current_row)];
    return mag > current_mag + kTieTol;
  }

  void pivot(int q, int r, const Eigen::VectorXd& w, double sigma, double delta,
             bool leaving_to_upper, double d_q) {
    const int leaving = basis_[static_cast<std::size_t>(r)];
    const double entering_value = nonbasic_value(q) + sigma * delta;

    xB_ -= (sigma * delta) * w;
    xB_(r) = entering_value;

    basis_[static_cast<std::size_t>(r)] = q;
    pos_in_basis_[static_cast<std::size_t>(q)] = r;
    pos_in_basis_[static_cast<std::size_t>(leaving)] = -1;
    at_upper_[static_cast<std::size_t>(leaving)] = leaving_to_upper ? 1 : 0;

    // Product-form update of the explicit inverse.
    const double wr = w(r);
    Eigen::VectorXd pivot_row = Binv_.row(r) / wr;
    Eigen::VectorXd w_masked = w;
    w_masked(r) = 0.0;
    Binv_.noalias() -= w_masked * pivot_row.transpose();
    Binv_.row(r) = pivot_row;

    // Dual update: y' = y + d_q * (row r of the new inverse).
    y_ += d_q * pivot_row;
  }

  const Presolved& p_;
  const SolveOptions& opt_;
  int m_ = 0, nstruct_ = 0, ncols_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lb_, ub_, cost_, active_cost_;
  std::vector<int> slack_of_row_, basis_, pos_in_basis_;
  std::vector<int> artificials_;
  std::vector<std::uint8_t> at_upper_;
  std::set<int> banned_;
  Eigen::VectorXd b_, xB_, y_;
  Eigen::MatrixXd Binv_;
  bool phase1_ = false;
  bool need_phase1_ = false;
  long iterations_ = 0;
};

}  // namespace

Solution solve(const Model& model, const SolveOptions& options) {
  Solution solution;
  solution.values.assign(static_cast<std::size_t>(model.var_count()), 0.0);

  Presolved reduced = presolve(model, options.feas_tol);
  if (reduced.infeasible) {
    solution.status = Status::infeasible;
    return solution;
  }

  auto fill_fixed = [&]() {
    for (VarId v = 0; v < model.var_count(); ++v)
      if (reduced.fixed[static_cast<std::size_t>(v)])
        solution.values[static_cast<std::size_t>(v)] =
            reduced.fixed_value[static_cast<std::size_t>(v)];
  };

  if (reduced.rows.empty()) {
    // Bound-only problem; each variable sits at whichever bound the
    // objective prefers.
    fill_fixed();
    for (std::size_t j = 0; j < reduced.orig.size(); ++j) {
      const double minimize_cost = reduced.cost[j];
      double v;
      if (minimize_cost < 0.0) {
        v = reduced.ub[j];
        if (!std::isfinite(v)) {
          solution.status = Status::unbounded;
          return solution;
        }
      } else {
        v = reduced.lb[j];
      }
      solution.values[static_cast<std::size_t>(reduced.orig[j])] = v;
    }
    solution.status = Status::optimal;
    solution.objective = model.objective_value(solution.values);
    return solution;
  }

  Simplex simplex(reduced, options);
  const Status status = simplex.run();
  solution.status = status;
  solution.iterations = simplex.iterations();
  if (status != Status::optimal) return solution;

  fill_fixed();
  for (std::size_t j = 0; j < reduced.orig.size(); ++j)
    solution.values[static_cast<std::size_t>(reduced.orig[j])] =
        simplex.value(static_cast<int>(j));
  solution.objective = model.objective_value(solution.values);
  solution.duality_gap = simplex.duality_gap();

  // Verify the claimed optimum against the original rows and bounds.
  double worst = 0.0;
  for (VarId v = 0; v < model.var_count(); ++v) {
    const double x = solution.values[static_cast<std::size_t>(v)];
    worst = std::max(worst, model.lower(v) - x);
    if (std::isfinite(model.upper(v))) worst = std::max(worst, x - model.upper(v));
  }
  for (const Constraint& row : model.constraints()) {
    double activity = 0.0;
    for (const Term& t : row.terms) activity += t.coef * solution.values[static_cast<std::size_t>(t.var)];
    if (row.rel == Rel::le)
      worst = std::max(worst, activity - row.rhs);
    else
      worst = std::max(worst, std::abs(activity - row.rhs));
  }
  solution.max_constraint_violation = worst;
  if (worst > options.feas_tol || solution.duality_gap > 1e-6)
    solution.status = Status::iteration_limit;  // did not converge cleanly
  return solution;
}

}  // namespace consecrm::lp
