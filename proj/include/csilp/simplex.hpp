#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace csilp {

inline constexpr double kLpInf = std::numeric_limits<double>::infinity();

// min c'x  s.t.  A x = b,  lower <= x <= upper  (entries may be +-inf).
struct LinearProgram {
  std::uint32_t num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::uint32_t> basis_hint;  // optional: one basic variable per row

  std::uint32_t add_variable(double cost, double lo, double up) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(up);
    for (auto& r : rows) r.push_back(0.0);
    return num_vars++;
  }

  void add_constraint(std::vector<double> row, double b) {
    if (row.size() != num_vars) throw std::invalid_argument("constraint row width mismatch");
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> dual;          // one multiplier per constraint, set when Optimal
  std::vector<double> reduced_cost;  // one per variable, set when Optimal
  std::uint32_t iterations = 0;
};

namespace detail {

// Dense LU with partial pivoting; enough for the basis sizes seen here.
class DenseLU {
 public:
  bool factorize(std::vector<double> a, std::uint32_t m) {
    m_ = m;
    a_ = std::move(a);
    perm_.resize(m);
    for (std::uint32_t i = 0; i < m; ++i) perm_[i] = i;
    for (std::uint32_t k = 0; k < m; ++k) {
      std::uint32_t piv = k;
      double best = std::abs(a_[k * m + k]);
      for (std::uint32_t i = k + 1; i < m; ++i) {
        double v = std::abs(a_[i * m + k]);
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best < 1e-12) return false;
      if (piv != k) {
        for (std::uint32_t j = 0; j < m; ++j) std::swap(a_[k * m + j], a_[piv * m + j]);
        std::swap(perm_[k], perm_[piv]);
      }
      for (std::uint32_t i = k + 1; i < m; ++i) {
        double f = a_[i * m + k] / a_[k * m + k];
        a_[i * m + k] = f;
        for (std::uint32_t j = k + 1; j < m; ++j) a_[i * m + j] -= f * a_[k * m + j];
      }
    }
    return true;
  }

  // Solves A x = rhs.
  std::vector<double> solve(const std::vector<double>& rhs) const {
    std::vector<double> x(m_);
    for (std::uint32_t i = 0; i < m_; ++i) x[i] = rhs[perm_[i]];
    for (std::uint32_t i = 1; i < m_; ++i)
      for (std::uint32_t j = 0; j < i; ++j) x[i] -= a_[i * m_ + j] * x[j];
    for (std::uint32_t i = m_; i-- > 0;) {
      for (std::uint32_t j = i + 1; j < m_; ++j) x[i] -= a_[i * m_ + j] * x[j];
      x[i] /= a_[i * m_ + i];
    }
    return x;
  }

  // Solves A' y = rhs.
  std::vector<double> solve_transposed(const std::vector<double>& rhs) const {
    std::vector<double> y(rhs);
    for (std::uint32_t i = 0; i < m_; ++i) {
      for (std::uint32_t j = 0; j < i; ++j) y[i] -= a_[j * m_ + i] * y[j];
      y[i] /= a_[i * m_ + i];
    }
    for (std::uint32_t i = m_; i-- > 0;)
      for (std::uint32_t j = i + 1; j < m_; ++j) y[i] -= a_[j * m_ + i] * y[j];
    std::vector<double> out(m_);
    for (std::uint32_t i = 0; i < m_; ++i) out[perm_[i]] = y[i];
    return out;
  }

 private:
  std::uint32_t m_ = 0;
  std::vector<double> a_;
  std::vector<std::uint32_t> perm_;
};

class SimplexSolver {
  static constexpr double kCostTol = 1e-9;
  static constexpr double kPivotTol = 1e-10;
  static constexpr double kFeasTol = 1e-8;
  static constexpr double kRatioTie = 1e-12;
  static constexpr std::uint32_t kStallLimit = 40;

  enum class VStat : std::uint8_t { Basic, AtLower, AtUpper, FreeAtZero };

 public:
  explicit SimplexSolver(const LinearProgram& lp) : lp_(lp) {
    m_ = std::uint32_t(lp.rows.size());
    n_ = lp.num_vars;
    if (lp.objective.size() != n_ || lp.lower.size() != n_ || lp.upper.size() != n_)
      throw std::invalid_argument("linear program arrays are inconsistently sized");
    if (lp.rhs.size() != m_) throw std::invalid_argument("rhs size mismatch");
    for (const auto& r : lp.rows)
      if (r.size() != n_) throw std::invalid_argument("constraint row width mismatch");
    for (std::uint32_t j = 0; j < n_; ++j)
      if (lp.lower[j] > lp.upper[j]) throw std::invalid_argument("variable bound crossing");
    total_ = n_ + m_;
  }

  LpSolution run() {
    allocate();
    bool warm = try_basis_hint();
    if (!warm) {
      init_phase1();
      if (m_ > 0) {
        LpStatus st = iterate();
        if (st != LpStatus::Optimal) return finish(LpStatus::Infeasible);
        if (phase_objective() > 1e-7) return finish(LpStatus::Infeasible);
      }
      for (std::uint32_t i = 0; i < m_; ++i) up_[n_ + i] = 0.0;  // artificials frozen
    }
    load_costs(/*phase1=*/false);
    return finish(iterate());
  }

 private:
  const LinearProgram& lp_;
  std::uint32_t m_ = 0, n_ = 0, total_ = 0;
  std::vector<double> tab_;   // m x total, row-major: current B^{-1}[A | art]
  std::vector<double> xb_;    // values of basic variables by row
  std::vector<double> x_;     // values of nonbasic variables (basic entries stale)
  std::vector<double> lo_, up_, cost_;
  std::vector<double> art_sign_;
  std::vector<std::uint32_t> basis_;
  std::vector<VStat> stat_;
  std::uint32_t iterations_ = 0;
  bool bland_ = false;

  double& tab(std::uint32_t i, std::uint32_t j) { return tab_[std::size_t(i) * total_ + j]; }

  double orig_col(std::uint32_t j, std::uint32_t i) const {
    return j < n_ ? lp_.rows[i][j] : (j - n_ == i ? art_sign_[i] : 0.0);
  }

  void allocate() {
    lo_ = lp_.lower;
    up_ = lp_.upper;
    lo_.resize(total_, 0.0);
    up_.resize(total_, kLpInf);
    art_sign_.assign(m_, 1.0);
    stat_.assign(total_, VStat::AtLower);
    x_.assign(total_, 0.0);
    basis_.assign(m_, 0);
    xb_.assign(m_, 0.0);
    tab_.assign(std::size_t(m_) * total_, 0.0);
    cost_.assign(total_, 0.0);
    for (std::uint32_t j = 0; j < n_; ++j) set_nonbasic_default(j);
    iterations_ = 0;
    bland_ = false;
  }

  void set_nonbasic_default(std::uint32_t j) {
    if (std::isfinite(lo_[j])) {
      stat_[j] = VStat::AtLower;
      x_[j] = lo_[j];
    } else if (std::isfinite(up_[j])) {
      stat_[j] = VStat::AtUpper;
      x_[j] = up_[j];
    } else {
      stat_[j] = VStat::FreeAtZero;
      x_[j] = 0.0;
    }
  }

  void load_costs(bool phase1) {
    for (std::uint32_t j = 0; j < total_; ++j)
      cost_[j] = phase1 ? (j >= n_ ? 1.0 : 0.0) : (j < n_ ? lp_.objective[j] : 0.0);
  }

  double phase_objective() const {
    double obj = 0.0;
    for (std::uint32_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_) obj += xb_[i];
    return obj;
  }

  // Residual-signed artificial basis; tableau rows are +-original rows.
  void init_phase1() {
    for (std::uint32_t i = 0; i < m_; ++i) {
      double resid = lp_.rhs[i];
      for (std::uint32_t j = 0; j < n_; ++j) resid -= lp_.rows[i][j] * x_[j];
      art_sign_[i] = resid >= 0.0 ? 1.0 : -1.0;
      basis_[i] = n_ + i;
      stat_[n_ + i] = VStat::Basic;
      xb_[i] = std::abs(resid);
      for (std::uint32_t j = 0; j < n_; ++j) tab(i, j) = art_sign_[i] * lp_.rows[i][j];
      tab(i, n_ + i) = 1.0;
    }
    load_costs(/*phase1=*/true);
  }

  // Accepts the caller-provided basis when it is nonsingular and the implied
  // point is feasible; skips phase 1 entirely in that case.
  bool try_basis_hint() {
    if (lp_.basis_hint.size() != m_ || m_ == 0) return false;
    std::vector<char> seen(n_, 0);
    for (std::uint32_t j : lp_.basis_hint) {
      if (j >= n_ || seen[j]) return false;
      seen[j] = 1;
    }
    std::vector<double> bmat(std::size_t(m_) * m_);
    for (std::uint32_t i = 0; i < m_; ++i)
      for (std::uint32_t k = 0; k < m_; ++k) bmat[std::size_t(i) * m_ + k] = lp_.rows[i][lp_.basis_hint[k]];
    DenseLU lu;
    if (!lu.factorize(std::move(bmat), m_)) return false;

    std::vector<double> rhs(m_);
    for (std::uint32_t i = 0; i < m_; ++i) {
      double v = lp_.rhs[i];
      for (std::uint32_t j = 0; j < n_; ++j)
        if (!seen[j]) v -= lp_.rows[i][j] * x_[j];
      rhs[i] = v;
    }
    std::vector<double> xb = lu.solve(rhs);
    for (std::uint32_t k = 0; k < m_; ++k) {
      std::uint32_t j = lp_.basis_hint[k];
      if (xb[k] < lo_[j] - 1e-9 || xb[k] > up_[j] + 1e-9) return false;
    }

    for (std::uint32_t k = 0; k < m_; ++k) {
      basis_[k] = lp_.basis_hint[k];
      stat_[lp_.basis_hint[k]] = VStat::Basic;
      xb_[k] = xb[k];
    }
    // tableau = B^{-1} [A | I-signed]; artificials stay frozen at zero
    std::vector<double> col(m_);
    for (std::uint32_t j = 0; j < total_; ++j) {
      for (std::uint32_t i = 0; i < m_; ++i) col[i] = orig_col(j, i);
      std::vector<double> t = lu.solve(col);
      for (std::uint32_t i = 0; i < m_; ++i) tab(i, j) = t[i];
    }
    for (std::uint32_t i = 0; i < m_; ++i) up_[n_ + i] = 0.0;
    return true;
  }

  LpStatus iterate() {
    const std::uint32_t cap = 20000 + 200 * (m_ + 1);
    std::uint32_t stall = 0;
    while (true) {
      if (++iterations_ > cap) throw std::runtime_error("simplex iteration cap exceeded");

      // reduced costs via d_j = c_j - c_B . T_j
      std::vector<double> cb(m_);
      bool any_cb = false;
      for (std::uint32_t i = 0; i < m_; ++i) {
        cb[i] = cost_[basis_[i]];
        any_cb = any_cb || cb[i] != 0.0;
      }

      std::uint32_t enter = total_;
      int dir = 0;
      double best_viol = kCostTol;
      for (std::uint32_t j = 0; j < total_; ++j) {
        if (stat_[j] == VStat::Basic) continue;
        if (up_[j] - lo_[j] <= kPivotTol) continue;  // fixed (includes frozen artificials)
        double d = cost_[j];
        if (any_cb)
          for (std::uint32_t i = 0; i < m_; ++i) d -= cb[i] * tab(i, j);
        double viol = 0.0;
        int cand_dir = 0;
        if (stat_[j] == VStat::AtLower && d < -kCostTol) {
          viol = -d;
          cand_dir = +1;
        } else if (stat_[j] == VStat::AtUpper && d > kCostTol) {
          viol = d;
          cand_dir = -1;
        } else if (stat_[j] == VStat::FreeAtZero && std::abs(d) > kCostTol) {
          viol = std::abs(d);
          cand_dir = d < 0.0 ? +1 : -1;
        }
        if (cand_dir == 0) continue;
        if (bland_) {
          enter = j;
          dir = cand_dir;
          break;
        }
        if (viol > best_viol) {
          best_viol = viol;
          enter = j;
          dir = cand_dir;
        }
      }
      if (enter == total_) return LpStatus::Optimal;

      // ratio test
      double range = up_[enter] - lo_[enter];  // inf when either bound is infinite
      double t_best = range;
      std::uint32_t leave_row = m_;  // m_ means bound flip
      double leave_bound = 0.0;
      bool leave_at_lower = false;
      for (std::uint32_t i = 0; i < m_; ++i) {
        double wi = tab(i, enter);
        if (std::abs(wi) <= kPivotTol) continue;
        double delta = dir * wi;  // basic i moves at rate -delta
        double t_i;
        bool at_lower;
        std::uint32_t bv = basis_[i];
        if (delta > 0.0) {
          if (!std::isfinite(lo_[bv])) continue;
          double slack = xb_[i] - lo_[bv];
          t_i = slack > 0.0 ? slack / delta : 0.0;
          at_lower = true;
        } else {
          if (!std::isfinite(up_[bv])) continue;
          double slack = up_[bv] - xb_[i];
          t_i = slack > 0.0 ? slack / (-delta) : 0.0;
          at_lower = false;
        }
        bool better = t_i < t_best - kRatioTie;
        bool tie = !better && t_i <= t_best + kRatioTie;
        if (better || (tie && leave_row < m_ && bv < basis_[leave_row])) {
          t_best = t_i;
          leave_row = i;
          leave_bound = at_lower ? lo_[bv] : up_[bv];
          leave_at_lower = at_lower;
        }
      }

      if (!std::isfinite(t_best)) return LpStatus::Unbounded;
      if (t_best < 0.0) t_best = 0.0;

      stall = t_best <= kPivotTol ? stall + 1 : 0;
      if (stall >= kStallLimit) bland_ = true;

      for (std::uint32_t i = 0; i < m_; ++i) {
        double wi = tab(i, enter);
        if (wi != 0.0) xb_[i] -= dir * t_best * wi;
      }

      if (leave_row == m_) {
        // entering variable runs to its other bound
        stat_[enter] = stat_[enter] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
        x_[enter] = stat_[enter] == VStat::AtLower ? lo_[enter] : up_[enter];
        continue;
      }

      double enter_val = x_[enter] + dir * t_best;
      std::uint32_t leaving = basis_[leave_row];

      double piv = tab(leave_row, enter);
      double inv = 1.0 / piv;
      for (std::uint32_t j = 0; j < total_; ++j) tab(leave_row, j) *= inv;
      for (std::uint32_t i = 0; i < m_; ++i) {
        if (i == leave_row) continue;
        double f = tab(i, enter);
        if (f == 0.0) continue;
        for (std::uint32_t j = 0; j < total_; ++j) tab(i, j) -= f * tab(leave_row, j);
      }

      basis_[leave_row] = enter;
      stat_[enter] = VStat::Basic;
      xb_[leave_row] = enter_val;
      stat_[leaving] = leave_at_lower ? VStat::AtLower : VStat::AtUpper;
      x_[leaving] = leave_bound;
    }
  }

  LpSolution finish(LpStatus st) {
    LpSolution sol;
    sol.status = st;
    sol.iterations = iterations_;
    if (st != LpStatus::Optimal) return sol;

    // Re-derive basic values and duals from the original columns so tableau
    // drift cannot leak into reported numbers.
    DenseLU lu;
    bool exact = false;
    if (m_ > 0) {
      std::vector<double> bmat(std::size_t(m_) * m_);
      for (std::uint32_t i = 0; i < m_; ++i)
        for (std::uint32_t k = 0; k < m_; ++k) bmat[std::size_t(i) * m_ + k] = orig_col(basis_[k], i);
      exact = lu.factorize(std::move(bmat), m_);
      if (exact) {
        std::vector<double> rhs(m_);
        for (std::uint32_t i = 0; i < m_; ++i) {
          double v = lp_.rhs[i];
          for (std::uint32_t j = 0; j < total_; ++j)
            if (stat_[j] != VStat::Basic && x_[j] != 0.0) v -= orig_col(j, i) * x_[j];
          rhs[i] = v;
        }
        std::vector<double> xb = lu.solve(rhs);
        for (std::uint32_t k = 0; k < m_; ++k) xb_[k] = xb[k];
      }
    }

    sol.x.assign(n_, 0.0);
    for (std::uint32_t j = 0; j < n_; ++j)
      if (stat_[j] != VStat::Basic) sol.x[j] = x_[j];
    for (std::uint32_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) sol.x[basis_[i]] = xb_[i];

    double obj = 0.0;
    for (std::uint32_t j = 0; j < n_; ++j) obj += lp_.objective[j] * sol.x[j];
    sol.objective = obj;

    // feasibility audit
    for (std::uint32_t i = 0; i < m_; ++i) {
      double r = lp_.rhs[i];
      for (std::uint32_t j = 0; j < n_; ++j) r -= lp_.rows[i][j] * sol.x[j];
      for (std::uint32_t k = 0; k < m_; ++k)
        if (basis_[k] == n_ + i) r -= art_sign_[i] * xb_[k];
      if (std::abs(r) > kFeasTol) throw std::runtime_error("simplex returned an infeasible point (residual " + std::to_string(r) + ")");
    }
    for (std::uint32_t j = 0; j < n_; ++j)
      if (sol.x[j] < lo_[j] - kFeasTol || sol.x[j] > up_[j] + kFeasTol)
        throw std::runtime_error("simplex returned a point violating bounds");

    if (m_ > 0 && exact) {
      std::vector<double> cb(m_);
      for (std::uint32_t i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
      sol.dual = lu.solve_transposed(cb);
      sol.reduced_cost.assign(n_, 0.0);
      for (std::uint32_t j = 0; j < n_; ++j) {
        double d = lp_.objective[j];
        for (std::uint32_t i = 0; i < m_; ++i) d -= sol.dual[i] * lp_.rows[i][j];
        sol.reduced_cost[j] = d;
      }
    } else {
      sol.dual.assign(m_, 0.0);
      sol.reduced_cost = lp_.objective;
    }
    return sol;
  }
};

}  // namespace detail

inline LpSolution solve_lp(const LinearProgram& lp) { return detail::SimplexSolver(lp).run(); }

// Dual bound implied by the returned multipliers; matches the primal objective
// at a true optimum (used as an optimality certificate in tests).
inline double lp_dual_objective(const LinearProgram& lp, const LpSolution& sol) {
  if (sol.status != LpStatus::Optimal) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  for (std::size_t i = 0; i < lp.rhs.size(); ++i) v += sol.dual[i] * lp.rhs[i];
  for (std::uint32_t j = 0; j < lp.num_vars; ++j) {
    double d = sol.reduced_cost[j];
    if (d > 1e-9) {
      if (!std::isfinite(lp.lower[j])) return std::numeric_limits<double>::quiet_NaN();
      v += d * lp.lower[j];
    } else if (d < -1e-9) {
      if (!std::isfinite(lp.upper[j])) return std::numeric_limits<double>::quiet_NaN();
      v += d * lp.upper[j];
    }
  }
  return v;
}

}  // namespace csilp
