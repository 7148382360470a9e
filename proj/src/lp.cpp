#include "fairshare/lp.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

namespace fairshare {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
  }
  return "?";
}

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

enum class ColumnKind : std::uint8_t { Structural, Slack, Artificial };

inline bool is_pos(double x, double tol) { return x > tol; }
inline bool is_pos(const Rational& x, double) { return sgn(x) > 0; }
inline bool is_neg(double x, double tol) { return x < -tol; }
inline bool is_neg(const Rational& x, double) { return sgn(x) < 0; }
inline bool is_zero(double x, double tol) { return std::abs(x) <= tol; }
inline bool is_zero(const Rational& x, double) { return sgn(x) == 0; }
inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Rational& x) { return std::abs(x.get_d()); }

template <class T>
T convert(const Rational& r);
template <>
double convert<double>(const Rational& r) {
  return r.get_d();
}
template <>
Rational convert<Rational>(const Rational& r) {
  return r;
}

inline int sign_of(const Rational& x) { return sgn(x); }
inline int sign_of(double x) { return (x > 0) - (x < 0); }
inline double to_d(const Rational& x) { return x.get_d(); }
inline double to_d(double x) { return x; }

// Scalar of the program (L) to scalar of the solver (S).
template <class S, class L>
S scalar(const L& v) {
  if constexpr (std::is_same_v<S, L>) {
    return v;
  } else {
    static_assert(std::is_same_v<S, double>);
    return to_d(v);
  }
}

// Equality form  A x = b, x >= 0, b >= 0  with an identity-like starting basis
// made of slack (+1) and artificial columns. S is the scalar of the matrix;
// both instantiations produce the same column layout.
template <class S>
struct StandardForm {
  std::size_t rows = 0;
  std::vector<std::vector<std::pair<std::uint32_t, S>>> columns;
  std::vector<ColumnKind> kind;
  std::vector<S> cost;
  std::vector<S> rhs;
  std::vector<int> row_sign;
  std::vector<std::size_t> initial_basis;
  bool has_artificials = false;
  bool bounds_infeasible = false;

  // x_j = shift_j + sum(sign * column value)
  std::vector<S> shift;
  std::vector<std::vector<std::pair<std::size_t, int>>> var_columns;
  std::vector<std::size_t> upper_row;  // npos when absent
  std::size_t num_constraint_rows = 0;
};

template <class S, class L>
StandardForm<S> build_standard_form(const BasicLinearProgram<L>& lp) {
  StandardForm<S> sf;
  const std::size_t nv = lp.num_vars;
  std::vector<L> shift(nv, L(0));
  sf.shift.resize(nv);
  sf.var_columns.resize(nv);
  sf.upper_row.assign(nv, npos);

  auto add_column = [&](const L& c) {
    sf.columns.emplace_back();
    sf.kind.push_back(ColumnKind::Structural);
    sf.cost.push_back(scalar<S>(c));
    return sf.columns.size() - 1;
  };

  for (std::size_t j = 0; j < nv; ++j) {
    const auto& lo = lp.lower[j];
    const auto& hi = lp.upper[j];
    if (lo && hi && *lo > *hi) sf.bounds_infeasible = true;
    if (lo) {
      shift[j] = *lo;
      sf.var_columns[j].push_back({add_column(lp.objective[j]), 1});
    } else if (hi) {
      shift[j] = *hi;
      sf.var_columns[j].push_back({add_column(L(-lp.objective[j])), -1});
    } else {
      sf.var_columns[j].push_back({add_column(lp.objective[j]), 1});
      sf.var_columns[j].push_back({add_column(L(-lp.objective[j])), -1});
    }
    sf.shift[j] = scalar<S>(shift[j]);
  }
  if (sf.bounds_infeasible) return sf;

  struct Row {
    std::vector<std::pair<std::size_t, S>> entries;
    L rhs;
  };
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size() + nv);
  std::vector<const BasicTerm<L>*> order;
  for (const auto& con : lp.constraints) {
    order.clear();
    bool sorted = true;
    for (const auto& t : con.terms) {
      if (sign_of(t.coef) == 0) continue;
      if (!order.empty() && order.back()->var >= t.var) sorted = false;
      order.push_back(&t);
    }
    if (!sorted) {
      std::stable_sort(order.begin(), order.end(),
                       [](const BasicTerm<L>* a, const BasicTerm<L>* b) { return a->var < b->var; });
    }
    Row row;
    row.rhs = con.rhs;
    for (std::size_t p = 0; p < order.size();) {
      const std::size_t var = order[p]->var;
      L coef = order[p]->coef;
      for (++p; p < order.size() && order[p]->var == var; ++p) coef += order[p]->coef;
      if (sign_of(coef) == 0) continue;
      if (sign_of(shift[var]) != 0) row.rhs -= coef * shift[var];
      for (const auto& [col, s] : sf.var_columns[var]) {
        row.entries.emplace_back(col, s > 0 ? scalar<S>(coef) : S(-scalar<S>(coef)));
      }
    }
    rows.push_back(std::move(row));
  }
  sf.num_constraint_rows = rows.size();
  for (std::size_t j = 0; j < nv; ++j) {
    if (lp.lower[j] && lp.upper[j]) {
      sf.upper_row[j] = rows.size();
      Row row;
      row.entries.emplace_back(sf.var_columns[j].front().first, S(1));
      row.rhs = L(*lp.upper[j] - *lp.lower[j]);
      rows.push_back(std::move(row));
    }
  }

  sf.rows = rows.size();
  sf.rhs.resize(sf.rows);
  sf.row_sign.resize(sf.rows);
  std::vector<std::size_t> slack_col(sf.rows);
  for (std::size_t r = 0; r < sf.rows; ++r) {
    Row& row = rows[r];
    const int sign = sign_of(row.rhs) < 0 ? -1 : 1;
    sf.row_sign[r] = sign;
    sf.rhs[r] = sign > 0 ? scalar<S>(row.rhs) : S(-scalar<S>(row.rhs));
    for (auto& [col, coef] : row.entries) {
      if (sign < 0) coef = -coef;
      sf.columns[col].emplace_back(static_cast<std::uint32_t>(r), std::move(coef));
    }
  }
  for (std::size_t r = 0; r < sf.rows; ++r) {
    slack_col[r] = sf.columns.size();
    sf.columns.push_back({{static_cast<std::uint32_t>(r), S(sf.row_sign[r])}});
    sf.kind.push_back(ColumnKind::Slack);
    sf.cost.emplace_back(0);
  }
  sf.initial_basis.resize(sf.rows);
  for (std::size_t r = 0; r < sf.rows; ++r) {
    if (sf.row_sign[r] > 0) {
      sf.initial_basis[r] = slack_col[r];
    } else {
      sf.has_artificials = true;
      sf.initial_basis[r] = sf.columns.size();
      sf.columns.push_back({{static_cast<std::uint32_t>(r), S(1)}});
      sf.kind.push_back(ColumnKind::Artificial);
      sf.cost.emplace_back(0);
    }
  }
  return sf;
}

// Revised simplex with an explicit dense basis inverse and sparse columns.
template <class T>
class Simplex {
 public:
  static constexpr bool kExact = std::is_same_v<T, Rational>;

  enum class Outcome { Optimal, Unbounded };

  Simplex(const StandardForm<T>& sf, double tolerance)
      : sf_(sf), m_(sf.rows), ncols_(sf.columns.size()), tol_(tolerance), cols_(sf.columns), b_(sf.rhs),
        phase2_cost_(sf.cost) {
    phase1_cost_.assign(ncols_, T(0));
    double cmax = 1.0;
    for (std::size_t j = 0; j < ncols_; ++j) {
      cmax = std::max(cmax, magnitude(phase2_cost_[j]));
      if (sf.kind[j] == ColumnKind::Artificial) phase1_cost_[j] = T(-1);
    }
    double bmax = 1.0;
    for (const auto& v : b_) bmax = std::max(bmax, magnitude(v));
    opt_tol_ = tol_ * cmax;
    feas_tol_ = tol_ * bmax;
    binv_.assign(m_ * m_, T(0));
    xb_.assign(m_, T(0));
    head_.assign(m_, npos);
    where_.assign(ncols_, npos);
  }

  std::size_t iterations() const { return iterations_; }
  const std::vector<std::size_t>& basis() const { return head_; }

  void start_from_initial_basis() {
    std::fill(where_.begin(), where_.end(), npos);
    std::fill(binv_.begin(), binv_.end(), T(0));
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t col = sf_.initial_basis[r];
      head_[r] = col;
      where_[col] = r;
      // initial columns are +e_r (slack of an unflipped row or artificial)
      binv_[r * m_ + r] = T(1);
      xb_[r] = b_[r];
    }
  }

  /// Installs a basis and factors it. Returns false if it is singular.
  bool start_from_basis(const std::vector<std::size_t>& basis) {
    if (basis.size() != m_) return false;
    std::fill(where_.begin(), where_.end(), npos);
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis[r] >= ncols_ || where_[basis[r]] != npos) return false;
      head_[r] = basis[r];
      where_[basis[r]] = r;
    }
    return factorize();
  }

  bool primal_feasible() const {
    for (std::size_t r = 0; r < m_; ++r) {
      if (is_neg(xb_[r], feas_tol_)) return false;
      if (sf_.kind[head_[r]] == ColumnKind::Artificial && !is_zero(xb_[r], feas_tol_)) return false;
    }
    return true;
  }

  Outcome run_phase1() { return run(phase1_cost_, /*phase2=*/false); }
  Outcome run_phase2() { return run(phase2_cost_, /*phase2=*/true); }

  /// Sum of artificial variables currently in the basis.
  T artificial_sum() const {
    T s(0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (sf_.kind[head_[r]] == ColumnKind::Artificial) s += xb_[r];
    }
    return s;
  }
  double feasibility_tolerance() const { return feas_tol_; }

  /// Pivots basic artificials (at level zero) out of the basis where some
  /// non-artificial column has a nonzero entry in their row.
  void drive_out_artificials() {
    std::vector<T> alpha(m_);
    const double piv = kExact ? 0.0 : 1e-7;
    for (std::size_t r = 0; r < m_; ++r) {
      if (sf_.kind[head_[r]] != ColumnKind::Artificial) continue;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (where_[j] != npos || sf_.kind[j] == ColumnKind::Artificial) continue;
        T e(0);
        for (const auto& [row, a] : cols_[j]) e += binv_[r * m_ + row] * a;
        if (is_zero(e, piv)) continue;
        ftran(j, alpha);
        pivot(r, j, alpha);
        break;
      }
    }
  }

  /// Values of all columns at the current basis.
  std::vector<T> column_values() const {
    std::vector<T> x(ncols_, T(0));
    for (std::size_t r = 0; r < m_; ++r) x[head_[r]] = xb_[r];
    return x;
  }

  /// y = c_B B^{-1} for the phase-2 costs.
  std::vector<T> duals() const {
    std::vector<T> y(m_, T(0));
    compute_duals(phase2_cost_, y);
    return y;
  }

  /// Largest positive phase-2 reduced cost over nonbasic, non-artificial columns.
  double max_reduced_cost(const std::vector<T>& y) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (where_[j] != npos || sf_.kind[j] == ColumnKind::Artificial) continue;
      T d = reduced_cost(j, phase2_cost_, y);
      if constexpr (kExact) {
        if (sgn(d) > 0) worst = std::max(worst, std::max(d.get_d(), 1e-300));
      } else {
        worst = std::max(worst, d);
      }
    }
    return worst;
  }
  double optimality_tolerance() const { return opt_tol_; }

 private:
  T& binv(std::size_t i, std::size_t j) { return binv_[i * m_ + j]; }

  bool factorize() {
    // Gauss-Jordan on [B | I], sparsest basis columns first to limit fill.
    std::vector<T> a(m_ * m_, T(0));
    for (std::size_t r = 0; r < m_; ++r) {
      for (const auto& [row, v] : cols_[head_[r]]) a[row * m_ + r] += v;
    }
    std::vector<T> inv_rows(m_ * m_, T(0));
    for (std::size_t i = 0; i < m_; ++i) inv_rows[i * m_ + i] = T(1);
    std::vector<std::size_t> order(m_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return cols_[head_[x]].size() < cols_[head_[y]].size();
    });
    std::vector<std::size_t> pivot_row(m_, npos);
    std::vector<bool> used(m_, false);
    std::vector<std::size_t> nz_a, nz_b;
    for (std::size_t c : order) {
      std::size_t p = npos;
      if constexpr (kExact) {
        for (std::size_t r = 0; r < m_; ++r) {
          if (!used[r] && sgn(a[r * m_ + c]) != 0) { p = r; break; }
        }
      } else {
        double best = 1e-11;
        for (std::size_t r = 0; r < m_; ++r) {
          if (!used[r] && std::abs(a[r * m_ + c]) > best) { best = std::abs(a[r * m_ + c]); p = r; }
        }
      }
      if (p == npos) return false;
      used[p] = true;
      pivot_row[c] = p;
      T* ap = &a[p * m_];
      T* bp = &inv_rows[p * m_];
      const T inv = T(1) / ap[c];
      nz_a.clear();
      nz_b.clear();
      for (std::size_t k = 0; k < m_; ++k) {
        if (!is_zero(ap[k], 0.0)) { ap[k] *= inv; nz_a.push_back(k); }
        if (!is_zero(bp[k], 0.0)) { bp[k] *= inv; nz_b.push_back(k); }
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == p) continue;
        const T f = a[r * m_ + c];
        if (is_zero(f, 0.0)) continue;
        T* ar = &a[r * m_];
        T* br = &inv_rows[r * m_];
        for (std::size_t k : nz_a) ar[k] -= f * ap[k];
        for (std::size_t k : nz_b) br[k] -= f * bp[k];
      }
    }
    for (std::size_t c = 0; c < m_; ++c) {
      std::move(inv_rows.begin() + static_cast<std::ptrdiff_t>(pivot_row[c] * m_),
                inv_rows.begin() + static_cast<std::ptrdiff_t>((pivot_row[c] + 1) * m_),
                binv_.begin() + static_cast<std::ptrdiff_t>(c * m_));
    }
    for (std::size_t r = 0; r < m_; ++r) {
      T s(0);
      for (std::size_t k = 0; k < m_; ++k) {
        if (!is_zero(b_[k], 0.0)) s += binv(r, k) * b_[k];
      }
      xb_[r] = s;
    }
    since_refactor_ = 0;
    return true;
  }

  void compute_duals(const std::vector<T>& cost, std::vector<T>& y) const {
    std::fill(y.begin(), y.end(), T(0));
    for (std::size_t i = 0; i < m_; ++i) {
      const T& c = cost[head_[i]];
      if (is_zero(c, 0.0)) continue;
      const T* row = &binv_[i * m_];
      for (std::size_t j = 0; j < m_; ++j) {
        if (!is_zero(row[j], 0.0)) y[j] += c * row[j];
      }
    }
  }

  T reduced_cost(std::size_t j, const std::vector<T>& cost, const std::vector<T>& y) const {
    T d = cost[j];
    if constexpr (kExact) {
      for (const auto& [r, a] : cols_[j]) {
        if (sgn(y[r]) != 0) d -= y[r] * a;
      }
    } else {
      for (const auto& [r, a] : cols_[j]) d -= y[r] * a;
    }
    return d;
  }

  void ftran(std::size_t j, std::vector<T>& alpha) const {
    std::fill(alpha.begin(), alpha.end(), T(0));
    for (const auto& [r, a] : cols_[j]) {
      if constexpr (kExact) {
        for (std::size_t i = 0; i < m_; ++i) {
          const T& v = binv_[i * m_ + r];
          if (sgn(v) != 0) alpha[i] += v * a;
        }
      } else {
        const double* col = &binv_[r];
        for (std::size_t i = 0; i < m_; ++i) alpha[i] += col[i * m_] * a;
      }
    }
  }

  void pivot(std::size_t r, std::size_t q, const std::vector<T>& alpha) {
    T theta = xb_[r] / alpha[r];
    if constexpr (!kExact) {
      if (theta < 0) theta = 0;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (i != r && !is_zero(alpha[i], 0.0)) xb_[i] -= theta * alpha[i];
    }
    xb_[r] = theta;

    const T inv = T(1) / alpha[r];
    std::vector<std::size_t> nz;
    nz.reserve(m_);
    T* prow = &binv_[r * m_];
    for (std::size_t k = 0; k < m_; ++k) {
      if (!is_zero(prow[k], 0.0)) {
        prow[k] *= inv;
        nz.push_back(k);
      }
    }
    const bool dense = !kExact && nz.size() * 2 > m_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || is_zero(alpha[i], 0.0)) continue;
      const T f = alpha[i];
      T* row = &binv_[i * m_];
      if (dense) {
        for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
      } else {
        for (std::size_t k : nz) row[k] -= f * prow[k];
      }
    }
    where_[head_[r]] = npos;
    head_[r] = q;
    where_[q] = r;
    ++iterations_;
    ++since_refactor_;
    if constexpr (!kExact) {
      if (since_refactor_ >= std::max<std::size_t>(64, 2 * m_)) {
        if (!factorize()) throw SolverError("basis became singular during refactorization");
      }
    }
  }

  std::size_t choose_leaving(const std::vector<T>& alpha, bool phase2, bool bland) const {
    std::size_t best = npos;
    if constexpr (kExact) {
      (void)bland;
      T best_ratio;
      for (std::size_t i = 0; i < m_; ++i) {
        const bool art = phase2 && sf_.kind[head_[i]] == ColumnKind::Artificial;
        T ratio;
        if (sgn(alpha[i]) > 0) {
          ratio = xb_[i] / alpha[i];
        } else if (art && sgn(alpha[i]) != 0) {
          ratio = 0;
        } else {
          continue;
        }
        if (best == npos || ratio < best_ratio || (ratio == best_ratio && head_[i] < head_[best])) {
          best = i;
          best_ratio = ratio;
        }
      }
      return best;
    } else {
      const double piv = 1e-9;
      // Harris two-pass ratio test.
      double bound = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const bool art = phase2 && sf_.kind[head_[i]] == ColumnKind::Artificial;
        if (alpha[i] > piv) {
          bound = std::min(bound, (xb_[i] + feas_tol_) / alpha[i]);
        } else if (art && std::abs(alpha[i]) > piv) {
          bound = std::min(bound, feas_tol_ / std::abs(alpha[i]));
        }
      }
      if (bound == std::numeric_limits<double>::infinity()) return npos;
      double best_alpha = 0.0;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const bool art = phase2 && sf_.kind[head_[i]] == ColumnKind::Artificial;
        double ratio;
        if (alpha[i] > piv) {
          ratio = xb_[i] / alpha[i];
        } else if (art && std::abs(alpha[i]) > piv) {
          ratio = 0.0;
        } else {
          continue;
        }
        if (ratio > bound) continue;
        const double a = std::abs(alpha[i]);
        if (bland) {
          if (best == npos || ratio < best_ratio - 1e-12 ||
              (ratio <= best_ratio + 1e-12 && head_[i] < head_[best])) {
            best = i;
            best_ratio = ratio;
          }
        } else if (a > best_alpha) {
          best_alpha = a;
          best = i;
        }
      }
      return best;
    }
  }

  Outcome run(const std::vector<T>& cost, bool phase2) {
    std::vector<T> y(m_), alpha(m_);
    const std::size_t limit = 50 * (m_ + ncols_) + 10000;
    double last_objective = -std::numeric_limits<double>::infinity();
    std::size_t stall = 0;
    bool bland = kExact;
    bool stale_duals = true;
    for (std::size_t it = 0;; ++it) {
      if (it > limit) throw SolverError("simplex iteration limit exceeded");
      if (kExact || stale_duals) compute_duals(cost, y);

      std::size_t q = npos;
      T dq(0);
      if (bland) {
        for (std::size_t j = 0; j < ncols_; ++j) {
          if (where_[j] != npos || sf_.kind[j] == ColumnKind::Artificial) continue;
          T d = reduced_cost(j, cost, y);
          if (is_pos(d, opt_tol_)) {
            q = j;
            dq = d;
            break;
          }
        }
      } else if constexpr (!kExact) {
        double best = opt_tol_;
        for (std::size_t j = 0; j < ncols_; ++j) {
          if (where_[j] != npos || sf_.kind[j] == ColumnKind::Artificial) continue;
          const double d = reduced_cost(j, cost, y);
          if (d > best) { best = d; q = j; }
        }
        dq = best;
      }
      if (q == npos) return Outcome::Optimal;

      ftran(q, alpha);
      const std::size_t r = choose_leaving(alpha, phase2, bland);
      if (r == npos) return Outcome::Unbounded;
      pivot(r, q, alpha);

      if constexpr (!kExact) {
        // y_new = y + d_q * (row r of the new inverse), exact after a refactorization
        stale_duals = since_refactor_ == 0;
        if (!stale_duals) {
          const double* row = &binv_[r * m_];
          for (std::size_t k = 0; k < m_; ++k) y[k] += dq * row[k];
        }
        double obj = 0.0;
        for (std::size_t i = 0; i < m_; ++i) obj += cost[head_[i]] * xb_[i];
        if (obj > last_objective + 1e-12 * std::max(1.0, std::abs(obj))) {
          last_objective = obj;
          stall = 0;
          bland = false;
        } else if (++stall > 50) {
          bland = true;
        }
      }
    }
  }

  const StandardForm<T>& sf_;
  std::size_t m_, ncols_;
  double tol_;
  double opt_tol_ = 0.0, feas_tol_ = 0.0;
  std::vector<std::vector<std::pair<std::uint32_t, T>>> cols_;
  std::vector<T> b_, phase2_cost_, phase1_cost_;
  std::vector<std::size_t> head_, where_;
  std::vector<T> binv_, xb_;
  std::size_t iterations_ = 0, since_refactor_ = 0;
};

struct CoreResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<std::size_t> basis;
};

// Runs the solver over an already-started core.
template <class T>
LpStatus drive(Simplex<T>& core, const StandardForm<T>& sf, bool cold) {
  if (cold && sf.has_artificials) {
    core.run_phase1();
    const T sum = core.artificial_sum();
    if (is_pos(sum, core.feasibility_tolerance())) return LpStatus::Infeasible;
  }
  core.drive_out_artificials();
  return core.run_phase2() == Simplex<T>::Outcome::Optimal ? LpStatus::Optimal : LpStatus::Unbounded;
}

template <class T>
LpSolution extract(const LinearProgram& lp, const StandardForm<T>& sf, const Simplex<T>& core) {
  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.iterations = core.iterations();
  const auto xcol = core.column_values();
  const auto y = core.duals();

  // Rationals in exact mode, doubles converted at the end otherwise.
  using V = std::conditional_t<std::is_same_v<T, Rational>, Rational, double>;
  auto conv = [](const V& v) -> Rational { return Rational(v); };

  sol.point.resize(lp.num_vars);
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    V x = sf.shift[j];
    for (const auto& [col, s] : sf.var_columns[j]) {
      if (s > 0) x += xcol[col]; else x -= xcol[col];
    }
    Rational xr = conv(x);
    if constexpr (!std::is_same_v<T, Rational>) {
      if (lp.lower[j] && xr < *lp.lower[j]) xr = *lp.lower[j];
      if (lp.upper[j] && xr > *lp.upper[j]) xr = *lp.upper[j];
    }
    sol.point[j] = std::move(xr);
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    if (sgn(lp.objective[j]) != 0 && sgn(sol.point[j]) != 0) sol.objective_value += lp.objective[j] * sol.point[j];
  }

  // Dual in the external layout.
  std::vector<V> yrow(sf.rows);
  for (std::size_t r = 0; r < sf.rows; ++r) yrow[r] = sf.row_sign[r] < 0 ? V(-y[r]) : V(y[r]);
  sol.dual.reserve(lp.dual_size());
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) sol.dual.push_back(conv(yrow[i]));
  std::vector<V> aty(lp.num_vars, V(0));
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    if (is_zero(yrow[i], 0.0)) continue;
    for (const auto& t : lp.constraints[i].terms) aty[t.var] += convert<V>(t.coef) * yrow[i];
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const bool lo = lp.lower[j].has_value();
    const bool hi = lp.upper[j].has_value();
    V yu(0);
    if (hi) {
      yu = lo ? yrow[sf.upper_row[j]] : V(convert<V>(lp.objective[j]) - aty[j]);
      sol.dual.push_back(conv(yu));
    }
    if (lo && sgn(*lp.lower[j]) != 0) sol.dual.push_back(conv(V(aty[j] + yu - convert<V>(lp.objective[j]))));
  }
  return sol;
}

// Relative primal/dual check of a double-precision optimum.
template <class L>
bool verify_float(const BasicLinearProgram<L>& lp, const Simplex<double>& core, const StandardForm<double>& sf,
                  double tol, std::vector<double>* point = nullptr) {
  const auto xcol = core.column_values();
  std::vector<double> x(lp.num_vars);
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    double v = sf.shift[j];
    for (const auto& [col, s] : sf.var_columns[j]) v += s * xcol[col];
    x[j] = v;
    if (lp.lower[j]) {
      const double l = to_d(*lp.lower[j]);
      if (v < l - tol * std::max(1.0, std::abs(l))) return false;
    }
    if (lp.upper[j]) {
      const double u = to_d(*lp.upper[j]);
      if (v > u + tol * std::max(1.0, std::abs(u))) return false;
    }
  }
  for (const auto& con : lp.constraints) {
    double lhs = 0.0, scale = std::abs(to_d(con.rhs));
    for (const auto& t : con.terms) {
      const double term = to_d(t.coef) * x[t.var];
      lhs += term;
      scale = std::max(scale, std::abs(term));
    }
    if (lhs - to_d(con.rhs) > tol * std::max(1.0, scale)) return false;
  }
  const auto y = core.duals();
  for (double v : y) {
    if (!std::isfinite(v)) return false;
  }
  if (core.max_reduced_cost(y) > core.optimality_tolerance() * 10.0) return false;
  if (point) *point = std::move(x);
  return true;
}

LpSolution status_only(LpStatus s, std::size_t iterations, bool exact) {
  LpSolution sol;
  sol.status = s;
  sol.iterations = iterations;
  sol.exact = exact;
  return sol;
}

}  // namespace

LpSolution solve(const LinearProgram& lp, SolveMode mode) {
  lp.validate();
  std::vector<std::size_t> warm;
  std::size_t float_iterations = 0;
  try {
    const auto fsf = build_standard_form<double>(lp);
    if (fsf.bounds_infeasible) return status_only(LpStatus::Infeasible, 0, true);
    Simplex<double> fcore(fsf, mode.is_exact() ? 1e-9 : mode.tolerance);
    fcore.start_from_initial_basis();
    const LpStatus st = drive(fcore, fsf, true);
    float_iterations = fcore.iterations();
    if (!mode.is_exact()) {
      if (st != LpStatus::Optimal) return status_only(st, float_iterations, false);
      if (verify_float(lp, fcore, fsf, mode.tolerance)) {
        LpSolution sol = extract(lp, fsf, fcore);
        sol.exact = false;
        return sol;
      }
    }
    if (st == LpStatus::Optimal) warm = fcore.basis();
  } catch (const SolverError&) {
    warm.clear();
  }

  const auto sf = build_standard_form<Rational>(lp);
  Simplex<Rational> core(sf, 0.0);
  bool cold = true;
  if (!warm.empty() && core.start_from_basis(warm) && core.primal_feasible()) cold = false;
  if (cold) core.start_from_initial_basis();
  const LpStatus st = drive(core, sf, cold);
  if (st != LpStatus::Optimal) return status_only(st, float_iterations + core.iterations(), true);
  LpSolution sol = extract(lp, sf, core);
  sol.iterations += float_iterations;
  sol.exact = true;
  return sol;
}

FloatLpSolution solve_float(const FloatLinearProgram& lp, double tolerance) {
  lp.validate();
  FloatLpSolution sol;
  try {
    const auto sf = build_standard_form<double>(lp);
    if (sf.bounds_infeasible) {
      sol.verified = true;
      return sol;
    }
    Simplex<double> core(sf, tolerance);
    core.start_from_initial_basis();
    sol.status = drive(core, sf, true);
    sol.iterations = core.iterations();
    if (sol.status != LpStatus::Optimal) return sol;
    if (!verify_float(lp, core, sf, tolerance, &sol.point)) return sol;
  } catch (const SolverError&) {
    sol.verified = false;
    return sol;
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    double& x = sol.point[j];
    if (lp.lower[j]) x = std::max(x, *lp.lower[j]);
    if (lp.upper[j]) x = std::min(x, *lp.upper[j]);
    sol.objective_value += lp.objective[j] * x;
  }
  sol.verified = true;
  return sol;
}

CertificateReport check_certificate(const LinearProgram& lp, std::span<const Rational> primal,
                                    std::span<const Rational> dual) {
  lp.validate();
  if (primal.size() != lp.num_vars) throw std::invalid_argument("primal point has wrong length");
  if (dual.size() != lp.dual_size()) throw std::invalid_argument("dual point has wrong length");

  CertificateReport rep;
  rep.primal_feasible = true;
  std::string why;
  for (std::size_t j = 0; j < lp.num_vars && rep.primal_feasible; ++j) {
    if ((lp.lower[j] && primal[j] < *lp.lower[j]) || (lp.upper[j] && primal[j] > *lp.upper[j])) {
      rep.primal_feasible = false;
      why = "primal violates bounds of x" + std::to_string(j);
    }
  }
  for (std::size_t i = 0; i < lp.constraints.size() && rep.primal_feasible; ++i) {
    Rational lhs;
    for (const auto& t : lp.constraints[i].terms) lhs += t.coef * primal[t.var];
    if (lhs > lp.constraints[i].rhs) {
      rep.primal_feasible = false;
      why = "primal violates constraint c" + std::to_string(i);
    }
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) rep.primal_value += lp.objective[j] * primal[j];

  // Dual: y >= 0 and per-variable column condition.
  rep.dual_feasible = true;
  for (std::size_t k = 0; k < dual.size(); ++k) {
    if (sgn(dual[k]) < 0) {
      rep.dual_feasible = false;
      if (why.empty()) why = "dual multiplier " + std::to_string(k) + " is negative";
    }
  }
  RationalVector column(lp.num_vars);
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    rep.dual_value += lp.constraints[i].rhs * dual[i];
    for (const auto& t : lp.constraints[i].terms) column[t.var] += t.coef * dual[i];
  }
  std::size_t k = lp.constraints.size();
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    if (lp.upper[j]) {
      column[j] += dual[k];
      rep.dual_value += *lp.upper[j] * dual[k];
      ++k;
    }
    if (lp.lower[j] && sgn(*lp.lower[j]) != 0) {
      column[j] -= dual[k];
      rep.dual_value -= *lp.lower[j] * dual[k];
      ++k;
    }
    const bool sign_constrained = lp.lower[j] && sgn(*lp.lower[j]) == 0;
    const bool ok = sign_constrained ? column[j] >= lp.objective[j] : column[j] == lp.objective[j];
    if (!ok) {
      rep.dual_feasible = false;
      if (why.empty()) {
        why = "dual column condition fails for x" + std::to_string(j) + ": " + to_string(column[j]) +
              (sign_constrained ? " < " : " != ") + to_string(lp.objective[j]);
      }
    }
  }
  rep.valid = rep.primal_feasible && rep.dual_feasible;
  rep.message = rep.valid ? "ok" : why;
  return rep;
}

void write_lp(std::ostream& out, const LinearProgram& lp) {
  auto write_terms = [&](auto&& emit) {
    bool first = true;
    emit([&](const Rational& c, std::size_t var) {
      if (sgn(c) == 0) return;
      if (!first) out << (sgn(c) < 0 ? " - " : " + ");
      else if (sgn(c) < 0) out << "-";
      out << to_string(abs(c)) << " x" << var;
      first = false;
    });
    if (first) out << "0";
  };
  out << "maximize: ";
  write_terms([&](auto&& put) {
    for (std::size_t j = 0; j < lp.num_vars; ++j) put(lp.objective[j], j);
  });
  out << "\n";
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    out << "c" << i << ": ";
    write_terms([&](auto&& put) {
      for (const auto& t : lp.constraints[i].terms) put(t.coef, t.var);
    });
    out << " <= " << to_string(lp.constraints[i].rhs) << "\n";
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    out << "bound: " << (lp.lower[j] ? to_string(*lp.lower[j]) : std::string("-inf")) << " <= x" << j
        << " <= " << (lp.upper[j] ? to_string(*lp.upper[j]) : std::string("+inf")) << "\n";
  }
}

}  // namespace fairshare
