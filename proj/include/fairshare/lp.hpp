#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fairshare/rational.hpp"

namespace fairshare {

template <class S>
struct BasicTerm {
  std::size_t var;
  S coef;
};

/// sum(terms) <= rhs
template <class S>
struct BasicConstraint {
  std::vector<BasicTerm<S>> terms;
  S rhs;
};

/// maximize objective . x  subject to  constraints,  lower <= x <= upper.
///
/// Variables default to the box [0, +inf). A missing bound (std::nullopt) is
/// unbounded in that direction. S is Rational for exact work; the double
/// instantiation exists for float-mode callers that never need exact values.
template <class S>
struct BasicLinearProgram {
  std::size_t num_vars = 0;
  std::vector<S> objective;
  std::vector<BasicConstraint<S>> constraints;
  std::vector<std::optional<S>> lower;
  std::vector<std::optional<S>> upper;

  explicit BasicLinearProgram(std::size_t n = 0) : num_vars(n), objective(n), lower(n, S(0)), upper(n) {}

  std::size_t add_constraint(std::vector<BasicTerm<S>> terms, S rhs) {
    constraints.push_back(BasicConstraint<S>{std::move(terms), std::move(rhs)});
    return constraints.size() - 1;
  }
  void set_bounds(std::size_t var, std::optional<S> lo, std::optional<S> hi) {
    lower.at(var) = std::move(lo);
    upper.at(var) = std::move(hi);
  }

  /// Length of a dual point for check_certificate / LpSolution::dual:
  /// one multiplier per constraint, then, walking variables in index order,
  /// one for each finite upper bound (x_j <= u_j) followed by one for each
  /// finite nonzero lower bound (-x_j <= -l_j).
  std::size_t dual_size() const {
    std::size_t n = constraints.size();
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (upper[j]) ++n;
      if (lower[j] && *lower[j] != 0) ++n;
    }
    return n;
  }

  /// Throws std::invalid_argument on a length mismatch or a term that
  /// references a nonexistent variable.
  void validate() const {
    if (objective.size() != num_vars || lower.size() != num_vars || upper.size() != num_vars) {
      throw std::invalid_argument("linear program: vector lengths differ from num_vars");
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      for (const auto& t : constraints[i].terms) {
        if (t.var >= num_vars) {
          throw std::invalid_argument("linear program: constraint " + std::to_string(i) +
                                      " references variable " + std::to_string(t.var));
        }
      }
    }
  }
};

using LinearTerm = BasicTerm<Rational>;
using LinearConstraint = BasicConstraint<Rational>;
using LinearProgram = BasicLinearProgram<Rational>;
using FloatLinearProgram = BasicLinearProgram<double>;

enum class LpStatus { Optimal, Infeasible, Unbounded };
std::string_view to_string(LpStatus status);

struct SolveMode {
  enum class Kind { Exact, Float };
  Kind kind = Kind::Exact;
  double tolerance = 1e-9;

  static SolveMode exact() { return {}; }
  static SolveMode floating(double tolerance = 1e-9) { return {Kind::Float, tolerance}; }
  bool is_exact() const { return kind == Kind::Exact; }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  /// Meaningful iff Optimal. Always objective . point, computed exactly.
  Rational objective_value;
  RationalVector point;
  /// Dual multipliers in the layout described by LinearProgram::dual_size.
  RationalVector dual;
  std::size_t iterations = 0;
  /// True when the point was produced (or confirmed) by the rational solver.
  bool exact = false;
};

struct FloatLpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective_value = 0.0;
  std::vector<double> point;
  std::size_t iterations = 0;
  /// False when the primal/dual check failed or the solver broke down; the
  /// caller should then solve the rational LP instead.
  bool verified = false;
};

/// Raised for internal failures (iteration limit, numerical breakdown).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact mode returns a vertex that is exactly feasible and exactly optimal;
/// the rational phase pivots by Bland's rule and may start from a basis
/// found by the double-precision solver. Float mode runs the
/// double-precision solver only and checks primal/dual feasibility to the
/// relative tolerance, falling back to the exact solver when that check
/// fails.
LpSolution solve(const LinearProgram& lp, SolveMode mode = SolveMode::exact());

/// Double-precision solve with the same checks as float mode but no exact
/// fallback.
FloatLpSolution solve_float(const FloatLinearProgram& lp, double tolerance = 1e-9);

struct CertificateReport {
  bool valid = false;
  bool primal_feasible = false;
  bool dual_feasible = false;
  Rational primal_value;
  Rational dual_value;
  std::string message;
};

/// Checks a primal point against the LP and a dual point against the
/// inequality-form dual (y >= 0; A^T y >= c for variables with lower bound 0,
/// A^T y = c otherwise). When both are feasible, weak duality gives
/// primal_value <= dual_value. Throws std::invalid_argument on dimension
/// mismatch.
CertificateReport check_certificate(const LinearProgram& lp, std::span<const Rational> primal,
                                    std::span<const Rational> dual);

/// Plain-text dump, one constraint per line with exact fractions:
///
///   maximize: 1 x0 + 3/2 x1
///   c0: 1 x0 + 1 x1 <= 3/2
///   bound: 0 <= x0 <= 1
void write_lp(std::ostream& out, const LinearProgram& lp);

}  // namespace fairshare
