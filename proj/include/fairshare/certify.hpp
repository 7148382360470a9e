#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fairshare/instance.hpp"
#include "fairshare/lp.hpp"

namespace fairshare {

/// Items of a binary instance grouped by the set of agents valuing them.
struct BinaryProfile {
  std::size_t n = 0;
  /// Sorted agent sets with weight v_S = (#items with that set) / m, in
  /// lexicographic order of the sets. Only positive weights are stored.
  std::vector<std::pair<std::vector<std::size_t>, Rational>> weights;
  /// Items nobody values; excluded from m.
  std::size_t dropped_items = 0;

  std::size_t support_size() const { return weights.size(); }
};

/// Throws std::invalid_argument for a non-binary instance or one where no
/// item is valued. Unvalued items are dropped and counted.
BinaryProfile to_profile(const Instance& inst);

enum class DualVariant { CcsSqrtN, EfsDelta };

std::string to_string(DualVariant v);

struct DualCertificate {
  DualVariant variant = DualVariant::CcsSqrtN;
  std::size_t n = 0;
  std::size_t z = 1;
  /// Z_i per agent (contains i); only for EfsDelta.
  std::vector<std::vector<std::size_t>> z_sets;
  Rational gamma;
  /// eta[i][j]; the diagonal is unused and zero.
  std::vector<RationalVector> eta;
  /// beta[s][i] for the s-th support set of the profile.
  std::vector<RationalVector> beta;
  Rational lambda;
};

struct DualViolation {
  std::string constraint;
  std::size_t i = 0;
  std::optional<std::size_t> j;
  std::vector<std::size_t> subset;
  std::string detail;
};

struct DualReport {
  DualVariant variant = DualVariant::CcsSqrtN;
  Rational lambda;
  /// 2 sqrt(n) + 1 or 2 sqrt(n/Z).
  double bound = 0.0;
  bool lambda_within_bound = false;
  std::vector<DualViolation> violations;
  /// sum of shares / SW and the dual value it must not exceed.
  Rational ratio_lhs, ratio_rhs;
  bool weak_duality_holds = false;

  bool passed() const { return violations.empty() && lambda_within_bound && weak_duality_holds; }
};

/// Exact rational 1/sqrt(x) when x is a perfect square, else the rational
/// value of the nearest double.
Rational inverse_sqrt(std::size_t x);

/// max over |S| = s in 1..n of n*gamma + s*max(0, 1 - (s-1)*gamma).
Rational sqrt_n_lambda(std::size_t n, const Rational& gamma);

/// gamma = 1/sqrt(n), eta_ij = gamma, beta_iS = gamma for i not in S and
/// gamma + max(0, 1 - (|S|-1) gamma) for i in S.
DualCertificate build_dual_sqrt_n(const BinaryProfile& profile);

/// Checks the dual constraints on the profile's support. Throws
/// std::invalid_argument when the certificate does not match the profile.
std::vector<DualViolation> check_dual_constraints(const BinaryProfile& profile, const DualCertificate& cert);

/// Constraint check, lambda <= 2 sqrt(n) + 1, and sum_i EFS_i / SW <= lambda
/// on the binary instance.
DualReport check_dual_sqrt_n(const Instance& inst, const DualCertificate& cert, SolveMode mode = SolveMode::exact());

/// Z_i = {i, i+1, ..., i+Z-1} mod n.
std::vector<std::vector<std::size_t>> cyclic_z_sets(std::size_t n, std::size_t z);

/// gamma = 1/sqrt(nZ), eta_ij = gamma, beta_iS = gamma + max(0, (1 - gamma q_iS)/Z)
/// for i in S with q_iS = |S \ Z_i|, gamma otherwise. Throws
/// std::invalid_argument unless every Z_i has size Z and contains i.
DualCertificate build_dual_efs_delta(const BinaryProfile& profile, const std::vector<std::vector<std::size_t>>& z_sets);

/// Builds the EFS^Delta dual for the given family, checks it, checks
/// lambda <= 2 sqrt(n/Z), and sum_i EFS^Delta_i(Z_i \ {i}) / SW <= lambda.
DualReport build_and_check_dual_efs_delta(const Instance& inst, const std::vector<std::vector<std::size_t>>& z_sets,
                                          SolveMode mode = SolveMode::exact());

struct PlaneReport {
  std::uint64_t q = 0;
  std::size_t n = 0, m = 0;
  /// Objective of the explicit primal solution and n(q+1)/m.
  Rational objective, expected_objective;
  /// Every pairwise constraint has lhs = rhs = 1/m.
  bool constraints_tight = false;
  Rational constraint_value;
  /// sum_i CCS_i / SW from the share module.
  Rational ccs_ratio;
  bool ccs_ratio_ok = false;
  /// theta(CCS) <= SW / C.
  std::optional<Rational> theta;
  Rational welfare_bound;
  bool theta_ok = false;

  bool passed() const { return objective == expected_objective && constraints_tight && ccs_ratio_ok && theta_ok; }
};

/// Throws std::invalid_argument when q is not prime.
PlaneReport check_plane_lower_bound(std::uint64_t q, SolveMode mode = SolveMode::exact());

/// x <= 2 sqrt(y) + c for rational x, y, c, decided exactly.
bool leq_two_sqrt_plus(const Rational& x, const Rational& y, const Rational& c);

}  // namespace fairshare
