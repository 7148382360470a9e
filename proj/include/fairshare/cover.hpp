#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fairshare/instance.hpp"
#include "fairshare/lp.hpp"

namespace fairshare {

struct CoverResult {
  Rational a, b;
  /// g_k: lowest-index agent attaining w_k = max_i v'_ik.
  std::vector<std::size_t> top_agent;
  /// S_i = {k : v'_ik >= a * w_k}, ascending.
  std::vector<std::vector<std::size_t>> large_sets;
  /// T in scan order.
  std::vector<std::size_t> cover_agents;
  /// Per agent; empty unless the agent is in T.
  std::vector<std::vector<std::size_t>> cover_sets;
};

/// v'_ik = v_ik / u_i([m]). Throws std::invalid_argument for a zero-total agent.
Instance normalize(const Instance& inst);

/// Greedy minimal cover over agents in index order: agent i joins T when at
/// least b*m items of S_i are still uncovered, and then covers them.
/// Requires a, b in (0, 1]; throws std::invalid_argument otherwise.
CoverResult minimal_cover(const Instance& normalized, const Rational& a, const Rational& b);

/// Rational approximation of m^(-1/3); exactly 1 for m = 1.
Rational default_cover_parameter(std::size_t m);

struct CoverAgentReport {
  /// Normalized-instance values.
  Rational alg_value, ccs_value, ratio;
  /// Same values in the original scale (times u_i([m])).
  Rational alg_original, ccs_original;
  /// CCS'_i <= 3 ALG_i + (1/(ab) + (a+b) m) / n, checked exactly.
  bool within_safe_bound = false;
};

struct CoverReport {
  CoverResult cover;
  Allocation allocation;
  std::vector<CoverAgentReport> agents;
  Rational max_ratio;
  double bound_safe = 0.0;   ///< 3 + 9 m^(2/3)
  double bound_3m23 = 0.0;   ///< 3 m^(2/3), monitored only
  bool supply_feasible = false;
  bool safe_bound_holds = false;
  /// Agents whose ratio exceeds 3 m^(2/3).
  std::vector<std::size_t> tight_bound_exceeded;
};

/// Three-part allocation: 1/3 of every item to its top agent, 1/3 of the
/// cover sets to their owners, and 1/(3n) of everything to everyone.
/// Parameters default to default_cover_parameter(m). Throws
/// std::invalid_argument for a zero-total agent.
CoverReport cover_allocate(const Instance& inst, std::optional<Rational> a = std::nullopt,
                           std::optional<Rational> b = std::nullopt, SolveMode mode = SolveMode::exact());

}  // namespace fairshare
