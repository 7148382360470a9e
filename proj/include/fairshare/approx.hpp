#pragma once

#include <optional>

#include "fairshare/instance.hpp"
#include "fairshare/lp.hpp"

namespace fairshare {

struct ApproxResult {
  /// nullopt when every share is zero: then any allocation meets every
  /// share for any theta.
  std::optional<Rational> theta;
  Allocation allocation;
  ShareVector shares;
  /// u_i(A_i) / share_i; nullopt for agents with a zero share.
  std::vector<std::optional<Rational>> per_agent_ratio;
};

/// max theta s.t. u_i(A_i) >= theta * share_i for every agent with a
/// positive share, over feasible allocations. Throws std::invalid_argument
/// if the share vector does not match the instance.
ApproxResult optimal_theta(const Instance& inst, const ShareVector& shares, SolveMode mode = SolveMode::exact());

/// SW(I) = sum_k max_i v_ik.
Rational welfare(const Instance& inst);

/// (sum_i share_i) / SW(I) for kind CCS or EFS. Throws std::invalid_argument
/// for other kinds or SW = 0.
Rational share_welfare_ratio(const Instance& inst, ShareKind kind, SolveMode mode = SolveMode::exact());

}  // namespace fairshare
