#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairshare/instance.hpp"
#include "fairshare/lp.hpp"

namespace fairshare {

/// Parameters of the EFS^Delta share: hidden sets have size floor((n-1)/delta).
struct DeltaSpec {
  Rational delta = 1;
  std::size_t samples = 20;
  std::uint64_t seed = 0;
  /// Average over every hidden set instead of sampling when there are at
  /// most kEnumerationLimit of them.
  bool enumerate = false;

  static constexpr std::size_t kEnumerationLimit = 10000;

  /// Throws std::invalid_argument if delta < 1, samples == 0 or n == 0.
  std::size_t hidden_set_size(std::size_t n) const;
};

Rational prop_share(const Instance& inst, std::size_t agent);

struct CcsResult {
  Rational value;
  Bundle bundle;
};

/// Compact LP: max u_i(x) s.t. u_j(x) <= u_j([m])/n for j != i, 0 <= x <= 1.
CcsResult ccs_share(const Instance& inst, std::size_t agent, SolveMode mode = SolveMode::exact());

/// The same share through the full-allocation LP over fCCS_i:
/// u_j(A_i) <= u_j(A_j') for all j, j' != i. Quadratically larger; meant for
/// cross-checking the compact form.
Rational ccs_full_share(const Instance& inst, std::size_t agent, SolveMode mode = SolveMode::exact());

/// Gives `agent` the bundle and splits what is left of every item equally
/// among the other agents. Throws std::invalid_argument if the bundle is
/// outside [0,1]^m or violates a CCS constraint.
Allocation ccs_complete_allocation(const Instance& inst, std::size_t agent, const Bundle& bundle);

/// max u_i(A_i) over allocations where no j != i envies anybody.
Rational ef_share(const Instance& inst, std::size_t agent, SolveMode mode = SolveMode::exact());

struct EfsResult {
  Rational value;
  Allocation allocation;
};

/// max u_i(A_i) over allocations where no j != i envies agent i.
EfsResult efs_share(const Instance& inst, std::size_t agent, SolveMode mode = SolveMode::exact());

/// EFS share when the agents in `hidden` must receive copies of agent i's
/// bundle. Throws std::invalid_argument if `hidden` contains the agent, an
/// out-of-range index or a duplicate.
Rational efs_delta_fixed(const Instance& inst, std::size_t agent, std::span<const std::size_t> hidden,
                         SolveMode mode = SolveMode::exact());

struct DeltaEstimate {
  Rational estimate;
  double standard_error = 0.0;
};

/// Mean of efs_delta_fixed over random hidden sets (or all of them, see
/// DeltaSpec::enumerate). Sample s of agent i draws from its own stream
/// derived from (seed, i, s), so the result does not depend on evaluation
/// order.
DeltaEstimate efs_delta_share(const Instance& inst, std::size_t agent, const DeltaSpec& spec,
                              SolveMode mode = SolveMode::exact());

/// Hidden set used by sample `sample` of `agent`; sorted.
std::vector<std::size_t> sample_hidden_set(std::size_t n, std::size_t agent, std::size_t size,
                                           std::uint64_t seed, std::size_t sample);

/// Per-agent shares of one kind. EfsDelta requires a spec. Agents are
/// processed on up to `workers` threads (0: hardware concurrency).
ShareVector all_shares(const Instance& inst, ShareKind kind, const std::optional<DeltaSpec>& spec = std::nullopt,
                       SolveMode mode = SolveMode::exact(), unsigned workers = 0);

}  // namespace fairshare
