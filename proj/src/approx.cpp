#include "fairshare/approx.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "fairshare/shares.hpp"

namespace fairshare {

ApproxResult optimal_theta(const Instance& inst, const ShareVector& shares, SolveMode mode) {
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  if (shares.values.size() != n) {
    throw std::invalid_argument("share vector has " + std::to_string(shares.values.size()) + " entries, instance has " +
                                std::to_string(n) + " agents");
  }
  for (const auto& s : shares.values) {
    if (s < 0) throw std::invalid_argument("negative share " + to_string(s));
  }
  ApproxResult r;
  r.shares = shares;
  r.allocation = Allocation::zeros(n, m);
  r.per_agent_ratio.assign(n, std::nullopt);

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(shares.values[i]) > 0) active.push_back(i);
  }
  if (active.empty()) return r;

  // theta is variable 0; x_ik follow for pairs with v_ik > 0.
  std::vector<std::size_t> var(n * m, 0);
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      if (sgn(inst.value(i, k)) != 0) var[i * m + k] = count++;
    }
  }
  LinearProgram lp(count);
  lp.objective[0] = 1;
  for (std::size_t i : active) {
    std::vector<LinearTerm> terms{{0, shares.values[i]}};
    for (std::size_t k = 0; k < m; ++k) {
      if (var[i * m + k]) terms.push_back({var[i * m + k], -inst.value(i, k)});
    }
    lp.add_constraint(std::move(terms), 0);
  }
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<LinearTerm> terms;
    for (std::size_t i = 0; i < n; ++i) {
      if (var[i * m + k]) terms.push_back({var[i * m + k], 1});
    }
    if (!terms.empty()) lp.add_constraint(std::move(terms), 1);
  }
  LpSolution s = solve(lp, mode);
  if (s.status != LpStatus::Optimal) {
    throw SolverError("theta LP returned " + std::string(to_string(s.status)));
  }
  r.theta = s.point[0];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      if (var[i * m + k]) r.allocation.at(i, k) = s.point[var[i * m + k]];
    }
  }
  for (std::size_t i : active) {
    r.per_agent_ratio[i] = utility(inst, i, r.allocation.bundles[i]) / shares.values[i];
  }
  return r;
}

Rational welfare(const Instance& inst) {
  Rational sw = 0;
  for (std::size_t k = 0; k < inst.num_items(); ++k) {
    Rational best = 0;
    for (std::size_t i = 0; i < inst.num_agents(); ++i) best = std::max(best, inst.value(i, k));
    sw += best;
  }
  return sw;
}

Rational share_welfare_ratio(const Instance& inst, ShareKind kind, SolveMode mode) {
  if (kind != ShareKind::Ccs && kind != ShareKind::Efs) {
    throw std::invalid_argument("share_welfare_ratio supports CCS and EFS only");
  }
  Rational sw = welfare(inst);
  if (sgn(sw) == 0) throw std::invalid_argument("social welfare is zero");
  ShareVector s = all_shares(inst, kind, std::nullopt, mode);
  return std::accumulate(s.values.begin(), s.values.end(), Rational(0)) / sw;
}

}  // namespace fairshare
