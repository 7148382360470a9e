#include "fairshare/cover.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fairshare/parallel.hpp"
#include "fairshare/shares.hpp"

namespace fairshare {

Instance normalize(const Instance& inst) {
  std::vector<RationalVector> rows = inst.values();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Rational& total = inst.total_value(i);
    if (sgn(total) == 0) throw std::invalid_argument("agent " + std::to_string(i) + " has zero total value");
    for (auto& v : rows[i]) v /= total;
  }
  return Instance(std::move(rows));
}

Rational default_cover_parameter(std::size_t m) {
  if (m == 0) throw std::invalid_argument("cover parameter needs m >= 1");
  if (m == 1) return 1;
  return 1 / from_double(std::cbrt(static_cast<double>(m)));
}

CoverResult minimal_cover(const Instance& normalized, const Rational& a, const Rational& b) {
  if (sgn(a) <= 0 || a > 1) throw std::invalid_argument("cover parameter a must lie in (0, 1]");
  if (sgn(b) <= 0 || b > 1) throw std::invalid_argument("cover parameter b must lie in (0, 1]");
  const std::size_t n = normalized.num_agents(), m = normalized.num_items();
  CoverResult c;
  c.a = a;
  c.b = b;
  c.top_agent.assign(m, 0);
  RationalVector w(m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (normalized.value(i, k) > w[k]) {
        w[k] = normalized.value(i, k);
        c.top_agent[k] = i;
      }
    }
  }
  c.large_sets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      if (normalized.value(i, k) >= a * w[k]) c.large_sets[i].push_back(k);
    }
  }
  const Rational threshold = b * Rational(static_cast<unsigned long>(m));
  std::vector<bool> covered(m, false);
  c.cover_sets.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> fresh;
    for (std::size_t k : c.large_sets[i]) {
      if (!covered[k]) fresh.push_back(k);
    }
    if (Rational(static_cast<unsigned long>(fresh.size())) < threshold) continue;
    for (std::size_t k : fresh) covered[k] = true;
    c.cover_sets[i] = std::move(fresh);
    c.cover_agents.push_back(i);
  }
  return c;
}

CoverReport cover_allocate(const Instance& inst, std::optional<Rational> a, std::optional<Rational> b,
                           SolveMode mode) {
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  const Instance norm = normalize(inst);
  CoverReport r;
  r.cover = minimal_cover(norm, a ? *a : default_cover_parameter(m), b ? *b : default_cover_parameter(m));

  const Rational third = frac(1, 3);
  const Rational base = frac(1, 3 * static_cast<long>(n));
  r.allocation = Allocation::zeros(n, m);
  for (std::size_t k = 0; k < m; ++k) r.allocation.at(r.cover.top_agent[k], k) += third;
  for (std::size_t i : r.cover.cover_agents) {
    for (std::size_t k : r.cover.cover_sets[i]) r.allocation.at(i, k) += third;
  }
  for (auto& bundle : r.allocation.bundles) {
    for (auto& x : bundle.quantities) x += base;
  }
  r.supply_feasible = is_feasible_allocation(inst, r.allocation);
  if (!r.supply_feasible) throw std::logic_error("cover allocation exceeds unit supply");

  const Rational& ca = r.cover.a;
  const Rational& cb = r.cover.b;
  const Rational slack =
      (1 / (ca * cb) + (ca + cb) * Rational(static_cast<unsigned long>(m))) / Rational(static_cast<unsigned long>(n));
  r.agents.resize(n);
  parallel_for(n, [&](std::size_t i) {
    CoverAgentReport& ar = r.agents[i];
    ar.alg_value = utility(norm, i, r.allocation.bundles[i]);
    ar.ccs_value = ccs_share(norm, i, mode).value;
    ar.ratio = ar.ccs_value / ar.alg_value;
    ar.alg_original = ar.alg_value * inst.total_value(i);
    ar.ccs_original = ar.ccs_value * inst.total_value(i);
    ar.within_safe_bound = ar.ccs_value <= 3 * ar.alg_value + slack;
  });

  const double m23 = std::pow(static_cast<double>(m), 2.0 / 3.0);
  r.bound_safe = 3.0 + 9.0 * m23;
  r.bound_3m23 = 3.0 * m23;
  r.safe_bound_holds = true;
  r.max_ratio = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ar = r.agents[i];
    r.max_ratio = std::max(r.max_ratio, ar.ratio);
    if (!ar.within_safe_bound || ar.ratio.get_d() > r.bound_safe * (1 + 1e-12)) r.safe_bound_holds = false;
    if (ar.ratio.get_d() > r.bound_3m23) r.tight_bound_exceeded.push_back(i);
  }
  return r;
}

}  // namespace fairshare
