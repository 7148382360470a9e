#include "fairshare/shares.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "fairshare/parallel.hpp"
#include "fairshare/random.hpp"

namespace fairshare {

namespace {

void check_agent(const Instance& inst, std::size_t agent) {
  if (agent >= inst.num_agents()) {
    throw std::out_of_range("agent " + std::to_string(agent) + " out of range (n = " +
                            std::to_string(inst.num_agents()) + ")");
  }
}

LpSolution solve_share_lp(const LinearProgram& lp, SolveMode mode, const char* what) {
  LpSolution s = solve(lp, mode);
  if (s.status != LpStatus::Optimal) {
    throw SolverError(std::string(what) + " LP returned " + std::string(to_string(s.status)));
  }
  return s;
}

// Float mode first tries a pure double LP; the rational build is the
// fallback when that solve cannot be verified. `build` is called with a
// Rational or double tag and returns the matching program.
template <class Build>
Rational solve_share(SolveMode mode, const char* what, Build build, RationalVector* point) {
  if (!mode.is_exact()) {
    FloatLpSolution fs = solve_float(build(0.0), mode.tolerance);
    if (fs.verified && fs.status == LpStatus::Optimal) {
      if (point) {
        point->resize(fs.point.size());
        for (std::size_t j = 0; j < fs.point.size(); ++j) (*point)[j] = from_double(fs.point[j]);
      }
      return from_double(fs.objective_value);
    }
  }
  LpSolution s = solve_share_lp(build(Rational(0)), mode, what);
  if (point) *point = std::move(s.point);
  return s.objective_value;
}

template <class S>
decltype(auto) value_as(const Instance& inst, std::size_t j, std::size_t k) {
  if constexpr (std::is_same_v<S, double>) {
    return inst.value_d(j, k);
  } else {
    return inst.value(j, k);
  }
}

inline bool positive(const Rational& x) { return sgn(x) > 0; }
inline bool positive(double x) { return x > 0; }

// Variable index of x_jk in an LP over a subset of (agent, item) pairs.
class PairIndex {
 public:
  PairIndex(std::size_t n, std::size_t m) : m_(m), index_(n * m, kAbsent) {}

  std::size_t add(std::size_t j, std::size_t k) {
    index_[j * m_ + k] = count_;
    return count_++;
  }
  bool has(std::size_t j, std::size_t k) const { return index_[j * m_ + k] != kAbsent; }
  std::size_t at(std::size_t j, std::size_t k) const { return index_[j * m_ + k]; }
  std::size_t size() const { return count_; }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::size_t m_;
  std::vector<std::size_t> index_;
  std::size_t count_ = 0;
};

// sum_k v_jk x_{from,k} - sum_k v_jk x_{to,k} <= 0
template <class S>
void add_envy_row(BasicLinearProgram<S>& lp, const Instance& inst, const PairIndex& idx, std::size_t j,
                  std::size_t from, std::size_t to) {
  std::vector<BasicTerm<S>> terms;
  bool any_positive = false;
  for (std::size_t k = 0; k < inst.num_items(); ++k) {
    const auto& v = value_as<S>(inst, j, k);
    if (!positive(v)) continue;
    if (idx.has(from, k)) {
      terms.push_back({idx.at(from, k), v});
      any_positive = true;
    }
    if (idx.has(to, k)) terms.push_back({idx.at(to, k), S(-v)});
  }
  if (any_positive) lp.add_constraint(std::move(terms), S(0));
}

// Supply rows sum_j weight_j x_jk <= 1; weight of agent i may exceed 1.
template <class S>
void add_supply_rows(BasicLinearProgram<S>& lp, const Instance& inst, const PairIndex& idx, std::size_t agent,
                     const S& agent_weight) {
  for (std::size_t k = 0; k < inst.num_items(); ++k) {
    std::vector<BasicTerm<S>> terms;
    for (std::size_t j = 0; j < inst.num_agents(); ++j) {
      if (!idx.has(j, k)) continue;
      terms.push_back({idx.at(j, k), j == agent ? agent_weight : S(1)});
    }
    if (!terms.empty()) lp.add_constraint(std::move(terms), S(1));
  }
}

LinearProgram ccs_compact_lp(const Instance& inst, std::size_t agent) {
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  LinearProgram lp(m);
  for (std::size_t k = 0; k < m; ++k) {
    lp.objective[k] = inst.value(agent, k);
    lp.upper[k] = Rational(1);
  }
  const Rational inv_n = frac(1, static_cast<long>(n));
  for (std::size_t j = 0; j < n; ++j) {
    if (j == agent || sgn(inst.total_value(j)) == 0) continue;
    std::vector<LinearTerm> terms;
    for (std::size_t k = 0; k < m; ++k) {
      if (sgn(inst.value(j, k)) != 0) terms.push_back({k, inst.value(j, k)});
    }
    lp.add_constraint(std::move(terms), inst.total_value(j) * inv_n);
  }
  return lp;
}

}  // namespace

std::size_t DeltaSpec::hidden_set_size(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("delta spec: no agents");
  if (delta < 1) throw std::invalid_argument("delta must be at least 1, got " + to_string(delta));
  if (samples == 0) throw std::invalid_argument("delta spec: samples must be positive");
  mpz_class h = fairshare::floor(Rational(static_cast<unsigned long>(n - 1)) / delta);
  return static_cast<std::size_t>(h.get_ui());
}

Rational prop_share(const Instance& inst, std::size_t agent) {
  check_agent(inst, agent);
  return inst.total_value(agent) / Rational(static_cast<unsigned long>(inst.num_agents()));
}

CcsResult ccs_share(const Instance& inst, std::size_t agent, SolveMode mode) {
  check_agent(inst, agent);
  const std::size_t m = inst.num_items();
  if (inst.num_agents() == 1) return {inst.total_value(agent), Bundle::filled(m, 1)};
  if (sgn(inst.total_value(agent)) == 0) return {0, Bundle::zeros(m)};
  LpSolution s = solve_share_lp(ccs_compact_lp(inst, agent), mode, "CCS");
  return {s.objective_value, Bundle{s.point}};
}

Rational ccs_full_share(const Instance& inst, std::size_t agent, SolveMode mode) {
  check_agent(inst, agent);
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  if (n == 1) return inst.total_value(agent);
  if (sgn(inst.total_value(agent)) == 0) return 0;
  PairIndex idx(n, m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < m; ++k) idx.add(j, k);
  }
  auto build = [&](auto tag) {
    using S = decltype(tag);
    BasicLinearProgram<S> lp(idx.size());
    for (std::size_t k = 0; k < m; ++k) lp.objective[idx.at(agent, k)] = value_as<S>(inst, agent, k);
    add_supply_rows(lp, inst, idx, agent, S(1));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == agent) continue;
      for (std::size_t jp = 0; jp < n; ++jp) {
        if (jp != agent) add_envy_row(lp, inst, idx, j, agent, jp);
      }
    }
    return lp;
  };
  return solve_share(mode, "fCCS", build, nullptr);
}

Allocation ccs_complete_allocation(const Instance& inst, std::size_t agent, const Bundle& bundle) {
  check_agent(inst, agent);
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  if (bundle.size() != m) throw std::invalid_argument("bundle length differs from item count");
  for (std::size_t k = 0; k < m; ++k) {
    if (bundle[k] < 0 || bundle[k] > 1) {
      throw std::invalid_argument("bundle entry " + std::to_string(k) + " outside [0,1]");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (j == agent) continue;
    if (utility(inst, j, bundle) * static_cast<unsigned long>(n) > inst.total_value(j)) {
      throw std::invalid_argument("bundle violates the CCS constraint of agent " + std::to_string(j));
    }
  }
  Allocation a = Allocation::zeros(n, m);
  a.bundles[agent] = bundle;
  if (n == 1) return a;
  const Rational share = frac(1, static_cast<long>(n - 1));
  for (std::size_t k = 0; k < m; ++k) {
    Rational rest = (1 - bundle[k]) * share;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != agent) a.at(j, k) = rest;
    }
  }
  return a;
}

Rational ef_share(const Instance& inst, std::size_t agent, SolveMode mode) {
  check_agent(inst, agent);
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  if (n == 1) return inst.total_value(agent);
  if (sgn(inst.total_value(agent)) == 0) return 0;
  // Giving anyone an item it does not value only adds envy or wastes supply.
  PairIndex idx(n, m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      if (sgn(inst.value(j, k)) != 0) idx.add(j, k);
    }
  }
  auto build = [&](auto tag) {
    using S = decltype(tag);
    BasicLinearProgram<S> lp(idx.size());
    for (std::size_t k = 0; k < m; ++k) {
      if (idx.has(agent, k)) lp.objective[idx.at(agent, k)] = value_as<S>(inst, agent, k);
    }
    add_supply_rows(lp, inst, idx, agent, S(1));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == agent) continue;
      for (std::size_t jp = 0; jp < n; ++jp) {
        if (jp != j) add_envy_row(lp, inst, idx, j, jp, j);
      }
    }
    return lp;
  };
  return solve_share(mode, "EF", build, nullptr);
}

namespace {

// EFS LP where the agents in `hidden` hold copies of the agent's bundle.
// Returns the value and, when requested, the allocation.
Rational efs_core(const Instance& inst, std::size_t agent, const std::vector<bool>& hidden, std::size_t hidden_count,
                  SolveMode mode, Allocation* witness) {
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  PairIndex idx(n, m);
  for (std::size_t j = 0; j < n; ++j) {
    if (hidden[j]) continue;
    for (std::size_t k = 0; k < m; ++k) {
      if (sgn(inst.value(j, k)) != 0) idx.add(j, k);
    }
  }
  auto build = [&](auto tag) {
    using S = decltype(tag);
    BasicLinearProgram<S> lp(idx.size());
    for (std::size_t k = 0; k < m; ++k) {
      if (idx.has(agent, k)) lp.objective[idx.at(agent, k)] = value_as<S>(inst, agent, k);
    }
    add_supply_rows(lp, inst, idx, agent, S(static_cast<long>(hidden_count + 1)));
    for (std::size_t j = 0; j < n; ++j) {
      if (j != agent && !hidden[j]) add_envy_row(lp, inst, idx, j, agent, j);
    }
    return lp;
  };
  RationalVector point;
  Rational value = solve_share(mode, "EFS", build, witness ? &point : nullptr);
  if (witness) {
    *witness = Allocation::zeros(n, m);
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t src = hidden[j] ? agent : j;
      for (std::size_t k = 0; k < m; ++k) {
        if (idx.has(src, k)) witness->at(j, k) = point[idx.at(src, k)];
      }
    }
  }
  return value;
}

}  // namespace

EfsResult efs_share(const Instance& inst, std::size_t agent, SolveMode mode) {
  check_agent(inst, agent);
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  if (n == 1) return {inst.total_value(agent), Allocation{{Bundle::filled(m, 1)}}};
  if (sgn(inst.total_value(agent)) == 0) return {0, Allocation::zeros(n, m)};
  EfsResult r;
  r.value = efs_core(inst, agent, std::vector<bool>(n, false), 0, mode, &r.allocation);
  return r;
}

Rational efs_delta_fixed(const Instance& inst, std::size_t agent, std::span<const std::size_t> hidden,
                         SolveMode mode) {
  check_agent(inst, agent);
  const std::size_t n = inst.num_agents();
  std::vector<bool> mask(n, false);
  for (std::size_t j : hidden) {
    if (j >= n) throw std::invalid_argument("hidden agent " + std::to_string(j) + " out of range");
    if (j == agent) throw std::invalid_argument("hidden set contains the agent itself");
    if (mask[j]) throw std::invalid_argument("hidden agent " + std::to_string(j) + " listed twice");
    mask[j] = true;
  }
  if (n == 1) return inst.total_value(agent);
  if (sgn(inst.total_value(agent)) == 0) return 0;
  if (hidden.size() == n - 1) return prop_share(inst, agent);
  return efs_core(inst, agent, mask, hidden.size(), mode, nullptr);
}

std::vector<std::size_t> sample_hidden_set(std::size_t n, std::size_t agent, std::size_t size, std::uint64_t seed,
                                           std::size_t sample) {
  if (agent >= n) throw std::out_of_range("agent out of range");
  if (size > n - 1) throw std::invalid_argument("hidden set larger than n - 1");
  std::uint64_t s = splitmix64(seed ^ splitmix64(agent + 0x1234567ULL) ^ splitmix64(sample * 0x9e3779b9ULL + 1));
  std::mt19937_64 rng(s);
  std::vector<std::size_t> others;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != agent) others.push_back(j);
  }
  // partial Fisher-Yates
  for (std::size_t t = 0; t < size; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, others.size() - 1);
    std::swap(others[t], others[pick(rng)]);
  }
  others.resize(size);
  std::sort(others.begin(), others.end());
  return others;
}

DeltaEstimate efs_delta_share(const Instance& inst, std::size_t agent, const DeltaSpec& spec, SolveMode mode) {
  check_agent(inst, agent);
  const std::size_t n = inst.num_agents();
  const std::size_t h = spec.hidden_set_size(n);
  if (h == 0) return {efs_share(inst, agent, mode).value, 0.0};
  if (h == n - 1) return {prop_share(inst, agent), 0.0};

  std::vector<Rational> values;
  const mpz_class sets = binomial(n - 1, h);
  if (spec.enumerate && sets <= static_cast<unsigned long>(DeltaSpec::kEnumerationLimit)) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != agent) others.push_back(j);
    }
    std::vector<bool> mask(others.size(), false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(h), true);
    do {
      std::vector<std::size_t> w;
      for (std::size_t t = 0; t < others.size(); ++t) {
        if (mask[t]) w.push_back(others[t]);
      }
      values.push_back(efs_delta_fixed(inst, agent, w, mode));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    Rational sum = std::accumulate(values.begin(), values.end(), Rational(0));
    return {sum / Rational(static_cast<unsigned long>(values.size())), 0.0};
  }

  values.resize(spec.samples);
  for (std::size_t s = 0; s < spec.samples; ++s) {
    values[s] = efs_delta_fixed(inst, agent, sample_hidden_set(n, agent, h, spec.seed, s), mode);
  }
  Rational sum = std::accumulate(values.begin(), values.end(), Rational(0));
  Rational mean = sum / Rational(static_cast<unsigned long>(values.size()));
  double se = 0.0;
  if (values.size() > 1) {
    double mu = mean.get_d(), ss = 0.0;
    for (const auto& v : values) ss += (v.get_d() - mu) * (v.get_d() - mu);
    se = std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return {mean, se};
}

ShareVector all_shares(const Instance& inst, ShareKind kind, const std::optional<DeltaSpec>& spec, SolveMode mode,
                       unsigned workers) {
  const std::size_t n = inst.num_agents();
  ShareVector out;
  out.kind = kind;
  out.values.resize(n);
  if (kind == ShareKind::EfsDelta) {
    if (!spec) throw std::invalid_argument("EFS_DELTA shares need a delta spec");
    spec->hidden_set_size(n);
    out.delta = spec->delta;
    out.standard_errors.resize(n);
  }
  parallel_for(n, [&](std::size_t i) {
    switch (kind) {
      case ShareKind::Prop: out.values[i] = prop_share(inst, i); break;
      case ShareKind::Ccs: out.values[i] = ccs_share(inst, i, mode).value; break;
      case ShareKind::Ef: out.values[i] = ef_share(inst, i, mode); break;
      case ShareKind::Efs: out.values[i] = efs_share(inst, i, mode).value; break;
      case ShareKind::EfsDelta: {
        DeltaEstimate e = efs_delta_share(inst, i, *spec, mode);
        out.values[i] = e.estimate;
        out.standard_errors[i] = e.standard_error;
        break;
      }
    }
  }, workers);
  return out;
}

}  // namespace fairshare
