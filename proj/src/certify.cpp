#include "fairshare/certify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fairshare/approx.hpp"
#include "fairshare/forge.hpp"
#include "fairshare/parallel.hpp"
#include "fairshare/shares.hpp"

namespace fairshare {

namespace {

Rational whole(std::size_t x) { return Rational(static_cast<unsigned long>(x)); }

std::string set_string(const std::vector<std::size_t>& s) {
  std::string out = "{";
  for (std::size_t t = 0; t < s.size(); ++t) out += (t ? "," : "") + std::to_string(s[t]);
  return out + "}";
}

bool contains(const std::vector<std::size_t>& sorted, std::size_t x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

// Z_i = {i} for the sqrt(n) certificate.
std::vector<std::vector<std::size_t>> effective_z_sets(const DualCertificate& cert) {
  if (cert.variant == DualVariant::EfsDelta) return cert.z_sets;
  std::vector<std::vector<std::size_t>> z(cert.n);
  for (std::size_t i = 0; i < cert.n; ++i) z[i] = {i};
  return z;
}

void validate_z_sets(std::size_t n, std::size_t z, std::vector<std::vector<std::size_t>>& sets) {
  if (sets.size() != n) throw std::invalid_argument("need one Z_i per agent");
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = sets[i];
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw std::invalid_argument("Z_" + std::to_string(i) + " has a repeated agent");
    }
    if (s.size() != z) {
      throw std::invalid_argument("|Z_" + std::to_string(i) + "| = " + std::to_string(s.size()) + ", expected " +
                                  std::to_string(z));
    }
    if (!contains(s, i)) throw std::invalid_argument("Z_" + std::to_string(i) + " does not contain agent " + std::to_string(i));
    if (s.back() >= n) throw std::invalid_argument("Z_" + std::to_string(i) + " names an agent out of range");
  }
}

}  // namespace

BinaryProfile to_profile(const Instance& inst) {
  if (!inst.is_binary()) throw std::invalid_argument("profile needs a binary instance");
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  std::map<std::vector<std::size_t>, std::size_t> counts;
  BinaryProfile p;
  p.n = n;
  std::size_t valued = 0;
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (sgn(inst.value(i, k)) != 0) s.push_back(i);
    }
    if (s.empty()) {
      ++p.dropped_items;
      continue;
    }
    ++valued;
    ++counts[s];
  }
  if (valued == 0) throw std::invalid_argument("no item is valued by any agent");
  for (auto& [s, c] : counts) p.weights.emplace_back(s, frac(static_cast<long>(c), static_cast<long>(valued)));
  return p;
}

std::string to_string(DualVariant v) { return v == DualVariant::CcsSqrtN ? "CCS_SQRT_N" : "EFS_DELTA"; }

Rational inverse_sqrt(std::size_t x) {
  if (x == 0) throw std::invalid_argument("inverse_sqrt of zero");
  mpz_class r = sqrt(mpz_class(static_cast<unsigned long>(x)));
  if (r * r == static_cast<unsigned long>(x)) return 1 / Rational(r);
  return from_double(1.0 / std::sqrt(static_cast<double>(x)));
}

bool leq_two_sqrt_plus(const Rational& x, const Rational& y, const Rational& c) {
  Rational d = x - c;
  if (sgn(d) <= 0) return true;
  d /= 2;
  return d * d <= y;
}

Rational sqrt_n_lambda(std::size_t n, const Rational& gamma) {
  Rational best = 0;
  for (std::size_t s = 1; s <= n; ++s) {
    Rational extra = 1 - whole(s - 1) * gamma;
    if (sgn(extra) < 0) extra = 0;
    best = std::max(best, Rational(whole(n) * gamma + whole(s) * extra));
  }
  return best;
}

namespace {

// n*gamma + s * max(0, 1 - gamma * max(0, s - Z)) / Z, maximized over s.
Rational efs_delta_lambda(std::size_t n, std::size_t z, const Rational& gamma) {
  Rational best = 0;
  for (std::size_t s = 1; s <= n; ++s) {
    Rational extra = 1 - whole(s > z ? s - z : 0) * gamma;
    if (sgn(extra) < 0) extra = 0;
    best = std::max(best, Rational(whole(n) * gamma + whole(s) * extra / whole(z)));
  }
  return best;
}

DualCertificate build_dual(const BinaryProfile& profile, DualVariant variant, std::size_t z,
                           std::vector<std::vector<std::size_t>> z_sets) {
  const std::size_t n = profile.n;
  DualCertificate c;
  c.variant = variant;
  c.n = n;
  c.z = z;
  c.gamma = inverse_sqrt(n * z);
  if (variant == DualVariant::EfsDelta) c.z_sets = std::move(z_sets);
  c.eta.assign(n, RationalVector(n, c.gamma));
  for (std::size_t i = 0; i < n; ++i) c.eta[i][i] = 0;
  const auto zs = effective_z_sets(c);
  c.beta.resize(profile.support_size());
  Rational support_max = 0;
  for (std::size_t s = 0; s < profile.support_size(); ++s) {
    const auto& set = profile.weights[s].first;
    RationalVector& b = c.beta[s];
    b.assign(n, c.gamma);
    for (std::size_t i : set) {
      std::size_t q = 0;
      for (std::size_t j : set) q += !contains(zs[i], j);
      Rational extra = (1 - whole(q) * c.gamma) / whole(z);
      if (sgn(extra) > 0) b[i] += extra;
    }
    support_max = std::max(support_max, std::accumulate(b.begin(), b.end(), Rational(0)));
  }
  Rational closed = variant == DualVariant::CcsSqrtN ? sqrt_n_lambda(n, c.gamma) : efs_delta_lambda(n, z, c.gamma);
  c.lambda = std::max(closed, support_max);
  return c;
}

}  // namespace

DualCertificate build_dual_sqrt_n(const BinaryProfile& profile) {
  if (profile.n == 0) throw std::invalid_argument("empty profile");
  return build_dual(profile, DualVariant::CcsSqrtN, 1, {});
}

std::vector<std::vector<std::size_t>> cyclic_z_sets(std::size_t n, std::size_t z) {
  if (z == 0 || z > n) throw std::invalid_argument("Z must lie in [1, n]");
  std::vector<std::vector<std::size_t>> sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < z; ++t) sets[i].push_back((i + t) % n);
    std::sort(sets[i].begin(), sets[i].end());
  }
  return sets;
}

DualCertificate build_dual_efs_delta(const BinaryProfile& profile, const std::vector<std::vector<std::size_t>>& z_sets) {
  if (profile.n == 0) throw std::invalid_argument("empty profile");
  if (z_sets.empty()) throw std::invalid_argument("need one Z_i per agent");
  auto sets = z_sets;
  const std::size_t z = sets.front().size();
  validate_z_sets(profile.n, z, sets);
  return build_dual(profile, DualVariant::EfsDelta, z, std::move(sets));
}

std::vector<DualViolation> check_dual_constraints(const BinaryProfile& profile, const DualCertificate& cert) {
  const std::size_t n = profile.n;
  if (cert.n != n) throw std::invalid_argument("certificate is for a different agent count");
  if (cert.eta.size() != n) throw std::invalid_argument("eta has the wrong dimension");
  for (const auto& row : cert.eta) {
    if (row.size() != n) throw std::invalid_argument("eta has the wrong dimension");
  }
  if (cert.beta.size() != profile.support_size()) throw std::invalid_argument("beta does not match the profile support");
  for (const auto& row : cert.beta) {
    if (row.size() != n) throw std::invalid_argument("beta has the wrong dimension");
  }
  auto zs = effective_z_sets(cert);
  validate_z_sets(n, cert.variant == DualVariant::EfsDelta ? cert.z : 1, zs);
  const Rational zw = whole(cert.variant == DualVariant::EfsDelta ? cert.z : 1);

  std::vector<DualViolation> out;
  if (sgn(cert.lambda) < 0) out.push_back({"nonnegativity", 0, std::nullopt, {}, "lambda < 0"});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && sgn(cert.eta[i][j]) < 0) out.push_back({"nonnegativity", i, j, {}, "eta < 0"});
    }
  }
  for (std::size_t s = 0; s < profile.support_size(); ++s) {
    const auto& set = profile.weights[s].first;
    const auto& b = cert.beta[s];
    Rational total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      total += b[i];
      if (sgn(b[i]) < 0) out.push_back({"nonnegativity", i, std::nullopt, set, "beta < 0"});
      if (contains(set, i)) {
        Rational lhs = zw * b[i];
        for (std::size_t j : set) {
          if (j != i && !contains(zs[i], j)) lhs += cert.eta[i][j];
        }
        if (lhs < 1) {
          out.push_back({"cover", i, std::nullopt, set, "lhs " + to_string(lhs) + " < 1 on " + set_string(set)});
        }
      }
      for (std::size_t j : set) {
        if (j == i || contains(zs[i], j)) continue;
        if (b[i] < cert.eta[i][j]) {
          out.push_back({"beta>=eta", i, j, set,
                         "beta " + to_string(b[i]) + " < eta " + to_string(cert.eta[i][j]) + " on " + set_string(set)});
        }
      }
    }
    if (total > cert.lambda) {
      out.push_back({"lambda", 0, std::nullopt, set, "sum of beta " + to_string(total) + " > lambda"});
    }
  }
  return out;
}

DualReport check_dual_sqrt_n(const Instance& inst, const DualCertificate& cert, SolveMode mode) {
  if (cert.variant != DualVariant::CcsSqrtN) throw std::invalid_argument("expected a sqrt(n) certificate");
  const BinaryProfile profile = to_profile(inst);
  DualReport r;
  r.variant = cert.variant;
  r.violations = check_dual_constraints(profile, cert);
  r.lambda = cert.lambda;
  const std::size_t n = profile.n;
  r.bound = 2.0 * std::sqrt(static_cast<double>(n)) + 1.0;
  r.lambda_within_bound = leq_two_sqrt_plus(cert.lambda, whole(n), 1);
  const ShareVector efs = all_shares(inst, ShareKind::Efs, std::nullopt, mode);
  const Rational c = std::accumulate(efs.values.begin(), efs.values.end(), Rational(0));
  r.ratio_lhs = c / welfare(inst);
  r.ratio_rhs = cert.lambda;
  r.weak_duality_holds = r.ratio_lhs <= r.ratio_rhs;
  return r;
}

DualReport build_and_check_dual_efs_delta(const Instance& inst, const std::vector<std::vector<std::size_t>>& z_sets,
                                          SolveMode mode) {
  const BinaryProfile profile = to_profile(inst);
  const DualCertificate cert = build_dual_efs_delta(profile, z_sets);
  DualReport r;
  r.variant = cert.variant;
  r.violations = check_dual_constraints(profile, cert);
  r.lambda = cert.lambda;
  const std::size_t n = profile.n, z = cert.z;
  r.bound = 2.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(z));
  r.lambda_within_bound = leq_two_sqrt_plus(cert.lambda, frac(static_cast<long>(n), static_cast<long>(z)), 0);
  RationalVector shares(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> hidden;
    for (std::size_t j : cert.z_sets[i]) {
      if (j != i) hidden.push_back(j);
    }
    shares[i] = efs_delta_fixed(inst, i, hidden, mode);
  });
  r.ratio_lhs = std::accumulate(shares.begin(), shares.end(), Rational(0)) / welfare(inst);
  r.ratio_rhs = cert.lambda;
  r.weak_duality_holds = r.ratio_lhs <= r.ratio_rhs;
  return r;
}

PlaneReport check_plane_lower_bound(std::uint64_t q, SolveMode mode) {
  if (!is_prime(q)) throw std::invalid_argument("q = " + std::to_string(q) + " is not prime");
  const Instance inst = gen_projective_plane(q);
  const BinaryProfile profile = to_profile(inst);
  PlaneReport r;
  r.q = q;
  r.n = inst.num_agents();
  r.m = inst.num_items();
  r.expected_objective = frac(static_cast<long>(r.n * (q + 1)), static_cast<long>(r.m));

  // x_{iS} = 1 on the point sets S = L_k (size q+1) containing i.
  const std::size_t n = r.n;
  auto chosen = [&](const std::vector<std::size_t>& s) { return s.size() == q + 1; };
  r.objective = 0;
  RationalVector owned(n, 0);
  for (const auto& [s, v] : profile.weights) {
    for (std::size_t i : s) {
      owned[i] += v;
      if (chosen(s)) r.objective += v;
    }
  }
  r.constraint_value = frac(1, static_cast<long>(r.m));
  r.constraints_tight = true;
  for (std::size_t i = 0; i < n && r.constraints_tight; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Rational lhs = 0;
      for (const auto& [s, v] : profile.weights) {
        if (chosen(s) && contains(s, i) && contains(s, j)) lhs += v;
      }
      const Rational rhs = owned[j] / whole(n);
      if (lhs != r.constraint_value || rhs != r.constraint_value) {
        r.constraints_tight = false;
        break;
      }
    }
  }

  const ShareVector ccs = all_shares(inst, ShareKind::Ccs, std::nullopt, mode);
  const Rational c = std::accumulate(ccs.values.begin(), ccs.values.end(), Rational(0));
  const Rational sw = welfare(inst);
  r.ccs_ratio = c / sw;
  r.ccs_ratio_ok = r.ccs_ratio >= r.expected_objective;
  r.welfare_bound = sw / c;
  r.theta = optimal_theta(inst, ccs, mode).theta;
  r.theta_ok = r.theta && *r.theta <= r.welfare_bound;
  return r;
}

}  // namespace fairshare
