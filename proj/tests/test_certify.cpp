#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fairshare/approx.hpp"
#include "fairshare/certify.hpp"
#include "fairshare/forge.hpp"
#include "fairshare/shares.hpp"
#include "test_support.hpp"

using namespace fairshare;
using fairshare::testing::inst;

namespace {

Instance random_binary(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  for (;;) {
    Instance in = gen_bernoulli(n, m, 0.5, rng());
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) ok = ok && sgn(in.total_value(i)) > 0;
    if (ok) return in;
  }
}

bool in_set(const std::vector<std::size_t>& s, std::size_t x) { return std::find(s.begin(), s.end(), x) != s.end(); }

/// Dual feasibility written out directly from the constraint list.
bool dual_feasible(const BinaryProfile& p, const DualCertificate& c) {
  const std::size_t n = p.n;
  const Rational z = c.variant == DualVariant::EfsDelta ? Rational(static_cast<unsigned long>(c.z)) : Rational(1);
  auto hidden = [&](std::size_t i, std::size_t j) {
    return c.variant == DualVariant::EfsDelta ? in_set(c.z_sets[i], j) : i == j;
  };
  if (c.lambda < 0) return false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && c.eta[i][j] < 0) return false;
    }
  }
  for (std::size_t s = 0; s < p.support_size(); ++s) {
    const auto& set = p.weights[s].first;
    Rational sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Rational& beta = c.beta[s][i];
      if (beta < 0) return false;
      sum += beta;
      if (in_set(set, i)) {
        Rational lhs = z * beta;
        for (std::size_t j : set) {
          if (!hidden(i, j)) lhs += c.eta[i][j];
        }
        if (lhs < 1) return false;
      }
      for (std::size_t j : set) {
        if (!hidden(i, j) && beta < c.eta[i][j]) return false;
      }
    }
    if (sum > c.lambda) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("binary profile") {
  Instance in = inst({{1, 1, 0, 0}, {1, 0, 1, 0}});
  BinaryProfile p = to_profile(in);
  CHECK(p.n == 2);
  CHECK(p.dropped_items == 1);
  REQUIRE(p.support_size() == 3);
  Rational total = 0;
  for (const auto& [set, w] : p.weights) total += w;
  CHECK(total == 1);
  CHECK(p.weights[0].first == std::vector<std::size_t>{0});
  CHECK(p.weights[1].first == std::vector<std::size_t>{0, 1});
  CHECK(p.weights[1].second == frac(1, 3));
  CHECK_THROWS_AS(to_profile(inst({{2, 1}})), std::invalid_argument);
  CHECK_THROWS_AS(to_profile(inst({{0, 0}})), std::invalid_argument);
}

TEST_CASE("inverse square root") {
  CHECK(inverse_sqrt(4) == frac(1, 2));
  CHECK(inverse_sqrt(49) == frac(1, 7));
  CHECK(std::abs(inverse_sqrt(7).get_d() - 1 / std::sqrt(7.0)) < 1e-16);
}

TEST_CASE("exact comparison x <= 2 sqrt(y) + c") {
  CHECK(leq_two_sqrt_plus(5, 4, 1));
  CHECK_FALSE(leq_two_sqrt_plus(5 + frac(1, 1000000000), 4, 1));
  CHECK(leq_two_sqrt_plus(0, 0, 0));
  CHECK(leq_two_sqrt_plus(-3, 0, 0));
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(0, 20);
  for (int t = 0; t < 2000; ++t) {
    const double x = u(rng), y = u(rng), c = u(rng) - 10;
    const double gap = x - (2 * std::sqrt(y) + c);
    if (std::abs(gap) < 1e-9) continue;
    CHECK(leq_two_sqrt_plus(from_double(x), from_double(y), from_double(c)) == (gap <= 0));
  }
}

TEST_CASE("sqrt(n) dual: lambda closed form and bound") {
  for (std::size_t n : {1u, 2u, 4u, 9u, 25u, 100u}) {
    const Rational g = inverse_sqrt(n);
    Rational best = 0;
    for (std::size_t s = 1; s <= n; ++s) {
      Rational v = Rational(static_cast<unsigned long>(n)) * g;
      Rational rest = 1 - Rational(static_cast<unsigned long>(s - 1)) * g;
      if (rest > 0) v += Rational(static_cast<unsigned long>(s)) * rest;
      best = std::max(best, v);
    }
    CHECK(sqrt_n_lambda(n, g) == best);
    CHECK(leq_two_sqrt_plus(best, Rational(static_cast<unsigned long>(n)), 1));
  }
}

TEST_CASE("sqrt(n) dual passes on random binary instances") {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = 1 + rng() % 7, m = 1 + rng() % 10;
    Instance in = random_binary(rng, n, m);
    BinaryProfile p = to_profile(in);
    DualCertificate cert = build_dual_sqrt_n(p);
    CHECK(dual_feasible(p, cert));
    DualReport r = check_dual_sqrt_n(in, cert);
    CHECK(r.violations.empty());
    CHECK(r.lambda_within_bound);
    CHECK(r.lambda.get_d() <= 2 * std::sqrt(static_cast<double>(n)) + 1 + 1e-12);
    // weak duality, recomputed here
    ShareVector efs = all_shares(in, ShareKind::Efs);
    const Rational sum = std::accumulate(efs.values.begin(), efs.values.end(), Rational(0));
    CHECK(sum <= cert.lambda * welfare(in));
    CHECK(r.passed());
  }
}

TEST_CASE("dual checker agrees with the direct constraint list under perturbation") {
  std::mt19937_64 rng(53);
  int detected = 0;
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + rng() % 5, m = 2 + rng() % 8;
    Instance in = random_binary(rng, n, m);
    BinaryProfile p = to_profile(in);
    DualCertificate cert = t % 2 ? build_dual_sqrt_n(p) : build_dual_efs_delta(p, cyclic_z_sets(n, 1 + rng() % n));
    switch (rng() % 4) {
      case 0: {
        auto& b = cert.beta[rng() % cert.beta.size()];
        b[rng() % n] /= 4;
        break;
      }
      case 1: {
        const std::size_t i = rng() % n, j = (i + 1) % n;
        cert.eta[i][j] = -cert.eta[i][j] - 1;
        break;
      }
      case 2:
        cert.lambda = cert.lambda * frac(9, 10);
        break;
      default: {
        const std::size_t i = rng() % n, j = (i + 1) % n;
        cert.eta[i][j] *= 50;
        break;
      }
    }
    const bool ok = dual_feasible(p, cert);
    const bool checker_ok = check_dual_constraints(p, cert).empty();
    CHECK(ok == checker_ok);
    detected += !checker_ok;
  }
  CHECK(detected >= 30);
}

TEST_CASE("specific negative controls are reported by constraint name") {
  Instance in = inst({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}});
  BinaryProfile p = to_profile(in);
  DualCertificate c = build_dual_sqrt_n(p);
  REQUIRE(check_dual_constraints(p, c).empty());

  DualCertificate low = c;
  low.lambda = 0;
  CHECK(check_dual_constraints(p, low).front().constraint == "lambda");
  DualCertificate neg = c;
  neg.eta[0][1] = -1;
  CHECK(check_dual_constraints(p, neg).front().constraint == "nonnegativity");
  DualCertificate thin = c;
  for (auto& row : thin.beta) std::fill(row.begin(), row.end(), Rational(0));
  bool cover = false;
  for (const auto& v : check_dual_constraints(p, thin)) cover = cover || v.constraint == "cover";
  CHECK(cover);
  DualCertificate wrong = c;
  wrong.beta.pop_back();
  CHECK_THROWS_AS(check_dual_constraints(p, wrong), std::invalid_argument);
}

TEST_CASE("EFS^Delta dual passes with bound 2 sqrt(n/Z)") {
  std::mt19937_64 rng(54);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng() % 6, m = 1 + rng() % 8;
    Instance in = random_binary(rng, n, m);
    for (std::size_t z = 1; z <= n; ++z) {
      auto zs = cyclic_z_sets(n, z);
      BinaryProfile p = to_profile(in);
      DualCertificate cert = build_dual_efs_delta(p, zs);
      CHECK(dual_feasible(p, cert));
      DualReport r = build_and_check_dual_efs_delta(in, zs);
      CHECK(r.passed());
      CHECK(r.lambda.get_d() <= 2 * std::sqrt(static_cast<double>(n) / static_cast<double>(z)) + 1e-12);
    }
  }
  CHECK_THROWS_AS(build_dual_efs_delta(to_profile(inst({{1}, {1}})), {{1}, {1}}), std::invalid_argument);
}

TEST_CASE("cyclic Z sets") {
  auto z = cyclic_z_sets(5, 3);
  REQUIRE(z.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(z[i].size() == 3);
    CHECK(in_set(z[i], i));
    CHECK(in_set(z[i], (i + 2) % 5));
  }
}

TEST_CASE("projective plane lower bound for q = 2 and 3") {
  PlaneReport r2 = check_plane_lower_bound(2);
  CHECK(r2.passed());
  CHECK(r2.n == 7);
  CHECK(r2.m == 11);
  CHECK(r2.objective == frac(21, 11));
  CHECK(r2.ccs_ratio >= frac(21, 11));
  REQUIRE(r2.theta);
  CHECK(*r2.theta <= frac(11, 21));

  PlaneReport r3 = check_plane_lower_bound(3);
  CHECK(r3.passed());
  CHECK(r3.m == 22);
  CHECK(r3.objective == frac(13 * 4, 22));
  CHECK(r3.ccs_ratio >= frac(26, 11));
  REQUIRE(r3.theta);
  CHECK(*r3.theta <= frac(11, 26));
  CHECK_THROWS_AS(check_plane_lower_bound(4), std::invalid_argument);
}

TEST_CASE("theta(EFS) (2 sqrt(n) + 1) >= 1 on random instances") {
  std::mt19937_64 rng(55);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = 2 + rng() % 6, m = 1 + rng() % 8;
    Instance in = t % 2 ? random_binary(rng, n, m) : testing::random_instance(rng, n, m);
    ApproxResult r = optimal_theta(in, all_shares(in, ShareKind::Efs));
    REQUIRE(r.theta);
    CHECK(leq_two_sqrt_plus(1 / *r.theta, Rational(static_cast<unsigned long>(n)), 1));
  }
}
