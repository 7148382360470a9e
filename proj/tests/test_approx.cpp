#include <random>

#include "doctest.h"
#include "fairshare/approx.hpp"
#include "fairshare/forge.hpp"
#include "fairshare/shares.hpp"
#include "test_support.hpp"

using namespace fairshare;
using fairshare::testing::inst;

namespace {

ShareVector shares_of(ShareKind kind, RationalVector v) {
  ShareVector s;
  s.kind = kind;
  s.values = std::move(v);
  return s;
}

/// max theta over allocations, every variable explicit, by vertex enumeration.
Rational theta_oracle(const Instance& in, const RationalVector& share) {
  const std::size_t n = in.num_agents(), m = in.num_items();
  LinearProgram lp(1 + n * m);
  lp.objective[0] = 1;
  for (std::size_t v = 1; v < lp.num_vars; ++v) lp.upper[v] = Rational(1);
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(share[i]) == 0) continue;
    std::vector<LinearTerm> t{{0, share[i]}};
    for (std::size_t k = 0; k < m; ++k) t.push_back({1 + i * m + k, -in.value(i, k)});
    lp.add_constraint(std::move(t), 0);
  }
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<LinearTerm> t;
    for (std::size_t i = 0; i < n; ++i) t.push_back({1 + i * m + k, 1});
    lp.add_constraint(std::move(t), 1);
  }
  return *testing::vertex_enumeration_optimum(lp);
}

}  // namespace

TEST_CASE("theta matches a vertex-enumeration oracle") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 20; ++t) {
    Instance in = testing::random_instance(rng, 2, 1 + rng() % 2);
    RationalVector share(2);
    for (auto& s : share) s = frac(static_cast<long>(rng() % 10), 1 + static_cast<long>(rng() % 3));
    if (sgn(share[0]) == 0 && sgn(share[1]) == 0) share[0] = 1;
    ApproxResult r = optimal_theta(in, shares_of(ShareKind::Prop, share));
    REQUIRE(r.theta);
    CHECK(*r.theta == theta_oracle(in, share));
  }
}

TEST_CASE("witness allocation is feasible and meets every share") {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 15; ++t) {
    const std::size_t n = 2 + rng() % 4, m = 1 + rng() % 6;
    Instance in = testing::random_instance(rng, n, m);
    for (ShareKind k : {ShareKind::Prop, ShareKind::Ccs, ShareKind::Efs}) {
      ApproxResult r = optimal_theta(in, all_shares(in, k));
      REQUIRE(r.theta);
      CHECK(is_feasible_allocation(in, r.allocation));
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(utility(in, i, r.allocation.bundles[i]) >= *r.theta * r.shares.values[i]);
        if (sgn(r.shares.values[i]) > 0) {
          REQUIRE(r.per_agent_ratio[i]);
          CHECK(*r.per_agent_ratio[i] >= *r.theta);
        }
      }
    }
  }
}

TEST_CASE("PROP is always met: theta(PROP) >= 1") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    Instance in = gen_uniform_partition(2 + rng() % 5, 1 + rng() % 8, 30, rng());
    ApproxResult r = optimal_theta(in, all_shares(in, ShareKind::Prop));
    REQUIRE(r.theta);
    CHECK(*r.theta >= 1);
  }
}

TEST_CASE("disjoint instance: theta(CCS) = 1") {
  for (std::size_t n : {1u, 3u, 6u}) {
    Instance d = gen_disjoint(n);
    ApproxResult r = optimal_theta(d, all_shares(d, ShareKind::Ccs));
    REQUIRE(r.theta);
    CHECK(*r.theta == 1);
  }
}

TEST_CASE("Fano plane: theta(CCS) <= 11/21") {
  Instance f = gen_projective_plane(2);
  ApproxResult r = optimal_theta(f, all_shares(f, ShareKind::Ccs));
  REQUIRE(r.theta);
  CHECK(*r.theta <= frac(11, 21));
}

TEST_CASE("zero shares: dropped, or unconstrained when all zero") {
  Instance in = inst({{1, 0}, {0, 1}});
  ApproxResult r = optimal_theta(in, shares_of(ShareKind::Prop, {0, 0}));
  CHECK_FALSE(r.theta);
  CHECK(is_feasible_allocation(in, r.allocation));
  CHECK_FALSE(r.per_agent_ratio[0]);

  r = optimal_theta(in, shares_of(ShareKind::Prop, {0, frac(1, 2)}));
  REQUIRE(r.theta);
  CHECK(*r.theta == 2);
  CHECK_FALSE(r.per_agent_ratio[0]);
}

TEST_CASE("theta rejects malformed share vectors") {
  Instance in = inst({{1, 0}, {0, 1}});
  CHECK_THROWS_AS(optimal_theta(in, shares_of(ShareKind::Prop, {1})), std::invalid_argument);
  CHECK_THROWS_AS(optimal_theta(in, shares_of(ShareKind::Prop, {1, -1})), std::invalid_argument);
}

TEST_CASE("theta scales inversely with the shares") {
  std::mt19937_64 rng(24);
  Instance in = testing::random_instance(rng, 3, 4);
  ShareVector s = all_shares(in, ShareKind::Ccs);
  ShareVector s2 = s;
  for (auto& v : s2.values) v *= 3;
  CHECK(*optimal_theta(in, s2).theta * 3 == *optimal_theta(in, s).theta);
}

TEST_CASE("welfare and share/welfare ratio") {
  Instance in = inst({{1, 2, 0}, {3, 1, 0}});
  CHECK(welfare(in) == 5);
  Instance d = gen_disjoint(4);
  CHECK(share_welfare_ratio(d, ShareKind::Ccs) == 1);
  CHECK_THROWS_AS(share_welfare_ratio(d, ShareKind::Prop), std::invalid_argument);
  CHECK_THROWS_AS(share_welfare_ratio(inst({{0}, {0}}), ShareKind::Ccs), std::invalid_argument);
}
