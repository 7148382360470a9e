#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "fairshare/approx.hpp"
#include "fairshare/forge.hpp"
#include "fairshare/shares.hpp"
#include "test_support.hpp"

using namespace fairshare;
using fairshare::testing::inst;

namespace {

bool close(const Rational& a, const Rational& b) {
  return std::abs(a.get_d() - b.get_d()) <= 1e-7 * (1 + std::abs(b.get_d()));
}

Instance with_duplicate_of_first(const Instance& in) {
  std::vector<RationalVector> rows = in.values();
  rows.insert(rows.begin() + 1, rows.front());
  return Instance(std::move(rows));
}

}  // namespace

TEST_CASE("prop share") {
  Instance a = inst({{1, 2, 3}, {0, 0, 4}});
  CHECK(prop_share(a, 0) == 3);
  CHECK(prop_share(a, 1) == 2);
}

TEST_CASE("disjoint instance: CCS is the own value, PROP is 1/n") {
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    Instance d = gen_disjoint(n);
    ShareVector ccs = all_shares(d, ShareKind::Ccs);
    ShareVector prop = all_shares(d, ShareKind::Prop);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(ccs.values[i] == 1);
      CHECK(prop.values[i] == frac(1, static_cast<long>(n)));
    }
  }
}

TEST_CASE("duplicating agent 1 halves EFS_1 and drops CCS_1 to v_11/(n+1)") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {2u, 3u, 4u}) {
    std::vector<RationalVector> rows(n, RationalVector(n));
    for (std::size_t i = 0; i < n; ++i) rows[i][i] = std::uniform_int_distribution<int>(1, 9)(rng);
    Instance d(rows);
    Instance dup = with_duplicate_of_first(d);
    CHECK(efs_share(d, 0).value == d.value(0, 0));
    CHECK(efs_share(dup, 0).value == d.value(0, 0) / 2);
    CHECK(ccs_share(dup, 0).value == d.value(0, 0) / Rational(static_cast<unsigned long>(n + 1)));
    CHECK(close(ccs_share(dup, 0, SolveMode::floating()).value, d.value(0, 0) / Rational(static_cast<unsigned long>(n + 1))));
  }
}

TEST_CASE("CCS matches a vertex-enumeration oracle") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + rng() % 3, m = 1 + rng() % 4;
    Instance in = testing::random_instance(rng, n, m);
    for (std::size_t i = 0; i < n; ++i) {
      const Rational oracle = testing::ccs_oracle(in, i);
      CHECK(ccs_share(in, i).value == oracle);
      CHECK(close(ccs_share(in, i, SolveMode::floating()).value, oracle));
    }
  }
}

TEST_CASE("CCS bundle is feasible and completes to an allocation") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng() % 4, m = 2 + rng() % 6;
    Instance in = testing::random_instance(rng, n, m);
    for (std::size_t i = 0; i < n; ++i) {
      CcsResult r = ccs_share(in, i);
      CHECK(utility(in, i, r.bundle) == r.value);
      Allocation a = ccs_complete_allocation(in, i, r.bundle);
      CHECK(is_feasible_allocation(in, a));
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        // j gets at least a 1/n share and values i's bundle at most that much
        CHECK(utility(in, j, r.bundle) <= in.total_value(j) / Rational(static_cast<unsigned long>(n)));
        CHECK(utility(in, j, a.bundles[j]) >= in.total_value(j) / Rational(static_cast<unsigned long>(n)));
      }
    }
  }
  Instance in = inst({{1, 1}, {1, 1}});
  CHECK_THROWS_AS(ccs_complete_allocation(in, 0, Bundle{{1, 1}}), std::invalid_argument);
}

TEST_CASE("EFS and EF match vertex-enumeration oracles") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 12; ++t) {
    const std::size_t n = 2 + rng() % 2, m = 1 + rng() % 2;
    Instance in = testing::random_instance(rng, n, m);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(efs_share(in, i).value == testing::efs_oracle(in, i));
      CHECK(ef_share(in, i) == testing::efs_oracle(in, i, true));
    }
  }
}

TEST_CASE("two agents: CCS, EF and EFS coincide") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 30; ++t) {
    Instance in = testing::random_instance(rng, 2, 1 + rng() % 6);
    for (std::size_t i = 0; i < 2; ++i) {
      const Rational c = ccs_share(in, i).value;
      CHECK(ef_share(in, i) == c);
      CHECK(efs_share(in, i).value == c);
    }
  }
}

TEST_CASE("EFS witness allocation is feasible and envy-free toward the agent") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 15; ++t) {
    const std::size_t n = 2 + rng() % 4, m = 2 + rng() % 5;
    Instance in = testing::random_instance(rng, n, m);
    for (std::size_t i = 0; i < n; ++i) {
      EfsResult r = efs_share(in, i);
      CHECK(is_feasible_allocation(in, r.allocation));
      CHECK(utility(in, i, r.allocation.bundles[i]) == r.value);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) CHECK(utility(in, j, r.allocation.bundles[i]) <= utility(in, j, r.allocation.bundles[j]));
      }
    }
  }
}

TEST_CASE("ordering PROP <= CCS <= EF <= EFS on every family") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + rng() % 4, m = 1 + rng() % 7;
    std::vector<Instance> family{gen_uniform_partition(n, m, 20, rng()), gen_bernoulli(n, m, 0.5, rng()),
                                 gen_intrinsic(n, m, rng()), testing::random_instance(rng, n, m)};
    for (const Instance& in : family) {
      for (std::size_t i = 0; i < n; ++i) {
        const Rational p = prop_share(in, i), c = ccs_share(in, i).value, ef = ef_share(in, i),
                       efs = efs_share(in, i).value;
        CHECK(p <= c);
        CHECK(c <= ef);
        CHECK(ef <= efs);
      }
    }
  }
}

TEST_CASE("CCS and EFS scale with the agent's factor") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> num(1, 20), den(1, 7);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng() % 3, m = 1 + rng() % 5;
    Instance in = testing::random_instance(rng, n, m);
    RationalVector f(n);
    for (auto& x : f) x = frac(num(rng), den(rng));
    Instance scaled = scale_agents(in, f);
    ShareVector c0 = all_shares(in, ShareKind::Ccs), c1 = all_shares(scaled, ShareKind::Ccs);
    ShareVector e0 = all_shares(in, ShareKind::Efs), e1 = all_shares(scaled, ShareKind::Efs);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(c1.values[i] == f[i] * c0.values[i]);
      CHECK(e1.values[i] == f[i] * e0.values[i]);
    }
  }
}

TEST_CASE("compact CCS equals the full-allocation form") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 1 + rng() % 4, m = 1 + rng() % 5;
    Instance in = testing::random_instance(rng, n, m);
    for (std::size_t i = 0; i < n; ++i) CHECK(ccs_full_share(in, i) == ccs_share(in, i).value);
  }
}

TEST_CASE("efs_delta_fixed: empty hidden set is EFS, full hidden set is PROP") {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 15; ++t) {
    const std::size_t n = 2 + rng() % 4, m = 1 + rng() % 5;
    Instance in = testing::random_instance(rng, n, m);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> all;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) all.push_back(j);
      }
      CHECK(efs_delta_fixed(in, i, {}) == efs_share(in, i).value);
      CHECK(efs_delta_fixed(in, i, all) == prop_share(in, i));
    }
  }
}

TEST_CASE("efs_delta_fixed is monotone in the hidden set and capped by u_i/(1+|W|)") {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 3 + rng() % 3, m = 1 + rng() % 5;
    Instance in = testing::random_instance(rng, n, m);
    const std::size_t i = rng() % n;
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    std::shuffle(others.begin(), others.end(), rng);
    const std::size_t big = 1 + rng() % others.size();
    const std::size_t small = rng() % (big + 1);
    std::vector<std::size_t> w(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(small));
    std::vector<std::size_t> w2(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(big));
    std::sort(w.begin(), w.end());
    std::sort(w2.begin(), w2.end());
    const Rational a = efs_delta_fixed(in, i, w), b = efs_delta_fixed(in, i, w2);
    CHECK(b <= a);
    CHECK(a <= in.total_value(i) / Rational(static_cast<unsigned long>(1 + w.size())));
    CHECK(b <= in.total_value(i) / Rational(static_cast<unsigned long>(1 + w2.size())));
  }
}

TEST_CASE("efs_delta_fixed rejects bad hidden sets") {
  Instance in = inst({{1, 2}, {2, 1}, {1, 1}});
  std::vector<std::size_t> self{0}, dup{1, 1}, out{5};
  CHECK_THROWS_AS(efs_delta_fixed(in, 0, self), std::invalid_argument);
  CHECK_THROWS_AS(efs_delta_fixed(in, 0, dup), std::invalid_argument);
  CHECK_THROWS_AS(efs_delta_fixed(in, 0, out), std::invalid_argument);
}

TEST_CASE("DeltaSpec hidden set size") {
  DeltaSpec s;
  s.delta = 1;
  CHECK(s.hidden_set_size(25) == 24);
  s.delta = 4;
  CHECK(s.hidden_set_size(25) == 6);
  s.delta = frac(5, 2);
  CHECK(s.hidden_set_size(6) == 2);
  s.delta = 25;
  CHECK(s.hidden_set_size(25) == 0);
  s.delta = frac(1, 2);
  CHECK_THROWS_AS(s.hidden_set_size(3), std::invalid_argument);
}

TEST_CASE("sample_hidden_set is a deterministic sorted subset without the agent") {
  for (std::size_t s = 0; s < 30; ++s) {
    auto w = sample_hidden_set(9, 4, 3, 77, s);
    CHECK(w == sample_hidden_set(9, 4, 3, 77, s));
    REQUIRE(w.size() == 3);
    CHECK(std::is_sorted(w.begin(), w.end()));
    CHECK(std::set<std::size_t>(w.begin(), w.end()).size() == 3);
    CHECK(std::find(w.begin(), w.end(), 4u) == w.end());
    for (std::size_t j : w) CHECK(j < 9);
  }
}

TEST_CASE("EFS^Delta: delta 1 is PROP, delta >= n is EFS, enumeration averages exactly") {
  std::mt19937_64 rng(16);
  Instance in = testing::random_instance(rng, 4, 5);
  DeltaSpec spec;
  spec.delta = 1;
  spec.samples = 3;
  ShareVector d1 = all_shares(in, ShareKind::EfsDelta, spec);
  ShareVector prop = all_shares(in, ShareKind::Prop);
  CHECK(d1.values == prop.values);
  spec.delta = 4;
  ShareVector dn = all_shares(in, ShareKind::EfsDelta, spec);
  CHECK(dn.values == all_shares(in, ShareKind::Efs).values);

  spec.delta = 3;  // hidden sets of size 1
  spec.enumerate = true;
  for (std::size_t i = 0; i < 4; ++i) {
    Rational mean = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j == i) continue;
      std::vector<std::size_t> w{j};
      mean += efs_delta_fixed(in, i, w);
    }
    CHECK(efs_delta_share(in, i, spec).estimate == mean / 3);
  }
  CHECK_THROWS_AS(all_shares(in, ShareKind::EfsDelta), std::invalid_argument);
}

TEST_CASE("EFS^Delta sampling does not depend on worker count") {
  std::mt19937_64 rng(17);
  Instance in = testing::random_instance(rng, 6, 7);
  DeltaSpec spec;
  spec.delta = 2;
  spec.samples = 4;
  spec.seed = 99;
  ShareVector a = all_shares(in, ShareKind::EfsDelta, spec, SolveMode::exact(), 1);
  ShareVector b = all_shares(in, ShareKind::EfsDelta, spec, SolveMode::exact(), 3);
  CHECK(a.values == b.values);
  CHECK(a.standard_errors == b.standard_errors);
}

TEST_CASE("float mode agrees with exact mode on the share kinds") {
  std::mt19937_64 rng(18);
  for (int t = 0; t < 10; ++t) {
    Instance in = gen_uniform_partition(5, 9, 100, rng());
    for (ShareKind k : {ShareKind::Ccs, ShareKind::Ef, ShareKind::Efs}) {
      ShareVector e = all_shares(in, k), f = all_shares(in, k, std::nullopt, SolveMode::floating());
      for (std::size_t i = 0; i < 5; ++i) CHECK(close(f.values[i], e.values[i]));
    }
  }
}
