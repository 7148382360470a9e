#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fairshare/lp.hpp"
#include "test_support.hpp"

using namespace fairshare;

namespace {

LinearProgram one_var(Rational rhs, std::optional<Rational> upper) {
  LinearProgram lp(1);
  lp.objective[0] = 1;
  lp.add_constraint({{0, 1}}, rhs);
  lp.upper[0] = upper;
  return lp;
}

LinearProgram random_lp(std::mt19937_64& rng, std::size_t nv, std::size_t nc) {
  std::uniform_int_distribution<int> coef(-5, 5), rhs(-3, 10), box(1, 4);
  LinearProgram lp(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    lp.objective[j] = frac(coef(rng), box(rng));
    lp.lower[j] = frac(-box(rng), 2);
    lp.upper[j] = Rational(box(rng));
  }
  for (std::size_t i = 0; i < nc; ++i) {
    std::vector<LinearTerm> terms;
    for (std::size_t j = 0; j < nv; ++j) {
      int c = coef(rng);
      if (c != 0) terms.push_back({j, frac(c, box(rng))});
    }
    lp.add_constraint(std::move(terms), frac(rhs(rng), box(rng)));
  }
  return lp;
}

}  // namespace

TEST_CASE("solve: single variable examples") {
  auto s = solve(one_var(1, Rational(1)));
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective_value == 1);
  CHECK(s.exact);

  CHECK(solve(one_var(-1, std::nullopt)).status == LpStatus::Infeasible);
  CHECK(solve(one_var(-1, std::nullopt), SolveMode::floating()).status == LpStatus::Infeasible);
}

TEST_CASE("solve: two-variable polytope matches vertex enumeration") {
  LinearProgram lp(2);
  lp.objective = {1, 1};
  lp.add_constraint({{0, 1}, {1, 1}}, frac(3, 2));
  lp.upper = {Rational(1), Rational(1)};
  auto oracle = testing::vertex_enumeration_optimum(lp);
  REQUIRE(oracle);
  CHECK(*oracle == frac(3, 2));
  auto s = solve(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective_value == frac(3, 2));
}

TEST_CASE("solve: unbounded and contradictory bounds") {
  LinearProgram lp(1);
  lp.objective[0] = 1;
  CHECK(solve(lp).status == LpStatus::Unbounded);
  CHECK(solve(lp, SolveMode::floating()).status == LpStatus::Unbounded);

  LinearProgram bad(1);
  bad.lower[0] = 2;
  bad.upper[0] = 1;
  CHECK(solve(bad).status == LpStatus::Infeasible);
}

TEST_CASE("solve: free, shifted and upper-only variables") {
  // max x - y, x free, y <= 3 with no lower bound, x + y <= 1, x - y <= 4... -> x - y <= 4
  LinearProgram lp(2);
  lp.objective = {1, -1};
  lp.lower = {std::nullopt, std::nullopt};
  lp.upper = {std::nullopt, Rational(3)};
  lp.add_constraint({{0, 1}, {1, 1}}, 1);
  lp.add_constraint({{0, 1}, {1, -1}}, 4);
  lp.add_constraint({{0, -1}}, 10);
  auto s = solve(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective_value == 4);
  auto rep = check_certificate(lp, s.point, s.dual);
  CHECK(rep.valid);
  CHECK(rep.primal_value == rep.dual_value);

  // shifted lower bound: max -x with x >= 5/2
  LinearProgram sh(1);
  sh.objective[0] = -1;
  sh.lower[0] = frac(5, 2);
  auto t = solve(sh);
  REQUIRE(t.status == LpStatus::Optimal);
  CHECK(t.point[0] == frac(5, 2));
  auto rep2 = check_certificate(sh, t.point, t.dual);
  CHECK(rep2.valid);
  CHECK(rep2.dual_value == frac(-5, 2));
}

TEST_CASE("check_certificate") {
  LinearProgram lp(1);
  lp.objective[0] = 1;
  lp.add_constraint({{0, 1}}, 1);
  RationalVector one{1};
  auto rep = check_certificate(lp, one, one);
  CHECK(rep.valid);
  CHECK(rep.primal_value == 1);
  CHECK(rep.dual_value == 1);

  RationalVector two{2};
  CHECK_FALSE(check_certificate(lp, two, one).valid);
  CHECK_FALSE(check_certificate(lp, two, one).primal_feasible);

  RationalVector half{frac(1, 2)};
  auto weak = check_certificate(lp, one, half);
  CHECK_FALSE(weak.valid);
  CHECK_FALSE(weak.dual_feasible);

  CHECK_THROWS_AS(check_certificate(lp, RationalVector{}, one), std::invalid_argument);
  CHECK_THROWS_AS(check_certificate(lp, one, RationalVector{1, 1}), std::invalid_argument);
}

TEST_CASE("malformed LP is rejected") {
  LinearProgram lp(1);
  lp.add_constraint({{3, 1}}, 1);
  CHECK_THROWS_AS(solve(lp), std::invalid_argument);
  LinearProgram short_obj(2);
  short_obj.objective.pop_back();
  CHECK_THROWS_AS(solve(short_obj), std::invalid_argument);
}

TEST_CASE("property: exact simplex agrees with vertex enumeration and proves optimality") {
  std::mt19937_64 rng(20240611);
  int feasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t nv = 1 + trial % 3;
    const std::size_t nc = 1 + (trial / 3) % 4;
    LinearProgram lp = random_lp(rng, nv, nc);
    auto oracle = testing::vertex_enumeration_optimum(lp);
    auto s = solve(lp);
    if (!oracle) {
      CHECK(s.status == LpStatus::Infeasible);
      continue;
    }
    ++feasible;
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective_value == *oracle);
    auto rep = check_certificate(lp, s.point, s.dual);
    CHECK_MESSAGE(rep.valid, rep.message);
    CHECK(rep.dual_value == rep.primal_value);

    auto f = solve(lp, SolveMode::floating());
    REQUIRE(f.status == LpStatus::Optimal);
    CHECK(std::abs(to_double(f.objective_value) - oracle->get_d()) <= 1e-6 * std::max(1.0, std::abs(oracle->get_d())));
  }
  CHECK(feasible > 50);
}

TEST_CASE("property: permuting rows and columns preserves the optimum") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    LinearProgram lp = random_lp(rng, 4, 5);
    auto s = solve(lp);

    std::vector<std::size_t> perm(lp.num_vars);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    LinearProgram q(lp.num_vars);
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      q.objective[perm[j]] = lp.objective[j];
      q.lower[perm[j]] = lp.lower[j];
      q.upper[perm[j]] = lp.upper[j];
    }
    auto cons = lp.constraints;
    std::shuffle(cons.begin(), cons.end(), rng);
    for (auto& c : cons) {
      for (auto& t : c.terms) t.var = perm[t.var];
      q.add_constraint(c.terms, c.rhs);
    }
    auto t = solve(q);
    REQUIRE(s.status == t.status);
    if (s.status == LpStatus::Optimal) CHECK(s.objective_value == t.objective_value);
  }
}

TEST_CASE("write_lp emits exact fractions") {
  LinearProgram lp(2);
  lp.objective = {1, frac(3, 2)};
  lp.add_constraint({{0, 1}, {1, frac(-1, 3)}}, frac(3, 2));
  lp.upper[1] = 1;
  std::ostringstream out;
  write_lp(out, lp);
  CHECK(out.str() ==
        "maximize: 1 x0 + 3/2 x1\n"
        "c0: 1 x0 - 1/3 x1 <= 3/2\n"
        "bound: 0 <= x0 <= +inf\n"
        "bound: 0 <= x1 <= 1\n");
}
