#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairshare/instance.hpp"

namespace fairshare {

/// Each row is a uniformly random composition of `total` into m
/// nonnegative integers (stars and bars).
Instance gen_uniform_partition(std::size_t n, std::size_t m, std::uint64_t total, std::uint64_t seed);

/// iid Bernoulli(p) binary values. Throws for p outside [0,1].
Instance gen_bernoulli(std::size_t n, std::size_t m, double p, std::uint64_t seed);

/// v_ik = alpha_k + beta_ik with alpha_k ~ U(0, alpha_max), beta_ik ~ U(0, beta_max),
/// summed in double precision and converted exactly.
Instance gen_intrinsic(std::size_t n, std::size_t m, std::uint64_t seed, double alpha_max = 1.0,
                       double beta_max = 0.3);

/// n x n identity valuations.
Instance gen_disjoint(std::size_t n);

bool is_prime(std::uint64_t q);

struct ProjectivePlane {
  std::uint64_t q = 0;
  /// Normalized homogeneous coordinates over GF(q); first nonzero entry is 1.
  std::vector<std::array<std::uint64_t, 3>> points;
  std::vector<std::array<std::uint64_t, 3>> lines;
  /// incidence[l][p]
  std::vector<std::vector<bool>> incidence;
};

/// PG(2, q) for prime q. Throws std::invalid_argument otherwise.
ProjectivePlane projective_plane(std::uint64_t q);

/// Lines are agents. Items are the n - q - 1 items of U, valued 1 by every
/// agent, followed by the n points, valued 1 by the lines through them.
/// Validates the incidence structure and throws std::logic_error if it is
/// broken.
Instance gen_projective_plane(std::uint64_t q);

struct EfsDeltaLbInstance {
  Instance instance;
  std::size_t z = 0;    ///< 1 + floor((n-1)/delta)
  std::size_t ell = 0;  ///< subset size
  /// Sorted agent set of every item.
  std::vector<std::vector<std::size_t>> item_sets;
};

/// One item per ell-subset of agents with ell = round(sqrt(n Z)/2) clamped
/// to [1, n-1]. Throws std::invalid_argument for n < 2, delta < 1 or more
/// than `item_budget` items.
EfsDeltaLbInstance gen_efs_delta_lb(std::size_t n, const Rational& delta, std::size_t item_budget = 200000);

/// The explicit allocation witnessing EFS^Delta_i >= C(n-1, ell-1)/Z for
/// the given hidden set: items containing `agent` go 1/Z to the agent and
/// each hidden agent, other items 1/ell to each visible member.
Allocation efs_delta_lb_allocation(const EfsDeltaLbInstance& lb, std::size_t agent,
                                   std::span<const std::size_t> hidden);

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t row, std::size_t column, const std::string& what);
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_, column_;
};

/// Header row `item_1,...,item_m` then one row per agent. Cells may be
/// integers, decimals or fractions. Rows and columns in errors are 1-based
/// and count the header line.
Instance read_csv(std::istream& in);
Instance load_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const Instance& inst);
void save_csv(const std::filesystem::path& path, const Instance& inst);

}  // namespace fairshare
