#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fairshare/rational.hpp"

namespace fairshare {

/// n agents, m divisible items, nonnegative additive valuations.
/// values(i, k) is agent i's value for the whole of item k.
class Instance {
 public:
  /// Throws std::invalid_argument if the matrix is empty, ragged or has a
  /// negative entry.
  explicit Instance(std::vector<RationalVector> values);

  std::size_t num_agents() const { return values_.size(); }
  std::size_t num_items() const { return values_.front().size(); }

  const Rational& value(std::size_t agent, std::size_t item) const { return values_[agent][item]; }
  /// value(agent, item) rounded to double.
  double value_d(std::size_t agent, std::size_t item) const { return values_d_[agent * num_items() + item]; }
  std::span<const Rational> row(std::size_t agent) const { return values_.at(agent); }
  const std::vector<RationalVector>& values() const { return values_; }

  /// u_i([m]).
  const Rational& total_value(std::size_t agent) const { return totals_.at(agent); }

  bool is_binary() const;

  friend bool operator==(const Instance& a, const Instance& b) { return a.values_ == b.values_; }

 private:
  std::vector<RationalVector> values_;
  RationalVector totals_;
  std::vector<double> values_d_;
};

/// Quantity x_k in [0,1] of every item.
struct Bundle {
  RationalVector quantities;

  static Bundle zeros(std::size_t m) { return Bundle{RationalVector(m)}; }
  static Bundle filled(std::size_t m, const Rational& x) { return Bundle{RationalVector(m, x)}; }
  std::size_t size() const { return quantities.size(); }
  const Rational& operator[](std::size_t k) const { return quantities[k]; }
  Rational& operator[](std::size_t k) { return quantities[k]; }
};

/// One bundle per agent. Feasibility (unit supply, entries in [0,1]) is not
/// enforced by construction; use is_feasible_allocation.
struct Allocation {
  std::vector<Bundle> bundles;

  static Allocation zeros(std::size_t n, std::size_t m) {
    return Allocation{std::vector<Bundle>(n, Bundle::zeros(m))};
  }
  static Allocation proportional(std::size_t n, std::size_t m) {
    return Allocation{std::vector<Bundle>(n, Bundle::filled(m, frac(1, static_cast<long>(n))))};
  }
  std::size_t num_agents() const { return bundles.size(); }
  const Rational& at(std::size_t agent, std::size_t item) const { return bundles[agent][item]; }
  Rational& at(std::size_t agent, std::size_t item) { return bundles[agent][item]; }
};

enum class ShareKind { Prop, Ccs, Ef, Efs, EfsDelta };

std::string_view to_string(ShareKind kind);
/// Accepts "PROP", "prop", "efs-delta", "EFS_DELTA", ...
ShareKind parse_share_kind(std::string_view text);

struct ShareVector {
  ShareKind kind = ShareKind::Prop;
  RationalVector values;
  std::optional<Rational> delta;            // EfsDelta only
  std::vector<double> standard_errors;      // EfsDelta only; empty otherwise
};

/// u_i(B) = sum_k v_ik * B(k).
Rational utility(const Instance& inst, std::size_t agent, const Bundle& bundle);

/// v'_ik = factors[i] * v_ik. Factors must be strictly positive.
Instance scale_agents(const Instance& inst, std::span<const Rational> factors);

struct BinarizedInstance {
  Instance instance;
  /// source item of every item of the binary instance
  std::vector<std::size_t> item_source;
};

/// Rounds every value up to a multiple of `epsilon` (v' = ceil(v / epsilon))
/// and replaces item k with q_k = max_i v'_ik unit copies; agent i values the
/// first v'_ik copies. Items nobody values produce no copies.
/// Throws std::invalid_argument for epsilon <= 0 or an all-zero instance.
BinarizedInstance binarize(const Instance& inst, const Rational& epsilon);

/// The ceiled integer instance v' = ceil(v / epsilon) that binarize expands.
Instance ceil_scale(const Instance& inst, const Rational& epsilon);

/// True iff every entry lies in [0,1] and every item's supply is at most 1.
/// Throws std::invalid_argument on dimension mismatch.
bool is_feasible_allocation(const Instance& inst, const Allocation& alloc);

}  // namespace fairshare
