#include "fairshare/instance.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

namespace fairshare {

Instance::Instance(std::vector<RationalVector> values) : values_(std::move(values)) {
  if (values_.empty() || values_.front().empty()) {
    throw std::invalid_argument("instance needs at least one agent and one item");
  }
  const std::size_t m = values_.front().size();
  totals_.reserve(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i].size() != m) {
      throw std::invalid_argument("valuation row " + std::to_string(i) + " has " +
                                  std::to_string(values_[i].size()) + " entries, expected " +
                                  std::to_string(m));
    }
    Rational total;
    for (std::size_t k = 0; k < m; ++k) {
      if (values_[i][k] < 0) {
        throw std::invalid_argument("negative value at agent " + std::to_string(i) + ", item " +
                                    std::to_string(k));
      }
      total += values_[i][k];
    }
    totals_.push_back(std::move(total));
  }
  values_d_.reserve(values_.size() * m);
  for (const auto& r : values_) {
    for (const auto& v : r) values_d_.push_back(v.get_d());
  }
}

bool Instance::is_binary() const {
  for (const auto& r : values_) {
    for (const auto& v : r) {
      if (v != 0 && v != 1) return false;
    }
  }
  return true;
}

std::string_view to_string(ShareKind kind) {
  switch (kind) {
    case ShareKind::Prop: return "PROP";
    case ShareKind::Ccs: return "CCS";
    case ShareKind::Ef: return "EF";
    case ShareKind::Efs: return "EFS";
    case ShareKind::EfsDelta: return "EFS_DELTA";
  }
  return "?";
}

ShareKind parse_share_kind(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (s == "PROP") return ShareKind::Prop;
  if (s == "CCS") return ShareKind::Ccs;
  if (s == "EF") return ShareKind::Ef;
  if (s == "EFS") return ShareKind::Efs;
  if (s == "EFS_DELTA" || s == "EFSDELTA") return ShareKind::EfsDelta;
  throw std::invalid_argument("unknown share kind '" + std::string(text) + "'");
}

Rational utility(const Instance& inst, std::size_t agent, const Bundle& bundle) {
  if (agent >= inst.num_agents()) throw std::out_of_range("agent index out of range");
  if (bundle.size() != inst.num_items()) throw std::invalid_argument("bundle length differs from item count");
  Rational u;
  for (std::size_t k = 0; k < bundle.size(); ++k) {
    if (sgn(bundle[k]) != 0) u += inst.value(agent, k) * bundle[k];
  }
  return u;
}

Instance scale_agents(const Instance& inst, std::span<const Rational> factors) {
  if (factors.size() != inst.num_agents()) throw std::invalid_argument("one factor per agent required");
  std::vector<RationalVector> v = inst.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (factors[i] <= 0) throw std::invalid_argument("scale factors must be positive");
    for (auto& x : v[i]) x *= factors[i];
  }
  return Instance(std::move(v));
}

Instance ceil_scale(const Instance& inst, const Rational& epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  std::vector<RationalVector> v = inst.values();
  for (auto& r : v) {
    for (auto& x : r) x = Rational(ceil(x / epsilon));
  }
  return Instance(std::move(v));
}

BinarizedInstance binarize(const Instance& inst, const Rational& epsilon) {
  Instance ceiled = ceil_scale(inst, epsilon);
  const std::size_t n = inst.num_agents(), m = inst.num_items();

  std::vector<std::size_t> source;
  std::vector<RationalVector> rows(n);
  for (std::size_t k = 0; k < m; ++k) {
    mpz_class copies = 0;
    for (std::size_t i = 0; i < n; ++i) copies = std::max(copies, ceiled.value(i, k).get_num());
    if (!copies.fits_ulong_p() || copies > 10'000'000) {
      throw std::invalid_argument("binarize: item " + std::to_string(k) + " needs too many copies; increase epsilon");
    }
    const unsigned long q = copies.get_ui();
    for (unsigned long w = 0; w < q; ++w) {
      source.push_back(k);
      for (std::size_t i = 0; i < n; ++i) {
        rows[i].emplace_back(w < ceiled.value(i, k).get_num() ? 1 : 0);
      }
    }
  }
  if (source.empty()) throw std::invalid_argument("binarize: no item is valued by any agent");
  return BinarizedInstance{Instance(std::move(rows)), std::move(source)};
}

bool is_feasible_allocation(const Instance& inst, const Allocation& alloc) {
  const std::size_t n = inst.num_agents(), m = inst.num_items();
  if (alloc.num_agents() != n) throw std::invalid_argument("allocation has wrong number of bundles");
  for (const auto& b : alloc.bundles) {
    if (b.size() != m) throw std::invalid_argument("allocation bundle has wrong length");
  }
  for (std::size_t k = 0; k < m; ++k) {
    Rational supply;
    for (std::size_t i = 0; i < n; ++i) {
      const Rational& x = alloc.at(i, k);
      if (x < 0 || x > 1) return false;
      supply += x;
    }
    if (supply > 1) return false;
  }
  return true;
}

}  // namespace fairshare
