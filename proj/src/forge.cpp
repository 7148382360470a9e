#include "fairshare/forge.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace fairshare {

Instance gen_uniform_partition(std::size_t n, std::size_t m, std::uint64_t total, std::uint64_t seed) {
  if (n == 0 || m == 0) throw std::invalid_argument("uniform partition: n and m must be positive");
  std::mt19937_64 rng(seed);
  std::vector<RationalVector> rows(n, RationalVector(m));
  // m-1 distinct bars among total+m-1 slots; the gaps are the parts.
  const std::uint64_t slots = total + m - 1;
  for (auto& row : rows) {
    std::set<std::uint64_t> bars;
    // Floyd's sampling of m-1 distinct values from [1, slots]
    for (std::uint64_t j = slots - (m - 1) + 1; j <= slots; ++j) {
      std::uint64_t t = std::uniform_int_distribution<std::uint64_t>(1, j)(rng);
      if (!bars.insert(t).second) bars.insert(j);
    }
    std::uint64_t prev = 0;
    std::size_t k = 0;
    for (std::uint64_t b : bars) {
      row[k++] = Rational(static_cast<unsigned long>(b - prev - 1));
      prev = b;
    }
    row[k] = Rational(static_cast<unsigned long>(slots - prev));
  }
  return Instance(std::move(rows));
}

Instance gen_bernoulli(std::size_t n, std::size_t m, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p must lie in [0,1]");
  if (n == 0 || m == 0) throw std::invalid_argument("bernoulli: n and m must be positive");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<RationalVector> rows(n, RationalVector(m));
  for (auto& row : rows) {
    for (auto& v : row) v = coin(rng) ? 1 : 0;
  }
  return Instance(std::move(rows));
}

Instance gen_intrinsic(std::size_t n, std::size_t m, std::uint64_t seed, double alpha_max, double beta_max) {
  if (n == 0 || m == 0) throw std::invalid_argument("intrinsic: n and m must be positive");
  if (!(alpha_max > 0) || !(beta_max >= 0)) throw std::invalid_argument("intrinsic: bad ranges");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha(0.0, alpha_max), beta(0.0, beta_max);
  std::vector<double> a(m);
  for (auto& x : a) x = alpha(rng);
  std::vector<RationalVector> rows(n, RationalVector(m));
  for (auto& row : rows) {
    for (std::size_t k = 0; k < m; ++k) row[k] = from_double(a[k] + (beta_max > 0 ? beta(rng) : 0.0));
  }
  return Instance(std::move(rows));
}

Instance gen_disjoint(std::size_t n) {
  if (n == 0) throw std::invalid_argument("disjoint: n must be positive");
  std::vector<RationalVector> rows(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1;
  return Instance(std::move(rows));
}

bool is_prime(std::uint64_t q) {
  if (q < 2) return false;
  for (std::uint64_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) return false;
  }
  return true;
}

ProjectivePlane projective_plane(std::uint64_t q) {
  if (!is_prime(q)) throw std::invalid_argument("projective plane order " + std::to_string(q) + " is not prime");
  if (q > 1000) throw std::invalid_argument("projective plane order too large");
  ProjectivePlane pg;
  pg.q = q;
  for (std::uint64_t y = 0; y < q; ++y) {
    for (std::uint64_t z = 0; z < q; ++z) pg.points.push_back({1, y, z});
  }
  for (std::uint64_t z = 0; z < q; ++z) pg.points.push_back({0, 1, z});
  pg.points.push_back({0, 0, 1});
  pg.lines = pg.points;
  const std::size_t n = pg.points.size();
  pg.incidence.assign(n, std::vector<bool>(n, false));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t p = 0; p < n; ++p) {
      const auto& a = pg.lines[l];
      const auto& b = pg.points[p];
      pg.incidence[l][p] = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) % q == 0;
    }
  }
  return pg;
}

Instance gen_projective_plane(std::uint64_t q) {
  ProjectivePlane pg = projective_plane(q);
  const std::size_t n = pg.points.size();
  const std::size_t u = n - q - 1;
  std::vector<RationalVector> rows(n, RationalVector(u + n));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < u; ++k) rows[l][k] = 1;
    for (std::size_t p = 0; p < n; ++p) rows[l][u + p] = pg.incidence[l][p] ? 1 : 0;
  }
  for (std::size_t l = 0; l < n; ++l) {
    std::size_t on_line = std::count(pg.incidence[l].begin(), pg.incidence[l].end(), true);
    if (on_line != q + 1) throw std::logic_error("projective plane: line with wrong point count");
    for (std::size_t l2 = l + 1; l2 < n; ++l2) {
      std::size_t common = 0;
      for (std::size_t p = 0; p < n; ++p) common += pg.incidence[l][p] && pg.incidence[l2][p];
      if (common != 1) throw std::logic_error("projective plane: two lines do not meet in one point");
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t through = 0;
    for (std::size_t l = 0; l < n; ++l) through += pg.incidence[l][p];
    if (through != q + 1) throw std::logic_error("projective plane: point on wrong number of lines");
  }
  return Instance(std::move(rows));
}

EfsDeltaLbInstance gen_efs_delta_lb(std::size_t n, const Rational& delta, std::size_t item_budget) {
  if (n < 2) throw std::invalid_argument("efs-delta lower bound needs n >= 2");
  if (delta < 1) throw std::invalid_argument("delta must be at least 1");
  const std::size_t z = 1 + static_cast<std::size_t>(fairshare::floor(Rational(static_cast<unsigned long>(n - 1)) / delta).get_ui());
  // round(sqrt(nZ)/2), halves rounded up: the largest r with (2r-1)^2 <= nZ
  const std::size_t nz = n * z;
  std::size_t ell = 0;
  while ((2 * ell + 1) * (2 * ell + 1) <= nz) ++ell;
  ell = std::clamp<std::size_t>(ell, 1, n - 1);
  mpz_class items = binomial(n, ell);
  if (items > static_cast<unsigned long>(item_budget)) {
    throw std::invalid_argument("efs-delta lower bound: C(" + std::to_string(n) + ", " + std::to_string(ell) +
                                ") = " + items.get_str() + " items exceeds the budget of " +
                                std::to_string(item_budget));
  }
  EfsDeltaLbInstance lb{Instance({{Rational(0)}}), z, ell, {}};
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(ell), true);
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) s.push_back(i);
    }
    lb.item_sets.push_back(std::move(s));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  std::vector<RationalVector> rows(n, RationalVector(lb.item_sets.size()));
  for (std::size_t k = 0; k < lb.item_sets.size(); ++k) {
    for (std::size_t i : lb.item_sets[k]) rows[i][k] = 1;
  }
  lb.instance = Instance(std::move(rows));
  return lb;
}

Allocation efs_delta_lb_allocation(const EfsDeltaLbInstance& lb, std::size_t agent,
                                   std::span<const std::size_t> hidden) {
  const std::size_t n = lb.instance.num_agents(), m = lb.instance.num_items();
  if (agent >= n) throw std::out_of_range("agent out of range");
  std::vector<bool> in_z(n, false);
  in_z[agent] = true;
  for (std::size_t j : hidden) {
    if (j >= n || in_z[j]) throw std::invalid_argument("bad hidden set");
    in_z[j] = true;
  }
  const Rational share_z = frac(1, static_cast<long>(hidden.size() + 1));
  const Rational share_ell = frac(1, static_cast<long>(lb.ell));
  Allocation a = Allocation::zeros(n, m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& s = lb.item_sets[k];
    if (std::binary_search(s.begin(), s.end(), agent)) {
      for (std::size_t j = 0; j < n; ++j) {
        if (in_z[j]) a.at(j, k) = share_z;
      }
    } else {
      for (std::size_t j : s) {
        if (!in_z[j]) a.at(j, k) = share_ell;
      }
    }
  }
  return a;
}

CsvError::CsvError(std::size_t row, std::size_t column, const std::string& what)
    : std::runtime_error("csv row " + std::to_string(row) + (column ? ", column " + std::to_string(column) : "") +
                         ": " + what),
      row_(row),
      column_(column) {}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Instance read_csv(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  std::size_t width = 0;
  std::vector<RationalVector> rows;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cells = split_cells(line);
    if (width == 0) {
      width = cells.size();
      continue;
    }
    if (cells.size() != width) {
      throw CsvError(row, 0, "expected " + std::to_string(width) + " cells, found " + std::to_string(cells.size()));
    }
    RationalVector values(width);
    for (std::size_t c = 0; c < width; ++c) {
      try {
        values[c] = parse_rational(cells[c]);
      } catch (const std::invalid_argument&) {
        throw CsvError(row, c + 1, "not a number: '" + cells[c] + "'");
      }
      if (values[c] < 0) throw CsvError(row, c + 1, "negative value " + cells[c]);
    }
    rows.push_back(std::move(values));
  }
  if (width == 0) throw CsvError(row, 0, "missing header");
  if (rows.empty()) throw CsvError(row, 0, "no agent rows");
  return Instance(std::move(rows));
}

Instance load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_csv(in);
}

void write_csv(std::ostream& out, const Instance& inst) {
  for (std::size_t k = 0; k < inst.num_items(); ++k) out << (k ? "," : "") << "item_" << (k + 1);
  out << '\n';
  for (std::size_t i = 0; i < inst.num_agents(); ++i) {
    for (std::size_t k = 0; k < inst.num_items(); ++k) out << (k ? "," : "") << to_string(inst.value(i, k));
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Instance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, inst);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace fairshare
