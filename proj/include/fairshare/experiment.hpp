#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fairshare/instance.hpp"
#include "fairshare/lp.hpp"

namespace fairshare {

enum class Family { UniformPartition, Bernoulli, Intrinsic };

std::string_view to_string(Family f);
/// Accepts "uniform", "uniform-partition", "bernoulli", "intrinsic".
Family parse_family(std::string_view text);

struct ExperimentConfig {
  Family model = Family::UniformPartition;
  std::size_t n = 25, m = 75, instances = 200;
  std::vector<ShareKind> kinds{ShareKind::Prop, ShareKind::Ccs, ShareKind::Efs, ShareKind::EfsDelta};
  std::vector<Rational> delta_grid{1, 2, 3, 4, 6, 25};
  std::size_t samples = 20;
  std::uint64_t seed = 1;
  std::uint64_t total = 1000;  ///< uniform partition sum
  double p = 0.5;              ///< Bernoulli parameter
  double alpha_max = 1.0, beta_max = 0.3;
  SolveMode mode = SolveMode::floating(1e-9);
  unsigned workers = 0;  ///< 0: hardware concurrency
  std::string output = "experiment.csv";
  std::string summary = "experiment_summary.json";

  /// "uniform", "bernoulli", "intrinsic" (the published sizes) and "smoke"
  /// (tiny, for tests). Throws std::invalid_argument otherwise.
  static ExperimentConfig preset(std::string_view name);
  /// Starts from the uniform preset and overrides the keys present.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Instance `index` of the configured family; deterministic in (seed, index).
Instance experiment_instance(const ExperimentConfig& cfg, std::size_t index);

struct ExperimentRow {
  std::size_t instance = 0;
  ShareKind kind = ShareKind::Prop;
  std::optional<Rational> delta;
  std::size_t hidden_size = 0;
  std::optional<double> theta;  ///< nullopt when unconstrained or failed
  double share_sum = 0.0, welfare = 0.0;
  std::string error;  ///< empty on success
};

struct SummaryEntry {
  ShareKind kind = ShareKind::Prop;
  std::optional<Rational> delta;
  std::size_t hidden_size = 0;
  std::size_t count = 0, failures = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<SummaryEntry> summary;
  double seconds = 0.0;

  bool any_failed() const;
  /// Summary entry of a kind (and delta for EFS_DELTA); nullptr if absent.
  const SummaryEntry* find(ShareKind kind, const std::optional<Rational>& delta = std::nullopt) const;
};

/// Quantile with linear interpolation between order statistics; `sorted`
/// must be ascending and nonempty.
double quantile(const std::vector<double>& sorted, double prob);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

void write_rows_csv(std::ostream& out, const ExperimentResult& r);
nlohmann::json summary_json(const ExperimentConfig& cfg, const ExperimentResult& r);
/// Series for box plots and the EFS^Delta curve, independent of any plotting tool.
nlohmann::json plot_spec_json(const ExperimentResult& r);

}  // namespace fairshare
