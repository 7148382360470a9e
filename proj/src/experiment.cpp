#include "fairshare/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fairshare/approx.hpp"
#include "fairshare/forge.hpp"
#include "fairshare/parallel.hpp"
#include "fairshare/random.hpp"
#include "fairshare/shares.hpp"

namespace fairshare {

using nlohmann::json;

std::string_view to_string(Family f) {
  switch (f) {
    case Family::UniformPartition: return "uniform";
    case Family::Bernoulli: return "bernoulli";
    case Family::Intrinsic: return "intrinsic";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  if (text == "uniform" || text == "uniform-partition" || text == "UniformPartition") return Family::UniformPartition;
  if (text == "bernoulli" || text == "Bernoulli") return Family::Bernoulli;
  if (text == "intrinsic" || text == "intrinsic-value" || text == "IntrinsicValue") return Family::Intrinsic;
  throw std::invalid_argument("unknown model '" + std::string(text) + "'");
}

ExperimentConfig ExperimentConfig::preset(std::string_view name) {
  ExperimentConfig c;
  if (name == "uniform") return c;
  if (name == "bernoulli") {
    c.model = Family::Bernoulli;
    return c;
  }
  if (name == "intrinsic") {
    c.model = Family::Intrinsic;
    return c;
  }
  if (name == "smoke") {
    c.n = 5;
    c.m = 10;
    c.instances = 4;
    c.delta_grid = {1, 2, 4};
    c.samples = 3;
    c.total = 50;
    return c;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c = j.contains("preset") ? preset(j.at("preset").get<std::string>()) : ExperimentConfig{};
  try {
    if (j.contains("model")) c.model = parse_family(j.at("model").get<std::string>());
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("m")) c.m = j.at("m").get<std::size_t>();
    if (j.contains("instances")) c.instances = j.at("instances").get<std::size_t>();
    if (j.contains("kinds")) {
      c.kinds.clear();
      for (const auto& k : j.at("kinds")) c.kinds.push_back(parse_share_kind(k.get<std::string>()));
    }
    if (j.contains("delta_grid")) {
      c.delta_grid.clear();
      for (const auto& d : j.at("delta_grid")) {
        c.delta_grid.push_back(d.is_string() ? parse_rational(d.get<std::string>()) : from_double(d.get<double>()));
      }
    }
    if (j.contains("samples")) c.samples = j.at("samples").get<std::size_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("total")) c.total = j.at("total").get<std::uint64_t>();
    if (j.contains("p")) c.p = j.at("p").get<double>();
    if (j.contains("alpha_max")) c.alpha_max = j.at("alpha_max").get<double>();
    if (j.contains("beta_max")) c.beta_max = j.at("beta_max").get<double>();
    if (j.contains("mode")) {
      const auto mode = j.at("mode").get<std::string>();
      if (mode == "exact") {
        c.mode = SolveMode::exact();
      } else if (mode == "float") {
        c.mode = SolveMode::floating(c.mode.tolerance);
      } else {
        throw std::invalid_argument("mode must be exact or float");
      }
    }
    if (j.contains("tolerance")) c.mode.tolerance = j.at("tolerance").get<double>();
    if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("summary")) c.summary = j.at("summary").get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  json kinds_j = json::array();
  for (auto k : kinds) kinds_j.push_back(std::string(fairshare::to_string(k)));
  json grid = json::array();
  for (const auto& d : delta_grid) grid.push_back(fairshare::to_string(d));
  return {{"model", std::string(fairshare::to_string(model))},
          {"n", n},
          {"m", m},
          {"instances", instances},
          {"kinds", kinds_j},
          {"delta_grid", grid},
          {"samples", samples},
          {"seed", seed},
          {"total", total},
          {"p", p},
          {"alpha_max", alpha_max},
          {"beta_max", beta_max},
          {"mode", mode.is_exact() ? "exact" : "float"},
          {"tolerance", mode.tolerance}};
}

void ExperimentConfig::validate() const {
  if (n == 0 || m == 0) throw std::invalid_argument("n and m must be positive");
  if (instances == 0) throw std::invalid_argument("instances must be at least 1");
  if (kinds.empty()) throw std::invalid_argument("no share kinds requested");
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  const bool delta = std::find(kinds.begin(), kinds.end(), ShareKind::EfsDelta) != kinds.end();
  if (delta && delta_grid.empty()) throw std::invalid_argument("EFS_DELTA requested with an empty delta grid");
  for (const auto& d : delta_grid) {
    if (d < 1) throw std::invalid_argument("delta grid entries must be at least 1, got " + fairshare::to_string(d));
  }
  if (model == Family::Bernoulli && !(p >= 0 && p <= 1)) throw std::invalid_argument("p must lie in [0,1]");
}

Instance experiment_instance(const ExperimentConfig& cfg, std::size_t index) {
  const std::uint64_t seed = derive_seed(cfg.seed, index);
  switch (cfg.model) {
    case Family::UniformPartition: return gen_uniform_partition(cfg.n, cfg.m, cfg.total, seed);
    case Family::Bernoulli: return gen_bernoulli(cfg.n, cfg.m, cfg.p, seed);
    case Family::Intrinsic: return gen_intrinsic(cfg.n, cfg.m, seed, cfg.alpha_max, cfg.beta_max);
  }
  throw std::logic_error("unknown family");
}

bool ExperimentResult::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const ExperimentRow& r) { return !r.error.empty(); });
}

const SummaryEntry* ExperimentResult::find(ShareKind kind, const std::optional<Rational>& delta) const {
  for (const auto& e : summary) {
    if (e.kind == kind && e.delta == delta) return &e;
  }
  return nullptr;
}

double quantile(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

struct Task {
  ShareKind kind;
  std::optional<Rational> delta;
};

std::vector<Task> tasks_of(const ExperimentConfig& cfg) {
  std::vector<Task> t;
  for (auto k : cfg.kinds) {
    if (k == ShareKind::EfsDelta) {
      for (const auto& d : cfg.delta_grid) t.push_back({k, d});
    } else {
      t.push_back({k, std::nullopt});
    }
  }
  return t;
}

std::vector<ExperimentRow> run_instance(const ExperimentConfig& cfg, std::size_t index) {
  const Instance inst = experiment_instance(cfg, index);
  const std::size_t n = inst.num_agents();
  const Rational sw = welfare(inst);
  std::optional<ShareVector> efs;
  std::vector<ExperimentRow> rows;
  for (const Task& task : tasks_of(cfg)) {
    ExperimentRow row;
    row.instance = index;
    row.kind = task.kind;
    row.delta = task.delta;
    row.welfare = sw.get_d();
    try {
      ShareVector shares;
      if (task.kind == ShareKind::EfsDelta) {
        DeltaSpec spec;
        spec.delta = *task.delta;
        spec.samples = cfg.samples;
        spec.seed = derive_seed(cfg.seed ^ 0x5eedULL, index);
        row.hidden_size = spec.hidden_set_size(n);
        if (row.hidden_size == 0 && n > 1) {
          if (!efs) efs = all_shares(inst, ShareKind::Efs, std::nullopt, cfg.mode, 1);
          shares = *efs;
          shares.kind = ShareKind::EfsDelta;
          shares.delta = spec.delta;
          shares.standard_errors.assign(n, 0.0);
        } else {
          shares = all_shares(inst, ShareKind::EfsDelta, spec, cfg.mode, 1);
        }
      } else if (task.kind == ShareKind::Efs) {
        if (!efs) efs = all_shares(inst, ShareKind::Efs, std::nullopt, cfg.mode, 1);
        shares = *efs;
      } else {
        shares = all_shares(inst, task.kind, std::nullopt, cfg.mode, 1);
      }
      row.share_sum = std::accumulate(shares.values.begin(), shares.values.end(), Rational(0)).get_d();
      ApproxResult r = optimal_theta(inst, shares, cfg.mode);
      if (r.theta) row.theta = r.theta->get_d();
    } catch (const std::exception& e) {
      row.error = e.what();
      if (row.error.empty()) row.error = "unknown error";
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::vector<ExperimentRow>> per_instance(cfg.instances);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  parallel_for(
      cfg.instances,
      [&](std::size_t idx) {
        per_instance[idx] = run_instance(cfg, idx);
        const std::size_t d = ++done;
        if (progress) {
          std::lock_guard lock(progress_mutex);
          progress(d, cfg.instances);
        }
      },
      cfg.workers);

  ExperimentResult res;
  for (auto& rows : per_instance) {
    for (auto& r : rows) res.rows.push_back(std::move(r));
  }
  for (const Task& task : tasks_of(cfg)) {
    SummaryEntry e;
    e.kind = task.kind;
    e.delta = task.delta;
    if (task.delta) {
      DeltaSpec spec;
      spec.delta = *task.delta;
      e.hidden_size = spec.hidden_set_size(cfg.n);
    }
    std::vector<double> thetas;
    for (const auto& r : res.rows) {
      if (r.kind != task.kind || r.delta != task.delta) continue;
      if (!r.error.empty()) {
        ++e.failures;
      } else if (r.theta) {
        thetas.push_back(*r.theta);
      }
    }
    e.count = thetas.size();
    if (!thetas.empty()) {
      std::sort(thetas.begin(), thetas.end());
      e.min = thetas.front();
      e.max = thetas.back();
      e.q1 = quantile(thetas, 0.25);
      e.median = quantile(thetas, 0.5);
      e.q3 = quantile(thetas, 0.75);
      e.mean = std::accumulate(thetas.begin(), thetas.end(), 0.0) / static_cast<double>(thetas.size());
    }
    res.summary.push_back(e);
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

}  // namespace

void write_rows_csv(std::ostream& out, const ExperimentResult& r) {
  out << "instance,kind,delta,hidden_size,theta,share_sum,welfare,status\n";
  for (const auto& row : r.rows) {
    out << row.instance << ',' << to_string(row.kind) << ',' << (row.delta ? to_string(*row.delta) : "") << ','
        << (row.delta ? std::to_string(row.hidden_size) : "") << ','
        << (row.theta ? fmt(*row.theta) : (row.error.empty() ? "unconstrained" : "")) << ',' << fmt(row.share_sum)
        << ',' << fmt(row.welfare) << ',' << (row.error.empty() ? "ok" : csv_escape("error: " + row.error)) << '\n';
  }
}

json summary_json(const ExperimentConfig& cfg, const ExperimentResult& r) {
  json entries = json::array();
  for (const auto& e : r.summary) {
    json j = {{"kind", std::string(to_string(e.kind))},
              {"count", e.count},
              {"failures", e.failures},
              {"min", e.min},
              {"q1", e.q1},
              {"median", e.median},
              {"q3", e.q3},
              {"max", e.max},
              {"mean", e.mean}};
    if (e.delta) {
      j["delta"] = to_string(*e.delta);
      j["hidden_size"] = e.hidden_size;
    }
    entries.push_back(j);
  }
  return {{"config", cfg.to_json()}, {"summary", entries}, {"failed_rows", std::count_if(r.rows.begin(), r.rows.end(), [](const ExperimentRow& row) { return !row.error.empty(); })}};
}

json plot_spec_json(const ExperimentResult& r) {
  json boxes = json::array();
  json curve = json::array();
  for (const auto& e : r.summary) {
    json stats = {{"min", e.min}, {"q1", e.q1}, {"median", e.median}, {"q3", e.q3}, {"max", e.max}, {"mean", e.mean}};
    if (e.delta) {
      stats["delta"] = e.delta->get_d();
      stats["hidden_size"] = e.hidden_size;
      curve.push_back(stats);
    } else {
      stats["label"] = std::string(to_string(e.kind));
      boxes.push_back(stats);
    }
  }
  return {{"box_plot", {{"y_label", "theta"}, {"series", boxes}}},
          {"delta_curve", {{"x_label", "delta"}, {"y_label", "theta"}, {"points", curve}}}};
}

}  // namespace fairshare
