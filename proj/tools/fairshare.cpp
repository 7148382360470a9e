#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "fairshare/approx.hpp"
#include "fairshare/certify.hpp"
#include "fairshare/cover.hpp"
#include "fairshare/experiment.hpp"
#include "fairshare/forge.hpp"
#include "fairshare/json_io.hpp"
#include "fairshare/shares.hpp"

namespace fs = fairshare;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInput = 1, kSolver = 2, kViolation = 3 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string mode = "exact";
  double tolerance = 1e-9;

  fs::SolveMode solve_mode() const {
    return mode == "float" ? fs::SolveMode::floating(tolerance) : fs::SolveMode::exact();
  }
  std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }
};

fs::Instance load_instance(const std::string& path) {
  try {
    return fs::load_csv(path);
  } catch (const fs::CsvError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

fs::Rational parse_arg(const std::string& text, const char* what) {
  try {
    return fs::parse_rational(text);
  } catch (const std::invalid_argument&) {
    throw InputError(std::string(what) + ": not a number: '" + text + "'");
  }
}

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw InputError("cannot write " + out);
  f << j.dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

struct ShareOptions {
  std::string instance, kind = "ccs", delta, out;
  std::size_t samples = 20;
  bool enumerate = false;

  std::optional<fs::DeltaSpec> spec(const Globals& g) const {
    if (fs::parse_share_kind(kind) != fs::ShareKind::EfsDelta) return std::nullopt;
    if (delta.empty()) throw InputError("--delta is required for efs-delta");
    fs::DeltaSpec s;
    s.delta = parse_arg(delta, "--delta");
    if (s.delta < 1) throw InputError("--delta must be at least 1");
    s.samples = samples;
    s.seed = g.seed_or(0);
    s.enumerate = enumerate;
    return s;
  }
};

void add_share_options(CLI::App* cmd, ShareOptions& o) {
  cmd->add_option("instance", o.instance, "instance CSV")->required();
  cmd->add_option("--kind", o.kind, "prop, ccs, ef, efs or efs-delta")->capture_default_str();
  cmd->add_option("--delta", o.delta, "delta for efs-delta (rational >= 1)");
  cmd->add_option("--samples", o.samples, "hidden sets sampled per agent")->capture_default_str();
  cmd->add_flag("--enumerate", o.enumerate, "average over every hidden set when feasible");
  cmd->add_option("-o,--output", o.out, "output file (default stdout)");
}

fs::ShareVector compute_shares(const ShareOptions& o, const Globals& g, const fs::Instance& inst) {
  fs::ShareKind kind;
  try {
    kind = fs::parse_share_kind(o.kind);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  auto spec = o.spec(g);
  return fs::all_shares(inst, kind, spec, g.solve_mode());
}

struct GenOptions {
  std::string family, out;
  std::size_t n = 25, m = 75, item_budget = 200000;
  std::uint64_t total = 1000, q = 2;
  double p = 0.5, alpha_max = 1.0, beta_max = 0.3;
  std::string delta = "1";
};

int run_gen(const GenOptions& o, const Globals& g) {
  const std::uint64_t seed = g.seed_or(1);
  json meta = {{"family", o.family}};
  json params;
  json validation = {{"checked", false}};
  fs::Instance inst({{fs::Rational(0)}});
  if (o.family == "uniform") {
    inst = fs::gen_uniform_partition(o.n, o.m, o.total, seed);
    params = {{"n", o.n}, {"m", o.m}, {"total", o.total}};
    meta["seed"] = seed;
  } else if (o.family == "bernoulli") {
    inst = fs::gen_bernoulli(o.n, o.m, o.p, seed);
    params = {{"n", o.n}, {"m", o.m}, {"p", o.p}};
    meta["seed"] = seed;
  } else if (o.family == "intrinsic") {
    inst = fs::gen_intrinsic(o.n, o.m, seed, o.alpha_max, o.beta_max);
    params = {{"n", o.n}, {"m", o.m}, {"alpha_max", o.alpha_max}, {"beta_max", o.beta_max}};
    meta["seed"] = seed;
  } else if (o.family == "plane") {
    inst = fs::gen_projective_plane(o.q);
    params = {{"q", o.q}};
    validation = {{"checked", true},
                  {"points_per_line", o.q + 1},
                  {"lines_per_point", o.q + 1},
                  {"common_points_per_pair", 1}};
  } else if (o.family == "efs-delta-lb") {
    auto lb = fs::gen_efs_delta_lb(o.n, parse_arg(o.delta, "--delta"), o.item_budget);
    inst = lb.instance;
    params = {{"n", o.n}, {"delta", o.delta}, {"z", lb.z}, {"ell", lb.ell},
              {"ell_rule", "round(sqrt(n z)/2) with halves up, clamped to [1, n-1]"}};
  } else if (o.family == "disjoint") {
    inst = fs::gen_disjoint(o.n);
    params = {{"n", o.n}};
  } else {
    throw InputError("unknown family '" + o.family + "'");
  }
  params["agents"] = inst.num_agents();
  params["items"] = inst.num_items();
  meta["params"] = params;
  meta["validation"] = validation;
  if (o.out.empty() || o.out == "-") {
    fs::write_csv(std::cout, inst);
    return kOk;
  }
  fs::save_csv(o.out, inst);
  emit(meta, std::filesystem::path(o.out).replace_extension(".json").string());
  return kOk;
}

struct ExperimentOptions {
  std::string config, preset, output, summary, plot_spec;
  std::optional<std::size_t> instances;
  std::optional<unsigned> workers;
  bool quiet = false;
};

int run_experiment_cmd(const ExperimentOptions& o, const Globals& g, bool mode_set, bool tol_set) {
  fs::ExperimentConfig cfg;
  try {
    if (!o.config.empty()) {
      std::ifstream f(o.config);
      if (!f) throw InputError("cannot open " + o.config);
      json j;
      try {
        j = json::parse(f);
      } catch (const json::exception& e) {
        throw InputError(o.config + ": " + e.what());
      }
      if (!o.preset.empty() && !j.contains("preset")) j["preset"] = o.preset;
      cfg = fs::ExperimentConfig::from_json(j);
    } else {
      cfg = fs::ExperimentConfig::preset(o.preset.empty() ? "uniform" : o.preset);
    }
    if (g.seed) cfg.seed = *g.seed;
    if (mode_set) cfg.mode = g.mode == "float" ? fs::SolveMode::floating(cfg.mode.tolerance) : fs::SolveMode::exact();
    if (tol_set) cfg.mode.tolerance = g.tolerance;
    if (o.instances) cfg.instances = *o.instances;
    if (o.workers) cfg.workers = *o.workers;
    if (!o.output.empty()) cfg.output = o.output;
    if (!o.summary.empty()) cfg.summary = o.summary;
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  fs::ProgressFn progress;
  if (!o.quiet) {
    progress = [](std::size_t done, std::size_t total) { std::cerr << "\rinstances " << done << '/' << total << std::flush; };
  }
  fs::ExperimentResult r = fs::run_experiment(cfg, progress);
  if (!o.quiet) std::cerr << '\n';
  std::ostringstream csv;
  fs::write_rows_csv(csv, r);
  write_text(cfg.output, csv.str());
  write_text(cfg.summary, fs::summary_json(cfg, r).dump(2) + "\n");
  if (!o.plot_spec.empty()) write_text(o.plot_spec, fs::plot_spec_json(r).dump(2) + "\n");
  if (!o.quiet) {
    for (const auto& e : r.summary) {
      std::cerr << fs::to_string(e.kind);
      if (e.delta) std::cerr << " delta=" << fs::to_string(*e.delta);
      std::cerr << "  median " << e.median << "  [" << e.q1 << ", " << e.q3 << "]  n=" << e.count;
      if (e.failures) std::cerr << "  failures=" << e.failures;
      std::cerr << '\n';
    }
  }
  return r.any_failed() ? kSolver : kOk;
}

struct CertifyOptions {
  std::string instance, delta = "1", a, b, out;
  std::uint64_t q = 2;
};

std::optional<fs::Rational> optional_rational(const std::string& text, const char* what) {
  if (text.empty()) return std::nullopt;
  return parse_arg(text, what);
}

fs::CoverReport run_cover_report(const CertifyOptions& o, const Globals& g) {
  const fs::Instance inst = load_instance(o.instance);
  try {
    return fs::cover_allocate(inst, optional_rational(o.a, "--a"), optional_rational(o.b, "--b"), g.solve_mode());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

int run_certify(const std::string& target, const CertifyOptions& o, const Globals& g) {
  const fs::SolveMode mode = g.solve_mode();
  if (target == "plane") {
    fs::PlaneReport r;
    try {
      r = fs::check_plane_lower_bound(o.q, mode);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    emit(fs::to_json(r), o.out);
    return r.passed() ? kOk : kViolation;
  }
  if (target == "cover") {
    fs::CoverReport r = run_cover_report(o, g);
    emit(fs::to_json(r), o.out);
    return r.supply_feasible && r.safe_bound_holds ? kOk : kViolation;
  }
  const fs::Instance inst = load_instance(o.instance);
  fs::DualReport r;
  try {
    if (target == "sqrt-n") {
      r = fs::check_dual_sqrt_n(inst, fs::build_dual_sqrt_n(fs::to_profile(inst)), mode);
    } else {
      const fs::Rational delta = parse_arg(o.delta, "--delta");
      if (delta < 1) throw InputError("--delta must be at least 1");
      const std::size_t n = inst.num_agents();
      const std::size_t z = 1 + fs::floor(fs::Rational(static_cast<unsigned long>(n - 1)) / delta).get_ui();
      r = fs::build_and_check_dual_efs_delta(inst, fs::cyclic_z_sets(n, z), mode);
    }
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  emit(fs::to_json(r), o.out);
  return r.passed() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair share computation and allocation toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  auto* mode_opt =
      app.add_option("--mode", g.mode, "LP arithmetic")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  auto* tol_opt = app.add_option("--tolerance", g.tolerance, "float mode tolerance")->check(CLI::PositiveNumber);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate an instance CSV and a JSON metadata sidecar");
  gen_cmd->add_option("family", gen.family, "uniform, bernoulli, intrinsic, plane, efs-delta-lb or disjoint")
      ->required()
      ->check(CLI::IsMember({"uniform", "bernoulli", "intrinsic", "plane", "efs-delta-lb", "disjoint"}));
  gen_cmd->add_option("-n,--agents", gen.n, "agents")->capture_default_str();
  gen_cmd->add_option("-m,--items", gen.m, "items")->capture_default_str();
  gen_cmd->add_option("--total", gen.total, "row sum for uniform")->capture_default_str();
  gen_cmd->add_option("-p", gen.p, "Bernoulli probability")->capture_default_str();
  gen_cmd->add_option("--alpha-max", gen.alpha_max)->capture_default_str();
  gen_cmd->add_option("--beta-max", gen.beta_max)->capture_default_str();
  gen_cmd->add_option("-q", gen.q, "prime plane order")->capture_default_str();
  gen_cmd->add_option("--delta", gen.delta, "delta for efs-delta-lb")->capture_default_str();
  gen_cmd->add_option("--item-budget", gen.item_budget)->capture_default_str();
  gen_cmd->add_option("-o,--output", gen.out, "CSV path; the sidecar gets a .json extension");

  ShareOptions shares;
  auto* shares_cmd = app.add_subcommand("shares", "per-agent shares as JSON");
  add_share_options(shares_cmd, shares);

  ShareOptions approx;
  auto* approx_cmd = app.add_subcommand("approx", "best simultaneous approximation of a share vector");
  add_share_options(approx_cmd, approx);

  ExperimentOptions exp;
  auto* exp_cmd = app.add_subcommand("experiment", "generate, compute shares and theta over many instances");
  exp_cmd->add_option("config", exp.config, "JSON config (keys override the preset)");
  exp_cmd->add_option("--preset", exp.preset, "uniform, bernoulli, intrinsic or smoke");
  exp_cmd->add_option("--instances", exp.instances);
  exp_cmd->add_option("--workers", exp.workers, "threads (0: all cores)");
  exp_cmd->add_option("--output", exp.output, "per-row CSV");
  exp_cmd->add_option("--summary", exp.summary, "summary JSON");
  exp_cmd->add_option("--plot-spec", exp.plot_spec, "write plot data JSON");
  exp_cmd->add_flag("-q,--quiet", exp.quiet);

  CertifyOptions cert;
  std::string target;
  auto* cert_cmd = app.add_subcommand("certify", "check a certificate; exit 3 on violation");
  cert_cmd->add_option("target", target, "sqrt-n, efs-delta, plane or cover")
      ->required()
      ->check(CLI::IsMember({"sqrt-n", "efs-delta", "plane", "cover"}));
  cert_cmd->add_option("--instance", cert.instance, "instance CSV");
  cert_cmd->add_option("--delta", cert.delta)->capture_default_str();
  cert_cmd->add_option("--q", cert.q, "prime plane order")->capture_default_str();
  cert_cmd->add_option("--a", cert.a, "cover threshold a in (0,1]");
  cert_cmd->add_option("--b", cert.b, "cover fraction b in (0,1]");
  cert_cmd->add_option("-o,--output", cert.out);

  CertifyOptions cover;
  auto* cover_cmd = app.add_subcommand("cover", "greedy cover allocation");
  cover_cmd->add_option("instance", cover.instance, "instance CSV")->required();
  cover_cmd->add_option("--a", cover.a, "threshold a in (0,1]");
  cover_cmd->add_option("--b", cover.b, "fraction b in (0,1]");
  cover_cmd->add_option("-o,--output", cover.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*gen_cmd) return run_gen(gen, g);
    if (*shares_cmd) {
      const auto inst = load_instance(shares.instance);
      emit(fs::to_json(compute_shares(shares, g, inst)), shares.out);
      return kOk;
    }
    if (*approx_cmd) {
      const auto inst = load_instance(approx.instance);
      emit(fs::to_json(fs::optimal_theta(inst, compute_shares(approx, g, inst), g.solve_mode())), approx.out);
      return kOk;
    }
    if (*exp_cmd) return run_experiment_cmd(exp, g, mode_opt->count() > 0, tol_opt->count() > 0);
    if (*cert_cmd) {
      if (target != "plane" && cert.instance.empty()) throw InputError("certify " + target + " needs --instance");
      return run_certify(target, cert, g);
    }
    if (*cover_cmd) {
      emit(fs::to_json(run_cover_report(cover, g)), cover.out);
      return kOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  }
  return kOk;
}
