#include "dda/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dda/errors.hpp"
#include "dda/rng.hpp"

namespace dda {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

fs::path ensure_out_dir(const ExperimentConfig& cfg, const std::string& base_dir) {
  fs::path dir(cfg.out_dir);
  if (dir.is_relative()) dir = fs::path(base_dir) / dir;
  fs::create_directories(dir);
  return dir;
}

double resolve_step(const AlgorithmConfig& alg, double abar, const char* who) {
  if (alg.a > 0.0) return alg.a;
  if (!(abar > 0.0))
    throw ConfigError(std::string(who) + ": a = 0 requests 0.5*abar but abar is unavailable");
  return 0.5 * abar;
}

json reference_to_json(const Reference& ref) {
  json j;
  j["xstar"] = std::vector<double>(ref.xstar.data(), ref.xstar.data() + ref.xstar.size());
  j["Fstar"] = ref.Fstar;
  j["d_xstar"] = ref.d_xstar;
  j["sigma_sq"] = ref.sigma_sq;
  j["iterations"] = ref.iterations;
  j["residual"] = ref.residual;
  return j;
}

Reference reference_from_json(const json& j) {
  Reference ref;
  auto xs = j.at("xstar").get<std::vector<double>>();
  ref.xstar = Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  ref.Fstar = j.at("Fstar").get<double>();
  ref.d_xstar = j.at("d_xstar").get<double>();
  ref.sigma_sq = j.at("sigma_sq").get<double>();
  ref.iterations = j.at("iterations").get<long>();
  ref.residual = j.at("residual").get<double>();
  return ref;
}

RunTrace dispatch(const AlgorithmConfig& alg, const ProblemInstance& inst,
                  const MixingModel& model, double a, const RunOptions& opts) {
  if (alg.name == "dda") return run_dda(inst, model, a, opts);
  if (alg.name == "cdda") return run_cdda(inst, model, sqrt_decay_rule(), opts);
  if (alg.name == "dsm") return run_dsm(inst, model, sqrt_decay_rule(), opts);
  if (alg.name == "pg_extra") return run_pg_extra(inst, model, a, opts);
  if (alg.name == "p2d2") return run_p2d2(inst, model, a, alg.alpha, opts);
  if (alg.name == "centralized") return centralized_da(inst, a, opts);
  throw ConfigError("unknown algorithm '" + alg.name + "'");
}

long count_violations(const RunTrace& trace) {
  long v = 0;
  for (const auto& rec : trace.rounds) {
    if (rec.lemma5_slack < -1e-9) ++v;
    if (rec.lemma4_res_s > 1e-9) ++v;
    if (rec.lemma4_res_z > 1e-9) ++v;
    if (rec.bound_margin_thm2 < 0.0) ++v;
    if (rec.bound_margin_cor1 < 0.0) ++v;
  }
  return v;
}

}  // namespace

double compute_beta(const MixingModel& model, std::uint64_t seed) {
  bool exact = model.kind != MixingKind::Bernoulli || model.base.edges.size() <= 20;
  if (exact) return beta_of_model(model, BetaMode::Exact);
  return beta_of_model(model, BetaMode::MonteCarlo, 20000, splitmix64(seed));
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << "t,rse,obj_gap_ybar,obj_gap_mean_x,consensus_residual_s,consensus_residual_z,"
         "lemma5_slack,bound_margin_thm2,bound_margin_cor1\n";
  for (const auto& rec : trace.rounds) {
    out << rec.t << ',' << fmt(rec.rse) << ',' << fmt(rec.obj_gap_ytilde) << ','
        << fmt(rec.obj_gap_mean_x) << ',' << fmt(rec.cons_res_s) << ','
        << fmt(rec.cons_res_z) << ',' << fmt(rec.lemma5_slack) << ','
        << fmt(rec.bound_margin_thm2) << ',' << fmt(rec.bound_margin_cor1) << '\n';
  }
}

AnalysisReport cmd_check(const ExperimentConfig& cfg, const std::string& base_dir,
                         std::ostream& out) {
  validate(cfg);
  ProblemInstance inst = build_problem(cfg, base_dir);
  MixingModel model = build_network(cfg, base_dir);
  if (model.kind != MixingKind::TimeInvariant && !model.base.connected()) {
    out << "base graph is disconnected: beta = 1, abar undefined\n";
    throw PreconditionError("check: base graph is disconnected (beta = 1)");
  }
  double beta = compute_beta(model, cfg.seed);
  out << "beta = " << fmt(beta) << "\n";

  AnalysisReport report;
  if (beta >= 1.0 - 1e-12) {
    out << "beta = 1: consensus never contracts, abar undefined\n";
    throw PreconditionError("check: beta = 1, the mixing model does not contract");
  }
  if (beta < 1e-12) {
    // complete averaging: the consensus recursion is inactive and the only
    // step constraint left is the centralized one
    report.a = 0.0;
    report.L = inst.L;
    report.mu = inst.mu;
    report.beta = 0.0;
    report.n = inst.n;
    report.abar = inst.mu > 0.0 ? 1.0 / (2.0 * inst.mu)
                                : std::numeric_limits<double>::infinity();
    out << "beta = 0: exact averaging every round\n";
    out << "step bound:  abar=" << fmt(report.abar) << "\n";
    out << "suggested a: {" << fmt(0.1 * report.abar) << ", " << fmt(0.5 * report.abar)
        << ", " << fmt(0.9 * report.abar) << "}\n";
  } else {
    double abar = estimate_abar(inst.L, inst.mu, beta);
    double a = 0.5 * abar;
    for (const auto& alg : cfg.algorithms)
      if (alg.name == "dda" && alg.a > 0.0) {
        a = alg.a;
        break;
      }
    report = analyze(a, inst.L, inst.mu, beta, inst.n);
    out << report.to_text();
  }

  fs::path dir = ensure_out_dir(cfg, base_dir);
  std::ofstream jf(dir / "check.json", std::ios::binary);
  jf << report.to_json() << "\n";
  return report;
}

Reference cmd_reference(const ExperimentConfig& cfg, const std::string& base_dir,
                        std::ostream& out) {
  validate(cfg);
  fs::path dir = ensure_out_dir(cfg, base_dir);
  fs::path cache = dir / ("reference_" + hex64(problem_hash(cfg)) + ".json");
  if (fs::exists(cache)) {
    std::ifstream in(cache);
    json j;
    in >> j;
    out << "reference cache hit: " << cache.string() << "\n";
    return reference_from_json(j);
  }
  ProblemInstance inst = build_problem(cfg, base_dir);
  Reference ref = solve_reference(inst);
  std::ofstream jf(cache, std::ios::binary);
  jf << reference_to_json(ref).dump(2) << "\n";
  out << "reference written: " << cache.string() << " (iterations " << ref.iterations
      << ", residual " << fmt(ref.residual) << ")\n";
  return ref;
}

RunSummary cmd_run(const ExperimentConfig& cfg, const std::string& base_dir,
                   std::ostream& out) {
  validate(cfg);
  ProblemInstance inst = build_problem(cfg, base_dir);
  MixingModel model = build_network(cfg, base_dir);
  Reference ref = cmd_reference(cfg, base_dir, out);
  double beta = compute_beta(model, cfg.seed);

  double abar = 0.0;
  AnalysisReport report;
  bool have_bounds = false;
  if (beta > 1e-12 && beta < 1.0 - 1e-12) abar = estimate_abar(inst.L, inst.mu, beta);

  fs::path dir = ensure_out_dir(cfg, base_dir);
  RunSummary summary;
  for (const auto& alg : cfg.algorithms) {
    AlgorithmResult res;
    res.name = alg.name;
    int dupes = 0;
    for (const auto& prev : summary.results)
      if (prev.name == alg.name) ++dupes;
    std::string stem = alg.name + (dupes > 0 ? "_" + std::to_string(dupes) : "");
    fs::path csv = dir / (stem + ".csv");
    res.csv_path = csv.string();
    auto start = std::chrono::steady_clock::now();
    try {
      RunOptions opts;
      opts.T = alg.T;
      opts.seed = splitmix64(cfg.seed ^ fnv1a(alg.name));
      opts.reference = ref;
      double a = alg.name == "cdda" || alg.name == "dsm"
                     ? 0.0
                     : resolve_step(alg, abar, alg.name.c_str());
      RunTrace trace = dispatch(alg, inst, model, a, opts);

      if (cfg.monitors.bounds && alg.name == "dda" && beta > 1e-12 &&
          beta < 1.0 - 1e-12) {
        have_bounds = false;
        try {
          report = analyze(a, inst.L, inst.mu, beta, inst.n, ref.sigma_sq, ref.d_xstar);
          have_bounds = std::isfinite(report.C);
        } catch (const std::exception&) {
        }
        if (have_bounds) {
          auto thm2 = bound_check(trace, report, BoundMode::Theorem2);
          std::vector<double> cor1;
          if (inst.mu > 0.0) cor1 = bound_check(trace, report, BoundMode::Corollary1);
          for (std::size_t t = 1; t < trace.rounds.size(); ++t) {
            trace.rounds[t].bound_margin_thm2 = thm2[t - 1];
            if (!cor1.empty()) trace.rounds[t].bound_margin_cor1 = cor1[t - 1];
          }
        }
      }

      write_trace_csv(trace, csv.string());
      if (!trace.rounds.empty()) res.final_rse = trace.rounds.back().rse;
      res.violations = count_violations(trace);
    } catch (const std::exception& e) {
      res.failed = true;
      res.failure = e.what();
      summary.any_failed = true;
    }
    res.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    out << stem << ": "
        << (res.failed ? "FAILED (" + res.failure + ")"
                       : "final rse " + fmt(res.final_rse) + ", violations " +
                             std::to_string(res.violations))
        << "\n";
    summary.results.push_back(std::move(res));
  }

  json j;
  j["config_hash"] = hex64(config_hash(cfg));
  j["beta"] = beta;
  j["L"] = inst.L;
  j["mu"] = inst.mu;
  j["abar"] = abar;
  j["algorithms"] = json::array();
  for (const auto& res : summary.results) {
    json r;
    r["name"] = res.name;
    r["csv"] = res.csv_path;
    r["final_rse"] = std::isfinite(res.final_rse) ? json(res.final_rse) : json(nullptr);
    r["wall_ms"] = res.wall_ms;
    r["violations"] = res.violations;
    r["failed"] = res.failed;
    r["failure"] = res.failure;
    j["algorithms"].push_back(r);
  }
  fs::path spath = dir / "summary.json";
  summary.summary_path = spath.string();
  std::ofstream jf(spath, std::ios::binary);
  jf << j.dump(2) << "\n";
  out << "summary: " << summary.summary_path << "\n";
  return summary;
}

void cmd_sweep(const ExperimentConfig& cfg, const std::string& base_dir,
               std::vector<double> grid, std::ostream& out) {
  validate(cfg);
  ProblemInstance inst = build_problem(cfg, base_dir);
  MixingModel model = build_network(cfg, base_dir);
  Reference ref = cmd_reference(cfg, base_dir, out);
  double beta = compute_beta(model, cfg.seed);
  if (!(beta > 1e-12) || !(beta < 1.0 - 1e-12))
    throw PreconditionError("sweep: needs a contracting, non-trivial mixing model");

  long T = 100;
  for (const auto& alg : cfg.algorithms)
    if (alg.name == "dda") T = alg.T;
  if (grid.empty()) {
    double abar = estimate_abar(inst.L, inst.mu, beta);
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) grid.push_back(f * abar);
  }

  fs::path dir = ensure_out_dir(cfg, base_dir);
  std::ofstream csv(dir / "sweep.csv", std::ios::binary);
  csv << "a,cond16,cond19,gamma,final_rse,final_obj_gap\n";
  for (double a : grid) {
    Conditions cond = check_conditions(a, inst.L, inst.mu, beta);
    double final_rse = kNan, final_gap = kNan;
    std::string note;
    try {
      RunOptions opts;
      opts.T = T;
      opts.seed = splitmix64(cfg.seed ^ fnv1a("dda"));
      opts.reference = ref;
      RunTrace trace = run_dda(inst, model, a, opts);
      final_rse = trace.rounds.back().rse;
      final_gap = trace.rounds.back().obj_gap_mean_x;
    } catch (const std::exception& e) {
      note = e.what();
    }
    csv << fmt(a) << ',' << (cond.cond16 ? 1 : 0) << ',' << (cond.cond19 ? 1 : 0) << ','
        << fmt(cond.gamma) << ',' << fmt(final_rse) << ',' << fmt(final_gap) << '\n';
    out << "a=" << fmt(a) << " final_rse=" << fmt(final_rse)
        << (note.empty() ? "" : " (" + note + ")") << "\n";
  }
  out << "sweep: " << (dir / "sweep.csv").string() << "\n";
}

}  // namespace dda
