#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dda/algorithms.hpp"
#include "dda/analysis.hpp"
#include "dda/config.hpp"

namespace dda {

// beta via support enumeration when the model's support is small enough,
// Monte Carlo otherwise.
double compute_beta(const MixingModel& model, std::uint64_t seed);

// Feasibility report for the configured problem/network pair. Printed to
// `out` and written to <out_dir>/check.json. Throws PreconditionError when
// the base graph is disconnected (beta = 1, abar undefined).
AnalysisReport cmd_check(const ExperimentConfig& cfg, const std::string& base_dir,
                         std::ostream& out);

// Reference solution, cached in <out_dir>/reference_<hash>.json.
Reference cmd_reference(const ExperimentConfig& cfg, const std::string& base_dir,
                        std::ostream& out);

struct AlgorithmResult {
  std::string name;
  std::string csv_path;
  double final_rse = kNan;
  double wall_ms = 0.0;
  long violations = 0;
  bool failed = false;
  std::string failure;
};

struct RunSummary {
  std::vector<AlgorithmResult> results;
  std::string summary_path;
  bool any_failed = false;
};

// Runs every configured algorithm, one CSV per algorithm plus
// <out_dir>/summary.json. A failing algorithm is recorded and skipped; it
// does not abort the others.
RunSummary cmd_run(const ExperimentConfig& cfg, const std::string& base_dir,
                   std::ostream& out);

// DDA over a step-size grid; empty grid means {0.1, 0.3, 0.5, 0.7, 0.9} * abar.
// Writes <out_dir>/sweep.csv.
void cmd_sweep(const ExperimentConfig& cfg, const std::string& base_dir,
               std::vector<double> grid, std::ostream& out);

void write_trace_csv(const RunTrace& trace, const std::string& path);

}  // namespace dda
