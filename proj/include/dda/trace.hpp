#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dda/types.hpp"

namespace dda {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Per-round reduced metrics. Agent state stacks are not stored round by
// round; everything downstream (bound checks, CSV export) works off these.
struct RoundRecord {
  long t = 0;
  double a_t = kNan;
  double A_t = kNan;
  double rse = kNan;
  double obj_gap_ytilde = kNan;    // F(ytilde_t) - F*
  double obj_gap_mean_x = kNan;    // F(mean_i x_i) - F*
  double cons_res_s = kNan;        // sqrt(sum_i ||s_i - sbar||^2)
  double cons_res_z = kNan;
  double lemma4_res_s = kNan;      // ||sbar - (gbar - mu xbar)|| / (1 + ||gbar||)
  double lemma4_res_z = kNan;      // ||zbar - sum a_{tau+1} sbar_tau|| / (1 + ||zbar||)
  double lemma5_slack = kNan;      // min_i (||z_i - zbar||/(1+mu A_t) - ||x_i - y||)
  double max_xtilde_ytilde_sq = kNan;  // max_i ||xtilde_i - ytilde||^2
  double max_xtilde_xstar_sq = kNan;   // max_i ||xtilde_i - x*||^2
  double max_obj_gap_xtilde = kNan;    // max_i F(xtilde_i) - F*
  double bound_margin_thm2 = kNan;
  double bound_margin_cor1 = kNan;
};

struct RunTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  double a = kNan;
  int n = 0;
  int m = 0;
  std::vector<RoundRecord> rounds;  // rounds[0] is the t = 0 snapshot
  std::vector<Vec> final_x;
  bool failed = false;
  std::string failure;
};

}  // namespace dda
