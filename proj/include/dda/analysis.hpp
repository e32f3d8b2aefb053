#pragma once

#include <string>
#include <vector>

#include "dda/trace.hpp"
#include "dda/types.hpp"

namespace dda {

struct ProblemInstance;

// The 2x2 dynamics matrix driving the consensus-error recursion.
Eigen::Matrix2d matrix_M(double a, double L, double mu, double beta);

struct SpectralScalars {
  double xi1 = 0.0;   // trace of M
  double xi2 = 0.0;   // discriminant root
  double lambda1 = 0.0;  // (xi1 + xi2)/2 = rho(M)
  double lambda2 = 0.0;  // (xi1 - xi2)/2
  double nu = 0.0;    // rho(M) sqrt(1 - a mu)
  double eta = 0.0;   // (1 - a mu)(1 - nu)^2, clamped at 0 when nu >= 1
  double theta = 0.0; // (1 - a mu)(1 - nu^2), clamped likewise
  double eta_raw = 0.0;    // unclamped values, for reporting
  double theta_raw = 0.0;
};

SpectralScalars nu_eta_theta(double a, double L, double mu, double beta);

struct Conditions {
  bool cond16 = false;  // 1/a > beta(2L+3mu)/(1-beta)^2 + mu
  double gamma = 0.0;   // 1/a - 2L + mu - (4L-2mu)/eta; -inf when cond16 fails
  bool cond19 = false;  // gamma > 0
  bool cond27 = false;  // 1/a > 2L max{beta/(1-beta)^2, 1 + 6/(1-nu)^2}
};

Conditions check_conditions(double a, double L, double mu, double beta);

// Conservative step-size bound: every a in (0, abar) satisfies the two
// feasibility conditions. For mu > 0 this is the closed-form three-term
// minimum; for mu = 0 the bound is located by bisection with a 0.99 safety
// factor. third_term_applicable reports whether the closed-form third term
// had a nonnegative base.
double estimate_abar(double L, double mu, double beta, bool* third_term_applicable = nullptr);

// Theorem-2 constants C and D.
std::pair<double, double> constants_CD(double a, double L, double mu, double beta, int n,
                                       double sigma_sq, double d_xstar);

struct AnalysisReport {
  double a = 0.0, L = 0.0, mu = 0.0, beta = 0.0;
  int n = 0;
  Eigen::Matrix2d M;
  SpectralScalars spectral;
  Conditions conditions;
  double abar = 0.0;
  bool abar_third_term = false;
  double sigma_sq = kNan;
  double d_xstar = kNan;
  double C = kNan;
  double D = kNan;

  std::string to_text() const;
  std::string to_json() const;
};

// Full report for given constants; C/D filled only when sigma_sq and
// d_xstar are provided and the conditions hold.
AnalysisReport analyze(double a, double L, double mu, double beta, int n,
                       double sigma_sq = kNan, double d_xstar = kNan);

// RSE(t) = sum_i ||x_i(t) - x*||^2 / sum_i ||x_i(0) - x*||^2
double rse(const std::vector<Vec>& x_t, const std::vector<Vec>& x_0, const Vec& xstar);

enum class BoundMode { Theorem2, Corollary1, Corollary2 };

// Per-round slack of the selected convergence bound (bound minus observed
// quantity, min across the mode's sub-bounds); nonnegative when the bound
// holds. Rounds t = 1..T.
std::vector<double> bound_check(const RunTrace& trace, const AnalysisReport& report,
                                BoundMode mode);

}  // namespace dda
