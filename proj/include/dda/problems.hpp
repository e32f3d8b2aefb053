#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dda/proximal.hpp"
#include "dda/types.hpp"

namespace dda {

// f_i(x) = 1/m_i sum_j log(1 + exp(-y_j M_j^T x)) + ridge_mu/2 ||x||^2
struct LogisticAgent {
  Mat features;  // m_i x m, row j is M_j^T
  Vec labels;    // entries in {-1,+1}
  double ridge_mu = 0.0;
};

// f_i(x) = 1/2 ||b_i - C_i x||^2
struct LassoAgent {
  Mat C;
  Vec b;
};

// f_i(x) = 1/2 x^T Q x + q^T x + c
struct QuadraticAgent {
  Mat Q;
  Vec q;
  double c = 0.0;
};

struct AgentObjective {
  std::variant<LogisticAgent, LassoAgent, QuadraticAgent> data;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
};

double logistic_value(const LogisticAgent& a, const Vec& x);
Vec logistic_gradient(const LogisticAgent& a, const Vec& x);
double lasso_value(const LassoAgent& a, const Vec& x);
Vec lasso_gradient(const LassoAgent& a, const Vec& x);

// n local smooth objectives plus the shared regularizer h and distance
// generator d. L and mu are the smoothness / strong convexity constants
// shared by all f_i.
struct ProblemInstance {
  int n = 0;
  int m = 0;
  std::vector<AgentObjective> locals;
  double L = 0.0;
  double mu = 0.0;
  Regularizer h;
  DistanceGenerator d;

  double value(int i, const Vec& x) const { return locals[i].value(x); }
  Vec gradient(int i, const Vec& x) const { return locals[i].gradient(x); }
  // f(x) = 1/n sum_i f_i(x) and its gradient.
  double f_avg(const Vec& x) const;
  Vec grad_avg(const Vec& x) const;
  double objective(const Vec& x) const { return f_avg(x) + h.evaluate(x); }
};

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_lambda_max(const Mat& S, double tol = 1e-10, int max_iter = 10000);

// Smoothness / strong-convexity constants from the objective structure.
// Logistic: L = max_i lambda_max(M_i^T M_i)/(4 m_i) + ridge_mu, mu = ridge_mu.
// LASSO: L = max_i lambda_max(C_i^T C_i), mu = min_i lambda_min(C_i^T C_i).
// Quadratic: extremes of the spectra of Q_i.
std::pair<double, double> estimate_constants(const ProblemInstance& inst);

// Per-agent raw data before objective assembly.
struct AgentDataset {
  std::vector<Mat> features;
  std::vector<Vec> labels;
};

// CSV with numeric feature columns and a final label column in {0,1} or
// {-1,+1}; single non-numeric header row auto-detected. Rows are dealt
// round-robin into n equal shards and features standardized per column.
AgentDataset load_csv_partitioned(const std::string& path, int n, int samples_total);

ProblemInstance make_logistic_instance(AgentDataset data, double mu, double phi);

// Synthetic strongly convex sparse logistic regression instance.
ProblemInstance generate_logistic_instance(std::uint64_t seed, int n, int rows_per_agent,
                                           int m, double mu, double phi);

// Decentralized LASSO with l1-ball constraint R = ball_factor * ||xsharp||_1.
// C_i are rescaled and blended with a scaled identity block so that the
// estimated constants come out (L, mu) = (1, 0.5).
ProblemInstance generate_lasso_instance(std::uint64_t seed, int n, int rows_per_agent,
                                        int m, double nonzero_prob, double noise_std,
                                        double ball_factor, Vec* xsharp_out = nullptr);

// Synthetic quadratic instance with spectrum in [mu, L]; h as given.
ProblemInstance generate_quadratic_instance(std::uint64_t seed, int n, int m, double L,
                                            double mu, Regularizer h);

}  // namespace dda
