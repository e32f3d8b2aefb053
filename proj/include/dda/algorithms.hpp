#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "dda/network.hpp"
#include "dda/problems.hpp"
#include "dda/schedule.hpp"
#include "dda/trace.hpp"

namespace dda {

// Reference solution produced by the centralized proximal gradient method.
struct Reference {
  Vec xstar;
  double Fstar = 0.0;
  double d_xstar = 0.0;    // d(x*) for the instance's distance generator
  double sigma_sq = 0.0;   // gradient variance at x0
  long iterations = 0;
  double residual = 0.0;   // final successive-iterate norm
};

Reference solve_reference(const ProblemInstance& inst, double tol = 1e-14,
                          long max_iter = 1000000);

// sum_i ||grad f_i(x0) - mean_j grad f_j(x0)||^2
double sigma_squared(const ProblemInstance& inst, const Vec& x0);

// One decentralized dual averaging simulation: per-agent (x_i, z_i, s_i)
// plus the weight schedule. step() performs exactly one synchronous round
// of the consensus protocol followed by the local primal solves.
class DdaSimulation {
 public:
  DdaSimulation(const ProblemInstance& inst, double a);

  void step(const Mat& P);

  const ProblemInstance& instance() const { return *inst_; }
  const StepSchedule& schedule() const { return sched_; }
  // Row i holds agent i's vector.
  const Mat& x_stack() const { return X_; }
  const Mat& z_stack() const { return Z_; }
  const Mat& s_stack() const { return S_; }
  Vec x(int i) const { return X_.row(i).transpose(); }
  Vec z(int i) const { return Z_.row(i).transpose(); }

  Vec xbar() const { return X_.colwise().mean().transpose(); }
  Vec zbar() const { return Z_.colwise().mean().transpose(); }
  Vec sbar() const { return S_.colwise().mean().transpose(); }
  Vec gbar() const { return G_.colwise().mean().transpose(); }

  // Auxiliary sequence y(t) = solve_primal(zbar, A_t) and the running
  // weighted averages ytilde, xtilde_i.
  const Vec& y() const { return y_; }
  const Vec& ytilde() const { return ytilde_; }
  const Mat& xtilde_stack() const { return Xtilde_; }

  // sum_{tau=0}^{t-1} a_{tau+1} sbar^(tau), for the conservation monitor.
  const Vec& zbar_accumulated() const { return zbar_acc_; }

 private:
  const ProblemInstance* inst_;
  StepSchedule sched_;
  Mat X_, Z_, S_, G_;  // G_ caches grad f_i(x_i) rows
  Vec y_, ytilde_;
  Mat Xtilde_;
  Vec zbar_acc_;
};

// Centralized dual averaging on f = 1/n sum f_i (Theorem 1 setting).
class CentralizedDa {
 public:
  CentralizedDa(const ProblemInstance& inst, double a);
  void step();
  const Vec& x() const { return x_; }
  const Vec& z() const { return z_; }
  const Vec& xtilde() const { return xtilde_; }
  const StepSchedule& schedule() const { return sched_; }

 private:
  const ProblemInstance* inst_;
  StepSchedule sched_;
  Vec x_, z_, xtilde_;
};

struct RunOptions {
  long T = 0;
  std::uint64_t seed = 0;
  std::optional<Reference> reference;  // enables RSE / objective-gap metrics
  // Per-agent weighted-average objective metrics are O(n^2) gradient work
  // per round; long runs that only need RSE can switch them off.
  bool rich_metrics = true;
};

using StepRule = std::function<double(long)>;  // round index -> step size

StepRule sqrt_decay_rule();  // a_t = 1/sqrt(t+1)

RunTrace run_dda(const ProblemInstance& inst, const MixingModel& model, double a,
                 const RunOptions& opts);
RunTrace run_cdda(const ProblemInstance& inst, const MixingModel& model,
                  const StepRule& rule, const RunOptions& opts);
RunTrace run_dsm(const ProblemInstance& inst, const MixingModel& model,
                 const StepRule& rule, const RunOptions& opts);
RunTrace run_pg_extra(const ProblemInstance& inst, const MixingModel& model, double a,
                      const RunOptions& opts);
RunTrace run_p2d2(const ProblemInstance& inst, const MixingModel& model, double a,
                  double alpha, const RunOptions& opts);
RunTrace centralized_da(const ProblemInstance& inst, double a, const RunOptions& opts);

}  // namespace dda
