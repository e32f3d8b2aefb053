#include "dda/algorithms.hpp"

#include <cmath>

#include "dda/errors.hpp"
#include "dda/rng.hpp"

namespace dda {

namespace {

void check_finite(const Vec& g, int agent, long round) {
  if (!g.allFinite())
    throw NumericalError("non-finite gradient at agent " + std::to_string(agent) +
                         ", round " + std::to_string(round));
}

Vec prox_step(const Regularizer& h, const Vec& v, double step) {
  switch (h.kind) {
    case RegKind::Zero:
      return v;
    case RegKind::L1:
      return soft_threshold(v, step * h.weight);
    case RegKind::L1Ball:
      return project_l1_ball(v, h.radius);
  }
  return v;
}

double rse_value(const Mat& X, const Vec& xstar, double denom) {
  double num = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    num += (X.row(i).transpose() - xstar).squaredNorm();
  return num / denom;
}

double rse_denominator(const Mat& X0, const Vec& xstar) {
  double denom = 0.0;
  for (Eigen::Index i = 0; i < X0.rows(); ++i)
    denom += (X0.row(i).transpose() - xstar).squaredNorm();
  if (denom == 0.0)
    throw PreconditionError("RSE undefined: every agent starts at x*");
  return denom;
}

double stack_consensus(const Mat& S) {
  Vec mean = S.colwise().mean().transpose();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    acc += (S.row(i).transpose() - mean).squaredNorm();
  return std::sqrt(acc);
}

Mat sample_validated(const MixingModel& model, std::mt19937_64& rng) {
  Mat P = model.sample(rng);
  auto rep = validate_doubly_stochastic(P, 1e-12);
  if (!rep.ok)
    throw NumericalError("sampled mixing matrix is not doubly stochastic: " + rep.detail);
  return P;
}

}  // namespace

double sigma_squared(const ProblemInstance& inst, const Vec& x0) {
  std::vector<Vec> grads;
  grads.reserve(inst.n);
  Vec mean = Vec::Zero(inst.m);
  for (int i = 0; i < inst.n; ++i) {
    grads.push_back(inst.gradient(i, x0));
    mean += grads.back();
  }
  mean /= static_cast<double>(inst.n);
  double acc = 0.0;
  for (const auto& g : grads) acc += (g - mean).squaredNorm();
  return acc;
}

Reference solve_reference(const ProblemInstance& inst, double tol, long max_iter) {
  if (!(tol > 0.0)) throw PreconditionError("solve_reference: tol must be positive");
  const double step = 1.0 / inst.L;
  Vec x = inst.d.center;
  double resid = 0.0;
  long it = 0;
  for (; it < max_iter; ++it) {
    Vec xn = prox_step(inst.h, x - step * inst.grad_avg(x), step);
    resid = (xn - x).norm();
    x = xn;
    if (resid < tol) break;
  }
  if (it == max_iter)
    throw NumericalError("solve_reference: iteration cap reached, residual " +
                         std::to_string(resid));
  Reference ref;
  ref.xstar = x;
  ref.Fstar = inst.objective(x);
  ref.d_xstar = inst.d.evaluate(x);
  ref.sigma_sq = sigma_squared(inst, inst.d.center);
  ref.iterations = it + 1;
  ref.residual = resid;
  return ref;
}

DdaSimulation::DdaSimulation(const ProblemInstance& inst, double a)
    : inst_(&inst), sched_(a, inst.mu) {
  const int n = inst.n;
  const int m = inst.m;
  const Vec& x0 = inst.d.center;
  if (!inst.h.in_domain(x0))
    throw PreconditionError("DDA: x0 must lie in dom(h)");
  X_ = x0.transpose().replicate(n, 1);
  Z_ = Mat::Zero(n, m);
  G_ = Mat(n, m);
  S_ = Mat(n, m);
  for (int i = 0; i < n; ++i) {
    Vec g = inst.gradient(i, x0);
    check_finite(g, i, 0);
    G_.row(i) = g.transpose();
    S_.row(i) = (g - inst.mu * x0).transpose();
  }
  y_ = x0;
  ytilde_ = x0;
  Xtilde_ = X_;
  zbar_acc_ = Vec::Zero(m);
}

void DdaSimulation::step(const Mat& P) {
  const double mu = inst_->mu;
  zbar_acc_ += (sched_.a_t / (1.0 - sched_.a * mu)) * sbar();  // a_t of this round
  sched_.advance();
  const double a_t = sched_.a_t;
  const double A_t = sched_.A_t;

  Z_ = P * (Z_ + a_t * S_);
  Mat S_next = P * S_;
  for (int i = 0; i < inst_->n; ++i) {
    Vec xi = solve_primal(Z_.row(i).transpose(), A_t, mu, inst_->h, inst_->d);
    Vec gi = inst_->gradient(i, xi);
    check_finite(gi, i, sched_.t);
    S_next.row(i) += (gi - mu * xi).transpose() - (G_.row(i) - mu * X_.row(i));
    X_.row(i) = xi.transpose();
    G_.row(i) = gi.transpose();
  }
  S_ = S_next;

  y_ = solve_primal(zbar(), A_t, mu, inst_->h, inst_->d);
  const double w = sched_.weight_fraction();
  ytilde_ = (1.0 - w) * ytilde_ + w * y_;
  Xtilde_ = (1.0 - w) * Xtilde_ + w * X_;
}

CentralizedDa::CentralizedDa(const ProblemInstance& inst, double a)
    : inst_(&inst), sched_(a, inst.mu) {
  x_ = inst.d.center;
  z_ = Vec::Zero(inst.m);
  xtilde_ = x_;
}

void CentralizedDa::step() {
  sched_.advance();
  Vec s = inst_->grad_avg(x_) - inst_->mu * x_;
  z_ += sched_.a_t * s;
  x_ = solve_primal(z_, sched_.A_t, inst_->mu, inst_->h, inst_->d);
  const double w = sched_.weight_fraction();
  xtilde_ = (1.0 - w) * xtilde_ + w * x_;
}

namespace {

struct MetricContext {
  const ProblemInstance* inst;
  const Reference* ref = nullptr;
  double rse_denom = 0.0;
  bool rich = true;
};

void fill_common(RoundRecord& rec, const MetricContext& ctx, const Mat& X) {
  if (!ctx.ref) return;
  rec.rse = rse_value(X, ctx.ref->xstar, ctx.rse_denom);
  Vec xmean = X.colwise().mean().transpose();
  rec.obj_gap_mean_x = ctx.inst->objective(xmean) - ctx.ref->Fstar;
}

RoundRecord dda_metrics(const DdaSimulation& sim, const MetricContext& ctx) {
  RoundRecord rec;
  const auto& sched = sim.schedule();
  rec.t = sched.t;
  rec.a_t = sched.a_t;
  rec.A_t = sched.A_t;
  const ProblemInstance& inst = *ctx.inst;

  Vec sbar = sim.sbar();
  Vec zbar = sim.zbar();
  Vec gbar = sim.gbar();
  Vec xbar = sim.xbar();
  rec.lemma4_res_s = (sbar - (gbar - inst.mu * xbar)).norm() / (1.0 + gbar.norm());
  rec.lemma4_res_z = (zbar - sim.zbar_accumulated()).norm() / (1.0 + zbar.norm());
  rec.cons_res_s = stack_consensus(sim.s_stack());
  rec.cons_res_z = stack_consensus(sim.z_stack());

  const double contraction = 1.0 / (1.0 + inst.mu * sched.A_t);
  double slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < inst.n; ++i) {
    double lhs = (sim.x(i) - sim.y()).norm();
    double rhs = contraction * (sim.z(i) - zbar).norm();
    slack = std::min(slack, rhs - lhs);
  }
  rec.lemma5_slack = slack;

  fill_common(rec, ctx, sim.x_stack());
  if (ctx.ref && ctx.rich) {
    rec.obj_gap_ytilde = inst.objective(sim.ytilde()) - ctx.ref->Fstar;
    double max_xy = 0.0, max_xx = 0.0, max_gap = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < inst.n; ++i) {
      Vec xt = sim.xtilde_stack().row(i).transpose();
      max_xy = std::max(max_xy, (xt - sim.ytilde()).squaredNorm());
      max_xx = std::max(max_xx, (xt - ctx.ref->xstar).squaredNorm());
      max_gap = std::max(max_gap, inst.objective(xt) - ctx.ref->Fstar);
    }
    rec.max_xtilde_ytilde_sq = max_xy;
    rec.max_xtilde_xstar_sq = max_xx;
    rec.max_obj_gap_xtilde = max_gap;
  }
  return rec;
}

MetricContext make_context(const ProblemInstance& inst, const RunOptions& opts, const Mat& X0) {
  MetricContext ctx{&inst, opts.reference ? &*opts.reference : nullptr, 0.0,
                    opts.rich_metrics};
  if (ctx.ref) ctx.rse_denom = rse_denominator(X0, ctx.ref->xstar);
  return ctx;
}

RunTrace make_trace(const char* name, const ProblemInstance& inst, double a,
                    const RunOptions& opts) {
  RunTrace trace;
  trace.algorithm = name;
  trace.seed = opts.seed;
  trace.a = a;
  trace.n = inst.n;
  trace.m = inst.m;
  trace.rounds.reserve(static_cast<std::size_t>(opts.T) + 1);
  return trace;
}

void store_final(RunTrace& trace, const Mat& X) {
  trace.final_x.clear();
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    trace.final_x.push_back(X.row(i).transpose());
}

}  // namespace

StepRule sqrt_decay_rule() {
  return [](long t) { return 1.0 / std::sqrt(static_cast<double>(t + 1)); };
}

RunTrace run_dda(const ProblemInstance& inst, const MixingModel& model, double a,
                 const RunOptions& opts) {
  if (model.n() != inst.n)
    throw PreconditionError("run_dda: network size does not match agent count");
  DdaSimulation sim(inst, a);
  if (opts.T > sim.schedule().safe_horizon())
    throw NumericalError("run_dda: weight schedule overflows double range before T = " +
                         std::to_string(opts.T) + "; safe horizon is " +
                         std::to_string(sim.schedule().safe_horizon()) + " rounds");
  RunTrace trace = make_trace("dda", inst, a, opts);
  MetricContext ctx = make_context(inst, opts, sim.x_stack());
  trace.rounds.push_back(dda_metrics(sim, ctx));
  auto rng = make_stream(opts.seed, "network");
  for (long t = 1; t <= opts.T; ++t) {
    sim.step(sample_validated(model, rng));
    trace.rounds.push_back(dda_metrics(sim, ctx));
  }
  store_final(trace, sim.x_stack());
  return trace;
}

RunTrace centralized_da(const ProblemInstance& inst, double a, const RunOptions& opts) {
  CentralizedDa da(inst, a);
  RunTrace trace = make_trace("centralized_da", inst, a, opts);
  MetricContext ctx{&inst, opts.reference ? &*opts.reference : nullptr, 0.0};
  if (ctx.ref) {
    double d0 = (da.x() - ctx.ref->xstar).squaredNorm();
    if (d0 == 0.0) throw PreconditionError("RSE undefined: x0 equals x*");
    ctx.rse_denom = d0;
  }
  auto record = [&](long t) {
    RoundRecord rec;
    rec.t = t;
    rec.a_t = da.schedule().a_t;
    rec.A_t = da.schedule().A_t;
    if (ctx.ref) {
      rec.rse = (da.x() - ctx.ref->xstar).squaredNorm() / ctx.rse_denom;
      rec.obj_gap_mean_x = inst.objective(da.x()) - ctx.ref->Fstar;
      // for the centralized method the Theorem-1 quantity lives on xtilde
      rec.obj_gap_ytilde = inst.objective(da.xtilde()) - ctx.ref->Fstar;
    }
    trace.rounds.push_back(rec);
  };
  record(0);
  for (long t = 1; t <= opts.T; ++t) {
    da.step();
    record(t);
  }
  trace.final_x.assign(1, da.x());
  return trace;
}

RunTrace run_cdda(const ProblemInstance& inst, const MixingModel& model,
                  const StepRule& rule, const RunOptions& opts) {
  if (model.n() != inst.n)
    throw PreconditionError("run_cdda: network size does not match agent count");
  const int n = inst.n;
  const int m = inst.m;
  const Vec& x0 = inst.d.center;
  const bool constrained = inst.h.constrained();
  Mat X = x0.transpose().replicate(n, 1);
  Mat Z = Mat::Zero(n, m);
  Mat R(n, m);
  auto local_subgrad = [&](int i, const Vec& xi) -> Vec {
    Vec g = inst.gradient(i, xi);
    check_finite(g, i, 0);
    if (!constrained && inst.h.kind == RegKind::L1)
      g += subgradient_l1(xi, inst.h.weight);
    return g;
  };
  for (int i = 0; i < n; ++i) R.row(i) = local_subgrad(i, x0).transpose();

  RunTrace trace = make_trace("cdda", inst, rule(0), opts);
  MetricContext ctx = make_context(inst, opts, X);
  auto record = [&](long t) {
    RoundRecord rec;
    rec.t = t;
    rec.cons_res_z = stack_consensus(Z);
    rec.cons_res_s = stack_consensus(X);
    fill_common(rec, ctx, X);
    trace.rounds.push_back(rec);
  };
  record(0);
  auto rng = make_stream(opts.seed, "network");
  for (long t = 1; t <= opts.T; ++t) {
    Mat P = sample_validated(model, rng);
    Z = P * Z + R;
    const double step = rule(t - 1);
    for (int i = 0; i < n; ++i) {
      Vec v = x0 - step * Z.row(i).transpose();
      Vec xi = constrained ? project_l1_ball(v, inst.h.radius) : v;
      X.row(i) = xi.transpose();
      R.row(i) = local_subgrad(i, xi).transpose();
    }
    record(t);
  }
  store_final(trace, X);
  return trace;
}

RunTrace run_dsm(const ProblemInstance& inst, const MixingModel& model,
                 const StepRule& rule, const RunOptions& opts) {
  if (inst.h.constrained())
    throw PreconditionError("DSM inapplicable: constrained regularizers are not supported");
  if (model.n() != inst.n)
    throw PreconditionError("run_dsm: network size does not match agent count");
  const int n = inst.n;
  const Vec& x0 = inst.d.center;
  Mat X = x0.transpose().replicate(n, 1);

  RunTrace trace = make_trace("dsm", inst, rule(0), opts);
  MetricContext ctx = make_context(inst, opts, X);
  auto subgrad = [&](int i, const Vec& xi) -> Vec {
    Vec g = inst.gradient(i, xi);
    check_finite(g, i, 0);
    if (inst.h.kind == RegKind::L1) g += subgradient_l1(xi, inst.h.weight);
    return g;
  };
  auto record = [&](long t) {
    RoundRecord rec;
    rec.t = t;
    rec.cons_res_s = stack_consensus(X);
    fill_common(rec, ctx, X);
    trace.rounds.push_back(rec);
  };
  record(0);
  auto rng = make_stream(opts.seed, "network");
  for (long t = 1; t <= opts.T; ++t) {
    Mat P = sample_validated(model, rng);
    Mat R(n, inst.m);
    for (int i = 0; i < n; ++i) R.row(i) = subgrad(i, X.row(i).transpose()).transpose();
    X = P * X - rule(t - 1) * R;
    record(t);
  }
  store_final(trace, X);
  return trace;
}

namespace {

// Shared driver for PG-EXTRA and P2D2; they differ only in the z recursion.
RunTrace run_extra_family(const char* name, bool p2d2, double alpha,
                          const ProblemInstance& inst, const MixingModel& model,
                          double a, const RunOptions& opts) {
  if (model.n() != inst.n)
    throw PreconditionError(std::string(name) + ": network size does not match agent count");
  if (!(a > 0.0)) throw PreconditionError(std::string(name) + ": step size must be positive");
  const int n = inst.n;
  const int m = inst.m;
  const Vec& x0 = inst.d.center;

  Mat Xprev2 = x0.transpose().replicate(n, 1);
  Mat Gprev2(n, m);
  for (int i = 0; i < n; ++i)
    Gprev2.row(i) = inst.gradient(i, x0).transpose();

  RunTrace trace = make_trace(name, inst, a, opts);
  MetricContext ctx = make_context(inst, opts, Xprev2);
  auto record = [&](long t, const Mat& X, const Mat& Z) {
    RoundRecord rec;
    rec.t = t;
    rec.cons_res_z = stack_consensus(Z);
    rec.cons_res_s = stack_consensus(X);
    fill_common(rec, ctx, X);
    trace.rounds.push_back(rec);
  };
  record(0, Xprev2, Mat::Zero(n, m));
  if (opts.T == 0) {
    store_final(trace, Xprev2);
    return trace;
  }

  auto rng = make_stream(opts.seed, "network");
  auto prox_rows = [&](const Mat& Z) {
    Mat X(n, m);
    for (int i = 0; i < n; ++i)
      X.row(i) = prox_step(inst.h, Z.row(i).transpose(), a).transpose();
    return X;
  };

  // Bootstrap round: z(1) = Ptilde x(0) - a grad(0), x(1) = prox(z(1)).
  Mat P = sample_validated(model, rng);
  Mat Ptilde = 0.5 * (Mat::Identity(n, n) + P);
  Mat Z = Ptilde * Xprev2 - a * Gprev2;
  Mat Xprev = prox_rows(Z);
  Mat Gprev(n, m);
  for (int i = 0; i < n; ++i) {
    Vec g = inst.gradient(i, Xprev.row(i).transpose());
    check_finite(g, i, 1);
    Gprev.row(i) = g.transpose();
  }
  record(1, Xprev, Z);

  for (long t = 2; t <= opts.T; ++t) {
    P = sample_validated(model, rng);
    Ptilde = 0.5 * (Mat::Identity(n, n) + P);
    if (p2d2) {
      // B = (I - P)/2; z(t) = (I - alpha B) z + (I - B)(x - xprev) - a (g - gprev)
      Mat B = 0.5 * (Mat::Identity(n, n) - P);
      Z = Z - alpha * (B * Z) + Ptilde * (Xprev - Xprev2) - a * (Gprev - Gprev2);
    } else {
      Z = Z - Xprev + Ptilde * (2.0 * Xprev - Xprev2) - a * (Gprev - Gprev2);
    }
    Mat X = prox_rows(Z);
    Xprev2 = Xprev;
    Gprev2 = Gprev;
    Xprev = X;
    for (int i = 0; i < n; ++i) {
      Vec g = inst.gradient(i, X.row(i).transpose());
      check_finite(g, i, t);
      Gprev.row(i) = g.transpose();
    }
    record(t, Xprev, Z);
  }
  store_final(trace, Xprev);
  return trace;
}

}  // namespace

RunTrace run_pg_extra(const ProblemInstance& inst, const MixingModel& model, double a,
                      const RunOptions& opts) {
  return run_extra_family("pg_extra", false, 0.0, inst, model, a, opts);
}

RunTrace run_p2d2(const ProblemInstance& inst, const MixingModel& model, double a,
                  double alpha, const RunOptions& opts) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw PreconditionError("p2d2: alpha must be in (0,1]");
  return run_extra_family("p2d2", true, alpha, inst, model, a, opts);
}

}  // namespace dda
