#include "dda/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dda/errors.hpp"

namespace dda {

namespace {

void check_constants(double a, double L, double mu, double beta, bool allow_zero_a = false) {
  if (!(L > 0.0) || L < mu || mu < 0.0)
    throw PreconditionError("analysis: need L >= mu >= 0, L > 0");
  if (!(beta > 0.0) || !(beta < 1.0))
    throw PreconditionError("analysis: beta must lie in (0,1)");
  if (allow_zero_a ? a < 0.0 : !(a > 0.0))
    throw PreconditionError("analysis: a must be positive");
  if (mu > 0.0 && a * mu >= 1.0)
    throw PreconditionError("analysis: a*mu must be below 1");
}

}  // namespace

Eigen::Matrix2d matrix_M(double a, double L, double mu, double beta) {
  check_constants(a, L, mu, beta, /*allow_zero_a=*/true);
  const double d = 1.0 - a * mu;
  Eigen::Matrix2d M;
  M(0, 0) = beta;
  M(0, 1) = beta;
  M(1, 0) = a * (L + mu) / d * (beta + 1.0 / d);
  M(1, 1) = (beta + a * beta * (L + mu)) / d;
  return M;
}

SpectralScalars nu_eta_theta(double a, double L, double mu, double beta) {
  check_constants(a, L, mu, beta, /*allow_zero_a=*/true);
  const double d = 1.0 - a * mu;
  SpectralScalars s;
  s.xi1 = beta * (2.0 + a * L) / d;
  s.xi2 = std::sqrt(a * a * beta * beta * L * L + 4.0 * a * beta * (beta + 1.0) * (L + mu)) / d;
  s.lambda1 = 0.5 * (s.xi1 + s.xi2);
  s.lambda2 = 0.5 * (s.xi1 - s.xi2);
  s.nu = s.lambda1 * std::sqrt(d);
  const double one_minus_nu = 1.0 - s.nu;
  s.eta_raw = d * one_minus_nu * one_minus_nu;
  s.theta_raw = d * (1.0 - s.nu * s.nu);
  // near the feasibility boundary 1 - nu is catastrophically cancellative;
  // clamp so downstream formulas see the correct sign
  s.eta = s.nu < 1.0 ? s.eta_raw : 0.0;
  s.theta = s.nu < 1.0 ? s.theta_raw : 0.0;
  return s;
}

Conditions check_conditions(double a, double L, double mu, double beta) {
  check_constants(a, L, mu, beta);
  Conditions c;
  const double omb = 1.0 - beta;
  c.cond16 = 1.0 / a > beta * (2.0 * L + 3.0 * mu) / (omb * omb) + mu;
  SpectralScalars s = nu_eta_theta(a, L, mu, beta);
  if (c.cond16 && s.eta > 0.0) {
    c.gamma = 1.0 / a - 2.0 * L + mu - (4.0 * L - 2.0 * mu) / s.eta;
    c.cond19 = c.gamma > 0.0;
  } else {
    c.gamma = -std::numeric_limits<double>::infinity();
    c.cond19 = false;
  }
  double m27 = std::max(beta / (omb * omb), 1.0 + 6.0 / ((1.0 - s.nu) * (1.0 - s.nu)));
  c.cond27 = s.nu < 1.0 && 1.0 / a > 2.0 * L * m27;
  return c;
}

double estimate_abar(double L, double mu, double beta, bool* third_term_applicable) {
  check_constants(0.0, L, mu, beta, /*allow_zero_a=*/true);  // validate L, mu, beta only
  const double omb = 1.0 - beta;
  if (third_term_applicable) *third_term_applicable = false;

  if (mu > 0.0) {
    const double t1 = 1.0 / (2.0 * mu);
    const double t2 = 1.0 / (beta * (2.0 * L + 3.0 * mu) / (omb * omb) + mu);
    const double kappa = L / mu;
    const double base = 1.0 - beta * (std::sqrt(2.0) + L / (2.0 * std::sqrt(2.0) * mu)) -
                        std::sqrt(beta * beta * L * L / (8.0 * mu * mu) +
                                  beta * (beta + 1.0) * (1.0 + kappa));
    if (base <= 0.0) return std::min(t1, t2);
    if (third_term_applicable) *third_term_applicable = true;
    const double q2 = base * base;
    const double t3 = q2 / ((2.0 * L - mu) * (4.0 + q2));
    return std::min({t1, t2, t3});
  }

  // mu = 0: both conditions are monotone in a, so the feasible set is an
  // interval (0, a*); locate a* by bisection and back off slightly.
  const double a16 = omb * omb / (beta * 2.0 * L);
  auto feasible = [&](double a) {
    Conditions c = check_conditions(a, L, mu, beta);
    return c.cond16 && c.cond19;
  };
  double lo = a16 * 1e-12;
  if (!feasible(lo))
    throw NumericalError("estimate_abar: no feasible step size found for mu = 0");
  double hi = a16;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.99 * lo;
}

std::pair<double, double> constants_CD(double a, double L, double mu, double beta, int n,
                                       double sigma_sq, double d_xstar) {
  Conditions c = check_conditions(a, L, mu, beta);
  SpectralScalars s = nu_eta_theta(a, L, mu, beta);
  if (!c.cond16 || !c.cond19 || !(s.theta > 0.0))
    throw PreconditionError("constants_CD: feasibility conditions fail for the given a");
  const double Lpmu2 = (L + mu) * (L + mu);
  const double C = d_xstar + a * (2.0 * L - mu) * sigma_sq / (n * s.theta * Lpmu2);
  const double D = 4.0 * n * C / (s.eta * c.gamma) + 2.0 * a * sigma_sq / (s.theta * Lpmu2);
  return {C, D};
}

AnalysisReport analyze(double a, double L, double mu, double beta, int n, double sigma_sq,
                       double d_xstar) {
  AnalysisReport rep;
  rep.a = a;
  rep.L = L;
  rep.mu = mu;
  rep.beta = beta;
  rep.n = n;
  rep.M = matrix_M(a, L, mu, beta);
  rep.spectral = nu_eta_theta(a, L, mu, beta);
  rep.conditions = check_conditions(a, L, mu, beta);
  rep.abar = estimate_abar(L, mu, beta, &rep.abar_third_term);
  rep.sigma_sq = sigma_sq;
  rep.d_xstar = d_xstar;
  if (std::isfinite(sigma_sq) && std::isfinite(d_xstar) && rep.conditions.cond16 &&
      rep.conditions.cond19) {
    auto [C, D] = constants_CD(a, L, mu, beta, n, sigma_sq, d_xstar);
    rep.C = C;
    rep.D = D;
  }
  return rep;
}

std::string AnalysisReport::to_text() const {
  std::ostringstream os;
  os.precision(12);
  os << "inputs:      a=" << a << " L=" << L << " mu=" << mu << " beta=" << beta
     << " n=" << n << "\n";
  os << "M:           [[" << M(0, 0) << ", " << M(0, 1) << "], [" << M(1, 0) << ", "
     << M(1, 1) << "]]\n";
  os << "eigenvalues: xi1=" << spectral.xi1 << " xi2=" << spectral.xi2
     << " lambda1=" << spectral.lambda1 << " lambda2=" << spectral.lambda2 << "\n";
  os << "spectral:    nu=" << spectral.nu << " eta=" << spectral.eta
     << " theta=" << spectral.theta << " (raw eta=" << spectral.eta_raw
     << ", raw theta=" << spectral.theta_raw << ")\n";
  os << "conditions:  cond16=" << (conditions.cond16 ? "yes" : "no")
     << " gamma=" << conditions.gamma << " cond19=" << (conditions.cond19 ? "yes" : "no")
     << " cond27=" << (conditions.cond27 ? "yes" : "no") << "\n";
  os << "step bound:  abar=" << abar
     << (abar_third_term ? " (third term active)" : " (third term inapplicable)") << "\n";
  os << "suggested a: {" << 0.1 * abar << ", " << 0.5 * abar << ", " << 0.9 * abar << "}\n";
  if (std::isfinite(sigma_sq)) os << "sigma^2:     " << sigma_sq << "\n";
  if (std::isfinite(d_xstar)) os << "d(x*):       " << d_xstar << "\n";
  if (std::isfinite(C)) os << "constants:   C=" << C << " D=" << D << "\n";
  return os.str();
}

std::string AnalysisReport::to_json() const {
  nlohmann::json j;
  j["a"] = a;
  j["L"] = L;
  j["mu"] = mu;
  j["beta"] = beta;
  j["n"] = n;
  j["M"] = {{M(0, 0), M(0, 1)}, {M(1, 0), M(1, 1)}};
  j["xi1"] = spectral.xi1;
  j["xi2"] = spectral.xi2;
  j["lambda1"] = spectral.lambda1;
  j["lambda2"] = spectral.lambda2;
  j["nu"] = spectral.nu;
  j["eta"] = spectral.eta;
  j["theta"] = spectral.theta;
  j["eta_raw"] = spectral.eta_raw;
  j["theta_raw"] = spectral.theta_raw;
  j["cond16"] = conditions.cond16;
  j["gamma"] = conditions.gamma;
  j["cond19"] = conditions.cond19;
  j["cond27"] = conditions.cond27;
  j["abar"] = abar;
  j["abar_third_term"] = abar_third_term;
  auto opt = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  j["sigma_sq"] = opt(sigma_sq);
  j["d_xstar"] = opt(d_xstar);
  j["C"] = opt(C);
  j["D"] = opt(D);
  return j.dump(2);
}

double rse(const std::vector<Vec>& x_t, const std::vector<Vec>& x_0, const Vec& xstar) {
  if (x_t.size() != x_0.size() || x_t.empty())
    throw PreconditionError("rse: mismatched or empty agent stacks");
  double num = 0.0, denom = 0.0;
  for (std::size_t i = 0; i < x_t.size(); ++i) {
    num += (x_t[i] - xstar).squaredNorm();
    denom += (x_0[i] - xstar).squaredNorm();
  }
  if (denom == 0.0) throw PreconditionError("rse: every agent starts at x*");
  return num / denom;
}

std::vector<double> bound_check(const RunTrace& trace, const AnalysisReport& report,
                                BoundMode mode) {
  if (!std::isfinite(report.C) || !std::isfinite(report.D))
    throw PreconditionError("bound_check: report lacks C/D (conditions or inputs missing)");
  if (mode == BoundMode::Corollary1 && !(report.mu > 0.0))
    throw PreconditionError("bound_check: Corollary 1 requires mu > 0");
  if (mode == BoundMode::Corollary2 && report.mu != 0.0)
    throw PreconditionError("bound_check: Corollary 2 requires mu = 0");

  std::vector<double> margins;
  margins.reserve(trace.rounds.size());
  for (const auto& rec : trace.rounds) {
    if (rec.t == 0) continue;
    double margin = std::numeric_limits<double>::infinity();
    switch (mode) {
      case BoundMode::Theorem2: {
        margin = std::min(report.C / rec.A_t - rec.obj_gap_ytilde,
                          report.D / rec.A_t - rec.max_xtilde_ytilde_sq);
        break;
      }
      case BoundMode::Corollary1: {
        const double decay = report.a / rec.a_t;  // (1 - a mu)^t
        double bound = (2.0 / report.a) * (2.0 * report.C / report.mu + report.D) * decay;
        margin = bound - rec.max_xtilde_xstar_sq;
        break;
      }
      case BoundMode::Corollary2: {
        const double at = report.a * static_cast<double>(rec.t);
        margin = std::min(report.C / at - rec.obj_gap_ytilde,
                          report.D / at - rec.max_xtilde_ytilde_sq);
        if (report.conditions.cond27) {
          // requires h == 0 and d = ||x||^2/2, so ||x*||^2 = 2 d(x*)
          double cst = report.n * report.d_xstar / report.a +
                       6.0 * report.sigma_sq /
                           (report.L * (1.0 - report.spectral.nu * report.spectral.nu));
          margin = std::min(margin, cst / rec.t - rec.max_obj_gap_xtilde);
        }
        break;
      }
    }
    margins.push_back(margin);
  }
  return margins;
}

}  // namespace dda
