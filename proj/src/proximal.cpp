#include "dda/proximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dda/errors.hpp"

namespace dda {

Regularizer Regularizer::l1(double phi) {
  if (phi < 0.0) throw PreconditionError("l1 weight must be nonnegative");
  return {RegKind::L1, phi, 0.0};
}

Regularizer Regularizer::l1_ball(double R) {
  if (!(R > 0.0)) throw PreconditionError("l1 ball radius must be positive");
  return {RegKind::L1Ball, 0.0, R};
}

double Regularizer::evaluate(const Vec& x) const {
  switch (kind) {
    case RegKind::Zero:
      return 0.0;
    case RegKind::L1:
      return weight * x.lpNorm<1>();
    case RegKind::L1Ball:
      return x.lpNorm<1>() <= radius * (1.0 + 1e-12)
                 ? 0.0
                 : std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

bool Regularizer::in_domain(const Vec& x, double tol) const {
  if (kind != RegKind::L1Ball) return true;
  return x.lpNorm<1>() <= radius * (1.0 + tol);
}

Vec soft_threshold(const Vec& v, double lam) {
  if (lam < 0.0) throw PreconditionError("soft_threshold: lambda must be nonnegative");
  Vec out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    double a = std::abs(v[k]) - lam;
    out[k] = a > 0.0 ? (v[k] > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

Vec project_l1_ball(const Vec& v, double R) {
  if (!(R > 0.0)) throw PreconditionError("project_l1_ball: R must be positive");
  if (v.lpNorm<1>() <= R) return v;

  // Sort |v| descending and locate the pivot tau with
  // sum_k max(|v|_k - tau, 0) = R; the projection is soft_threshold(v, tau).
  std::vector<double> u(v.data(), v.data() + v.size());
  for (auto& x : u) x = std::abs(x);
  std::sort(u.begin(), u.end(), std::greater<double>());

  double cum = 0.0;
  double tau = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    double cand = (cum - R) / static_cast<double>(k + 1);
    if (k + 1 == u.size() || u[k + 1] <= cand) {
      tau = cand;
      break;
    }
  }
  return soft_threshold(v, tau);
}

Vec solve_primal(const Vec& z, double A_t, double mu, const Regularizer& h,
                 const DistanceGenerator& d) {
  if (A_t < 0.0) throw PreconditionError("solve_primal: A_t must be nonnegative");
  const double denom = 1.0 + mu * A_t;
  Vec w = (d.center - z) / denom;
  switch (h.kind) {
    case RegKind::Zero:
      return w;
    case RegKind::L1:
      return soft_threshold(w, A_t * h.weight / denom);
    case RegKind::L1Ball:
      return project_l1_ball(w, h.radius);
  }
  return w;
}

Vec subgradient_l1(const Vec& x, double phi) {
  Vec g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k)
    g[k] = x[k] > 0.0 ? phi : (x[k] < 0.0 ? -phi : 0.0);
  return g;
}

}  // namespace dda
