#pragma once

#include "dda/types.hpp"

namespace dda {

enum class RegKind { Zero, L1, L1Ball };

// Shared non-smooth regularizer h. Three families: h == 0, h = phi*||x||_1,
// and the indicator of the l1 ball {x : ||x||_1 <= R}.
struct Regularizer {
  RegKind kind = RegKind::Zero;
  double weight = 0.0;  // phi, for L1
  double radius = 0.0;  // R, for L1Ball

  static Regularizer zero() { return {RegKind::Zero, 0.0, 0.0}; }
  static Regularizer l1(double phi);
  static Regularizer l1_ball(double R);

  // Extended-real value; +inf outside the ball for L1Ball.
  double evaluate(const Vec& x) const;
  bool in_domain(const Vec& x, double tol = 1e-12) const;
  bool constrained() const { return kind == RegKind::L1Ball; }
};

// Distance-generating function d(x) = 1/2 ||x - x0||^2. Strongly convex with
// modulus 1, minimized at x0 with d(x0) = 0.
struct DistanceGenerator {
  Vec center;

  double evaluate(const Vec& x) const { return 0.5 * (x - center).squaredNorm(); }
};

// Componentwise sign(v_k) * max(|v_k| - lam, 0); the minimizer of
// lam*||x||_1 + 1/2 ||x - v||^2.
Vec soft_threshold(const Vec& v, double lam);

// Euclidean projection onto {x : ||x||_1 <= R}, via exact sort-based pivot
// search. Returns v unchanged when it is already inside the ball.
Vec project_l1_ball(const Vec& v, double R);

// The unique minimizer of <z, x> + A_t*(mu/2 ||x||^2 + h(x)) + d(x).
Vec solve_primal(const Vec& z, double A_t, double mu, const Regularizer& h,
                 const DistanceGenerator& d);

// phi * sign(x) componentwise with sign(0) = 0; a minimal-norm element of
// the subdifferential of phi*||.||_1 at x.
Vec subgradient_l1(const Vec& x, double phi);

}  // namespace dda
