#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Eigenvalues>

#include "dda/types.hpp"

// Independent slow-but-simple reference computations the tests compare
// against. Nothing here shares code with the library.
namespace oracle {

// 1-D minimizer of g over [lo, hi] by coarse grid plus two refinements.
inline double grid_minimize(const std::function<double(double)>& g, double lo, double hi,
                            int points = 2001, int refinements = 3) {
  double best_x = lo, best_v = g(lo);
  for (int r = 0; r <= refinements; ++r) {
    double step = (hi - lo) / (points - 1);
    for (int k = 0; k < points; ++k) {
      double x = lo + k * step;
      double v = g(x);
      if (v < best_v) {
        best_v = v;
        best_x = x;
      }
    }
    lo = best_x - step;
    hi = best_x + step;
  }
  return best_x;
}

inline dda::Vec central_diff(const std::function<double(const dda::Vec&)>& f,
                             const dda::Vec& x) {
  dda::Vec g(x.size());
  const double h = 1e-6 * (1.0 + x.norm());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    dda::Vec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double lambda_max_dense(const dda::Mat& S) {
  Eigen::SelfAdjointEigenSolver<dda::Mat> es(0.5 * (S + S.transpose()));
  return es.eigenvalues().maxCoeff();
}

// Direct eigenvalues of a real 2x2 matrix, sorted descending (assumes real
// spectrum, which holds for the nonnegative matrices under test).
inline std::pair<double, double> eig2x2(const Eigen::Matrix2d& M) {
  double tr = M(0, 0) + M(1, 1);
  double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

// Uniform point in the l1 ball of radius R (sample signs and a Dirichlet-ish
// split; exact uniformity is irrelevant, coverage is what matters).
inline dda::Vec random_l1_point(int m, double R, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  dda::Vec v(m);
  double total = 0.0;
  for (int k = 0; k < m; ++k) {
    v[k] = exp1(rng);
    total += v[k];
  }
  double scale = R * std::pow(unif(rng), 1.0 / m) / total;
  for (int k = 0; k < m; ++k)
    if (unif(rng) < 0.5) v[k] = -v[k];
  return scale * v;
}

}  // namespace oracle
