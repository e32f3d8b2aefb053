#include <doctest.h>

#include <random>

#include "dda/proximal.hpp"
#include "dda/rng.hpp"
#include "oracles.hpp"

using dda::Vec;

TEST_CASE("soft threshold basics") {
  Vec v(1);
  v << 3.0;
  CHECK(dda::soft_threshold(v, 1.0)(0) == doctest::Approx(2.0));
  v << -0.5;
  CHECK(dda::soft_threshold(v, 1.0)(0) == 0.0);

  Vec w(3);
  w << 2.0, -3.0, 0.1;
  Vec out = dda::soft_threshold(w, 0.5);
  for (int k = 0; k < 3; ++k) {
    double vk = w(k);
    double xk = oracle::grid_minimize(
        [&](double x) { return 0.5 * std::abs(x) + 0.5 * (x - vk) * (x - vk); }, -5.0, 5.0);
    CHECK(out(k) == doctest::Approx(xk).epsilon(0).scale(1).epsilon(1e-6));
  }
}

TEST_CASE("soft threshold vs grid oracle on random instances") {
  auto rng = dda::make_stream(11, "test");
  std::uniform_real_distribution<double> vdist(-4.0, 4.0), ldist(0.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    double vk = vdist(rng), lam = ldist(rng);
    Vec v(1);
    v << vk;
    double got = dda::soft_threshold(v, lam)(0);
    double want = oracle::grid_minimize(
        [&](double x) { return lam * std::abs(x) + 0.5 * (x - vk) * (x - vk); }, -6.0, 6.0);
    CHECK(std::abs(got - want) <= 1e-6);
  }
}

TEST_CASE("l1 ball projection pinned examples") {
  Vec v(2);
  v << 0.3, -0.2;
  CHECK((dda::project_l1_ball(v, 1.0) - v).norm() == 0.0);
  v << 2.0, 1.0;
  Vec p = dda::project_l1_ball(v, 1.0);
  CHECK(p(0) == doctest::Approx(1.0));
  CHECK(p(1) == doctest::Approx(0.0).scale(1));
  v << -3.0, 0.0;
  p = dda::project_l1_ball(v, 1.0);
  CHECK(p(0) == doctest::Approx(-1.0));
  CHECK(p(1) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("l1 ball projection KKT residual on random instances") {
  auto rng = dda::make_stream(12, "test");
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> rdist(0.1, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    int m = 1 + static_cast<int>(rng() % 8);
    double R = rdist(rng);
    Vec v(m);
    for (int k = 0; k < m; ++k) v(k) = 2.0 * gauss(rng);
    Vec p = dda::project_l1_ball(v, R);
    CHECK(p.cwiseAbs().sum() <= R + 1e-12);
    if (v.cwiseAbs().sum() <= R) {
      CHECK((p - v).norm() <= 1e-14);
      continue;
    }
    // KKT: p = soft_threshold(v, tau) for the tau that makes ||p||_1 = R
    CHECK(p.cwiseAbs().sum() == doctest::Approx(R).epsilon(1e-10));
    double tau = -1.0;
    for (int k = 0; k < m; ++k)
      if (p(k) != 0.0) tau = std::abs(v(k)) - std::abs(p(k));
    REQUIRE(tau >= -1e-12);
    for (int k = 0; k < m; ++k) {
      double want = std::copysign(std::max(std::abs(v(k)) - tau, 0.0), v(k));
      CHECK(std::abs(p(k) - want) <= 1e-8);
    }
  }
}

TEST_CASE("l1 ball projection idempotent and non-expansive") {
  auto rng = dda::make_stream(13, "test");
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 200; ++trial) {
    Vec u(5), v(5);
    for (int k = 0; k < 5; ++k) {
      u(k) = 3.0 * gauss(rng);
      v(k) = 3.0 * gauss(rng);
    }
    Vec pu = dda::project_l1_ball(u, 1.5), pv = dda::project_l1_ball(v, 1.5);
    CHECK((dda::project_l1_ball(pu, 1.5) - pu).norm() <= 1e-12);
    CHECK((pu - pv).norm() <= (u - v).norm() + 1e-12);
  }
}

TEST_CASE("solve_primal closed forms") {
  dda::DistanceGenerator d{Vec::Zero(2)};
  Vec z(2);
  z << 1.0, -2.0;
  Vec x = dda::solve_primal(z, 2.0, 0.5, dda::Regularizer::zero(), d);
  CHECK(x(0) == doctest::Approx(-0.5));
  CHECK(x(1) == doctest::Approx(1.0));
  // stationarity cross-check by finite differences of the full objective
  auto obj = [&](const Vec& y) {
    return z.dot(y) + 2.0 * (0.25 * y.squaredNorm()) + d.evaluate(y);
  };
  CHECK(oracle::central_diff(obj, x).norm() <= 1e-6);

  dda::DistanceGenerator d3{Vec::Ones(3)};
  Vec z0 = Vec::Zero(3);
  Vec back = dda::solve_primal(z0, 0.0, 0.7, dda::Regularizer::l1(0.3), d3);
  CHECK((back - d3.center).norm() <= 1e-14);
}

TEST_CASE("solve_primal variational inequality for the ball constraint") {
  auto rng = dda::make_stream(14, "test");
  std::normal_distribution<double> gauss;
  const int m = 6;
  dda::DistanceGenerator d{Vec::Zero(m)};
  dda::Regularizer h = dda::Regularizer::l1_ball(1.2);
  for (int trial = 0; trial < 100; ++trial) {
    Vec z(m);
    for (int k = 0; k < m; ++k) z(k) = 2.0 * gauss(rng);
    double A_t = 0.5 + (rng() % 100) / 25.0;
    double mu = (rng() % 2) ? 0.4 : 0.0;
    Vec x = dda::solve_primal(z, A_t, mu, h, d);
    CHECK(x.cwiseAbs().sum() <= 1.2 + 1e-12);
    Vec grad = z + mu * A_t * x + (x - d.center);
    for (int s = 0; s < 100; ++s) {
      Vec y = oracle::random_l1_point(m, 1.2, rng);
      CHECK(grad.dot(y - x) >= -1e-8);
    }
  }
}

TEST_CASE("solve_primal is a contraction in z") {
  auto rng = dda::make_stream(15, "test");
  std::normal_distribution<double> gauss;
  dda::DistanceGenerator d{Vec::Zero(4)};
  dda::Regularizer h = dda::Regularizer::l1(0.2);
  for (int trial = 0; trial < 200; ++trial) {
    Vec z1(4), z2(4);
    for (int k = 0; k < 4; ++k) {
      z1(k) = gauss(rng);
      z2(k) = gauss(rng);
    }
    double A_t = 3.0, mu = 0.5;
    Vec x1 = dda::solve_primal(z1, A_t, mu, h, d);
    Vec x2 = dda::solve_primal(z2, A_t, mu, h, d);
    CHECK((x1 - x2).norm() <= (z1 - z2).norm() / (1.0 + mu * A_t) + 1e-12);
  }
}

TEST_CASE("l1 subgradient") {
  Vec x(2);
  x << 2.0, -1.0;
  Vec g = dda::subgradient_l1(x, 1.0);
  CHECK(g(0) == 1.0);
  CHECK(g(1) == -1.0);
  CHECK(dda::subgradient_l1(Vec::Zero(3), 1.0).norm() == 0.0);

  auto rng = dda::make_stream(16, "test");
  std::normal_distribution<double> gauss;
  const double phi = 0.7;
  for (int trial = 0; trial < 200; ++trial) {
    Vec xx(3), yy(3);
    for (int k = 0; k < 3; ++k) {
      xx(k) = gauss(rng);
      yy(k) = gauss(rng);
    }
    Vec gg = dda::subgradient_l1(xx, phi);
    CHECK(phi * yy.cwiseAbs().sum() >=
          phi * xx.cwiseAbs().sum() + gg.dot(yy - xx) - 1e-12);
  }
}
