#include <doctest.h>

#include <cmath>
#include <random>

#include "dda/analysis.hpp"
#include "dda/errors.hpp"
#include "dda/rng.hpp"
#include "oracles.hpp"

TEST_CASE("matrix M pinned values") {
  Eigen::Matrix2d M0 = dda::matrix_M(0.0, 1.0, 0.5, 0.4);
  CHECK(M0(0, 0) == 0.4);
  CHECK(M0(0, 1) == 0.4);
  CHECK(M0(1, 0) == 0.0);
  CHECK(M0(1, 1) == 0.4);

  Eigen::Matrix2d M = dda::matrix_M(0.1, 1.0, 0.5, 0.5);
  CHECK(M(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(M(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(M(1, 0) == doctest::Approx(0.24515235457063714).epsilon(1e-14));
  CHECK(M(1, 1) == doctest::Approx(0.6052631578947368).epsilon(1e-14));
  CHECK(M.minCoeff() >= 0.0);

  CHECK_THROWS_AS(dda::matrix_M(2.1, 1.0, 0.5, 0.5), dda::PreconditionError);
  CHECK_THROWS_AS(dda::matrix_M(0.1, 1.0, 0.5, 1.5), dda::PreconditionError);
}

TEST_CASE("spectral scalars pinned values") {
  dda::SpectralScalars s = dda::nu_eta_theta(0.1, 1.0, 0.5, 0.5);
  CHECK(s.xi1 == doctest::Approx(1.105263157894737).epsilon(1e-14));
  CHECK(s.xi2 == doctest::Approx(0.7080854761617743).epsilon(1e-13));
  CHECK(s.lambda1 == doctest::Approx(0.9066743170282556).epsilon(1e-13));
  CHECK(s.lambda2 == doctest::Approx(0.19858884086648132).epsilon(1e-12));
  CHECK(s.nu == doctest::Approx(0.8837168105794531).epsilon(1e-13));
  CHECK(s.eta == doctest::Approx(0.01284569113472406).epsilon(1e-10));
  CHECK(s.theta == doctest::Approx(0.20809236876431508).epsilon(1e-12));

  // a -> 0 limit: nu = beta
  dda::SpectralScalars s0 = dda::nu_eta_theta(0.0, 1.0, 0.5, 0.37);
  CHECK(s0.nu == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("eigenvalue grid: closed form vs direct solve, monotone nu") {
  auto rng = dda::make_stream(41, "test");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  while (checked < 10000) {
    double L = std::pow(10.0, -1.0 + 3.0 * unif(rng));
    double mu = L * std::pow(10.0, -4.0 * unif(rng));
    double beta = 0.001 + 0.998 * unif(rng);
    double a = unif(rng) * 0.99 / mu;
    Eigen::Matrix2d M = dda::matrix_M(a, L, mu, beta);
    dda::SpectralScalars s = dda::nu_eta_theta(a, L, mu, beta);
    auto [l1, l2] = oracle::eig2x2(M);
    double scale = std::max(1.0, std::abs(l1));
    CHECK(std::abs(s.lambda1 - l1) <= 1e-12 * scale);
    CHECK(std::abs(s.lambda2 - l2) <= 1e-12 * scale);
    // characteristic polynomial at lambda1
    double tr = M(0, 0) + M(1, 1);
    double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    double p = s.lambda1 * s.lambda1 - tr * s.lambda1 + det;
    CHECK(std::abs(p) <= 1e-10 * scale * scale);
    // nu strictly increasing in a
    dda::SpectralScalars s2 = dda::nu_eta_theta(a * 1.01, L, mu, beta);
    CHECK(s2.nu > s.nu);
    ++checked;
  }
}

TEST_CASE("conditions pinned thresholds") {
  // (L, mu, beta) = (1, 0.5, 0.5): cond16 iff 1/a > 7.5 + 0.5
  dda::Conditions below = dda::check_conditions(2.0 / 15.0 - 1e-9, 1.0, 0.5, 0.5);
  CHECK(below.cond16);
  dda::Conditions above = dda::check_conditions(2.0 / 15.0 + 1e-6, 1.0, 0.5, 0.5);
  CHECK_FALSE(above.cond16);
  CHECK(above.gamma == -std::numeric_limits<double>::infinity());
  CHECK_FALSE(above.cond19);

  // cond16 implies nu < 1 and positive eta, theta
  dda::SpectralScalars s = dda::nu_eta_theta(2.0 / 15.0 - 1e-9, 1.0, 0.5, 0.5);
  CHECK(s.nu < 1.0);
  CHECK(s.eta > 0.0);
  CHECK(s.theta > 0.0);
}

TEST_CASE("abar pinned values and guarantee") {
  bool third = false;
  double ab = dda::estimate_abar(1.0, 0.5, 0.1, &third);
  CHECK(third);
  CHECK(ab == doctest::Approx(0.007206714236150274).epsilon(1e-13));

  double ab2 = dda::estimate_abar(1.0, 0.5, 0.5, &third);
  CHECK_FALSE(third);
  CHECK(ab2 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));

  // within the lemma's domain (third term applicable), every a < abar
  // satisfies both conditions
  auto rng = dda::make_stream(42, "test");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  while (checked < 10000) {
    double L = std::pow(10.0, -1.0 + 2.0 * unif(rng));
    double mu = L * std::pow(10.0, -2.0 * unif(rng));
    double beta = 0.001 + 0.3 * unif(rng);
    bool ok = false;
    double abar = dda::estimate_abar(L, mu, beta, &ok);
    if (!ok) continue;
    for (double f : {0.1, 0.5, 0.99}) {
      dda::Conditions c = dda::check_conditions(f * abar, L, mu, beta);
      CHECK(c.cond16);
      CHECK(c.cond19);
    }
    checked += 3;
  }

  // eta and theta strictly decreasing below abar
  dda::SpectralScalars lo = dda::nu_eta_theta(0.3 * ab, 1.0, 0.5, 0.1);
  dda::SpectralScalars hi = dda::nu_eta_theta(0.9 * ab, 1.0, 0.5, 0.1);
  CHECK(hi.eta < lo.eta);
  CHECK(hi.theta < lo.theta);
}

TEST_CASE("abar asymptotics and monotonicity") {
  // kappa -> inf, beta -> 1: abar = Theta((1-beta)^2 / L); log-log slope vs
  // (1-beta) approaches 2
  double L = 100.0, mu = 0.01;
  double b1 = 0.99, b2 = 0.999;
  double r = std::log(dda::estimate_abar(L, mu, b2) / dda::estimate_abar(L, mu, b1)) /
             std::log((1.0 - b2) / (1.0 - b1));
  CHECK(r == doctest::Approx(2.0).epsilon(0.05));

  // monotone in beta within each regime of the three-term formula; the
  // value jumps upward where the third term stops being applicable
  bool third = false;
  double prev = dda::estimate_abar(1.0, 0.5, 0.01, &third);
  CHECK(third);
  for (double beta : {0.02, 0.05, 0.08, 0.1}) {
    double cur = dda::estimate_abar(1.0, 0.5, beta, &third);
    CHECK(third);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
  prev = dda::estimate_abar(1.0, 0.5, 0.3, &third);
  CHECK_FALSE(third);
  for (double beta : {0.4, 0.6, 0.8, 0.95}) {
    double cur = dda::estimate_abar(1.0, 0.5, beta, &third);
    CHECK_FALSE(third);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
}

TEST_CASE("abar mu=0 branch") {
  double ab = dda::estimate_abar(1.0, 0.0, 0.3);
  CHECK(ab > 0.0);
  dda::Conditions c = dda::check_conditions(ab, 1.0, 0.0, 0.3);
  CHECK(c.cond16);
  CHECK(c.cond19);
  dda::Conditions c2 = dda::check_conditions(ab / 0.99 * 1.05, 1.0, 0.0, 0.3);
  CHECK_FALSE(c2.cond19);
}

TEST_CASE("constants C and D") {
  double a = 0.5 * dda::estimate_abar(1.0, 0.5, 0.1);
  // sigma = 0: C = d(x*), D = 4nC/(eta gamma)
  auto [C0, D0] = dda::constants_CD(a, 1.0, 0.5, 0.1, 4, 0.0, 0.25);
  CHECK(C0 == doctest::Approx(0.25).epsilon(1e-15));
  dda::SpectralScalars s = dda::nu_eta_theta(a, 1.0, 0.5, 0.1);
  dda::Conditions c = dda::check_conditions(a, 1.0, 0.5, 0.1);
  CHECK(D0 == doctest::Approx(4.0 * 4.0 * C0 / (s.eta * c.gamma)).epsilon(1e-13));

  // independent formula evaluation
  double sig = 1.7, dx = 0.4;
  auto [C, D] = dda::constants_CD(a, 1.0, 0.5, 0.1, 4, sig, dx);
  double Cw = dx + a * (2.0 - 0.5) * sig / (4.0 * s.theta * 1.5 * 1.5);
  double Dw = 4.0 * 4.0 * Cw / (s.eta * c.gamma) + 2.0 * a * sig / (s.theta * 1.5 * 1.5);
  CHECK(C == doctest::Approx(Cw).epsilon(1e-13));
  CHECK(D == doctest::Approx(Dw).epsilon(1e-13));
  // linearity of C - d(x*) in sigma^2
  auto [C2, D2] = dda::constants_CD(a, 1.0, 0.5, 0.1, 4, 2.0 * sig, dx);
  CHECK(C2 - dx == doctest::Approx(2.0 * (C - dx)).epsilon(1e-12));

  CHECK_THROWS_AS(dda::constants_CD(1.0, 1.0, 0.5, 0.5, 4, sig, dx),
                  dda::PreconditionError);
}

TEST_CASE("rse basics") {
  dda::Vec xstar = dda::Vec::Ones(2);
  std::vector<dda::Vec> x0 = {dda::Vec::Zero(2), 3.0 * dda::Vec::Ones(2)};
  CHECK(dda::rse(x0, x0, xstar) == doctest::Approx(1.0));
  std::vector<dda::Vec> at_star = {xstar, xstar};
  CHECK(dda::rse(at_star, x0, xstar) == doctest::Approx(0.0).scale(1));
  // hand evaluation: num = ||(2,2)-(1,1)||^2 + 0 = 2; denom = 2 + 8 = 10
  std::vector<dda::Vec> xt = {2.0 * dda::Vec::Ones(2), xstar};
  CHECK(dda::rse(xt, x0, xstar) == doctest::Approx(0.2));
  CHECK_THROWS_AS(dda::rse(at_star, at_star, xstar), dda::PreconditionError);
}

TEST_CASE("report serialization") {
  dda::AnalysisReport rep = dda::analyze(0.003, 1.0, 0.5, 0.1, 4, 1.7, 0.4);
  std::string text = rep.to_text();
  CHECK(text.find("nu=") != std::string::npos);
  CHECK(text.find("abar=") != std::string::npos);
  std::string json = rep.to_json();
  CHECK(json.find("\"cond16\": true") != std::string::npos);
  CHECK(json.find("\"C\":") != std::string::npos);
}
