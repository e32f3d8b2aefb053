#include "dda/problems.hpp"

#include <Eigen/QR>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dda/errors.hpp"
#include "dda/rng.hpp"

namespace dda {

namespace {

// log(1 + exp(u)) without overflow for large |u|.
double softplus(double u) {
  return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double sigmoid(double u) {
  return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

void check_dim(Eigen::Index expected, const Vec& x, const char* who) {
  if (x.size() != expected)
    throw PreconditionError(std::string(who) + ": dimension mismatch, expected " +
                            std::to_string(expected) + ", got " + std::to_string(x.size()));
}

}  // namespace

double logistic_value(const LogisticAgent& a, const Vec& x) {
  check_dim(a.features.cols(), x, "logistic_value");
  Vec t = a.features * x;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) acc += softplus(-a.labels[j] * t[j]);
  return acc / static_cast<double>(t.size()) + 0.5 * a.ridge_mu * x.squaredNorm();
}

Vec logistic_gradient(const LogisticAgent& a, const Vec& x) {
  check_dim(a.features.cols(), x, "logistic_gradient");
  Vec t = a.features * x;
  Vec w(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j)
    w[j] = -a.labels[j] * sigmoid(-a.labels[j] * t[j]);
  return a.features.transpose() * w / static_cast<double>(t.size()) + a.ridge_mu * x;
}

double lasso_value(const LassoAgent& a, const Vec& x) {
  check_dim(a.C.cols(), x, "lasso_value");
  return 0.5 * (a.b - a.C * x).squaredNorm();
}

Vec lasso_gradient(const LassoAgent& a, const Vec& x) {
  check_dim(a.C.cols(), x, "lasso_gradient");
  return a.C.transpose() * (a.C * x - a.b);
}

double AgentObjective::value(const Vec& x) const {
  return std::visit(
      [&](const auto& a) -> double {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, LogisticAgent>) return logistic_value(a, x);
        if constexpr (std::is_same_v<T, LassoAgent>) return lasso_value(a, x);
        if constexpr (std::is_same_v<T, QuadraticAgent>)
          return 0.5 * x.dot(a.Q * x) + a.q.dot(x) + a.c;
      },
      data);
}

Vec AgentObjective::gradient(const Vec& x) const {
  return std::visit(
      [&](const auto& a) -> Vec {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, LogisticAgent>) return logistic_gradient(a, x);
        if constexpr (std::is_same_v<T, LassoAgent>) return lasso_gradient(a, x);
        if constexpr (std::is_same_v<T, QuadraticAgent>) return Vec(a.Q * x + a.q);
      },
      data);
}

double ProblemInstance::f_avg(const Vec& x) const {
  double acc = 0.0;
  for (const auto& a : locals) acc += a.value(x);
  return acc / static_cast<double>(n);
}

Vec ProblemInstance::grad_avg(const Vec& x) const {
  Vec g = Vec::Zero(m);
  for (const auto& a : locals) g += a.gradient(x);
  return g / static_cast<double>(n);
}

double power_lambda_max(const Mat& S, double tol, int max_iter) {
  const Eigen::Index m = S.rows();
  if (m == 0) return 0.0;
  Vec v = Vec::Ones(m);
  // break symmetry so the start vector is never orthogonal to the top space
  for (Eigen::Index k = 0; k < m; ++k) v[k] += 1e-3 * static_cast<double>(k + 1) / m;
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec w = S * v;
    double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    lam = v.dot(S * v);
    double resid = (S * v - lam * v).norm();
    if (resid <= tol * std::max(1.0, std::abs(lam))) return lam;
  }
  double resid = (S * v - lam * v).norm();
  throw NumericalError("power iteration did not converge, residual " + std::to_string(resid));
}

namespace {

double power_lambda_min(const Mat& S, double tol = 1e-10, int max_iter = 10000) {
  double lmax = power_lambda_max(S, tol, max_iter);
  double shift = 1.01 * lmax + 1.0;
  double top = power_lambda_max(shift * Mat::Identity(S.rows(), S.cols()) - S, tol, max_iter);
  double lmin = shift - top;
  return lmin > 0.0 ? lmin : 0.0;  // rank-deficient gram matrices
}

}  // namespace

std::pair<double, double> estimate_constants(const ProblemInstance& inst) {
  double L = 0.0;
  double mu = std::numeric_limits<double>::infinity();
  for (const auto& a : inst.locals) {
    std::visit(
        [&](const auto& obj) {
          using T = std::decay_t<decltype(obj)>;
          if constexpr (std::is_same_v<T, LogisticAgent>) {
            Mat S = obj.features.transpose() * obj.features;
            double li = power_lambda_max(S) / (4.0 * obj.features.rows()) + obj.ridge_mu;
            L = std::max(L, li);
            mu = std::min(mu, obj.ridge_mu);
          } else if constexpr (std::is_same_v<T, LassoAgent>) {
            Mat S = obj.C.transpose() * obj.C;
            L = std::max(L, power_lambda_max(S));
            mu = std::min(mu, power_lambda_min(S));
          } else if constexpr (std::is_same_v<T, QuadraticAgent>) {
            L = std::max(L, power_lambda_max(obj.Q));
            mu = std::min(mu, power_lambda_min(obj.Q));
          }
        },
        a.data);
  }
  return {L, mu};
}

AgentDataset load_csv_partitioned(const std::string& path, int n, int samples_total) {
  if (n <= 0 || samples_total <= 0)
    throw ConfigError("load_csv_partitioned: n and samples_total must be positive");
  if (samples_total % n != 0)
    throw ConfigError("load_csv_partitioned: samples_total " + std::to_string(samples_total) +
                      " not divisible by n = " + std::to_string(n));
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset: " + path);

  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool first = true;
  Eigen::Index ncols = -1;
  while (std::getline(in, line) && static_cast<int>(rows.size()) < samples_total) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;  // header row
        continue;
      }
      throw ConfigError(path + ": malformed row at line " + std::to_string(lineno));
    }
    first = false;
    if (row.size() < 2)
      throw ConfigError(path + ": row at line " + std::to_string(lineno) + " has too few columns");
    if (ncols < 0) ncols = static_cast<Eigen::Index>(row.size());
    if (static_cast<Eigen::Index>(row.size()) != ncols)
      throw ConfigError(path + ": inconsistent column count at line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (static_cast<int>(rows.size()) < samples_total)
    throw ConfigError(path + ": only " + std::to_string(rows.size()) + " usable rows, need " +
                      std::to_string(samples_total));

  const int m = static_cast<int>(ncols) - 1;
  Mat X(samples_total, m);
  Vec y(samples_total);
  for (int r = 0; r < samples_total; ++r) {
    for (int c = 0; c < m; ++c) X(r, c) = rows[r][c];
    double lab = rows[r][m];
    if (lab == 0.0) lab = -1.0;
    if (lab != 1.0 && lab != -1.0)
      throw ConfigError(path + ": label must be in {0,1} or {-1,+1}, got " + std::to_string(lab));
    y[r] = lab;
  }

  // standardize features over the retained rows
  for (int c = 0; c < m; ++c) {
    double mean = X.col(c).mean();
    X.col(c).array() -= mean;
    double sd = std::sqrt(X.col(c).squaredNorm() / samples_total);
    if (sd > 0.0) X.col(c) /= sd;
  }

  const int per = samples_total / n;
  AgentDataset out;
  out.features.assign(n, Mat(per, m));
  out.labels.assign(n, Vec(per));
  std::vector<int> fill(n, 0);
  for (int r = 0; r < samples_total; ++r) {
    int agent = r % n;
    out.features[agent].row(fill[agent]) = X.row(r);
    out.labels[agent][fill[agent]] = y[r];
    ++fill[agent];
  }
  return out;
}

ProblemInstance make_logistic_instance(AgentDataset data, double mu, double phi) {
  ProblemInstance inst;
  inst.n = static_cast<int>(data.features.size());
  inst.m = static_cast<int>(data.features.front().cols());
  for (int i = 0; i < inst.n; ++i)
    inst.locals.push_back({LogisticAgent{std::move(data.features[i]), std::move(data.labels[i]), mu}});
  inst.h = phi > 0.0 ? Regularizer::l1(phi) : Regularizer::zero();
  inst.d = {Vec::Zero(inst.m)};
  auto [L, mu_est] = estimate_constants(inst);
  inst.L = L;
  inst.mu = mu_est;
  return inst;
}

ProblemInstance generate_logistic_instance(std::uint64_t seed, int n, int rows_per_agent,
                                           int m, double mu, double phi) {
  auto rng = make_stream(seed, "data");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec w(m);
  for (int k = 0; k < m; ++k) w[k] = normal(rng);
  AgentDataset data;
  for (int i = 0; i < n; ++i) {
    Mat M(rows_per_agent, m);
    Vec y(rows_per_agent);
    for (int r = 0; r < rows_per_agent; ++r) {
      for (int c = 0; c < m; ++c) M(r, c) = normal(rng);
      double margin = M.row(r).dot(w) / std::sqrt(static_cast<double>(m)) + 0.3 * normal(rng);
      y[r] = margin >= 0.0 ? 1.0 : -1.0;
    }
    data.features.push_back(std::move(M));
    data.labels.push_back(std::move(y));
  }
  return make_logistic_instance(std::move(data), mu, phi);
}

ProblemInstance generate_lasso_instance(std::uint64_t seed, int n, int rows_per_agent,
                                        int m, double nonzero_prob, double noise_std,
                                        double ball_factor, Vec* xsharp_out) {
  if (n <= 0 || rows_per_agent <= 0 || m <= 0)
    throw PreconditionError("generate_lasso_instance: sizes must be positive");
  auto rng = make_stream(seed, "data");
  auto noise_rng = make_stream(seed, "noise");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Vec xsharp = Vec::Zero(m);
  for (int k = 0; k < m; ++k)
    if (unif(rng) < nonzero_prob) xsharp[k] = normal(rng);
  double R = ball_factor * xsharp.lpNorm<1>();
  if (!(R > 0.0))
    throw PreconditionError("generate_lasso_instance: ball radius is zero (no nonzeros drawn)");

  std::vector<Mat> Cs(n);
  for (int i = 0; i < n; ++i) {
    Cs[i] = Mat(rows_per_agent, m);
    for (int r = 0; r < rows_per_agent; ++r)
      for (int c = 0; c < m; ++c) Cs[i](r, c) = normal(rng);
  }

  // Rescale to global lambda_max = 1, then blend each Gram matrix toward the
  // identity (realized as sqrt(rho)*I rows) so the smallest eigenvalue
  // becomes exactly 0.5 while the largest stays 1.
  double gmax = 0.0;
  for (const auto& C : Cs) gmax = std::max(gmax, power_lambda_max(Mat(C.transpose() * C)));
  double lmin_min = std::numeric_limits<double>::infinity();
  double lmax_max = 0.0;
  for (auto& C : Cs) {
    C /= std::sqrt(gmax);
    Eigen::SelfAdjointEigenSolver<Mat> es(C.transpose() * C);
    lmin_min = std::min(lmin_min, std::max(0.0, es.eigenvalues().minCoeff()));
    lmax_max = std::max(lmax_max, es.eigenvalues().maxCoeff());
  }
  double rho = (0.5 - lmin_min) / (1.0 - lmin_min);

  ProblemInstance inst;
  inst.n = n;
  inst.m = m;
  for (int i = 0; i < n; ++i) {
    Mat C(rows_per_agent + m, m);
    C.topRows(rows_per_agent) = std::sqrt(1.0 - rho) * Cs[i];
    C.bottomRows(m) = std::sqrt(rho) * Mat::Identity(m, m);
    Vec eps(C.rows());
    for (Eigen::Index r = 0; r < eps.size(); ++r) eps[r] = noise_std * normal(noise_rng);
    Vec b = C * xsharp + eps;
    inst.locals.push_back({LassoAgent{std::move(C), std::move(b)}});
  }
  inst.h = Regularizer::l1_ball(R);
  inst.d = {Vec::Zero(m)};
  auto [L, mu] = estimate_constants(inst);
  inst.L = L;
  inst.mu = mu;
  if (xsharp_out) *xsharp_out = xsharp;
  return inst;
}

ProblemInstance generate_quadratic_instance(std::uint64_t seed, int n, int m, double L,
                                            double mu, Regularizer h) {
  if (!(L >= mu) || mu < 0.0)
    throw PreconditionError("generate_quadratic_instance: need L >= mu >= 0");
  auto rng = make_stream(seed, "data");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ProblemInstance inst;
  inst.n = n;
  inst.m = m;
  for (int i = 0; i < n; ++i) {
    Mat G(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) G(r, c) = normal(rng);
    Eigen::HouseholderQR<Mat> qr(G);
    Mat U = qr.householderQ();
    Vec lam(m);
    for (int k = 0; k < m; ++k) lam[k] = mu + (L - mu) * unif(rng);
    lam[0] = mu;
    lam[m - 1] = L;  // pin the spectrum endpoints
    Mat Q = U * lam.asDiagonal() * U.transpose();
    Q = 0.5 * (Q + Q.transpose()).eval();
    Vec q(m);
    for (int k = 0; k < m; ++k) q[k] = normal(rng);
    inst.locals.push_back({QuadraticAgent{std::move(Q), std::move(q), 0.0}});
  }
  inst.h = h;
  inst.d = {Vec::Zero(m)};
  inst.L = L;
  inst.mu = mu;
  return inst;
}

}  // namespace dda
