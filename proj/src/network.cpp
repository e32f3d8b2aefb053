#include "dda/network.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "dda/errors.hpp"
#include "dda/rng.hpp"

namespace dda {

void Graph::add_edge(int i, int j) {
  if (i == j) throw PreconditionError("graph: self-loops are not allowed");
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n) throw PreconditionError("graph: node index out of range");
  for (const auto& e : edges)
    if (e.first == i && e.second == j)
      throw PreconditionError("graph: duplicate edge");
  edges.emplace_back(i, j);
}

Graph Graph::cycle(int n) {
  if (n < 3) throw PreconditionError("cycle graph needs n >= 3");
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Graph Graph::grid2d(int rows, int cols) {
  if (rows < 1 || cols < 1) throw PreconditionError("grid2d needs positive dimensions");
  Graph g;
  g.n = rows * cols;
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) g.add_edge(id(r, c), id(r, c + 1));
      if (r + 1 < rows) g.add_edge(id(r, c), id(r + 1, c));
    }
  return g;
}

Graph Graph::complete(int n) {
  if (n < 2) throw PreconditionError("complete graph needs n >= 2");
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph Graph::erdos_renyi(int n, double xi, std::mt19937_64& rng) {
  if (n < 2) throw PreconditionError("erdos_renyi needs n >= 2");
  if (!(xi > 0.0) || xi > 1.0) throw PreconditionError("erdos_renyi: xi must be in (0,1]");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Graph g;
    g.n = n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (unif(rng) < xi) g.edges.emplace_back(i, j);
    if (g.connected()) return g;
  }
  throw NumericalError("erdos_renyi: failed to sample a connected graph (xi too small?)");
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file: " + path);
  Graph g;
  int maxnode = -1;
  std::string line;
  std::vector<std::pair<int, int>> raw;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int i, j;
    if (!(ss >> i >> j))
      throw ConfigError("graph file " + path + ": malformed line " + std::to_string(lineno));
    raw.emplace_back(i, j);
    maxnode = std::max({maxnode, i, j});
  }
  g.n = maxnode + 1;
  for (auto [i, j] : raw) g.add_edge(i, j);
  return g;
}

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(n);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  return adj;
}

bool Graph::connected() const {
  if (n == 0) return false;
  auto adj = adjacency();
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  return count == n;
}

Mat gossip_matrix(int i, int j, int n) {
  if (i == j) throw PreconditionError("gossip_matrix: i must differ from j");
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw PreconditionError("gossip_matrix: node index out of range");
  Mat P = Mat::Identity(n, n);
  P(i, i) = 0.5;
  P(j, j) = 0.5;
  P(i, j) = 0.5;
  P(j, i) = 0.5;
  return P;
}

Mat metropolis_matrix(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<int> deg(n, 0);
  for (auto [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  Mat P = Mat::Zero(n, n);
  for (auto [i, j] : edges) {
    double w = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    P(i, j) = w;
    P(j, i) = w;
  }
  for (int i = 0; i < n; ++i) P(i, i) = 1.0 - P.row(i).sum();
  return P;
}

MixingModel MixingModel::time_invariant(Mat P) {
  auto rep = validate_doubly_stochastic(P);
  if (!rep.ok)
    throw PreconditionError("time_invariant model: matrix is not doubly stochastic: " + rep.detail);
  MixingModel m;
  m.kind = MixingKind::TimeInvariant;
  m.fixed = std::move(P);
  return m;
}

MixingModel MixingModel::gossip(Graph base, GossipLaw law) {
  if (base.edges.empty()) throw PreconditionError("gossip model: base graph has no edges");
  if (!base.connected()) throw PreconditionError("gossip model: base graph must be connected");
  MixingModel m;
  m.kind = MixingKind::Gossip;
  m.base = std::move(base);
  m.law = law;
  return m;
}

MixingModel MixingModel::bernoulli(Graph base, double iota) {
  if (base.edges.empty()) throw PreconditionError("bernoulli model: base graph has no edges");
  if (!(iota >= 0.0) || iota > 1.0)
    throw PreconditionError("bernoulli model: iota must be in [0,1]");
  MixingModel m;
  m.kind = MixingKind::Bernoulli;
  m.base = std::move(base);
  m.iota = iota;
  return m;
}

int MixingModel::n() const {
  return kind == MixingKind::TimeInvariant ? static_cast<int>(fixed.rows()) : base.n;
}

Mat MixingModel::sample(std::mt19937_64& rng) const {
  switch (kind) {
    case MixingKind::TimeInvariant:
      return fixed;
    case MixingKind::Gossip: {
      if (law == GossipLaw::UniformEdge) {
        std::uniform_int_distribution<std::size_t> pick(0, base.edges.size() - 1);
        auto [i, j] = base.edges[pick(rng)];
        return gossip_matrix(i, j, base.n);
      }
      // NeighborUniform: node u uniform, then v uniform in N_u + {u};
      // v == u is the identity (idle) round. Link (i,j) thus activates with
      // probability 1/(n(|N_i|+1)) + 1/(n(|N_j|+1)).
      auto adj = base.adjacency();
      std::uniform_int_distribution<int> node(0, base.n - 1);
      int u = node(rng);
      std::uniform_int_distribution<std::size_t> pick(0, adj[u].size());
      std::size_t k = pick(rng);
      if (k == adj[u].size()) return Mat::Identity(base.n, base.n);
      return gossip_matrix(u, adj[u][k], base.n);
    }
    case MixingKind::Bernoulli: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::vector<std::pair<int, int>> kept;
      for (const auto& e : base.edges)
        if (unif(rng) < iota) kept.push_back(e);
      return metropolis_matrix(base.n, kept);
    }
  }
  return fixed;
}

std::vector<std::pair<double, Mat>> MixingModel::support() const {
  std::vector<std::pair<double, Mat>> out;
  switch (kind) {
    case MixingKind::TimeInvariant:
      out.emplace_back(1.0, fixed);
      return out;
    case MixingKind::Gossip: {
      const int n = base.n;
      if (law == GossipLaw::UniformEdge) {
        double p = 1.0 / static_cast<double>(base.edges.size());
        for (auto [i, j] : base.edges) out.emplace_back(p, gossip_matrix(i, j, n));
        return out;
      }
      auto adj = base.adjacency();
      double residual = 0.0;
      for (int u = 0; u < n; ++u) residual += 1.0 / (n * (adj[u].size() + 1.0));
      for (auto [i, j] : base.edges) {
        double p = 1.0 / (n * (adj[i].size() + 1.0)) + 1.0 / (n * (adj[j].size() + 1.0));
        out.emplace_back(p, gossip_matrix(i, j, n));
      }
      if (residual > 0.0) out.emplace_back(residual, Mat::Identity(n, n));
      return out;
    }
    case MixingKind::Bernoulli: {
      const std::size_t E = base.edges.size();
      if (E > 20)
        throw PreconditionError(
            "bernoulli model: exact support enumeration limited to 20 edges; use Monte Carlo");
      for (std::uint64_t mask = 0; mask < (1ULL << E); ++mask) {
        double p = 1.0;
        std::vector<std::pair<int, int>> kept;
        for (std::size_t e = 0; e < E; ++e) {
          if (mask & (1ULL << e)) {
            p *= iota;
            kept.push_back(base.edges[e]);
          } else {
            p *= 1.0 - iota;
          }
        }
        if (p > 0.0) out.emplace_back(p, metropolis_matrix(base.n, kept));
      }
      return out;
    }
  }
  return out;
}

DSReport validate_doubly_stochastic(const Mat& P, double tol) {
  DSReport rep;
  if (P.rows() != P.cols()) {
    rep.ok = false;
    rep.max_violation = std::numeric_limits<double>::infinity();
    rep.detail = "matrix is not square";
    return rep;
  }
  const int n = static_cast<int>(P.rows());
  for (int i = 0; i < n; ++i) {
    double r = std::abs(P.row(i).sum() - 1.0);
    if (r > rep.max_violation) {
      rep.max_violation = r;
      rep.detail = "row " + std::to_string(i) + " sum off by " + std::to_string(r);
    }
    double c = std::abs(P.col(i).sum() - 1.0);
    if (c > rep.max_violation) {
      rep.max_violation = c;
      rep.detail = "column " + std::to_string(i) + " sum off by " + std::to_string(c);
    }
    for (int j = 0; j < n; ++j) {
      double v = std::max(-P(i, j), P(i, j) - 1.0);
      if (v > rep.max_violation) {
        rep.max_violation = v;
        rep.detail = "entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside [0,1]";
      }
    }
  }
  rep.ok = rep.max_violation <= tol;
  return rep;
}

namespace {

double beta_from_second_moment(Mat EPtP, int n) {
  Mat B = EPtP - Mat::Constant(n, n, 1.0 / n);
  // Symmetrize against round-off; B is symmetric PSD in exact arithmetic.
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  double lam = es.eigenvalues().maxCoeff();
  if (lam < 0.0) lam = 0.0;  // clamp tiny negatives near beta = 0
  return std::sqrt(lam);
}

}  // namespace

double beta_of_model(const MixingModel& model, BetaMode mode, int samples, std::uint64_t seed) {
  const int n = model.n();
  if (mode == BetaMode::Exact) {
    Mat EPtP = Mat::Zero(n, n);
    double total = 0.0;
    for (const auto& [p, P] : model.support()) {
      auto rep = validate_doubly_stochastic(P, 1e-12);
      if (!rep.ok) throw NumericalError("beta_of_model: non-doubly-stochastic outcome: " + rep.detail);
      EPtP += p * (P.transpose() * P);
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw NumericalError("beta_of_model: outcome probabilities sum to " + std::to_string(total));
    return beta_from_second_moment(EPtP, n);
  }
  if (samples < 100) throw PreconditionError("beta_of_model: Monte Carlo needs >= 100 samples");
  auto rng = make_stream(seed, "beta-monte-carlo");
  Mat EPtP = Mat::Zero(n, n);
  for (int k = 0; k < samples; ++k) {
    Mat P = model.sample(rng);
    auto rep = validate_doubly_stochastic(P, 1e-12);
    if (!rep.ok) throw NumericalError("beta_of_model: non-doubly-stochastic sample: " + rep.detail);
    EPtP += P.transpose() * P;
  }
  EPtP /= static_cast<double>(samples);
  return beta_from_second_moment(EPtP, n);
}

}  // namespace dda
