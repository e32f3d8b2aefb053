#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dda/types.hpp"

namespace dda {

// Undirected simple graph; edges stored once with i < j.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  static Graph cycle(int n);
  static Graph grid2d(int rows, int cols);
  static Graph complete(int n);
  // Random graph with edge density xi (ratio of edges to those of the
  // complete graph); resampled until connected.
  static Graph erdos_renyi(int n, double xi, std::mt19937_64& rng);
  // Edge-list file, one "i j" pair per line, 0-indexed.
  static Graph load(const std::string& path);

  void add_edge(int i, int j);
  std::vector<std::vector<int>> adjacency() const;
  bool connected() const;
};

// P = I - 1/2 (e_i - e_j)(e_i - e_j)^T: averages endpoints i and j,
// leaves everyone else alone. Symmetric, doubly stochastic, idempotent.
Mat gossip_matrix(int i, int j, int n);

// Metropolis-Hastings weights on the given edge set over n nodes:
// p_ij = 1/(1 + max(deg_i, deg_j)), p_ii = 1 - sum_j p_ij.
Mat metropolis_matrix(int n, const std::vector<std::pair<int, int>>& edges);

enum class GossipLaw {
  // Each link (i,j) activates with probability 1/(n(|N_i|+1)) from each
  // endpoint's perspective; the residual mass yields an identity round.
  NeighborUniform,
  // One edge uniformly at random every round, no idle rounds.
  UniformEdge,
};

enum class MixingKind { TimeInvariant, Gossip, Bernoulli };

// A distribution over doubly stochastic n x n mixing matrices.
struct MixingModel {
  MixingKind kind = MixingKind::TimeInvariant;
  Mat fixed;   // TimeInvariant
  Graph base;  // Gossip / Bernoulli
  GossipLaw law = GossipLaw::NeighborUniform;
  double iota = 0.0;  // Bernoulli activation probability

  static MixingModel time_invariant(Mat P);
  static MixingModel gossip(Graph base, GossipLaw law = GossipLaw::NeighborUniform);
  static MixingModel bernoulli(Graph base, double iota);

  int n() const;
  Mat sample(std::mt19937_64& rng) const;
  // All outcomes with probabilities, when the support is finite and small.
  std::vector<std::pair<double, Mat>> support() const;
};

struct DSReport {
  bool ok = true;
  double max_violation = 0.0;
  std::string detail;
};

// Row/column sums within tol of 1 and entries in [0,1]. Never assumes
// symmetry.
DSReport validate_doubly_stochastic(const Mat& P, double tol = 1e-12);

enum class BetaMode { Exact, MonteCarlo };

// The contraction factor sqrt(rho(E[P^T P] - 11^T/n)). Exact mode enumerates
// the model support; MonteCarlo averages over sampled matrices.
double beta_of_model(const MixingModel& model, BetaMode mode, int samples = 0,
                     std::uint64_t seed = 0);

}  // namespace dda
