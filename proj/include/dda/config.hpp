#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dda/network.hpp"
#include "dda/problems.hpp"

namespace dda {

struct ProblemConfig {
  std::string family = "logistic";  // logistic | lasso | quadratic
  std::string dataset;              // CSV path; empty means synthetic
  int n = 10;
  int m = 50;
  int rows_per_agent = 60;
  double mu = 0.1;
  double phi = 0.0;     // l1 weight
  double radius = 0.0;  // l1-ball radius; > 0 selects the ball constraint
  double L = 1.0;       // quadratic family only
  double nonzero_prob = 0.25;
  double noise_std = 0.01;
  double ball_factor = 1.1;

  bool operator==(const ProblemConfig&) const = default;
};

struct NetworkConfig {
  std::string kind = "gossip";  // time_invariant | gossip | bernoulli
  std::string graph = "cycle";  // cycle | grid | complete | erdos_renyi | file
  std::string graph_file;
  int rows = 0, cols = 0;  // grid
  double xi = 0.5;         // erdos_renyi edge density
  double iota = 0.5;       // bernoulli activation probability
  std::string law = "neighbor_uniform";  // or uniform_edge
  std::string matrix = "metropolis";     // time_invariant: metropolis | file
  std::string matrix_file;

  bool operator==(const NetworkConfig&) const = default;
};

struct AlgorithmConfig {
  std::string name;  // dda | cdda | dsm | pg_extra | p2d2 | centralized
  double a = 0.0;    // fixed step; 0 means pick 0.5 * abar at run time
  double alpha = 0.5;
  std::string step_rule = "sqrt_decay";
  long T = 100;

  bool operator==(const AlgorithmConfig&) const = default;
};

struct MonitorConfig {
  bool conservation = true;
  bool lemma5 = true;
  bool bounds = true;

  bool operator==(const MonitorConfig&) const = default;
};

struct ExperimentConfig {
  ProblemConfig problem;
  NetworkConfig network;
  std::vector<AlgorithmConfig> algorithms;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  MonitorConfig monitors;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError with the offending field in the message.
void validate(const ExperimentConfig& cfg);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& cfg);

// FNV-1a over the canonical serialization (whole config, or problem + seed
// only, which keys the reference cache).
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::uint64_t problem_hash(const ExperimentConfig& cfg);

// Instantiation. Paths in the config are resolved relative to base_dir.
ProblemInstance build_problem(const ExperimentConfig& cfg, const std::string& base_dir = ".");
MixingModel build_network(const ExperimentConfig& cfg, const std::string& base_dir = ".");

}  // namespace dda
