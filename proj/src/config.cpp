#include "dda/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dda/errors.hpp"
#include "dda/rng.hpp"

namespace dda {

namespace {

using nlohmann::json;

const std::set<std::string> kFamilies = {"logistic", "lasso", "quadratic"};
const std::set<std::string> kKinds = {"time_invariant", "gossip", "bernoulli"};
const std::set<std::string> kGraphs = {"cycle", "grid", "complete", "erdos_renyi", "file"};
const std::set<std::string> kLaws = {"neighbor_uniform", "uniform_edge"};
const std::set<std::string> kAlgos = {"dda", "cdda", "dsm", "pg_extra", "p2d2", "centralized"};
const std::set<std::string> kRules = {"sqrt_decay"};

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

Mat load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("matrix file is empty: " + path);
  Mat P(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw ConfigError("matrix file has ragged rows: " + path);
    for (std::size_t j = 0; j < rows[i].size(); ++j) P(i, j) = rows[i][j];
  }
  return P;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  const auto& p = cfg.problem;
  if (!kFamilies.count(p.family)) throw ConfigError("problem.family: unknown '" + p.family + "'");
  if (p.n < 1) throw ConfigError("problem.n: must be at least 1");
  if (p.m < 1) throw ConfigError("problem.m: must be at least 1");
  if (p.rows_per_agent < 1) throw ConfigError("problem.rows_per_agent: must be at least 1");
  if (p.mu < 0.0) throw ConfigError("problem.mu: must be nonnegative");
  if (p.phi < 0.0) throw ConfigError("problem.phi: must be nonnegative");
  if (p.radius < 0.0) throw ConfigError("problem.radius: must be nonnegative");
  if (p.phi > 0.0 && p.radius > 0.0)
    throw ConfigError("problem: phi and radius are mutually exclusive regularizers");
  if (p.family == "quadratic" && !(p.L >= p.mu && p.L > 0.0))
    throw ConfigError("problem.L: need L >= mu and L > 0");

  const auto& net = cfg.network;
  if (!kKinds.count(net.kind)) throw ConfigError("network.kind: unknown '" + net.kind + "'");
  if (!kGraphs.count(net.graph)) throw ConfigError("network.graph: unknown '" + net.graph + "'");
  if (!kLaws.count(net.law)) throw ConfigError("network.law: unknown '" + net.law + "'");
  if (net.graph == "file" && net.graph_file.empty())
    throw ConfigError("network.graph_file: required when graph is 'file'");
  if (net.graph == "grid" && (net.rows < 1 || net.cols < 1))
    throw ConfigError("network.rows/cols: required for the grid graph");
  if (net.kind == "bernoulli" && !(net.iota > 0.0 && net.iota <= 1.0))
    throw ConfigError("network.iota: must lie in (0,1]");
  if (net.graph == "erdos_renyi" && !(net.xi > 0.0 && net.xi <= 1.0))
    throw ConfigError("network.xi: must lie in (0,1]");
  if (net.kind == "time_invariant" && net.matrix != "metropolis" && net.matrix != "file")
    throw ConfigError("network.matrix: unknown '" + net.matrix + "'");
  if (net.kind == "time_invariant" && net.matrix == "file" && net.matrix_file.empty())
    throw ConfigError("network.matrix_file: required when matrix is 'file'");

  if (cfg.algorithms.empty()) throw ConfigError("algorithms: at least one entry required");
  const bool constrained_h = p.radius > 0.0;
  for (const auto& alg : cfg.algorithms) {
    if (!kAlgos.count(alg.name)) throw ConfigError("algorithms.name: unknown '" + alg.name + "'");
    if (alg.T < 1) throw ConfigError("algorithms.T: must be at least 1 (" + alg.name + ")");
    if (alg.a < 0.0) throw ConfigError("algorithms.a: must be nonnegative (" + alg.name + ")");
    if (alg.a > 0.0 && p.mu > 0.0 && alg.a * p.mu >= 1.0)
      throw ConfigError("algorithms.a: a*mu >= 1 is degenerate (" + alg.name + ")");
    if (alg.name == "p2d2" && !(alg.alpha > 0.0 && alg.alpha <= 1.0))
      throw ConfigError("algorithms.alpha: must lie in (0,1] (p2d2)");
    if (!kRules.count(alg.step_rule))
      throw ConfigError("algorithms.step_rule: unknown '" + alg.step_rule + "'");
    if (alg.name == "dsm" && constrained_h)
      throw ConfigError("algorithms: dsm cannot handle the ball-constrained regularizer");
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  if (j.contains("problem")) {
    const json& p = j["problem"];
    read(p, "family", cfg.problem.family);
    read(p, "dataset", cfg.problem.dataset);
    read(p, "n", cfg.problem.n);
    read(p, "m", cfg.problem.m);
    read(p, "rows_per_agent", cfg.problem.rows_per_agent);
    read(p, "mu", cfg.problem.mu);
    read(p, "phi", cfg.problem.phi);
    read(p, "radius", cfg.problem.radius);
    read(p, "L", cfg.problem.L);
    read(p, "nonzero_prob", cfg.problem.nonzero_prob);
    read(p, "noise_std", cfg.problem.noise_std);
    read(p, "ball_factor", cfg.problem.ball_factor);
  }
  if (j.contains("network")) {
    const json& n = j["network"];
    read(n, "kind", cfg.network.kind);
    read(n, "graph", cfg.network.graph);
    read(n, "graph_file", cfg.network.graph_file);
    read(n, "rows", cfg.network.rows);
    read(n, "cols", cfg.network.cols);
    read(n, "xi", cfg.network.xi);
    read(n, "iota", cfg.network.iota);
    read(n, "law", cfg.network.law);
    read(n, "matrix", cfg.network.matrix);
    read(n, "matrix_file", cfg.network.matrix_file);
  }
  if (j.contains("algorithms")) {
    if (!j["algorithms"].is_array()) throw ConfigError("algorithms: expected an array");
    for (const json& a : j["algorithms"]) {
      AlgorithmConfig alg;
      read(a, "name", alg.name);
      read(a, "a", alg.a);
      read(a, "alpha", alg.alpha);
      read(a, "step_rule", alg.step_rule);
      read(a, "T", alg.T);
      cfg.algorithms.push_back(std::move(alg));
    }
  }
  read(j, "seed", cfg.seed);
  read(j, "out_dir", cfg.out_dir);
  if (j.contains("monitors")) {
    const json& m = j["monitors"];
    read(m, "conservation", cfg.monitors.conservation);
    read(m, "lemma5", cfg.monitors.lemma5);
    read(m, "bounds", cfg.monitors.bounds);
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& cfg) {
  json j;
  const auto& p = cfg.problem;
  j["problem"] = {{"family", p.family},
                  {"dataset", p.dataset},
                  {"n", p.n},
                  {"m", p.m},
                  {"rows_per_agent", p.rows_per_agent},
                  {"mu", p.mu},
                  {"phi", p.phi},
                  {"radius", p.radius},
                  {"L", p.L},
                  {"nonzero_prob", p.nonzero_prob},
                  {"noise_std", p.noise_std},
                  {"ball_factor", p.ball_factor}};
  const auto& n = cfg.network;
  j["network"] = {{"kind", n.kind},     {"graph", n.graph},
                  {"graph_file", n.graph_file}, {"rows", n.rows},
                  {"cols", n.cols},     {"xi", n.xi},
                  {"iota", n.iota},     {"law", n.law},
                  {"matrix", n.matrix}, {"matrix_file", n.matrix_file}};
  j["algorithms"] = json::array();
  for (const auto& alg : cfg.algorithms)
    j["algorithms"].push_back({{"name", alg.name},
                               {"a", alg.a},
                               {"alpha", alg.alpha},
                               {"step_rule", alg.step_rule},
                               {"T", alg.T}});
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["monitors"] = {{"conservation", cfg.monitors.conservation},
                   {"lemma5", cfg.monitors.lemma5},
                   {"bounds", cfg.monitors.bounds}};
  return j.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a(serialize(cfg)); }

std::uint64_t problem_hash(const ExperimentConfig& cfg) {
  ExperimentConfig stripped;
  stripped.problem = cfg.problem;
  stripped.seed = cfg.seed;
  stripped.algorithms.push_back({});  // keep serialize() happy
  return fnv1a(serialize(stripped));
}

ProblemInstance build_problem(const ExperimentConfig& cfg, const std::string& base_dir) {
  const auto& p = cfg.problem;
  const std::uint64_t data_seed = make_stream(cfg.seed, "data")();
  Regularizer h = Regularizer::zero();
  if (p.phi > 0.0) h = Regularizer::l1(p.phi);
  if (p.radius > 0.0) h = Regularizer::l1_ball(p.radius);

  if (p.family == "logistic") {
    if (!p.dataset.empty()) {
      AgentDataset data = load_csv_partitioned(resolve(p.dataset, base_dir), p.n,
                                               p.n * p.rows_per_agent);
      return make_logistic_instance(std::move(data), p.mu, p.phi);
    }
    return generate_logistic_instance(data_seed, p.n, p.rows_per_agent, p.m, p.mu, p.phi);
  }
  if (p.family == "lasso") {
    return generate_lasso_instance(data_seed, p.n, p.rows_per_agent, p.m, p.nonzero_prob,
                                   p.noise_std, p.ball_factor);
  }
  return generate_quadratic_instance(data_seed, p.n, p.m, p.L, p.mu, h);
}

MixingModel build_network(const ExperimentConfig& cfg, const std::string& base_dir) {
  const auto& net = cfg.network;
  const int n = cfg.problem.n;
  Graph g;
  if (net.graph == "cycle") {
    g = Graph::cycle(n);
  } else if (net.graph == "grid") {
    if (net.rows * net.cols != n)
      throw ConfigError("network.rows*cols must equal problem.n");
    g = Graph::grid2d(net.rows, net.cols);
  } else if (net.graph == "complete") {
    g = Graph::complete(n);
  } else if (net.graph == "erdos_renyi") {
    auto rng = make_stream(cfg.seed, "network");
    g = Graph::erdos_renyi(n, net.xi, rng);
  } else {
    g = Graph::load(resolve(net.graph_file, base_dir));
    if (g.n != n) throw ConfigError("network.graph_file: node count differs from problem.n");
  }

  GossipLaw law = net.law == "uniform_edge" ? GossipLaw::UniformEdge
                                            : GossipLaw::NeighborUniform;
  if (net.kind == "gossip") return MixingModel::gossip(std::move(g), law);
  if (net.kind == "bernoulli") return MixingModel::bernoulli(std::move(g), net.iota);

  Mat P = net.matrix == "file" ? load_matrix_file(resolve(net.matrix_file, base_dir))
                               : metropolis_matrix(g.n, g.edges);
  if (P.rows() != n || P.cols() != n)
    throw ConfigError("network.matrix_file: dimensions differ from problem.n");
  return MixingModel::time_invariant(std::move(P));
}

}  // namespace dda
