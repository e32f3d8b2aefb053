#include "dda/capi.h"

#include <cstdlib>
#include <cstring>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dda/config.hpp"
#include "dda/errors.hpp"
#include "dda/experiment.hpp"

struct dda_config {
  dda::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
dda_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DDA_OK;
  } catch (const dda::ConfigError& e) {
    g_last_error = e.what();
    return DDA_ERR_CONFIG;
  } catch (const dda::PreconditionError& e) {
    g_last_error = e.what();
    return DDA_ERR_PRECONDITION;
  } catch (const dda::NumericalError& e) {
    g_last_error = e.what();
    return DDA_ERR_NUMERICAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DDA_ERR_IO;
  }
}

dda_status need(bool ok, const char* msg) {
  if (ok) return DDA_OK;
  g_last_error = msg;
  return DDA_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* dda_last_error(void) { return g_last_error.c_str(); }

dda_status dda_config_load(const char* path, dda_config** out) {
  if (dda_status s = need(path && out, "null argument"); s != DDA_OK) return s;
  return guarded([&] { *out = new dda_config{dda::load_config(path)}; });
}

dda_status dda_config_parse(const char* json_text, dda_config** out) {
  if (dda_status s = need(json_text && out, "null argument"); s != DDA_OK) return s;
  return guarded([&] { *out = new dda_config{dda::parse_config(json_text)}; });
}

void dda_config_free(dda_config* cfg) { delete cfg; }

dda_status dda_config_set_seed(dda_config* cfg, uint64_t seed) {
  if (dda_status s = need(cfg != nullptr, "null config"); s != DDA_OK) return s;
  cfg->cfg.seed = seed;
  return DDA_OK;
}

dda_status dda_config_set_out_dir(dda_config* cfg, const char* dir) {
  if (dda_status s = need(cfg && dir, "null argument"); s != DDA_OK) return s;
  cfg->cfg.out_dir = dir;
  return DDA_OK;
}

dda_status dda_config_set_rounds(dda_config* cfg, long T) {
  if (dda_status s = need(cfg != nullptr, "null config"); s != DDA_OK) return s;
  if (dda_status s = need(T >= 1, "T must be at least 1"); s != DDA_OK) return s;
  for (auto& alg : cfg->cfg.algorithms) alg.T = T;
  return DDA_OK;
}

dda_status dda_config_select_algorithms(dda_config* cfg, const char* names) {
  if (dda_status s = need(cfg && names, "null argument"); s != DDA_OK) return s;
  return guarded([&] {
    std::set<std::string> keep;
    std::stringstream ss(names);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) keep.insert(tok);
    }
    std::vector<dda::AlgorithmConfig> kept;
    for (const auto& alg : cfg->cfg.algorithms)
      if (keep.count(alg.name)) kept.push_back(alg);
    if (kept.empty())
      throw dda::ConfigError("algorithm selection matches nothing in the config");
    cfg->cfg.algorithms = std::move(kept);
  });
}

dda_status dda_config_serialize(const dda_config* cfg, char** json_out) {
  if (dda_status s = need(cfg && json_out, "null argument"); s != DDA_OK) return s;
  return guarded([&] { *json_out = dup_string(dda::serialize(cfg->cfg)); });
}

void dda_string_free(char* s) { std::free(s); }

dda_status dda_check(const dda_config* cfg, const char* base_dir, char** log_out) {
  if (dda_status s = need(cfg != nullptr, "null config"); s != DDA_OK) return s;
  std::ostringstream log;
  dda_status s = guarded(
      [&] { dda::cmd_check(cfg->cfg, base_dir ? base_dir : ".", log); });
  if (log_out) *log_out = dup_string(log.str());
  return s;
}

dda_status dda_reference(const dda_config* cfg, const char* base_dir, char** log_out) {
  if (dda_status s = need(cfg != nullptr, "null config"); s != DDA_OK) return s;
  std::ostringstream log;
  dda_status s = guarded(
      [&] { dda::cmd_reference(cfg->cfg, base_dir ? base_dir : ".", log); });
  if (log_out) *log_out = dup_string(log.str());
  return s;
}

dda_status dda_run(const dda_config* cfg, const char* base_dir, char** log_out,
                   int* any_failed) {
  if (dda_status s = need(cfg != nullptr, "null config"); s != DDA_OK) return s;
  std::ostringstream log;
  dda_status s = guarded([&] {
    dda::RunSummary summary = dda::cmd_run(cfg->cfg, base_dir ? base_dir : ".", log);
    if (any_failed) *any_failed = summary.any_failed ? 1 : 0;
  });
  if (log_out) *log_out = dup_string(log.str());
  return s;
}

dda_status dda_sweep(const dda_config* cfg, const char* base_dir, const double* grid,
                     size_t grid_len, char** log_out) {
  if (dda_status s = need(cfg != nullptr, "null config"); s != DDA_OK) return s;
  std::ostringstream log;
  dda_status s = guarded([&] {
    std::vector<double> g(grid, grid + (grid ? grid_len : 0));
    dda::cmd_sweep(cfg->cfg, base_dir ? base_dir : ".", std::move(g), log);
  });
  if (log_out) *log_out = dup_string(log.str());
  return s;
}

}  // extern "C"
