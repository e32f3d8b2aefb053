#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dda/capi.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string algos;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long T = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "experiment config file (JSON)")
      ->required();
  cmd->add_option("--seed", opts.seed, "master seed override")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--out", opts.out_dir, "output directory override");
  cmd->add_option("--algos", opts.algos, "comma separated algorithm subset");
  cmd->add_option("--T", opts.T, "round-count override for every algorithm");
}

int fail(dda_status s) {
  std::fprintf(stderr, "error: %s\n", dda_last_error());
  return static_cast<int>(s);
}

int with_config(const CommonOpts& opts,
                dda_status (*fn)(const dda_config*, const char*, char**, void*),
                void* extra) {
  dda_config* cfg = nullptr;
  dda_status s = dda_config_load(opts.config_path.c_str(), &cfg);
  if (s != DDA_OK) return fail(s);
  if (opts.seed_set) dda_config_set_seed(cfg, opts.seed);
  if (!opts.out_dir.empty()) dda_config_set_out_dir(cfg, opts.out_dir.c_str());
  if (opts.T > 0 && (s = dda_config_set_rounds(cfg, opts.T)) != DDA_OK) {
    dda_config_free(cfg);
    return fail(s);
  }
  if (!opts.algos.empty() &&
      (s = dda_config_select_algorithms(cfg, opts.algos.c_str())) != DDA_OK) {
    dda_config_free(cfg);
    return fail(s);
  }
  std::string base_dir =
      std::filesystem::path(opts.config_path).parent_path().string();
  if (base_dir.empty()) base_dir = ".";
  char* log = nullptr;
  s = fn(cfg, base_dir.c_str(), &log, extra);
  if (log) {
    std::fputs(log, stdout);
    dda_string_free(log);
  }
  dda_config_free(cfg);
  return s == DDA_OK ? 0 : fail(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized dual averaging simulator"};
  app.require_subcommand(1);

  CommonOpts check_opts, run_opts, ref_opts, sweep_opts;
  std::vector<double> grid;

  CLI::App* check = app.add_subcommand("check", "feasibility conditions and constants");
  add_common(check, check_opts);
  CLI::App* run = app.add_subcommand("run", "run the configured algorithms");
  add_common(run, run_opts);
  CLI::App* reference = app.add_subcommand("reference", "compute or refresh x*");
  add_common(reference, ref_opts);
  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over the step size a");
  add_common(sweep, sweep_opts);
  sweep->add_option("--grid", grid, "explicit step sizes (default: fractions of abar)");

  CLI11_PARSE(app, argc, argv);

  if (check->parsed())
    return with_config(
        check_opts,
        [](const dda_config* c, const char* b, char** log, void*) {
          return dda_check(c, b, log);
        },
        nullptr);
  if (reference->parsed())
    return with_config(
        ref_opts,
        [](const dda_config* c, const char* b, char** log, void*) {
          return dda_reference(c, b, log);
        },
        nullptr);
  if (run->parsed()) {
    int any_failed = 0;
    int rc = with_config(
        run_opts,
        [](const dda_config* c, const char* b, char** log, void* extra) {
          return dda_run(c, b, log, static_cast<int*>(extra));
        },
        &any_failed);
    if (rc == 0 && any_failed) std::fprintf(stderr, "warning: partial failures, see summary\n");
    return rc;
  }
  if (sweep->parsed())
    return with_config(
        sweep_opts,
        [](const dda_config* c, const char* b, char** log, void* extra) {
          const auto* g = static_cast<const std::vector<double>*>(extra);
          return dda_sweep(c, b, g->empty() ? nullptr : g->data(), g->size(), log);
        },
        &grid);
  return 0;
}
