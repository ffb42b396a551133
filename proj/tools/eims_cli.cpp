// Command-line front end; talks to the library through the C API only.
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "eims/capi.h"

namespace {

struct Overrides {
  std::uint64_t seed = 0;
  int trials = 0, horizon = 0, threads = -1;
  std::string out;
  bool has_seed = false;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--seed", ov.seed, "Master seed override")
      ->each([&ov](const std::string&) { ov.has_seed = true; });
  cmd->add_option("--trials", ov.trials, "Trial-count override");
  cmd->add_option("--horizon", ov.horizon, "Horizon override");
  cmd->add_option("--threads", ov.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--out", ov.out, "Output directory override");
}

int apply_overrides(eims_config* cfg, const Overrides& ov) {
  int rc = EIMS_OK;
  if (ov.has_seed) rc = eims_config_set_seed(cfg, ov.seed);
  if (rc == EIMS_OK && ov.trials > 0) rc = eims_config_set_trials(cfg, ov.trials);
  if (rc == EIMS_OK && ov.horizon > 0) rc = eims_config_set_horizon(cfg, ov.horizon);
  if (rc == EIMS_OK && ov.threads >= 0) rc = eims_config_set_threads(cfg, ov.threads);
  if (rc == EIMS_OK && !ov.out.empty()) rc = eims_config_set_out_dir(cfg, ov.out.c_str());
  return rc;
}

eims_config* open_config(const std::string& source) {
  // Preset names double as config sources for convenience.
  for (int i = 0; i < eims_preset_count(); ++i) {
    if (source == eims_preset_name(i)) return eims_config_preset(source.c_str());
  }
  return eims_config_load(source.c_str());
}

int fail(int rc) {
  std::fprintf(stderr, "error: %s\n", eims_last_error());
  return rc == EIMS_OK ? EIMS_ERROR : rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process bandit benchmark and bound-verification tool"};
  app.require_subcommand(1);

  std::string config_path, check_name, verify_out = "verify-report.csv";
  std::string mig_out = "mig-curve.csv", results_dir;
  Overrides run_ov, mig_ov;

  CLI::App* run = app.add_subcommand("run", "Run a benchmark experiment");
  run->add_option("config", config_path, "Config JSON file or preset name")->required();
  add_override_flags(run, run_ov);

  CLI::App* verify = app.add_subcommand("verify", "Run the inequality checks");
  verify->add_option("--check", check_name, "Run a single named check");
  verify->add_option("--out", verify_out, "Report CSV path");

  CLI::App* mig = app.add_subcommand("mig", "Greedy information-gain curve");
  mig->add_option("config", config_path, "Config JSON file or preset name")->required();
  mig->add_option("--out", mig_out, "Curve CSV path");
  mig->add_option("--horizon", mig_ov.horizon, "Horizon override");

  CLI::App* plot = app.add_subcommand("plot", "Re-render plots from aggregate.csv");
  plot->add_option("results-dir", results_dir, "Results directory")->required();

  std::string preset_name;
  CLI::App* presets = app.add_subcommand("presets", "List or print built-in configs");
  presets->add_option("name", preset_name, "Print this preset's JSON");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    eims_config* cfg = open_config(config_path);
    if (!cfg) return fail(EIMS_INVALID_CONFIG);
    int rc = apply_overrides(cfg, run_ov);
    if (rc == EIMS_OK) rc = eims_run_experiment(cfg);
    eims_config_free(cfg);
    return rc == EIMS_OK ? 0 : fail(rc);
  }

  if (verify->parsed()) {
    long long violations = 0;
    const int rc = eims_verify(check_name.empty() ? nullptr : check_name.c_str(),
                               verify_out.c_str(), &violations);
    if (rc == EIMS_OK) {
      std::printf("all checks passed; report written to %s\n", verify_out.c_str());
      return 0;
    }
    if (rc == EIMS_CHECK_VIOLATION)
      std::fprintf(stderr, "%lld violation(s); report written to %s\n", violations,
                   verify_out.c_str());
    return fail(rc);
  }

  if (mig->parsed()) {
    eims_config* cfg = open_config(config_path);
    if (!cfg) return fail(EIMS_INVALID_CONFIG);
    int rc = apply_overrides(cfg, mig_ov);
    if (rc == EIMS_OK) rc = eims_mig_curve(cfg, mig_out.c_str());
    eims_config_free(cfg);
    return rc == EIMS_OK ? 0 : fail(rc);
  }

  if (plot->parsed()) {
    const int rc = eims_plot(results_dir.c_str());
    return rc == EIMS_OK ? 0 : fail(rc);
  }

  if (presets->parsed()) {
    if (preset_name.empty()) {
      for (int i = 0; i < eims_preset_count(); ++i)
        std::printf("%s\n", eims_preset_name(i));
      return 0;
    }
    const char* text = eims_preset_json(preset_name.c_str());
    if (!text) return fail(EIMS_INVALID_CONFIG);
    std::printf("%s\n", text);
    return 0;
  }
  return EIMS_ERROR;
}
