#include "eims/capi.h"

#include <fstream>
#include <string>
#include <vector>

#include "eims/experiment.hpp"
#include "eims/presets.hpp"
#include "eims/theory.hpp"

namespace {

thread_local std::string g_last_error;
thread_local std::string g_string_buffer;

void set_error(const std::string& msg) { g_last_error = msg; }

// Maps exceptions from `fn` onto status codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const eims::ConfigError& e) {
    set_error(e.what());
    return EIMS_INVALID_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return EIMS_ERROR;
  }
}

eims::ExperimentConfig& unwrap(eims_config* cfg) {
  return *reinterpret_cast<eims::ExperimentConfig*>(cfg);
}
const eims::ExperimentConfig& unwrap(const eims_config* cfg) {
  return *reinterpret_cast<const eims::ExperimentConfig*>(cfg);
}

eims_config* make_config(eims::ExperimentConfig cfg) {
  return reinterpret_cast<eims_config*>(new eims::ExperimentConfig(std::move(cfg)));
}

int require(const void* ptr, const char* what) {
  if (ptr) return EIMS_OK;
  set_error(std::string("null ") + what);
  return EIMS_ERROR;
}

}  // namespace

extern "C" {

const char* eims_last_error(void) { return g_last_error.c_str(); }

eims_config* eims_config_load(const char* path) {
  if (require(path, "path") != EIMS_OK) return nullptr;
  eims_config* out = nullptr;
  guarded([&] {
    out = make_config(eims::ExperimentConfig::load(path));
    return EIMS_OK;
  });
  return out;
}

eims_config* eims_config_from_json(const char* json_text) {
  if (require(json_text, "json") != EIMS_OK) return nullptr;
  eims_config* out = nullptr;
  guarded([&] {
    out = make_config(eims::ExperimentConfig::from_json(json_text));
    return EIMS_OK;
  });
  return out;
}

eims_config* eims_config_preset(const char* name) {
  if (require(name, "name") != EIMS_OK) return nullptr;
  eims_config* out = nullptr;
  guarded([&] {
    out = make_config(eims::preset_config(name));
    return EIMS_OK;
  });
  return out;
}

void eims_config_free(eims_config* cfg) {
  delete reinterpret_cast<eims::ExperimentConfig*>(cfg);
}

int eims_config_set_seed(eims_config* cfg, uint64_t seed) {
  if (int rc = require(cfg, "config"); rc != EIMS_OK) return rc;
  unwrap(cfg).master_seed = seed;
  return EIMS_OK;
}

int eims_config_set_trials(eims_config* cfg, int trials) {
  if (int rc = require(cfg, "config"); rc != EIMS_OK) return rc;
  if (trials < 1) {
    set_error("trials must be >= 1");
    return EIMS_INVALID_CONFIG;
  }
  unwrap(cfg).trials = trials;
  return EIMS_OK;
}

int eims_config_set_horizon(eims_config* cfg, int horizon) {
  if (int rc = require(cfg, "config"); rc != EIMS_OK) return rc;
  if (horizon < 1) {
    set_error("horizon must be >= 1");
    return EIMS_INVALID_CONFIG;
  }
  unwrap(cfg).horizon = horizon;
  return EIMS_OK;
}

int eims_config_set_threads(eims_config* cfg, int threads) {
  if (int rc = require(cfg, "config"); rc != EIMS_OK) return rc;
  if (threads < 0) {
    set_error("threads must be >= 0");
    return EIMS_INVALID_CONFIG;
  }
  unwrap(cfg).threads = threads;
  return EIMS_OK;
}

int eims_config_set_out_dir(eims_config* cfg, const char* out_dir) {
  if (int rc = require(cfg, "config"); rc != EIMS_OK) return rc;
  if (int rc = require(out_dir, "out_dir"); rc != EIMS_OK) return rc;
  unwrap(cfg).out_dir = out_dir;
  return EIMS_OK;
}

int eims_run_experiment(const eims_config* cfg) {
  if (int rc = require(cfg, "config"); rc != EIMS_OK) return rc;
  return guarded([&] {
    const eims::ExperimentResult result = eims::run_experiment(unwrap(cfg));
    eims::write_results(result, unwrap(cfg).out_dir);
    return EIMS_OK;
  });
}

int eims_verify(const char* check, const char* out_csv, long long* violations_out) {
  return guarded([&]() -> int {
    const std::string filter = check ? check : "";
    const std::vector<eims::theory::CheckReport> reports =
        eims::theory::run_verify_battery(filter);
    if (reports.empty()) {
      set_error("unknown check: " + filter);
      return EIMS_INVALID_CONFIG;
    }
    long long total = 0;
    for (const auto& r : reports) total += r.violations;
    if (violations_out) *violations_out = total;
    if (out_csv) {
      std::ofstream out(out_csv);
      if (!out) {
        set_error(std::string("cannot write ") + out_csv);
        return EIMS_ERROR;
      }
      out << "name,statement,cases,violations,worst_margin\n";
      for (const auto& r : reports)
        out << r.name << ",\"" << r.statement << "\"," << r.cases << ','
            << r.violations << ',' << r.worst_margin << "\n";
    }
    if (total > 0) {
      set_error("verification battery reported violations");
      return EIMS_CHECK_VIOLATION;
    }
    return EIMS_OK;
  });
}

int eims_mig_curve(const eims_config* cfg, const char* out_csv) {
  if (int rc = require(cfg, "config"); rc != EIMS_OK) return rc;
  if (int rc = require(out_csv, "out_csv"); rc != EIMS_OK) return rc;
  return guarded([&]() -> int {
    const eims::ExperimentConfig& c = unwrap(cfg);
    c.validate();
    const Eigen::MatrixXd grid = eims::make_grid(c.grid);
    const std::vector<double> curve = eims::theory::mig_greedy(
        c.kernel, grid, c.horizon, c.noise_sd * c.noise_sd);
    std::ofstream out(out_csv);
    if (!out) {
      set_error(std::string("cannot write ") + out_csv);
      return EIMS_ERROR;
    }
    out << "t,greedy_gain\n";
    for (std::size_t t = 0; t < curve.size(); ++t)
      out << (t + 1) << ',' << curve[t] << "\n";
    return EIMS_OK;
  });
}

int eims_plot(const char* results_dir) {
  if (int rc = require(results_dir, "results_dir"); rc != EIMS_OK) return rc;
  return guarded([&] {
    const std::filesystem::path dir(results_dir);
    const std::vector<eims::AggregateRow> rows =
        eims::read_aggregate(dir / "aggregate.csv");
    eims::write_plot_svg(rows, "cum_regret", dir / "cum_regret.svg");
    eims::write_plot_svg(rows, "simple_regret", dir / "simple_regret.svg");
    return EIMS_OK;
  });
}

int eims_preset_count(void) {
  return static_cast<int>(eims::preset_names().size());
}

const char* eims_preset_name(int index) {
  const std::vector<std::string> names = eims::preset_names();
  if (index < 0 || index >= static_cast<int>(names.size())) {
    set_error("preset index out of range");
    return nullptr;
  }
  g_string_buffer = names[static_cast<std::size_t>(index)];
  return g_string_buffer.c_str();
}

const char* eims_preset_json(const char* name) {
  if (require(name, "name") != EIMS_OK) return nullptr;
  try {
    g_string_buffer = eims::preset_json(name);
    return g_string_buffer.c_str();
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

}  // extern "C"
