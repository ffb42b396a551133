#include "eims/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace eims {

namespace fs = std::filesystem;
using nlohmann::json;

int ExperimentConfig::resolved_init_count() const {
  return init_count >= 0 ? init_count : (1 << grid.d);
}

void ExperimentConfig::validate() const {
  grid.validate();
  kernel.validate();
  if (kernel.dim() != grid.d) throw ConfigError("config: kernel/grid dimension mismatch");
  if (!(noise_sd > 0.0)) throw ConfigError("config: noise_sd must be > 0");
  if (rules.empty()) throw ConfigError("config: at least one rule required");
  for (const auto& r : rules) r.validate();
  if (horizon < 1) throw ConfigError("config: horizon must be >= 1");
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (threads < 0) throw ConfigError("config: threads must be >= 0");
  if (out_dir.empty()) throw ConfigError("config: out_dir required");
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["name"] = name;
  j["grid"] = {{"d", grid.d}, {"levels", grid.levels}};
  j["kernel"] = {{"family", kernel_family_name(kernel.family)},
                 {"lengthscales", std::vector<double>(
                                      kernel.lengthscales.data(),
                                      kernel.lengthscales.data() + kernel.dim())},
                 {"output_scale", kernel.output_scale}};
  j["noise_sd"] = noise_sd;
  std::vector<std::string> rule_names;
  for (const auto& r : rules) rule_names.push_back(r.name());
  j["rules"] = rule_names;
  j["horizon"] = horizon;
  j["trials"] = trials;
  j["init_count"] = init_count;
  j["master_seed"] = master_seed;
  j["threads"] = threads;
  j["out_dir"] = out_dir;
  j["path_sampling"] = {{"exact_cap", path_sampling.exact_cap},
                        {"rff_features", path_sampling.rff_features}};
  j["objective_sampling"] = {{"exact_cap", objective_sampling.exact_cap},
                             {"rff_features", objective_sampling.rff_features}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    const json& g = j.at("grid");
    cfg.grid.d = g.at("d").get<int>();
    if (g.at("levels").is_number()) {
      const int n = g.at("levels").get<int>();
      if (n < 2) throw ConfigError("config: grid.levels must be >= 2");
      cfg.grid.levels.resize(n);
      for (int i = 0; i < n; ++i) cfg.grid.levels[i] = static_cast<double>(i) / n;
    } else {
      cfg.grid.levels = g.at("levels").get<std::vector<double>>();
    }
    const json& k = j.at("kernel");
    const KernelFamily fam = kernel_family_from_name(k.at("family").get<std::string>());
    const double os = k.value("output_scale", 1.0);
    if (k.contains("lengthscales")) {
      const auto ls = k.at("lengthscales").get<std::vector<double>>();
      cfg.kernel.family = fam;
      cfg.kernel.output_scale = os;
      cfg.kernel.lengthscales =
          Eigen::Map<const Eigen::VectorXd>(ls.data(), static_cast<long>(ls.size()));
    } else {
      cfg.kernel = KernelSpec::isotropic(fam, cfg.grid.d,
                                         k.at("lengthscale").get<double>(), os);
    }
    cfg.noise_sd = j.at("noise_sd").get<double>();
    cfg.rules.clear();
    for (const auto& rn : j.at("rules")) {
      AcquisitionRule rule = AcquisitionRule::from_name(rn.get<std::string>());
      if (j.contains("mc_samples")) rule.mc_samples = j.at("mc_samples").get<int>();
      cfg.rules.push_back(rule);
    }
    cfg.horizon = j.at("horizon").get<int>();
    cfg.trials = j.at("trials").get<int>();
    cfg.init_count = j.value("init_count", -1);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.threads = j.value("threads", 0);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    if (j.contains("path_sampling")) {
      cfg.path_sampling.exact_cap = j["path_sampling"].value("exact_cap", 2000);
      cfg.path_sampling.rff_features = j["path_sampling"].value("rff_features", 1024);
    }
    if (j.contains("objective_sampling")) {
      cfg.objective_sampling.exact_cap = j["objective_sampling"].value("exact_cap", 4096);
      cfg.objective_sampling.rff_features =
          j["objective_sampling"].value("rff_features", 4096);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config: cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Eigen::MatrixXd grid = make_grid(cfg.grid);
  const double noise_var = cfg.noise_sd * cfg.noise_sd;
  const int init_count = cfg.resolved_init_count();

  ExperimentResult result;
  result.config = cfg;
  result.traces.assign(cfg.trials, {});

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int trial = next.fetch_add(1); trial < cfg.trials; trial = next.fetch_add(1)) {
      Rng obj_rng = make_rng(cfg.master_seed, {static_cast<std::uint64_t>(trial), 0});
      const Objective obj =
          sample_objective(cfg.kernel, grid, obj_rng, cfg.objective_sampling);
      const std::uint64_t trial_seed =
          derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(trial), 1});
      TrialOptions opts;
      opts.path_sampling = cfg.path_sampling;
      std::vector<TrialTrace>& row = result.traces[trial];
      row.reserve(cfg.rules.size());
      for (const auto& rule : cfg.rules)
        row.push_back(run_trial(rule, obj, cfg.kernel, noise_var, cfg.horizon,
                                init_count, trial_seed, opts));
    }
  };
  int n_threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, cfg.trials));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  result.aggregate = aggregate_traces(result.traces, cfg.rules, cfg.horizon);
  return result;
}

std::vector<AggregateRow> aggregate_traces(
    const std::vector<std::vector<TrialTrace>>& traces,
    const std::vector<AcquisitionRule>& rules, int horizon) {
  std::vector<AggregateRow> rows;
  const int n = static_cast<int>(traces.size());
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const std::string rule_name = rules[r].name();
    for (int t = 1; t <= horizon; ++t) {
      for (const char* metric : {"simple_regret", "cum_regret"}) {
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
          const IterationRecord& it = traces[i][r].iterations[t - 1];
          const double v =
              std::string(metric) == "simple_regret" ? it.simple_regret : it.cum_regret;
          sum += v;
          sum2 += v * v;
        }
        const double mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sum2 - n * mean * mean) / (n - 1)) : 0.0;
        rows.push_back({rule_name, t, metric, mean, std::sqrt(var / n)});
      }
    }
  }
  return rows;
}

namespace {
std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string opt_fmt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

void write_trace_csv(const TrialTrace& trace, int trial, const fs::path& dir) {
  std::ofstream out(dir / ("trial-" + std::to_string(trial) + "-" + trace.rule_name +
                           ".csv"));
  out << "# rule=" << trace.rule_name << " trial=" << trial << " seed=" << trace.seed
      << " objective=" << trace.objective_fingerprint
      << " init_count=" << trace.init_count << "\n";
  out << "# init_indices=";
  for (std::size_t i = 0; i < trace.init_indices.size(); ++i)
    out << (i ? "," : "") << trace.init_indices[i];
  out << " init_f=";
  for (std::size_t i = 0; i < trace.init_f.size(); ++i)
    out << (i ? "," : "") << fmt(trace.init_f[i]);
  out << "\n";
  out << "t,x-index,y,f,g_star,eta,schedule_value,simple_regret,cum_regret\n";
  for (const auto& it : trace.iterations) {
    out << it.t << ',' << it.chosen_index << ',' << fmt(it.y) << ',' << fmt(it.f) << ','
        << opt_fmt(it.g_star) << ',' << opt_fmt(it.eta) << ','
        << opt_fmt(it.schedule_value) << ',' << fmt(it.simple_regret) << ','
        << fmt(it.cum_regret) << "\n";
  }
}
}  // namespace

void write_results(const ExperimentResult& result, const fs::path& out_dir) {
  fs::create_directories(out_dir / "traces");
  for (std::size_t trial = 0; trial < result.traces.size(); ++trial)
    for (const auto& trace : result.traces[trial])
      write_trace_csv(trace, static_cast<int>(trial), out_dir / "traces");

  std::ofstream agg(out_dir / "aggregate.csv");
  agg << "rule,t,metric,mean,stderr\n";
  for (const auto& row : result.aggregate)
    agg << row.rule << ',' << row.t << ',' << row.metric << ',' << fmt(row.mean) << ','
        << fmt(row.stderr_) << "\n";

  std::ofstream cfg(out_dir / "experiment.json");
  cfg << result.config.to_json() << "\n";

  write_plot_svg(result.aggregate, "cum_regret", out_dir / "cum_regret.svg");
  write_plot_svg(result.aggregate, "simple_regret", out_dir / "simple_regret.svg");
}

std::vector<AggregateRow> read_aggregate(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("aggregate: cannot open " + csv.string());
  std::vector<AggregateRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    AggregateRow row;
    std::string field;
    std::getline(ls, row.rule, ',');
    std::getline(ls, field, ',');
    row.t = std::stoi(field);
    std::getline(ls, row.metric, ',');
    std::getline(ls, field, ',');
    row.mean = std::stod(field);
    std::getline(ls, field, ',');
    row.stderr_ = std::stod(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};
}

void write_plot_svg(const std::vector<AggregateRow>& rows, const std::string& metric,
                    const fs::path& path) {
  std::map<std::string, std::vector<const AggregateRow*>> by_rule;
  int t_max = 1;
  double y_max = 1e-12;
  for (const auto& row : rows) {
    if (row.metric != metric) continue;
    by_rule[row.rule].push_back(&row);
    t_max = std::max(t_max, row.t);
    y_max = std::max(y_max, row.mean + row.stderr_);
  }
  const double W = 720, H = 480, ml = 70, mr = 160, mt = 40, mb = 50;
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto sx = [&](double t) { return ml + pw * (t - 1) / std::max(1, t_max - 1); };
  auto sy = [&](double v) { return mt + ph * (1.0 - v / y_max); };

  std::ofstream out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << metric << " (mean ± stderr)</text>\n";
  // Axes and ticks.
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double tv = 1 + (t_max - 1) * i / 5.0;
    const double yv = y_max * i / 5.0;
    out << "<text x=\"" << sx(tv) << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << static_cast<int>(std::lround(tv)) << "</text>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << sy(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << std::setprecision(3) << yv << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">t"
         "</text>\n";

  int color = 0;
  double legend_y = mt + 10;
  for (const auto& [rule, pts] : by_rule) {
    const char* c = kPalette[color++ % 10];
    // stderr band
    std::ostringstream band, line;
    for (const auto* p : pts) band << sx(p->t) << ',' << sy(p->mean + p->stderr_) << ' ';
    for (auto it = pts.rbegin(); it != pts.rend(); ++it)
      band << sx((*it)->t) << ',' << sy(std::max(0.0, (*it)->mean - (*it)->stderr_))
           << ' ';
    for (const auto* p : pts) line << sx(p->t) << ',' << sy(p->mean) << ' ';
    out << "<polygon points=\"" << band.str() << "\" fill=\"" << c
        << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n"
        << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << c
        << "\" stroke-width=\"1.6\"/>\n"
        << "<line x1=\"" << ml + pw + 14 << "\" y1=\"" << legend_y << "\" x2=\""
        << ml + pw + 38 << "\" y2=\"" << legend_y << "\" stroke=\"" << c
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << ml + pw + 44 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << rule << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
}

}  // namespace eims
