#include "polyakgrad/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "polyakgrad/finite_sum.hpp"
#include "polyakgrad/gradients.hpp"
#include "polyakgrad/optim.hpp"
#include "polyakgrad/rollout.hpp"
#include "polyakgrad/two_step.hpp"

namespace polyakgrad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::string num(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& value) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      seeds.push_back(std::stoull(item));
    }
  }
  return seeds;
}

double median(std::vector<double> v) {
  if (v.empty()) {
    return kNaN;
  }
  std::sort(v.begin(), v.end());
  std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::map<std::string, std::string> parse_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("cannot open config file: " + path);
  }
  std::map<std::string, std::string> values;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw config_error(path + ":" + std::to_string(lineno) + ": empty key");
    }
    values[section.empty() ? key : section + "." + key] = value;
  }
  return values;
}

void ExperimentConfig::validate() const {
  if (env_name != "cartpole" && env_name != "acrobot" && env_name != "twostep") {
    throw config_error("unknown environment: " + env_name);
  }
  if (method != "twin_polyak" && method != "adam" && method != "sgd") {
    throw config_error("unknown method: " + method);
  }
  if (policy_kind != "mlp" && policy_kind != "tree") {
    throw config_error("unknown policy kind: " + policy_kind);
  }
  if (policy_kind == "tree" && env_name != "twostep") {
    throw config_error("the tree policy only runs on the twostep environment");
  }
  if (hidden_dim < 1) {
    throw config_error("hidden_dim must be >= 1");
  }
  if (lr < 0.0 || method_alpha < 0.0) {
    throw config_error("lr and alpha must be >= 0");
  }
  if (train_seeds.empty()) {
    throw config_error("at least one training seed is required");
  }
  if (eval_seeds.size() != 3) {
    throw config_error("exactly 3 evaluation seeds are required");
  }
  for (std::uint64_t e : eval_seeds) {
    if (std::find(train_seeds.begin(), train_seeds.end(), e) !=
        train_seeds.end()) {
      throw config_error("evaluation seeds must be disjoint from training seeds");
    }
  }
  if (eval_every < 1 || ma_window < 1) {
    throw config_error("eval_every and moving_average_window must be >= 1");
  }
  try {
    polyak.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(e.what());
  }
}

std::string ExperimentConfig::method_label() const {
  if (method == "twin_polyak") {
    return "twin_polyak_c" + num(polyak.c) + "_gb" + num(polyak.gamma_b) +
           "_a" + num(polyak.alpha);
  }
  return method + "_lr" + num(lr) + "_a" + num(method_alpha);
}

void OptConfig::validate() const {
  if (n < 2 || d < 1 || margin <= 0.0) {
    throw config_error("bad dataset parameters");
  }
  if (model != "linear" && model != "mlp") {
    throw config_error("unknown model: " + model);
  }
  if (method != "twin" && method != "sgd" && method != "sps" &&
      method != "sps_max" && method != "all") {
    throw config_error("unknown method: " + method);
  }
  if (lr < 0.0 || c <= 0.0 || gamma_b <= 0.0 || init_epsilon < 0.0) {
    throw config_error("bad optimizer parameters");
  }
  if (iters < 1 || eval_every < 1 || seeds.empty()) {
    throw config_error("bad iteration counts");
  }
}

namespace {

using KeyMap = std::map<std::string, std::string>;

// Applies every recognized key and rejects unknown ones.
void apply_experiment_keys(ExperimentConfig& cfg, const KeyMap& values) {
  // The method gates which lr/alpha section applies, so read it first.
  if (auto it = values.find("experiment.method"); it != values.end()) {
    cfg.method = it->second;
  }
  for (const auto& [key, value] : values) {
    if (key == "experiment.env") {
      cfg.env_name = value;
    } else if (key == "experiment.method") {
      cfg.method = value;
    } else if (key == "experiment.train_seeds") {
      cfg.train_seeds = parse_seed_list(value);
    } else if (key == "experiment.eval_seeds") {
      cfg.eval_seeds = parse_seed_list(value);
    } else if (key == "experiment.eval_every") {
      cfg.eval_every = std::stoi(value);
    } else if (key == "experiment.moving_average_window") {
      cfg.ma_window = std::stoi(value);
    } else if (key == "experiment.out") {
      cfg.out_dir = value;
    } else if (key == "experiment.max_updates") {
      cfg.polyak.max_iters = std::stoi(value);
    } else if (key == "experiment.paper_scale") {
      cfg.paper_scale = value == "1" || value == "true";
    } else if (key == "policy.kind") {
      cfg.policy_kind = value;
    } else if (key == "policy.hidden_dim") {
      cfg.hidden_dim = std::stoi(value);
    } else if (key == "rollout.m") {
      cfg.polyak.m = std::stoi(value);
    } else if (key == "rollout.horizon") {
      cfg.polyak.horizon = std::stoi(value);
    } else if (key == "rollout.discount") {
      cfg.polyak.discount = std::stod(value);
    } else if (key == "twin_polyak.c") {
      cfg.polyak.c = std::stod(value);
    } else if (key == "twin_polyak.gamma_b") {
      cfg.polyak.gamma_b = std::stod(value);
    } else if (key == "twin_polyak.alpha") {
      cfg.polyak.alpha = std::stod(value);
    } else if (key == "twin_polyak.init_epsilon") {
      cfg.polyak.init_epsilon = std::stod(value);
    } else if (key == "twin_polyak.stop_tol") {
      cfg.polyak.stop_tol = std::stod(value);
    } else if (key == "twin_polyak.stop_patience") {
      cfg.polyak.stop_patience = std::stoi(value);
    } else if (key == "adam.lr" || key == "sgd.lr") {
      if (key.substr(0, key.find('.')) == cfg.method) {
        cfg.lr = std::stod(value);
      }
    } else if (key == "adam.alpha" || key == "sgd.alpha") {
      if (key.substr(0, key.find('.')) == cfg.method) {
        cfg.method_alpha = std::stod(value);
      }
    } else if (key == "two_step.leaf_rewards") {
      std::stringstream ss(value);
      std::string item;
      int idx = 0;
      while (std::getline(ss, item, ',') && idx < 4) {
        cfg.leaf_rewards[idx++] = std::stod(trim(item));
      }
      if (idx != 4) {
        throw config_error("two_step.leaf_rewards needs 4 values");
      }
    } else if (key.rfind("opt.", 0) == 0) {
      // The finite-sum section is read by load_opt_config.
    } else {
      throw config_error("unknown config key: " + key);
    }
  }
}

void apply_opt_keys(OptConfig& cfg, const KeyMap& values) {
  for (const auto& [key, value] : values) {
    if (key.rfind("opt.", 0) != 0) {
      continue;  // RL sections are read by load_experiment_config
    }
    std::string k = key.substr(4);
    if (k == "n") {
      cfg.n = std::stoi(value);
    } else if (k == "d") {
      cfg.d = std::stoi(value);
    } else if (k == "margin") {
      cfg.margin = std::stod(value);
    } else if (k == "model") {
      cfg.model = value;
    } else if (k == "method") {
      cfg.method = value;
    } else if (k == "lr") {
      cfg.lr = std::stod(value);
    } else if (k == "c") {
      cfg.c = std::stod(value);
    } else if (k == "gamma_b") {
      cfg.gamma_b = std::stod(value);
    } else if (k == "iters") {
      cfg.iters = std::stoi(value);
    } else if (k == "eval_every") {
      cfg.eval_every = std::stoi(value);
    } else if (k == "init_epsilon") {
      cfg.init_epsilon = std::stod(value);
    } else if (k == "seeds") {
      cfg.seeds = parse_seed_list(value);
    } else if (k == "out") {
      cfg.out_dir = value;
    } else {
      throw config_error("unknown config key: " + key);
    }
  }
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig cfg;
  apply_experiment_keys(cfg, parse_ini(path));
  return cfg;
}

OptConfig load_opt_config(const std::string& path) {
  OptConfig cfg;
  apply_opt_keys(cfg, parse_ini(path));
  return cfg;
}

namespace {

std::unique_ptr<Environment> build_env(const ExperimentConfig& cfg) {
  EnvOptions opts;
  opts.two_step_leaf_rewards.assign(cfg.leaf_rewards.begin(),
                                    cfg.leaf_rewards.end());
  opts.horizon_override = cfg.polyak.horizon;
  return make_env(cfg.env_name, opts);
}

std::unique_ptr<Policy> build_prototype(const ExperimentConfig& cfg,
                                        const EnvSpec& spec) {
  if (cfg.policy_kind == "tree") {
    return std::make_unique<TreePolicy>();
  }
  return std::make_unique<MlpPolicy>(spec.obs_dim, cfg.hidden_dim,
                                     spec.num_actions);
}

std::vector<MetricsRow> train_fixed_step(const ExperimentConfig& cfg,
                                         Environment& env,
                                         const Policy& prototype,
                                         std::uint64_t seed,
                                         ParamVector& final_params) {
  const PolyakConfig& pc = cfg.polyak;
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  Rng init_rng = Rng::stream(seed, 1);
  auto policy = prototype.fresh_init(init_rng);
  AdamState adam(policy->num_params());
  std::vector<MetricsRow> rows;
  const std::string label = cfg.method_label();

  MetricsRow initial{label, seed, 0, kNaN, kNaN, kNaN, kNaN, false, kNaN, 0,
                     evaluate_greedy(env, *policy, cfg.eval_seeds), 0.0};
  initial.wall_time = elapsed();
  rows.push_back(initial);

  for (int k = 1; k <= pc.max_iters; ++k) {
    auto trajs = sample_trajectories(
        env, *policy, pc.m, pc.horizon,
        mix64(mix64(seed, static_cast<std::uint64_t>(k)), 4));
    ObjectiveEstimate est =
        estimate_objective(trajs, *policy, pc.discount, cfg.method_alpha);
    GradientEstimate grad =
        objective_gradient(trajs, *policy, pc.discount, cfg.method_alpha);
    ParamVector theta = policy->flatten();
    theta = cfg.method == "adam"
                ? adam_step(adam, theta, grad.grad, cfg.lr, Direction::Ascend)
                : sgd_step(theta, grad.grad, cfg.lr, Direction::Ascend);
    policy = policy->with_params(theta);

    MetricsRow row{label, seed,  k,     est.l_hat, kNaN, kNaN,
                   cfg.lr, false, grad.sq_norm, 1,        kNaN, 0.0};
    if (k % cfg.eval_every == 0) {
      row.eval_return = evaluate_greedy(env, *policy, cfg.eval_seeds);
    }
    row.wall_time = elapsed();
    rows.push_back(row);
  }
  final_params = policy->flatten();
  return rows;
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const std::string label = cfg.method_label();

  PolyakConfig pc = cfg.polyak;
  if (cfg.paper_scale) {
    pc.m = 500;
  }
  ExperimentConfig effective = cfg;
  effective.polyak = pc;

  std::vector<std::string> paths;
  for (std::uint64_t seed : cfg.train_seeds) {
    std::string path = cfg.out_dir + "/" + label + "_seed" +
                       std::to_string(seed) + ".csv";
    paths.push_back(path);
    if (std::filesystem::exists(path)) {
      continue;  // rerun resumes by skipping finished seeds
    }
    auto env = build_env(effective);
    auto prototype = build_prototype(effective, env->spec());

    std::vector<MetricsRow> rows;
    ParamVector best_params;
    if (cfg.method == "twin_polyak") {
      EvalOptions eval{cfg.eval_every, cfg.eval_seeds};
      TwinTrainResult result = twin_train(*env, *prototype, pc, seed, eval);
      rows.reserve(result.series.size());
      for (const IterationMetrics& it : result.series) {
        rows.push_back({label, seed, it.iter, it.l_hat_1, it.l_hat_2, it.gap,
                        it.gamma, it.capped, it.grad_sq_norm, it.updated_model,
                        it.eval_return, it.wall_time});
      }
      best_params =
          twin_best_policy(result.state, *env, *prototype, cfg.eval_seeds);
    } else {
      rows = train_fixed_step(effective, *env, *prototype, seed, best_params);
    }
    write_metrics_csv(path, rows);
    save_policy(*prototype->with_params(best_params),
                cfg.out_dir + "/" + label + "_seed" + std::to_string(seed) +
                    "_policy.txt");
  }
  return paths;
}

std::vector<std::string> run_opt_experiment(const OptConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);

  FiniteSumProblem problem;
  // The dataset is shared by all seeds; only the optimizer stream varies.
  problem.data = make_linearly_separable(cfg.n, cfg.d, cfg.margin, 12345);
  problem.model_kind = cfg.model == "mlp" ? ModelKind::Mlp : ModelKind::Linear;

  std::vector<std::string> paths;
  for (std::uint64_t seed : cfg.seeds) {
    std::string path = cfg.out_dir + "/opt_" + cfg.method + "_seed" +
                       std::to_string(seed) + ".csv";
    paths.push_back(path);
    if (std::filesystem::exists(path)) {
      continue;
    }
    std::vector<LossSeries> series;
    auto add_baseline = [&](BaselineMethod method, double lr) {
      BaselineConfig bc{method, lr, cfg.c, cfg.gamma_b};
      series.push_back(
          run_baseline(problem, bc, cfg.iters, seed, cfg.eval_every));
    };
    if (cfg.method == "twin" || cfg.method == "all") {
      series.push_back(run_twin(problem, cfg.iters, seed, cfg.eval_every, 1.0,
                                std::numeric_limits<double>::infinity(),
                                cfg.init_epsilon));
    }
    if (cfg.method == "sgd") {
      add_baseline(BaselineMethod::Sgd, cfg.lr);
    } else if (cfg.method == "all") {
      for (double lr : {1.0, 0.1, 0.01, 0.001}) {
        add_baseline(BaselineMethod::Sgd, lr);
      }
    }
    if (cfg.method == "sps" || cfg.method == "all") {
      add_baseline(BaselineMethod::Sps, cfg.lr);
    }
    if (cfg.method == "sps_max" || cfg.method == "all") {
      add_baseline(BaselineMethod::SpsMax, cfg.lr);
    }
    save_loss_series_csv(series, path);
  }
  return paths;
}

namespace {

struct SeedSeries {
  std::vector<int> iters;
  std::vector<double> values;
};

// Value at the nearest prior grid point; the first value backfills earlier
// grid points.
double resample_prior(const SeedSeries& s, int iter) {
  auto it = std::upper_bound(s.iters.begin(), s.iters.end(), iter);
  if (it == s.iters.begin()) {
    return s.values.front();
  }
  return s.values[static_cast<std::size_t>(it - s.iters.begin()) - 1];
}

SeriesStat aggregate(const std::string& method,
                     const std::vector<SeedSeries>& seeds) {
  std::set<int> grid;
  for (const SeedSeries& s : seeds) {
    grid.insert(s.iters.begin(), s.iters.end());
  }
  SeriesStat stat;
  stat.method = method;
  for (int iter : grid) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const SeedSeries& s : seeds) {
      double v = resample_prior(s, iter);
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      sum += v;
    }
    stat.iters.push_back(iter);
    stat.mean.push_back(sum / static_cast<double>(seeds.size()));
    stat.min.push_back(mn);
    stat.max.push_back(mx);
  }
  return stat;
}

void write_series_csv(const std::string& path,
                      const std::vector<SeriesStat>& stats) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("compare_report: cannot open " + path);
  }
  out.precision(17);
  out << "method,iter,mean,min,max\n";
  for (const SeriesStat& s : stats) {
    for (std::size_t k = 0; k < s.iters.size(); ++k) {
      out << s.method << ',' << s.iters[k] << ',' << s.mean[k] << ','
          << s.min[k] << ',' << s.max[k] << '\n';
    }
  }
}

}  // namespace

CompareReport compare_report(const std::vector<std::string>& metrics_files,
                             int ma_window, const std::string& out_dir) {
  if (metrics_files.empty()) {
    throw config_error("compare_report: no metrics files");
  }
  if (ma_window < 1) {
    throw config_error("compare_report: window must be >= 1");
  }
  // method -> seed -> rows
  std::map<std::string, std::map<std::uint64_t, std::vector<MetricsRow>>> runs;
  for (const std::string& file : metrics_files) {
    for (MetricsRow& row : read_metrics_csv(file)) {
      runs[row.method][row.seed].push_back(std::move(row));
    }
  }

  CompareReport report;
  for (auto& [method, by_seed] : runs) {
    std::vector<SeedSeries> eval_series, gamma_series, gap_series;
    MethodSummary summary{method, static_cast<int>(by_seed.size()), 0.0, 0.0,
                          0.0};
    int gamma_seeds = 0;
    for (auto& [seed, rows] : by_seed) {
      std::sort(rows.begin(), rows.end(),
                [](const MetricsRow& a, const MetricsRow& b) {
                  return a.iter < b.iter;
                });
      SeedSeries evals, gammas, gaps;
      std::vector<double> productive_gammas;
      for (const MetricsRow& r : rows) {
        if (!std::isnan(r.eval_return)) {
          evals.iters.push_back(r.iter);
          evals.values.push_back(r.eval_return);
        }
        if (r.iter >= 1 && !std::isnan(r.gamma)) {
          gammas.iters.push_back(r.iter);
          gammas.values.push_back(r.gamma);
        }
        if (!std::isnan(r.gap)) {
          gaps.iters.push_back(r.iter);
          gaps.values.push_back(r.gap);
        }
        if (r.updated_model != 0) {
          productive_gammas.push_back(r.gamma);
        }
      }
      if (!evals.values.empty()) {
        std::vector<double> smoothed = moving_average(evals.values, ma_window);
        summary.final_eval_mean += smoothed.back();
        summary.best_eval_mean +=
            *std::max_element(evals.values.begin(), evals.values.end());
        evals.values = std::move(smoothed);
        eval_series.push_back(std::move(evals));
      }
      if (!gammas.values.empty()) {
        gamma_series.push_back(std::move(gammas));
      }
      if (!gaps.values.empty()) {
        gap_series.push_back(std::move(gaps));
      }
      if (productive_gammas.size() >= 1) {
        std::size_t take = std::min<std::size_t>(20, productive_gammas.size());
        std::vector<double> tail(productive_gammas.end() - take,
                                 productive_gammas.end());
        summary.median_gamma_last20 += median(tail);
        ++gamma_seeds;
      }
    }
    if (!eval_series.empty()) {
      summary.final_eval_mean /= static_cast<double>(eval_series.size());
      summary.best_eval_mean /= static_cast<double>(eval_series.size());
      report.eval_curves.push_back(aggregate(method, eval_series));
    } else {
      summary.final_eval_mean = kNaN;
      summary.best_eval_mean = kNaN;
    }
    summary.median_gamma_last20 =
        gamma_seeds > 0 ? summary.median_gamma_last20 / gamma_seeds : kNaN;
    if (!gamma_series.empty()) {
      report.step_size_traces.push_back(aggregate(method, gamma_series));
    }
    if (!gap_series.empty()) {
      report.gap_traces.push_back(aggregate(method, gap_series));
    }
    report.summary.push_back(summary);
  }

  std::filesystem::create_directories(out_dir);
  write_series_csv(out_dir + "/eval_curves.csv", report.eval_curves);
  write_series_csv(out_dir + "/step_size_traces.csv", report.step_size_traces);
  write_series_csv(out_dir + "/gap_traces.csv", report.gap_traces);
  std::ofstream summary_out(out_dir + "/summary.csv");
  summary_out.precision(17);
  summary_out << "method,num_seeds,final_eval_mean,best_eval_mean,"
                 "median_gamma_last20\n";
  for (const MethodSummary& s : report.summary) {
    summary_out << s.method << ',' << s.num_seeds << ',' << s.final_eval_mean
                << ',' << s.best_eval_mean << ',' << s.median_gamma_last20
                << '\n';
  }
  return report;
}

}  // namespace polyakgrad
