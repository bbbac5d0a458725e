#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polyakgrad/metrics.hpp"
#include "polyakgrad/twin_trainer.hpp"

namespace polyakgrad {

// Configuration errors (bad keys, unknown methods, seed overlaps).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string env_name = "cartpole";
  std::string method = "twin_polyak";  // twin_polyak | adam | sgd
  std::string policy_kind = "mlp";     // mlp | tree (tree only on twostep)
  int hidden_dim = 128;
  double lr = 1e-3;                    // adam / sgd step size
  double method_alpha = 0.0;           // entropy coefficient for adam / sgd
  PolyakConfig polyak;                 // also carries m, horizon, discount
  std::vector<std::uint64_t> train_seeds = {1, 2, 3};
  std::vector<std::uint64_t> eval_seeds = {101, 102, 103};
  int eval_every = 1;
  int ma_window = 10;
  std::string out_dir = "runs";
  std::array<double, 4> leaf_rewards = {0.1, 0.2, 0.3, 1.0};
  bool paper_scale = false;  // restores m = 500

  void validate() const;  // throws config_error
  std::string method_label() const;
};

struct OptConfig {
  int n = 1000;
  int d = 20;
  double margin = 0.1;
  std::string model = "linear";  // linear | mlp
  std::string method = "twin";   // twin | sgd | sps | sps_max | all
  double lr = 0.1;
  double c = 1.0;
  double gamma_b = 10.0;
  int iters = 20000;
  int eval_every = 10;
  double init_epsilon = 1e-3;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  std::string out_dir = "runs_opt";

  void validate() const;
};

// Flat key = value files with [section] headers; # and ; start comments.
// Returns "section.key" -> value.
std::map<std::string, std::string> parse_ini(const std::string& path);

ExperimentConfig load_experiment_config(const std::string& path);
OptConfig load_opt_config(const std::string& path);

// Trains every configured seed (skipping seeds whose metrics file already
// exists), writes one metrics CSV and one policy checkpoint per seed under
// out_dir, and returns the metrics file paths.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

// Finite-sum counterpart; one loss-series CSV per seed.
std::vector<std::string> run_opt_experiment(const OptConfig& cfg);

struct SeriesStat {
  std::string method;
  std::vector<int> iters;
  std::vector<double> mean;
  std::vector<double> min;
  std::vector<double> max;
};

struct MethodSummary {
  std::string method;
  int num_seeds;
  double final_eval_mean;
  double best_eval_mean;
  double median_gamma_last20;  // mean across seeds; NaN if not applicable
};

struct CompareReport {
  std::vector<MethodSummary> summary;
  std::vector<SeriesStat> eval_curves;       // moving-averaged
  std::vector<SeriesStat> step_size_traces;
  std::vector<SeriesStat> gap_traces;
};

// Aggregates per-method mean/min/max across seeds on a common iteration
// grid (resampling by nearest prior point) and writes plot-ready CSVs
// (eval_curves.csv, step_size_traces.csv, gap_traces.csv, summary.csv)
// under out_dir.
CompareReport compare_report(const std::vector<std::string>& metrics_files,
                             int ma_window, const std::string& out_dir);

}  // namespace polyakgrad
