#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "polyakgrad/harness.hpp"
#include "polyakgrad/policy.hpp"
#include "polyakgrad/rollout.hpp"

using namespace polyakgrad;

namespace {

struct RlFlags {
  std::string config;
  std::string env, method, policy, out;
  std::uint64_t seed = 0;
  int m = 0, horizon = 0, max_updates = 0, eval_every = 0, hidden = 0;
  double discount = -1, c = -1, gamma_b = -1, alpha = -1, lr = -1;
  bool paper_scale = false;
};

void add_rl_flags(CLI::App* cmd, RlFlags& f) {
  cmd->add_option("--config", f.config, "Config file (key = value sections)");
  cmd->add_option("--seed", f.seed, "Train a single seed instead of the configured list");
  cmd->add_option("--out", f.out, "Output directory for metrics and checkpoints");
  cmd->add_option("--env", f.env, "cartpole | acrobot | twostep");
  cmd->add_option("--method", f.method, "twin_polyak | adam | sgd");
  cmd->add_option("--policy", f.policy, "mlp | tree");
  cmd->add_option("--hidden-dim", f.hidden, "MLP hidden width");
  cmd->add_option("--m", f.m, "Trajectories per model per update");
  cmd->add_option("--horizon", f.horizon, "Trajectory horizon");
  cmd->add_option("--discount", f.discount, "Discount factor");
  cmd->add_option("--c", f.c, "SPS_max scaling constant");
  cmd->add_option("--gamma-b", f.gamma_b, "SPS_max step-size bound");
  cmd->add_option("--alpha", f.alpha, "Entropy coefficient");
  cmd->add_option("--lr", f.lr, "Fixed step size for adam/sgd");
  cmd->add_option("--max-updates", f.max_updates, "Policy update budget");
  cmd->add_option("--eval-every", f.eval_every, "Greedy evaluation cadence");
  cmd->add_flag("--paper-scale", f.paper_scale, "Use 500 trajectories per update");
}

ExperimentConfig resolve_rl(const CLI::App* cmd, const RlFlags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = load_experiment_config(f.config);
  }
  if (cmd->count("--env")) cfg.env_name = f.env;
  if (cmd->count("--method")) cfg.method = f.method;
  if (cmd->count("--policy")) cfg.policy_kind = f.policy;
  if (cmd->count("--hidden-dim")) cfg.hidden_dim = f.hidden;
  if (cmd->count("--seed")) cfg.train_seeds = {f.seed};
  if (cmd->count("--out")) cfg.out_dir = f.out;
  if (cmd->count("--m")) cfg.polyak.m = f.m;
  if (cmd->count("--horizon")) cfg.polyak.horizon = f.horizon;
  if (cmd->count("--discount")) cfg.polyak.discount = f.discount;
  if (cmd->count("--c")) cfg.polyak.c = f.c;
  if (cmd->count("--gamma-b")) cfg.polyak.gamma_b = f.gamma_b;
  if (cmd->count("--alpha")) {
    cfg.polyak.alpha = f.alpha;
    cfg.method_alpha = f.alpha;
  }
  if (cmd->count("--lr")) cfg.lr = f.lr;
  if (cmd->count("--max-updates")) cfg.polyak.max_iters = f.max_updates;
  if (cmd->count("--eval-every")) cfg.eval_every = f.eval_every;
  if (f.paper_scale) cfg.paper_scale = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy gradient with the stochastic Polyak step-size"};
  app.require_subcommand(1);

  // train-rl ---------------------------------------------------------------
  auto* train_rl = app.add_subcommand(
      "train-rl", "Train a policy (twin Polyak, Adam, or SGD) and write metrics");
  RlFlags rl;
  add_rl_flags(train_rl, rl);

  // train-opt --------------------------------------------------------------
  auto* train_opt = app.add_subcommand(
      "train-opt", "Finite-sum logistic regression with twin-SPS and baselines");
  struct {
    std::string config, out, method, model;
    std::uint64_t seed = 0;
    int n = 0, d = 0, iters = 0, eval_every = 0;
    double margin = -1, lr = -1, c = -1, gamma_b = -1;
  } opt;
  train_opt->add_option("--config", opt.config, "Config file");
  train_opt->add_option("--seed", opt.seed, "Run a single seed");
  train_opt->add_option("--out", opt.out, "Output directory");
  train_opt->add_option("--method", opt.method, "twin | sgd | sps | sps_max | all");
  train_opt->add_option("--model", opt.model, "linear | mlp");
  train_opt->add_option("--n", opt.n, "Number of examples");
  train_opt->add_option("--d", opt.d, "Feature dimension");
  train_opt->add_option("--margin", opt.margin, "Separation margin");
  train_opt->add_option("--lr", opt.lr, "SGD step size");
  train_opt->add_option("--c", opt.c, "SPS scaling constant");
  train_opt->add_option("--gamma-b", opt.gamma_b, "SPS_max bound");
  train_opt->add_option("--iters", opt.iters, "Single-sample iterations");
  train_opt->add_option("--eval-every", opt.eval_every, "Full-objective cadence");

  // eval -------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand(
      "eval", "Greedy-evaluate a saved policy checkpoint");
  struct {
    std::string checkpoint, env = "cartpole";
    std::vector<std::uint64_t> seeds = {101, 102, 103};
    int horizon = 0;
  } ev;
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Policy checkpoint file")
      ->required();
  eval_cmd->add_option("--env", ev.env, "cartpole | acrobot | twostep");
  eval_cmd->add_option("--seeds", ev.seeds, "Evaluation seeds");
  eval_cmd->add_option("--horizon", ev.horizon, "Episode cap (default per env)");

  // compare ----------------------------------------------------------------
  auto* compare_cmd = app.add_subcommand(
      "compare", "Summarize metrics files into plot-ready curves");
  struct {
    std::vector<std::string> files;
    std::string out = "report";
    int window = 10;
  } cmp;
  compare_cmd->add_option("files", cmp.files, "Metrics CSV files")->required();
  compare_cmd->add_option("--out", cmp.out, "Report directory");
  compare_cmd->add_option("--window", cmp.window, "Moving-average window");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_rl->parsed()) {
      ExperimentConfig cfg = resolve_rl(train_rl, rl);
      auto paths = run_experiment(cfg);
      for (const auto& p : paths) {
        std::cout << p << "\n";
      }
    } else if (train_opt->parsed()) {
      OptConfig cfg;
      if (!opt.config.empty()) {
        cfg = load_opt_config(opt.config);
      }
      if (train_opt->count("--seed")) cfg.seeds = {opt.seed};
      if (train_opt->count("--out")) cfg.out_dir = opt.out;
      if (train_opt->count("--method")) cfg.method = opt.method;
      if (train_opt->count("--model")) cfg.model = opt.model;
      if (train_opt->count("--n")) cfg.n = opt.n;
      if (train_opt->count("--d")) cfg.d = opt.d;
      if (train_opt->count("--margin")) cfg.margin = opt.margin;
      if (train_opt->count("--lr")) cfg.lr = opt.lr;
      if (train_opt->count("--c")) cfg.c = opt.c;
      if (train_opt->count("--gamma-b")) cfg.gamma_b = opt.gamma_b;
      if (train_opt->count("--iters")) cfg.iters = opt.iters;
      if (train_opt->count("--eval-every")) cfg.eval_every = opt.eval_every;
      auto paths = run_opt_experiment(cfg);
      for (const auto& p : paths) {
        std::cout << p << "\n";
      }
    } else if (eval_cmd->parsed()) {
      auto policy = load_policy(ev.checkpoint);
      EnvOptions opts;
      opts.horizon_override = ev.horizon;
      auto env = make_env(ev.env, opts);
      double ret = evaluate_greedy(*env, *policy, ev.seeds);
      std::cout << "greedy return over " << ev.seeds.size()
                << " seeds: " << ret << "\n";
    } else if (compare_cmd->parsed()) {
      CompareReport report = compare_report(cmp.files, cmp.window, cmp.out);
      std::printf("%-32s %6s %14s %14s %18s\n", "method", "seeds", "final_eval",
                  "best_eval", "median_gam_last20");
      for (const MethodSummary& s : report.summary) {
        std::printf("%-32s %6d %14.4f %14.4f %18.6f\n", s.method.c_str(),
                    s.num_seeds, s.final_eval_mean, s.best_eval_mean,
                    s.median_gamma_last20);
      }
      std::cout << "wrote " << cmp.out
                << "/{eval_curves,step_size_traces,gap_traces,summary}.csv\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
