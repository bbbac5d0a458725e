// Acceptance suite: every release criterion in one binary, one line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "polyakgrad/acrobot.hpp"
#include "polyakgrad/cartpole.hpp"
#include "polyakgrad/finite_sum.hpp"
#include "polyakgrad/gradients.hpp"
#include "polyakgrad/harness.hpp"
#include "polyakgrad/optim.hpp"
#include "polyakgrad/rollout.hpp"
#include "polyakgrad/twin_trainer.hpp"
#include "polyakgrad/two_step.hpp"

using namespace polyakgrad;
using namespace polyakgrad::testing;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

// ---------------------------------------------------------------------------
// 1. GPOMDP expectation equals the exact two-step gradient; the Monte-Carlo
//    mean lands within three standard errors.
Check criterion_gradient_oracle() {
  Check check;
  TwoStepEnv env;
  const double gamma = 0.99;
  for (TreePolicy policy : {TreePolicy(), TreePolicy(0.3, -0.2, 0.5)}) {
    ParamVector exact = exact_gradient_twostep(env, policy, gamma, 0.0);
    ParamVector weighted(3, 0.0);
    for (const auto& e : enumerate_trajectories(env, policy, gamma)) {
      std::vector<Trajectory> one = {e.trajectory};
      axpy(e.probability, gpomdp(one, policy, gamma).grad, weighted);
    }
    for (int k = 0; k < 3; ++k) {
      check.require(std::abs(weighted[k] - exact[k]) < 1e-10,
                    "enumerated expectation off at component " +
                        std::to_string(k));
    }
  }

  TreePolicy policy(0.3, -0.2, 0.5);
  ParamVector exact = exact_gradient_twostep(env, policy, gamma, 0.0);
  const int n = 100000;
  ParamVector sum(3, 0.0), sum_sq(3, 0.0);
  for (int i = 0; i < n; ++i) {
    Rng rng = Rng::stream(7117, static_cast<std::uint64_t>(i));
    Trajectory traj = sample_trajectory(env, policy, 2, rng);
    ParamVector g = gpomdp({traj}, policy, gamma).grad;
    for (int k = 0; k < 3; ++k) {
      sum[k] += g[k];
      sum_sq[k] += g[k] * g[k];
    }
  }
  for (int k = 0; k < 3; ++k) {
    double mean = sum[k] / n;
    double var = (sum_sq[k] / n - mean * mean) * n / (n - 1.0);
    double se = std::sqrt(var / n);
    check.require(std::abs(mean - exact[k]) < 3.0 * se,
                  "monte-carlo mean outside three standard errors");
  }
  return check;
}

// ---------------------------------------------------------------------------
// 2. Central finite differences confirm every analytic gradient path at 1e-4
//    relative error over 100 random instances.
Check criterion_finite_differences() {
  Check check;

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    MlpPolicy policy = random_mlp(4, 32, 3, seed);
    auto obs = random_obs(4, seed + 9000);
    int action = static_cast<int>(seed % 3);
    ParamVector lp = policy.log_prob_gradient(obs, action);
    ParamVector lp_fd = finite_difference_gradient(
        [&](const ParamVector& p) {
          return std::log(policy.with_params(p)->forward(obs).probs[action]);
        },
        policy.flatten());
    check.require(relative_error(lp, lp_fd) < 1e-4, "log_prob_gradient");

    ParamVector ent = policy.entropy_gradient(obs);
    ParamVector ent_fd = finite_difference_gradient(
        [&](const ParamVector& p) {
          return entropy(policy.with_params(p)->forward(obs));
        },
        policy.flatten());
    check.require(relative_error(ent, ent_fd) < 1e-4, "entropy_gradient");
  }

  // objective_gradient against the enumerated objective (visitation frozen
  // at the evaluation point, matching the plug-in entropy estimator).
  TwoStepEnv env;
  const double gamma = 0.99;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 40);
    TreePolicy policy(rng.uniform(-2, 2), rng.uniform(-2, 2),
                      rng.uniform(-2, 2));
    double alpha = 0.05 + 0.5 * rng.uniform();
    ParamVector weighted(3, 0.0);
    for (const auto& e : enumerate_trajectories(env, policy, gamma)) {
      std::vector<Trajectory> one = {e.trajectory};
      axpy(e.probability, objective_gradient(one, policy, gamma, alpha).grad,
           weighted);
    }
    double p_left = policy.forward(TwoStepEnv::one_hot(0)).probs[0];
    ParamVector numeric = finite_difference_gradient(
        [&](const ParamVector& params) {
          auto probe = policy.with_params(params);
          double ent =
              entropy(probe->forward(TwoStepEnv::one_hot(0))) +
              gamma * (p_left * entropy(probe->forward(TwoStepEnv::one_hot(1))) +
                       (1.0 - p_left) *
                           entropy(probe->forward(TwoStepEnv::one_hot(2))));
          return exact_value_twostep(env, *probe, gamma, 0.0) + alpha * ent;
        },
        policy.flatten());
    check.require(relative_error(weighted, numeric) < 1e-4,
                  "objective_gradient vs enumerated objective");
  }

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    FiniteSumProblem problem;
    problem.data = make_linearly_separable(40, 8, 0.1, 1234 + seed % 3);
    problem.model_kind = seed % 2 == 0 ? ModelKind::Linear : ModelKind::Mlp;
    problem.mlp_hidden = 8;
    ParamVector x = problem.init_params(seed);
    Rng rng(seed + 71);
    for (double& v : x) {
      v += 0.3 * rng.normal();
    }
    int i = rng.uniform_int(problem.n());
    ParamVector grad = problem.loss_and_grad(x, i).second;
    ParamVector fd = finite_difference_gradient(
        [&](const ParamVector& p) { return problem.loss(p, i); }, x, 1e-6);
    check.require(relative_error(grad, fd) < 1e-4, "loss_and_grad");
  }
  return check;
}

// ---------------------------------------------------------------------------
// 3. Conditioning on a repeated non-optimal trajectory explodes the uncapped
//    ratio without the entropy penalty and stays bounded with it.
Check criterion_explosion() {
  Check check;
  auto unpenalized = explosion_ratios(0.0, 1.0, 1.0, 500);
  double peak = 0.0;
  for (double r : unpenalized) {
    peak = std::max(peak, r);
  }
  check.require(peak > 1e3, "ratio never exceeded 1e3 with alpha = 0");

  auto penalized = explosion_ratios(0.1, 1.0, 1.0, 1000);
  for (double r : penalized) {
    check.require(r < 1e3, "ratio exceeded 1e3 with alpha = 0.1");
  }
  return check;
}

// ---------------------------------------------------------------------------
// 4. Step-size formulas: arithmetic examples, cap flag, error branches.
Check criterion_step_size_formulas() {
  Check check;
  check.require(polyak_step(2.0, 0.0, 4.0) == 0.5, "polyak 2/4");
  check.require(polyak_step(1.0, 1.0, 8.0) == 0.0, "polyak zero gap");
  check.require(polyak_step(3.0, 1.0, 8.0) == 0.25, "polyak (3-1)/8");

  StepSizeRecord a = sps_max(4.0, 0.0, 16.0, 0.5, 10.0);
  check.require(a.gamma == 0.5 && !a.capped, "sps_max uncapped");
  StepSizeRecord b = sps_max(100.0, 0.0, 1.0, 1.0, 2.0);
  check.require(b.gamma == 2.0 && b.capped, "sps_max capped");
  check.require(sps_max(1.0, 1.0, 4.0, 1.0, 2.0).gamma == 0.0, "sps_max tie");

  StepSizeRecord c = rl_sps_max(2.0, 1.0, 4.0, 1.0, 1.0);
  check.require(c.gamma == 0.25 && !c.capped, "rl_sps_max quarter");
  check.require(rl_sps_max(1.5, 1.5, 1.0, 1.0, 1.0).gamma == 0.0,
                "rl_sps_max tie");
  StepSizeRecord d = rl_sps_max(2.0, 1.0, 1e-12, 1.0, 1.0);
  check.require(d.gamma == 1.0 && d.capped, "rl_sps_max cap on tiny norm");

  bool threw = false;
  try {
    sps_max(1.0, 0.0, 0.0, 1.0, 1.0);
  } catch (const degenerate_gradient_error&) {
    threw = true;
  }
  check.require(threw, "sps_max zero-norm error");

  threw = false;
  try {
    rl_sps_max(1.0, 2.0, 4.0, 1.0, 1.0);
  } catch (const std::invalid_argument&) {
    threw = true;
  }
  check.require(threw, "rl_sps_max ordering error");
  return check;
}

// ---------------------------------------------------------------------------
// 5. Adam against an independent reference implementation.
Check criterion_adam_oracle() {
  Check check;

  struct ReferenceAdam {
    std::vector<double> m, v;
    int t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<double> update(std::vector<double> theta,
                               const std::vector<double>& g, double lr) {
      t += 1;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = beta1 * m[i] + (1 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1 - beta2) * g[i] * g[i];
        double m_hat = m[i] / (1 - std::pow(beta1, t));
        double v_hat = v[i] / (1 - std::pow(beta2, t));
        theta[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
      }
      return theta;
    }
  };

  AdamState state(1);
  ReferenceAdam reference{{0.0}, {0.0}};
  ParamVector ours = {1.0};
  std::vector<double> theirs = {1.0};
  for (int k = 0; k < 10; ++k) {
    ours = adam_step(state, ours, {2.0 * ours[0]}, 0.1, Direction::Descend);
    theirs = reference.update(theirs, {2.0 * theirs[0]}, 0.1);
    check.require(ours[0] == theirs[0],
                  "quadratic trajectory diverged at step " + std::to_string(k));
  }

  AdamState fresh(2);
  ParamVector theta = {0.0, 0.0};
  ParamVector grad = {0.7, -3.0};
  ParamVector next = adam_step(fresh, theta, grad, 0.05, Direction::Descend);
  for (int i = 0; i < 2; ++i) {
    double expected = -0.05 * (grad[i] > 0 ? 1.0 : -1.0);
    check.require(std::abs(next[i] - expected) < 0.05 * 1e-6,
                  "first step is not lr * sign(g)");
  }
  return check;
}

// ---------------------------------------------------------------------------
// Shared desk-run helper for criteria 6 and 7.
struct DeskRun {
  std::vector<IterationMetrics> series;
  double initial_eval;
  double best_eval;
  int first_success_iter;  // -1 if the threshold was never reached
  double median_gamma_last20;
};

DeskRun desk_run(Environment& env, const PolyakConfig& cfg, std::uint64_t seed,
                 double success_threshold) {
  MlpPolicy prototype(env.spec().obs_dim, 128, env.spec().num_actions);
  EvalOptions eval{1, {101, 102, 103}};
  TwinTrainResult result = twin_train(env, prototype, cfg, seed, eval);

  DeskRun run;
  run.series = result.series;
  run.initial_eval = result.series.front().eval_return;
  run.best_eval = -1e300;
  run.first_success_iter = -1;
  std::vector<double> productive;
  for (const IterationMetrics& it : result.series) {
    if (!std::isnan(it.eval_return)) {
      run.best_eval = std::max(run.best_eval, it.eval_return);
      if (run.first_success_iter < 0 && it.eval_return >= success_threshold) {
        run.first_success_iter = it.iter;
      }
    }
    if (it.updated_model != 0) {
      productive.push_back(it.gamma);
    }
  }
  std::size_t take = std::min<std::size_t>(20, productive.size());
  std::vector<double> tail(productive.end() - take, productive.end());
  std::sort(tail.begin(), tail.end());
  run.median_gamma_last20 =
      tail.empty() ? std::nan("")
                   : (tail.size() % 2 == 1
                          ? tail[tail.size() / 2]
                          : 0.5 * (tail[tail.size() / 2 - 1] +
                                   tail[tail.size() / 2]));
  return run;
}

PolyakConfig desk_config(int horizon) {
  PolyakConfig cfg;
  cfg.c = 5.0;
  cfg.gamma_b = 1.0;
  cfg.alpha = 0.01;
  cfg.m = 50;
  cfg.horizon = horizon;
  cfg.discount = 0.99;
  cfg.max_iters = 300;
  return cfg;
}

// 6. CartPole desk run: greedy return 195 within 300 updates on two of three
//    seeds, with the step size collapsing afterwards.
Check criterion_cartpole() {
  Check check;
  int successes = 0;
  std::string log;
  for (std::uint64_t seed : {1, 2, 3}) {
    CartPoleEnv env(200);
    DeskRun run = desk_run(env, desk_config(200), seed, 195.0);
    bool reached = run.first_success_iter >= 0;
    bool settled = run.median_gamma_last20 < 0.1 * 1.0;
    if (reached && settled) {
      ++successes;
    }
    log += " seed" + std::to_string(seed) + ": best=" +
           std::to_string(run.best_eval) + " first195=" +
           std::to_string(run.first_success_iter) + " medgam=" +
           std::to_string(run.median_gamma_last20);
  }
  check.require(successes >= 2, "only " + std::to_string(successes) +
                                    "/3 seeds converged;" + log);
  return check;
}

// 7. Acrobot desk run: mean greedy return improves by 200 within 300 updates
//    on two of three seeds. The gradient estimate on this task is variance
//    dominated at m = 50, so the run uses a smaller c and never stops early.
Check criterion_acrobot() {
  Check check;
  int successes = 0;
  std::string log;
  for (std::uint64_t seed : {1, 2, 3}) {
    AcrobotEnv env(500);
    PolyakConfig cfg = desk_config(500);
    cfg.c = 0.1;
    cfg.stop_tol = 0.0;
    DeskRun run = desk_run(env, cfg, seed, 1e300);
    double improvement = run.best_eval - run.initial_eval;
    if (improvement >= 200.0) {
      ++successes;
    }
    log += " seed" + std::to_string(seed) + ": init=" +
           std::to_string(run.initial_eval) + " best=" +
           std::to_string(run.best_eval);
  }
  check.require(successes >= 2, "only " + std::to_string(successes) +
                                    "/3 seeds improved by 200;" + log);
  return check;
}

// ---------------------------------------------------------------------------
// 8. Hyper-parameter-free twin-SPS within a factor two of the best members
//    of the SGD grid on separable logistic regression.
Check criterion_finite_sum() {
  Check check;
  FiniteSumProblem problem;
  problem.data = make_linearly_separable(1000, 20, 0.1, 12345);

  const int budget = 60000, eval_every = 10;
  auto iters_below = [&](const LossSeries& series) {
    for (std::size_t k = 0; k < series.iters.size(); ++k) {
      if (series.f_full[k] < 1e-2) {
        return series.iters[k];
      }
    }
    return -1;
  };

  int best_sgd = -1;
  for (double lr : {1.0, 0.1, 0.01, 0.001}) {
    BaselineConfig cfg{BaselineMethod::Sgd, lr, 1.0, 10.0};
    int iters = iters_below(run_baseline(problem, cfg, budget, 1, eval_every));
    if (iters >= 0 && (best_sgd < 0 || iters < best_sgd)) {
      best_sgd = iters;
    }
  }
  check.require(best_sgd > 0, "no SGD grid member reached 1e-2 in budget");

  int twin = iters_below(run_twin(problem, budget, 1, eval_every));
  check.require(twin > 0, "twin-SPS never reached 1e-2 in budget");
  if (best_sgd > 0 && twin > 0) {
    check.require(twin <= 2 * best_sgd,
                  "twin needed " + std::to_string(twin) + " vs best SGD " +
                      std::to_string(best_sgd));
  }
  return check;
}

// ---------------------------------------------------------------------------
// 9. Determinism, freeze invariant, step-size bounds, seed disjointness.
Check criterion_determinism() {
  Check check;
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / "polyakgrad_acceptance";
  fs::remove_all(dir);

  ExperimentConfig cfg;
  cfg.env_name = "twostep";
  cfg.method = "twin_polyak";
  cfg.policy_kind = "tree";
  cfg.train_seeds = {1, 2};
  cfg.eval_seeds = {101, 102, 103};
  cfg.out_dir = (dir / "a").string();
  cfg.polyak.m = 8;
  cfg.polyak.horizon = 2;
  cfg.polyak.max_iters = 30;
  cfg.polyak.alpha = 0.05;

  auto first = run_experiment(cfg);
  cfg.out_dir = (dir / "b").string();
  auto second = run_experiment(cfg);
  auto eq = [](double x, double y) {
    return x == y || (std::isnan(x) && std::isnan(y));
  };
  for (std::size_t f = 0; f < first.size(); ++f) {
    auto ra = read_metrics_csv(first[f]);
    auto rb = read_metrics_csv(second[f]);
    check.require(ra.size() == rb.size(), "metrics length changed on rerun");
    for (std::size_t i = 0; i < std::min(ra.size(), rb.size()); ++i) {
      bool same = ra[i].method == rb[i].method && ra[i].seed == rb[i].seed &&
                  ra[i].iter == rb[i].iter && eq(ra[i].l_hat_1, rb[i].l_hat_1) &&
                  eq(ra[i].l_hat_2, rb[i].l_hat_2) && eq(ra[i].gap, rb[i].gap) &&
                  eq(ra[i].gamma, rb[i].gamma) && ra[i].capped == rb[i].capped &&
                  eq(ra[i].grad_sq_norm, rb[i].grad_sq_norm) &&
                  ra[i].updated_model == rb[i].updated_model &&
                  eq(ra[i].eval_return, rb[i].eval_return);
      check.require(same, "metrics row differs between identical reruns");
      check.require(std::isnan(ra[i].gamma) ||
                        (ra[i].gamma >= 0.0 && ra[i].gamma <= cfg.polyak.gamma_b),
                    "logged gamma outside [0, gamma_b]");
    }
  }
  fs::remove_all(dir);

  // Freeze invariant on a real environment.
  CartPoleEnv env(50);
  MlpPolicy prototype(4, 16, 2);
  PolyakConfig pc;
  pc.m = 5;
  pc.horizon = 50;
  pc.alpha = 0.01;
  TwinState state = twin_init(prototype, 3, 1e-3);
  for (int k = 0; k < 10; ++k) {
    ParamVector before1 = state.theta1;
    ParamVector before2 = state.theta2;
    IterationMetrics it = twin_rl_iteration(state, env, prototype, pc, 3);
    if (it.updated_model == 1) {
      check.require(state.theta2 == before2, "frozen model 2 changed");
    } else if (it.updated_model == 2) {
      check.require(state.theta1 == before1, "frozen model 1 changed");
    } else {
      check.require(state.theta1 == before1 && state.theta2 == before2,
                    "tie iteration changed a model");
    }
    check.require(it.gamma >= 0.0 && it.gamma <= pc.gamma_b,
                  "iteration gamma outside [0, gamma_b]");
  }

  // Eval/training seed disjointness is a hard configuration error.
  ExperimentConfig overlapping = cfg;
  overlapping.eval_seeds = {1, 102, 103};
  bool threw = false;
  try {
    overlapping.validate();
  } catch (const config_error&) {
    threw = true;
  }
  check.require(threw, "overlapping eval seeds were accepted");
  return check;
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int number;
    const char* title;
    std::function<Check()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "gradient oracle equivalence on the two-step tree",
       criterion_gradient_oracle},
      {2, "finite-difference suite (1e-4 relative, 100 instances)",
       criterion_finite_differences},
      {3, "explosion without entropy, bounded ratio with entropy",
       criterion_explosion},
      {4, "step-size formula unit suite", criterion_step_size_formulas},
      {5, "adam matches the independent reference bit for bit",
       criterion_adam_oracle},
      {6, "cartpole desk run reaches 195 and the step size collapses",
       criterion_cartpole},
      {7, "acrobot desk run improves greedy return by 200",
       criterion_acrobot},
      {8, "twin-SPS within 2x of the best SGD on separable logistic "
          "regression",
       criterion_finite_sum},
      {9, "determinism, freeze invariant, step-size bounds, seed disjointness",
       criterion_determinism},
  };

  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (const Criterion& criterion : criteria) {
    if (only != 0 && criterion.number != only) {
      continue;
    }
    auto start = std::chrono::steady_clock::now();
    Check result = criterion.run();
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n",
                result.ok ? "PASS" : "FAIL", criterion.number, criterion.title,
                secs, result.ok ? "" : " -- ", result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) {
      ++failures;
    }
  }
  return failures;
}
