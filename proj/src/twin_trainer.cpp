#include "polyakgrad/twin_trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polyakgrad/gradients.hpp"
#include "polyakgrad/optim.hpp"
#include "polyakgrad/rollout.hpp"

namespace polyakgrad {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags so trajectory sampling, initialization, and any future
// consumers of the master seed never collide.
enum : std::uint64_t { kStreamInit = 1, kStreamModel1 = 2, kStreamModel2 = 3 };
}  // namespace

void PolyakConfig::validate() const {
  if (c <= 0.0 || gamma_b <= 0.0) {
    throw std::invalid_argument("PolyakConfig: c and gamma_b must be positive");
  }
  if (alpha < 0.0 || init_epsilon < 0.0) {
    throw std::invalid_argument(
        "PolyakConfig: alpha and init_epsilon must be >= 0");
  }
  if (m < 1 || horizon < 1) {
    throw std::invalid_argument("PolyakConfig: m and horizon must be >= 1");
  }
  if (discount < 0.0 || discount > 1.0) {
    throw std::invalid_argument("PolyakConfig: discount must be in [0, 1]");
  }
  if (stop_tol < 0.0 || stop_patience < 1 || max_iters < 0) {
    throw std::invalid_argument("PolyakConfig: bad stopping rule");
  }
}

TwinState twin_init(const Policy& prototype, std::uint64_t seed,
                    double init_epsilon) {
  if (init_epsilon < 0.0) {
    throw std::invalid_argument("twin_init: init_epsilon must be >= 0");
  }
  Rng rng = Rng::stream(seed, kStreamInit);
  auto p1 = prototype.fresh_init(rng);
  auto p2 = perturb_init(*p1, init_epsilon, mix64(seed, kStreamInit + 1));
  TwinState state;
  state.theta1 = p1->flatten();
  state.theta2 = p2->flatten();
  return state;
}

IterationMetrics twin_rl_iteration(TwinState& state, Environment& env,
                                   const Policy& prototype,
                                   const PolyakConfig& cfg,
                                   std::uint64_t master_seed) {
  cfg.validate();
  auto iter_u = static_cast<std::uint64_t>(state.iter);
  auto policy1 = prototype.with_params(state.theta1);
  auto policy2 = prototype.with_params(state.theta2);

  auto trajs1 = sample_trajectories(
      env, *policy1, cfg.m, cfg.horizon, mix64(mix64(master_seed, iter_u), kStreamModel1));
  auto trajs2 = sample_trajectories(
      env, *policy2, cfg.m, cfg.horizon, mix64(mix64(master_seed, iter_u), kStreamModel2));
  double l1 = estimate_objective(trajs1, *policy1, cfg.discount, cfg.alpha).l_hat;
  double l2 = estimate_objective(trajs2, *policy2, cfg.discount, cfg.alpha).l_hat;

  IterationMetrics metrics;
  metrics.iter = state.iter + 1;
  metrics.l_hat_1 = l1;
  metrics.l_hat_2 = l2;
  metrics.gap = std::abs(l1 - l2);
  metrics.gamma = 0.0;
  metrics.capped = false;
  metrics.grad_sq_norm = kNaN;
  metrics.updated_model = 0;
  metrics.eval_return = kNaN;
  metrics.wall_time = 0.0;

  if (l1 != l2) {
    // Update the lower-estimate model; the other one is frozen this round.
    bool update_second = l1 > l2;
    const auto& low_trajs = update_second ? trajs2 : trajs1;
    const Policy& low_policy = update_second ? *policy2 : *policy1;
    ParamVector& low_theta = update_second ? state.theta2 : state.theta1;

    GradientEstimate grad = objective_gradient(low_trajs, low_policy,
                                               cfg.discount, cfg.alpha);
    metrics.grad_sq_norm = grad.sq_norm;
    try {
      StepSizeRecord step = rl_sps_max(std::max(l1, l2), std::min(l1, l2),
                                       grad.sq_norm, cfg.c, cfg.gamma_b);
      low_theta = sgd_step(low_theta, grad.grad, step.gamma, Direction::Ascend);
      metrics.gamma = step.gamma;
      metrics.capped = step.capped;
      metrics.updated_model = update_second ? 2 : 1;
    } catch (const degenerate_gradient_error&) {
      // Zero gradient with a positive gap: skip the update, keep the record.
    }
  }

  state.iter += 1;
  state.last_gamma = metrics.gamma;
  if (metrics.updated_model != 0) {
    state.consecutive_small =
        metrics.gamma < cfg.stop_tol ? state.consecutive_small + 1 : 0;
  }
  return metrics;
}

TwinTrainResult twin_train(Environment& env, const Policy& prototype,
                           const PolyakConfig& cfg, std::uint64_t seed,
                           const EvalOptions& eval) {
  cfg.validate();
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };
  auto greedy = [&](const ParamVector& theta) {
    auto policy = prototype.with_params(theta);
    return evaluate_greedy(env, *policy, eval.eval_seeds);
  };

  TwinTrainResult result;
  result.state = twin_init(prototype, seed, cfg.init_epsilon);
  TwinState& state = result.state;

  bool do_eval = eval.eval_every > 0 && !eval.eval_seeds.empty();
  if (do_eval) {
    IterationMetrics initial{};
    initial.iter = 0;
    initial.l_hat_1 = kNaN;
    initial.l_hat_2 = kNaN;
    initial.gap = kNaN;
    initial.grad_sq_norm = kNaN;
    initial.eval_return = std::max(greedy(state.theta1), greedy(state.theta2));
    initial.wall_time = elapsed();
    result.series.push_back(initial);
  }

  while (state.iter < cfg.max_iters) {
    IterationMetrics metrics = twin_rl_iteration(state, env, prototype, cfg, seed);
    if (do_eval && metrics.iter % eval.eval_every == 0) {
      metrics.eval_return = std::max(greedy(state.theta1), greedy(state.theta2));
    }
    metrics.wall_time = elapsed();
    result.series.push_back(metrics);
    if (state.consecutive_small >= cfg.stop_patience) {
      break;
    }
  }
  return result;
}

const ParamVector& twin_best_policy(const TwinState& state, Environment& env,
                                    const Policy& prototype,
                                    std::span<const std::uint64_t> eval_seeds) {
  auto p1 = prototype.with_params(state.theta1);
  auto p2 = prototype.with_params(state.theta2);
  double r1 = evaluate_greedy(env, *p1, eval_seeds);
  double r2 = evaluate_greedy(env, *p2, eval_seeds);
  return r2 > r1 ? state.theta2 : state.theta1;
}

}  // namespace polyakgrad
