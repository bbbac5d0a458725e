#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polyakgrad/env.hpp"
#include "polyakgrad/policy.hpp"
#include "polyakgrad/vec.hpp"

namespace polyakgrad {

struct PolyakConfig {
  double c = 1.0;
  double gamma_b = 1.0;
  double alpha = 0.0;          // entropy coefficient
  int m = 50;                  // trajectories per model per iteration
  int horizon = 200;
  double discount = 0.99;
  double init_epsilon = 1e-3;  // closeness of the two initializations
  double stop_tol = 1e-4;
  int stop_patience = 10;
  int max_iters = 300;

  void validate() const;
};

struct TwinState {
  ParamVector theta1;
  ParamVector theta2;
  int iter = 0;
  double last_gamma = 0.0;
  int consecutive_small = 0;
};

struct IterationMetrics {
  int iter;
  double l_hat_1;
  double l_hat_2;
  double gap;           // higher estimate minus lower estimate, >= 0
  double gamma;         // 0 on tie or skipped iterations
  bool capped;
  double grad_sq_norm;  // NaN when no gradient was computed
  int updated_model;    // 1 or 2; 0 on tie or skipped iterations
  double eval_return;   // NaN unless an evaluation ran this iteration
  double wall_time;     // seconds since training start (0 for bare iterations)
};

struct EvalOptions {
  int eval_every = 0;  // 0 disables evaluation
  std::vector<std::uint64_t> eval_seeds;
};

// theta1 freshly initialized from the prototype's init scheme; theta2 is a
// Gaussian perturbation of theta1 with standard deviation init_epsilon.
TwinState twin_init(const Policy& prototype, std::uint64_t seed,
                    double init_epsilon);

// One iteration of the double-policy-gradient loop: sample m trajectories
// per model on independent streams, estimate both objectives, and ascend the
// lower-estimate model with the Polyak step using the higher estimate as the
// optimal-value surrogate. The higher model stays bit-identical. An exact
// tie (or a degenerate zero gradient) leaves both models unchanged.
IterationMetrics twin_rl_iteration(TwinState& state, Environment& env,
                                   const Policy& prototype,
                                   const PolyakConfig& cfg,
                                   std::uint64_t master_seed);

struct TwinTrainResult {
  TwinState state;
  std::vector<IterationMetrics> series;
};

// Runs twin_rl_iteration until gamma < stop_tol held for stop_patience
// consecutive productive iterations, or max_iters. When eval.eval_every > 0,
// evaluates the better of the two models greedily on eval.eval_seeds (also
// once before training, recorded as iter 0).
TwinTrainResult twin_train(Environment& env, const Policy& prototype,
                           const PolyakConfig& cfg, std::uint64_t seed,
                           const EvalOptions& eval = {});

// The model with the higher greedy evaluation; ties favor theta1.
const ParamVector& twin_best_policy(const TwinState& state, Environment& env,
                                    const Policy& prototype,
                                    std::span<const std::uint64_t> eval_seeds);

}  // namespace polyakgrad
