#pragma once

#include <cmath>
#include <functional>

#include "polyakgrad/policy.hpp"
#include "polyakgrad/vec.hpp"

namespace polyakgrad::testing {

// Central finite differences of a scalar function of the parameter vector.
inline ParamVector finite_difference_gradient(
    const std::function<double(const ParamVector&)>& f, const ParamVector& x,
    double h = 1e-5) {
  ParamVector grad(x.size());
  ParamVector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    double hi = f(probe);
    probe[i] = x[i] - h;
    double lo = f(probe);
    probe[i] = x[i];
    grad[i] = (hi - lo) / (2.0 * h);
  }
  return grad;
}

// Relative L2 error of a against the reference b.
inline double relative_error(const ParamVector& a, const ParamVector& b) {
  double diff = 0.0;
  double ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    ref += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-12);
}

inline MlpPolicy random_mlp(int input_dim, int hidden_dim, int num_actions,
                            std::uint64_t seed, double weight_std = 0.5) {
  Rng rng(seed);
  MlpPolicy base = MlpPolicy::random(input_dim, hidden_dim, num_actions, rng,
                                     weight_std);
  // Random biases too, so tests do not sit on the zero-bias special case.
  ParamVector params = base.flatten();
  for (double& p : params) {
    p += 0.1 * rng.normal();
  }
  return MlpPolicy(input_dim, hidden_dim, num_actions, params);
}

inline std::vector<double> random_obs(int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> obs(dim);
  for (double& v : obs) {
    v = rng.normal();
  }
  return obs;
}

}  // namespace polyakgrad::testing

#include "polyakgrad/gradients.hpp"
#include "polyakgrad/optim.hpp"
#include "polyakgrad/two_step.hpp"

namespace polyakgrad::testing {

// Reproduces the single-sample pathology: condition every update on the
// fixed non-optimal trajectory LL from a zero tree policy. The reported
// series is the uncapped ratio (V* - V_hat) / (c ||grad V_hat||^2); updates
// ascend the entropy-penalized objective with the capped step. With
// alpha = 0 the policy saturates and the ratio diverges; a positive alpha
// parks the policy at interior probabilities where the value gradient stays
// bounded away from zero.
inline std::vector<double> explosion_ratios(double alpha, double c,
                                            double gamma_b, int iters) {
  TwoStepEnv env;
  const double gamma = 0.99;
  const double v_star = gamma * env.tree().leaf_rewards[env.tree().best_leaf()];
  const double v_hat = gamma * env.tree().leaf_rewards[0];

  Trajectory conditioned;
  conditioned.steps = {{TwoStepEnv::one_hot(0), 0, 0.0},
                       {TwoStepEnv::one_hot(1), 0, env.tree().leaf_rewards[0]}};
  const std::vector<Trajectory> trajs = {conditioned};

  std::unique_ptr<Policy> policy = std::make_unique<TreePolicy>();
  std::vector<double> ratios;
  ratios.reserve(iters);
  for (int k = 0; k < iters; ++k) {
    GradientEstimate value_grad = gpomdp(trajs, *policy, gamma);
    GradientEstimate update_grad =
        objective_gradient(trajs, *policy, gamma, alpha);
    ratios.push_back((v_star - v_hat) / (c * value_grad.sq_norm));
    StepSizeRecord step =
        rl_sps_max(v_star, v_hat, update_grad.sq_norm, c, gamma_b);
    policy = policy->with_params(
        sgd_step(policy->flatten(), update_grad.grad, step.gamma,
                 Direction::Ascend));
  }
  return ratios;
}

}  // namespace polyakgrad::testing
