#include "polyakgrad/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyakgrad {

GradientEstimate gpomdp(const std::vector<Trajectory>& trajs,
                        const Policy& policy, double gamma) {
  if (trajs.empty()) {
    throw std::invalid_argument("gpomdp: no trajectories");
  }
  ParamVector total(policy.num_params(), 0.0);
  ParamVector score(policy.num_params(), 0.0);
  for (const Trajectory& traj : trajs) {
    std::fill(score.begin(), score.end(), 0.0);
    double w = 1.0;
    for (const TrajectoryStep& s : traj.steps) {
      axpy(1.0, policy.log_prob_gradient(s.obs, s.action), score);
      if (s.reward != 0.0) {
        axpy(w * s.reward, score, total);
      }
      w *= gamma;
    }
  }
  scale(total, 1.0 / static_cast<double>(trajs.size()));
  return {total, squared_norm(total), static_cast<int>(trajs.size())};
}

GradientEstimate objective_gradient(const std::vector<Trajectory>& trajs,
                                    const Policy& policy, double gamma,
                                    double alpha) {
  if (alpha == 0.0) {
    return gpomdp(trajs, policy, gamma);
  }
  GradientEstimate est = gpomdp(trajs, policy, gamma);
  ParamVector ent(policy.num_params(), 0.0);
  for (const Trajectory& traj : trajs) {
    double w = 1.0;
    for (const TrajectoryStep& s : traj.steps) {
      axpy(w, policy.entropy_gradient(s.obs), ent);
      w *= gamma;
    }
  }
  axpy(alpha / static_cast<double>(trajs.size()), ent, est.grad);
  est.sq_norm = squared_norm(est.grad);
  return est;
}

double exact_value_twostep(const TwoStepEnv& env, const Policy& policy,
                           double gamma, double alpha) {
  auto root = TwoStepEnv::one_hot(0);
  ActionDistribution root_dist = policy.forward(root);
  double value = 0.0;
  double ent = alpha != 0.0 ? entropy(root_dist) : 0.0;
  for (int a0 = 0; a0 < 2; ++a0) {
    auto mid = TwoStepEnv::one_hot(1 + a0);
    ActionDistribution mid_dist = policy.forward(mid);
    for (int a1 = 0; a1 < 2; ++a1) {
      double p = root_dist.probs[a0] * mid_dist.probs[a1];
      value += p * gamma * env.tree().leaf_rewards[2 * a0 + a1];
    }
    if (alpha != 0.0) {
      ent += gamma * root_dist.probs[a0] * entropy(mid_dist);
    }
  }
  return value + alpha * ent;
}

ParamVector exact_gradient_twostep(const TwoStepEnv& env, const Policy& policy,
                                   double gamma, double alpha) {
  auto root = TwoStepEnv::one_hot(0);
  ActionDistribution root_dist = policy.forward(root);
  ParamVector grad(policy.num_params(), 0.0);

  if (alpha != 0.0) {
    axpy(alpha, policy.entropy_gradient(root), grad);
  }
  for (int a0 = 0; a0 < 2; ++a0) {
    auto mid = TwoStepEnv::one_hot(1 + a0);
    ActionDistribution mid_dist = policy.forward(mid);
    ParamVector root_score = policy.log_prob_gradient(root, a0);
    double p_mid = root_dist.probs[a0];
    for (int a1 = 0; a1 < 2; ++a1) {
      double p = p_mid * mid_dist.probs[a1];
      double ret = gamma * env.tree().leaf_rewards[2 * a0 + a1];
      // grad P(tau) * R(tau) with grad P = P * (score(root) + score(mid))
      axpy(p * ret, root_score, grad);
      axpy(p * ret, policy.log_prob_gradient(mid, a1), grad);
    }
    if (alpha != 0.0) {
      // d/dtheta [gamma * P(mid) * H(mid)], product rule
      double h_mid = entropy(mid_dist);
      axpy(alpha * gamma * p_mid * h_mid, root_score, grad);
      axpy(alpha * gamma * p_mid, policy.entropy_gradient(mid), grad);
    }
  }
  return grad;
}

}  // namespace polyakgrad
