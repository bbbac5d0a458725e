#include "polyakgrad/rollout.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace polyakgrad {

double discounted_return(const Trajectory& traj, double gamma) {
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("discounted_return: gamma must be in [0, 1]");
  }
  double ret = 0.0;
  double w = 1.0;
  for (const TrajectoryStep& s : traj.steps) {
    ret += w * s.reward;
    w *= gamma;
  }
  return ret;
}

Trajectory sample_trajectory(Environment& env, const Policy& policy,
                             int horizon, Rng& rng) {
  if (horizon < 1) {
    throw std::invalid_argument("sample_trajectory: horizon must be >= 1");
  }
  Trajectory traj;
  std::vector<double> obs = env.reset(rng.next_u64());
  for (int t = 0; t < horizon; ++t) {
    ActionDistribution dist = policy.forward(obs);
    int action = dist.sample(rng);
    StepResult res = env.step(action);
    traj.steps.push_back({std::move(obs), action, res.reward});
    obs = std::move(res.next_obs);
    if (res.done) {
      return traj;
    }
  }
  traj.truncated = true;
  return traj;
}

std::vector<Trajectory> sample_trajectories(Environment& env,
                                            const Policy& policy, int m,
                                            int horizon,
                                            std::uint64_t master_seed) {
  if (m < 1) {
    throw std::invalid_argument("sample_trajectories: m must be >= 1");
  }
  std::vector<Trajectory> trajs;
  trajs.reserve(m);
  for (int i = 0; i < m; ++i) {
    Rng rng = Rng::stream(master_seed, static_cast<std::uint64_t>(i));
    trajs.push_back(sample_trajectory(env, policy, horizon, rng));
  }
  return trajs;
}

ObjectiveEstimate estimate_objective(const std::vector<Trajectory>& trajs,
                                     const Policy& policy, double gamma,
                                     double alpha) {
  if (trajs.empty()) {
    throw std::invalid_argument("estimate_objective: no trajectories");
  }
  double v_sum = 0.0;
  double h_sum = 0.0;
  for (const Trajectory& traj : trajs) {
    v_sum += discounted_return(traj, gamma);
    double w = 1.0;
    for (const TrajectoryStep& s : traj.steps) {
      h_sum += w * entropy(policy.forward(s.obs));
      w *= gamma;
    }
  }
  ObjectiveEstimate est;
  est.num_trajectories = static_cast<int>(trajs.size());
  est.v_hat = v_sum / est.num_trajectories;
  est.entropy_hat = h_sum / est.num_trajectories;
  est.alpha = alpha;
  est.l_hat = est.v_hat + alpha * est.entropy_hat;
  return est;
}

double evaluate_greedy(Environment& env, const Policy& policy,
                       std::span<const std::uint64_t> eval_seeds) {
  if (eval_seeds.empty()) {
    throw std::invalid_argument("evaluate_greedy: no seeds");
  }
  double total = 0.0;
  for (std::uint64_t seed : eval_seeds) {
    std::vector<double> obs = env.reset(seed);
    for (int t = 0; t < env.spec().max_horizon; ++t) {
      StepResult res = env.step(policy.forward(obs).argmax());
      total += res.reward;
      obs = std::move(res.next_obs);
      if (res.done) {
        break;
      }
    }
  }
  return total / static_cast<double>(eval_seeds.size());
}

void dump_trajectory(const Trajectory& traj, std::ostream& out) {
  for (const TrajectoryStep& s : traj.steps) {
    for (double v : s.obs) {
      out << v << '\t';
    }
    out << s.action << '\t' << s.reward << '\n';
  }
}

}  // namespace polyakgrad
