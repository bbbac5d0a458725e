#include "polyakgrad/two_step.hpp"

#include <stdexcept>

namespace polyakgrad {

void TwoStepSpec::validate() const {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (leaf_rewards[i] == leaf_rewards[j]) {
        throw std::invalid_argument("TwoStepSpec: leaf rewards must be distinct");
      }
    }
  }
}

int TwoStepSpec::best_leaf() const {
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (leaf_rewards[i] > leaf_rewards[best]) {
      best = i;
    }
  }
  return best;
}

TwoStepEnv::TwoStepEnv(TwoStepSpec tree)
    : spec_{kNumNodes, 2, 2, "twostep"}, tree_(tree) {
  tree_.validate();
}

std::vector<double> TwoStepEnv::one_hot(int node) {
  std::vector<double> obs(kNumNodes, 0.0);
  obs[node] = 1.0;
  return obs;
}

std::vector<double> TwoStepEnv::reset(std::uint64_t) {
  node_ = 0;  // singleton initial distribution: always the root
  done_ = false;
  return one_hot(node_);
}

StepResult TwoStepEnv::step(int action) {
  if (done_) {
    throw std::logic_error("TwoStepEnv::step: episode is over; call reset()");
  }
  if (action < 0 || action >= 2) {
    throw std::invalid_argument("TwoStepEnv::step: action index");
  }
  if (node_ == 0) {
    node_ = 1 + action;
    return {one_hot(node_), 0.0, false};
  }
  int leaf = 2 * (node_ - 1) + action;  // 0..3 in (LL, LR, RL, RR) order
  node_ = 3 + leaf;
  done_ = true;
  return {one_hot(node_), tree_.leaf_rewards[leaf], true};
}

std::unique_ptr<Environment> TwoStepEnv::clone() const {
  return std::make_unique<TwoStepEnv>(tree_);
}

std::vector<EnumeratedTrajectory> enumerate_trajectories(const TwoStepEnv& env,
                                                         const Policy& policy,
                                                         double gamma) {
  auto root = TwoStepEnv::one_hot(0);
  ActionDistribution root_dist = policy.forward(root);
  std::vector<EnumeratedTrajectory> out;
  out.reserve(4);
  for (int a0 = 0; a0 < 2; ++a0) {
    auto mid = TwoStepEnv::one_hot(1 + a0);
    ActionDistribution mid_dist = policy.forward(mid);
    for (int a1 = 0; a1 < 2; ++a1) {
      int leaf = 2 * a0 + a1;
      double reward = env.tree().leaf_rewards[leaf];
      EnumeratedTrajectory e;
      e.trajectory.steps = {{root, a0, 0.0}, {mid, a1, reward}};
      e.probability = root_dist.probs[a0] * mid_dist.probs[a1];
      e.ret = gamma * reward;
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace polyakgrad
