#pragma once

#include <array>

#include "polyakgrad/env.hpp"
#include "polyakgrad/policy.hpp"
#include "polyakgrad/trajectory.hpp"

namespace polyakgrad {

// Leaf rewards of the depth-two binary tree in (LL, LR, RL, RR) order.
struct TwoStepSpec {
  std::array<double, 4> leaf_rewards{0.1, 0.2, 0.3, 1.0};

  // Rewards must be distinct so exactly one trajectory is optimal.
  void validate() const;
  int best_leaf() const;
};

// Deterministic depth-two binary tree: two decisions, reward only at the
// four leaves. Nodes are numbered 0 root, 1 left, 2 right, 3..6 leaves
// (LL, LR, RL, RR); observations are one-hot over the seven nodes.
class TwoStepEnv final : public Environment {
 public:
  static constexpr int kNumNodes = 7;

  explicit TwoStepEnv(TwoStepSpec tree = {});

  const EnvSpec& spec() const override { return spec_; }
  const TwoStepSpec& tree() const { return tree_; }

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(int action) override;
  std::unique_ptr<Environment> clone() const override;

  static std::vector<double> one_hot(int node);

 private:
  EnvSpec spec_;
  TwoStepSpec tree_;
  int node_ = -1;
  bool done_ = true;
};

struct EnumeratedTrajectory {
  Trajectory trajectory;
  double probability;
  double ret;  // discounted return
};

// All four trajectories in (LL, LR, RL, RR) order with their probabilities
// under the policy and discounted returns. Probabilities sum to 1.
std::vector<EnumeratedTrajectory> enumerate_trajectories(const TwoStepEnv& env,
                                                         const Policy& policy,
                                                         double gamma);

}  // namespace polyakgrad
