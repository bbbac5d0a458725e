#include "polyakgrad/env.hpp"

#include <stdexcept>

#include "polyakgrad/acrobot.hpp"
#include "polyakgrad/cartpole.hpp"
#include "polyakgrad/two_step.hpp"

namespace polyakgrad {

std::unique_ptr<Environment> make_env(const std::string& name,
                                      const EnvOptions& opts) {
  int horizon = opts.horizon_override;
  if (name == "cartpole") {
    return std::make_unique<CartPoleEnv>(horizon > 0 ? horizon
                                                     : CartPoleEnv::kDefaultHorizon);
  }
  if (name == "acrobot") {
    return std::make_unique<AcrobotEnv>(horizon > 0 ? horizon
                                                    : AcrobotEnv::kDefaultHorizon);
  }
  if (name == "twostep") {
    if (opts.two_step_leaf_rewards.size() != 4) {
      throw std::invalid_argument("make_env: twostep needs 4 leaf rewards");
    }
    TwoStepSpec tree;
    std::copy(opts.two_step_leaf_rewards.begin(),
              opts.two_step_leaf_rewards.end(), tree.leaf_rewards.begin());
    return std::make_unique<TwoStepEnv>(tree);
  }
  throw std::invalid_argument("make_env: unknown environment: " + name);
}

}  // namespace polyakgrad
