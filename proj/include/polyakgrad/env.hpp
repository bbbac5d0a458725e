#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace polyakgrad {

struct EnvSpec {
  int obs_dim;
  int num_actions;
  int max_horizon;
  std::string name;
};

struct StepResult {
  std::vector<double> next_obs;
  double reward;
  bool done;
};

// Episodic environment with deterministic dynamics; all randomness enters
// through reset(seed). Instances are single-threaded; parallel rollouts use
// independent instances (see clone()).
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;

  // Starts a new episode; deterministic given seed.
  virtual std::vector<double> reset(std::uint64_t seed) = 0;

  // Advances one transition. Throws std::logic_error if the episode is
  // already over or reset() has not been called.
  virtual StepResult step(int action) = 0;

  // Independent instance with the same configuration.
  virtual std::unique_ptr<Environment> clone() const = 0;
};

struct EnvOptions {
  std::vector<double> two_step_leaf_rewards = {0.1, 0.2, 0.3, 1.0};
  int horizon_override = 0;  // 0 keeps the per-environment default
};

// Environments by name: "cartpole", "acrobot", "twostep".
std::unique_ptr<Environment> make_env(const std::string& name,
                                      const EnvOptions& opts = {});

}  // namespace polyakgrad
