#pragma once

#include <array>

#include "polyakgrad/env.hpp"

namespace polyakgrad {

// Cart-pole balancing with Euler-integrated dynamics. Constants and
// termination rules follow the standard classic-control reference
// implementation; they are external-reference values, not tunables.
class CartPoleEnv final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kMassCart = 1.0;
  static constexpr double kMassPole = 0.1;
  static constexpr double kTotalMass = kMassCart + kMassPole;
  static constexpr double kLength = 0.5;  // half the pole length
  static constexpr double kPoleMassLength = kMassPole * kLength;
  static constexpr double kForceMag = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kThetaThreshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr double kXThreshold = 2.4;
  static constexpr int kDefaultHorizon = 200;

  explicit CartPoleEnv(int max_horizon = kDefaultHorizon);

  const EnvSpec& spec() const override { return spec_; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(int action) override;
  std::unique_ptr<Environment> clone() const override;

  const std::array<double, 4>& internal_state() const { return state_; }
  // Debug hook: starts an episode from a chosen state.
  void set_state(const std::array<double, 4>& state) {
    state_ = state;
    steps_ = 0;
    done_ = false;
  }

 private:
  EnvSpec spec_;
  std::array<double, 4> state_{};  // x, x_dot, theta, theta_dot
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace polyakgrad
