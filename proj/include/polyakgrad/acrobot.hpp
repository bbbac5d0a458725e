#pragma once

#include <array>

#include "polyakgrad/env.hpp"

namespace polyakgrad {

// Two-link underactuated swing-up task. Dynamics, constants, and the target
// condition follow the standard classic-control reference implementation
// ("book" equations of motion, single RK4 step of 0.2 s per transition).
// State is (theta1, theta2, dtheta1, dtheta2) with both angles measured
// from the downward vertical; observations are
// (cos t1, sin t1, cos t2, sin t2, dt1, dt2). Actions map to torques
// {-1, 0, +1} on the joint between the links.
class AcrobotEnv final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kLinkLength1 = 1.0;
  static constexpr double kLinkMass1 = 1.0;
  static constexpr double kLinkMass2 = 1.0;
  static constexpr double kLinkCom1 = 0.5;
  static constexpr double kLinkCom2 = 0.5;
  static constexpr double kLinkMoi = 1.0;
  static constexpr double kDt = 0.2;
  static constexpr double kMaxVel1 = 4.0 * 3.14159265358979323846;
  static constexpr double kMaxVel2 = 9.0 * 3.14159265358979323846;
  static constexpr int kDefaultHorizon = 500;

  explicit AcrobotEnv(int max_horizon = kDefaultHorizon);

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

  // Time derivative of (theta1, theta2, dtheta1, dtheta2) under torque.
  static std::array<double, 4> dynamics(const std::array<double, 4>& s,
                                        double torque);

 private:
  std::vector<double> observation() const;
  bool target_reached() const;

  EnvSpec spec_;
  std::array<double, 4> state_{};
  int steps_ = 0;
  bool done_ = true;
};

}  // namespace polyakgrad
