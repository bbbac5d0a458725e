#include "polyakgrad/cartpole.hpp"

#include <cmath>
#include <stdexcept>

#include "polyakgrad/rng.hpp"

namespace polyakgrad {

CartPoleEnv::CartPoleEnv(int max_horizon)
    : spec_{4, 2, max_horizon, "cartpole"} {
  if (max_horizon < 1) {
    throw std::invalid_argument("CartPoleEnv: max_horizon must be >= 1");
  }
}

std::vector<double> CartPoleEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  for (double& s : state_) {
    s = rng.uniform(-0.05, 0.05);
  }
  steps_ = 0;
  done_ = false;
  return {state_.begin(), state_.end()};
}

StepResult CartPoleEnv::step(int action) {
  if (done_) {
    throw std::logic_error("CartPoleEnv::step: episode is over; call reset()");
  }
  if (action < 0 || action >= 2) {
    throw std::invalid_argument("CartPoleEnv::step: action index");
  }
  auto [x, x_dot, theta, theta_dot] = state_;
  double force = (action == 1) ? kForceMag : -kForceMag;
  double costheta = std::cos(theta);
  double sintheta = std::sin(theta);

  double temp =
      (force + kPoleMassLength * theta_dot * theta_dot * sintheta) / kTotalMass;
  double thetaacc =
      (kGravity * sintheta - costheta * temp) /
      (kLength * (4.0 / 3.0 - kMassPole * costheta * costheta / kTotalMass));
  double xacc = temp - kPoleMassLength * thetaacc * costheta / kTotalMass;

  x += kTau * x_dot;
  x_dot += kTau * xacc;
  theta += kTau * theta_dot;
  theta_dot += kTau * thetaacc;
  state_ = {x, x_dot, theta, theta_dot};

  ++steps_;
  bool failed = x < -kXThreshold || x > kXThreshold ||
                theta < -kThetaThreshold || theta > kThetaThreshold;
  done_ = failed || steps_ >= spec_.max_horizon;

  return {{state_.begin(), state_.end()}, 1.0, done_};
}

std::unique_ptr<Environment> CartPoleEnv::clone() const {
  return std::make_unique<CartPoleEnv>(spec_.max_horizon);
}

}  // namespace polyakgrad
