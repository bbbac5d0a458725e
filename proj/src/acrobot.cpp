#include "polyakgrad/acrobot.hpp"

#include <cmath>
#include <stdexcept>

#include "polyakgrad/rng.hpp"

namespace polyakgrad {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double a) {
  while (a > kPi) {
    a -= 2.0 * kPi;
  }
  while (a < -kPi) {
    a += 2.0 * kPi;
  }
  return a;
}

double clip(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace

AcrobotEnv::AcrobotEnv(int max_horizon) : spec_{6, 3, max_horizon, "acrobot"} {
  if (max_horizon < 1) {
    throw std::invalid_argument("AcrobotEnv: max_horizon must be >= 1");
  }
}

std::vector<double> AcrobotEnv::reset(std::uint64_t seed) {
  Rng rng(seed);
  for (double& s : state_) {
    s = rng.uniform(-0.1, 0.1);
  }
  steps_ = 0;
  done_ = false;
  return observation();
}

std::array<double, 4> AcrobotEnv::dynamics(const std::array<double, 4>& s,
                                           double torque) {
  const double m1 = kLinkMass1, m2 = kLinkMass2;
  const double l1 = kLinkLength1;
  const double lc1 = kLinkCom1, lc2 = kLinkCom2;
  const double i1 = kLinkMoi, i2 = kLinkMoi;
  const double g = kGravity;
  const double t1 = s[0], t2 = s[1], dt1 = s[2], dt2 = s[3];

  double d1 = m1 * lc1 * lc1 +
              m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(t2)) + i1 +
              i2;
  double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(t2)) + i2;
  double phi2 = m2 * lc2 * g * std::cos(t1 + t2 - kPi / 2.0);
  double phi1 = -m2 * l1 * lc2 * dt2 * dt2 * std::sin(t2) -
                2.0 * m2 * l1 * lc2 * dt2 * dt1 * std::sin(t2) +
                (m1 * lc1 + m2 * l1) * g * std::cos(t1 - kPi / 2.0) + phi2;
  double ddt2 =
      (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dt1 * dt1 * std::sin(t2) -
       phi2) /
      (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  double ddt1 = -(d2 * ddt2 + phi1) / d1;
  return {dt1, dt2, ddt1, ddt2};
}

StepResult AcrobotEnv::step(int action) {
  if (done_) {
    throw std::logic_error("AcrobotEnv::step: episode is over; call reset()");
  }
  if (action < 0 || action >= 3) {
    throw std::invalid_argument("AcrobotEnv::step: action index");
  }
  double torque = static_cast<double>(action - 1);

  // One RK4 step of size kDt.
  auto add = [](const std::array<double, 4>& a, const std::array<double, 4>& b,
                double h) {
    std::array<double, 4> r;
    for (int i = 0; i < 4; ++i) {
      r[i] = a[i] + h * b[i];
    }
    return r;
  };
  auto k1 = dynamics(state_, torque);
  auto k2 = dynamics(add(state_, k1, kDt / 2.0), torque);
  auto k3 = dynamics(add(state_, k2, kDt / 2.0), torque);
  auto k4 = dynamics(add(state_, k3, kDt), torque);
  for (int i = 0; i < 4; ++i) {
    state_[i] += kDt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  state_[0] = wrap_angle(state_[0]);
  state_[1] = wrap_angle(state_[1]);
  state_[2] = clip(state_[2], -kMaxVel1, kMaxVel1);
  state_[3] = clip(state_[3], -kMaxVel2, kMaxVel2);

  ++steps_;
  bool reached = target_reached();
  done_ = reached || steps_ >= spec_.max_horizon;
  double reward = reached ? 0.0 : -1.0;
  return {observation(), reward, done_};
}

bool AcrobotEnv::target_reached() const {
  return -std::cos(state_[0]) - std::cos(state_[1] + state_[0]) > 1.0;
}

std::vector<double> AcrobotEnv::observation() const {
  return {std::cos(state_[0]), std::sin(state_[0]), std::cos(state_[1]),
          std::sin(state_[1]), state_[2], state_[3]};
}

std::unique_ptr<Environment> AcrobotEnv::clone() const {
  return std::make_unique<AcrobotEnv>(spec_.max_horizon);
}

}  // namespace polyakgrad
