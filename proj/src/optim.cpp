#include "polyakgrad/optim.hpp"

#include <cmath>
#include <string>

namespace polyakgrad {

namespace {

double direction_sign(Direction d) {
  return d == Direction::Ascend ? 1.0 : -1.0;
}

void check_update_inputs(const ParamVector& theta, const ParamVector& grad,
                         double lr, const char* who) {
  if (grad.size() != theta.size()) {
    throw std::invalid_argument(std::string(who) + ": size mismatch");
  }
  if (lr < 0.0 || !std::isfinite(lr)) {
    throw std::invalid_argument(std::string(who) + ": bad learning rate");
  }
  if (!all_finite(grad)) {
    throw std::domain_error(std::string(who) + ": non-finite gradient");
  }
}

}  // namespace

ParamVector sgd_step(const ParamVector& theta, const ParamVector& grad,
                     double lr, Direction direction) {
  check_update_inputs(theta, grad, lr, "sgd_step");
  ParamVector out = theta;
  axpy(direction_sign(direction) * lr, grad, out);
  return out;
}

ParamVector adam_step(AdamState& state, const ParamVector& theta,
                      const ParamVector& grad, double lr, Direction direction) {
  check_update_inputs(theta, grad, lr, "adam_step");
  if (state.m.size() != theta.size()) {
    throw std::invalid_argument("adam_step: state dimension mismatch");
  }
  state.t += 1;
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  double sign = direction_sign(direction);
  ParamVector out = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    double m_hat = state.m[i] / bc1;
    double v_hat = state.v[i] / bc2;
    out[i] += sign * lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
  return out;
}

double polyak_step(double f_val, double f_star, double sq_norm) {
  if (f_val < f_star) {
    throw std::invalid_argument("polyak_step: f_val below f_star");
  }
  if (sq_norm <= 0.0) {
    throw degenerate_gradient_error("polyak_step: zero gradient norm");
  }
  return (f_val - f_star) / sq_norm;
}

StepSizeRecord sps_max(double f_val, double f_star, double sq_norm, double c,
                       double gamma_b) {
  if (c <= 0.0 || gamma_b <= 0.0) {
    throw std::invalid_argument("sps_max: c and gamma_b must be positive");
  }
  if (f_val < f_star) {
    throw std::invalid_argument("sps_max: f_val below f_star");
  }
  if (sq_norm <= 0.0) {
    throw degenerate_gradient_error("sps_max: zero gradient norm");
  }
  StepSizeRecord rec;
  rec.numerator = f_val - f_star;
  rec.denom = c * sq_norm;
  double ratio = rec.numerator / rec.denom;
  rec.capped = ratio > gamma_b;
  rec.gamma = rec.capped ? gamma_b : ratio;
  return rec;
}

StepSizeRecord rl_sps_max(double v_high, double v_low, double sq_norm, double c,
                          double gamma_b) {
  if (v_high < v_low) {
    throw std::invalid_argument("rl_sps_max: v_high below v_low");
  }
  return sps_max(v_high, v_low, sq_norm, c, gamma_b);
}

}  // namespace polyakgrad
