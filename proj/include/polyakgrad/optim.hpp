#pragma once

#include <stdexcept>

#include "polyakgrad/vec.hpp"

namespace polyakgrad {

// A zero stochastic gradient together with a positive value gap: the update
// is undefined and the caller should skip the iteration and log the event.
struct degenerate_gradient_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Direction { Ascend, Descend };

// theta +- lr * grad. lr = 0 is allowed (no-op update).
ParamVector sgd_step(const ParamVector& theta, const ParamVector& grad,
                     double lr, Direction direction);

struct AdamState {
  ParamVector m;  // first moment
  ParamVector v;  // second moment
  long t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t dim) : m(dim, 0.0), v(dim, 0.0) {}
};

// Standard bias-corrected Adam update; mutates the state in place and
// returns the new parameters.
ParamVector adam_step(AdamState& state, const ParamVector& theta,
                      const ParamVector& grad, double lr, Direction direction);

// Classic Polyak step: (f_val - f_star) / sq_norm.
double polyak_step(double f_val, double f_star, double sq_norm);

struct StepSizeRecord {
  double gamma;
  bool capped;  // true iff the uncapped ratio exceeded gamma_b
  double numerator;
  double denom;  // c * sq_norm
};

// min{(f_val - f_star) / (c * sq_norm), gamma_b}.
StepSizeRecord sps_max(double f_val, double f_star, double sq_norm, double c,
                       double gamma_b);

// Ascent form used in RL: min{(v_high - v_low) / (c * sq_norm), gamma_b}.
// The caller orders the two values; v_high < v_low is a contract violation.
StepSizeRecord rl_sps_max(double v_high, double v_low, double sq_norm, double c,
                          double gamma_b);

}  // namespace polyakgrad
