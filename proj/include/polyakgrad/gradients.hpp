#pragma once

#include <vector>

#include "polyakgrad/policy.hpp"
#include "polyakgrad/trajectory.hpp"
#include "polyakgrad/two_step.hpp"
#include "polyakgrad/vec.hpp"

namespace polyakgrad {

struct GradientEstimate {
  ParamVector grad;
  double sq_norm;  // squared Euclidean norm of grad
  int num_trajectories;
};

// GPOMDP estimator:
//   (1/m) sum_i sum_t (sum_{t'<=t} dlog pi(a_t'|s_t')) gamma^t r_t.
// Accumulation order is trajectory index then time, for bit-reproducibility.
GradientEstimate gpomdp(const std::vector<Trajectory>& trajs,
                        const Policy& policy, double gamma);

// GPOMDP plus alpha times the plug-in entropy gradient: visited states are
// treated as fixed samples, so the entropy term contributes
// (1/m) sum_i sum_t gamma^t dH(pi(.|s_t)). With alpha = 0 this is
// bit-identical to gpomdp().
GradientEstimate objective_gradient(const std::vector<Trajectory>& trajs,
                                    const Policy& policy, double gamma,
                                    double alpha);

// Exact entropy-penalized objective on the two-step tree, by enumerating all
// four trajectories: sum_tau P(tau) R(tau) + alpha * (H(root) +
// gamma * (P(L) H(L) + P(R) H(R))).
double exact_value_twostep(const TwoStepEnv& env, const Policy& policy,
                           double gamma, double alpha);

// Full gradient of exact_value_twostep (the entropy term includes the
// visitation-probability product rule, unlike the plug-in estimator).
ParamVector exact_gradient_twostep(const TwoStepEnv& env, const Policy& policy,
                                   double gamma, double alpha);

}  // namespace polyakgrad
