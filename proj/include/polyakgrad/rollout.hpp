#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "polyakgrad/env.hpp"
#include "polyakgrad/policy.hpp"
#include "polyakgrad/trajectory.hpp"

namespace polyakgrad {

// Stochastic estimate of the entropy-penalized objective
// l_hat = v_hat + alpha * entropy_hat.
struct ObjectiveEstimate {
  double v_hat;        // mean discounted return
  double entropy_hat;  // mean discounted per-state policy entropy
  double alpha;
  double l_hat;
  int num_trajectories;
};

// Samples one episode: actions drawn from the policy, stop at a terminal
// state or after `horizon` steps. The environment is reset with a seed drawn
// from `rng`, so the whole trajectory is a function of the rng state.
Trajectory sample_trajectory(Environment& env, const Policy& policy,
                             int horizon, Rng& rng);

// m trajectories on independent substreams of master_seed; results are
// identical regardless of how the loop is scheduled.
std::vector<Trajectory> sample_trajectories(Environment& env,
                                            const Policy& policy, int m,
                                            int horizon,
                                            std::uint64_t master_seed);

ObjectiveEstimate estimate_objective(const std::vector<Trajectory>& trajs,
                                     const Policy& policy, double gamma,
                                     double alpha);

// One undiscounted episode per seed taking argmax actions (ties toward the
// lowest action index); returns the mean total reward.
double evaluate_greedy(Environment& env, const Policy& policy,
                       std::span<const std::uint64_t> eval_seeds);

// Debug dump: one line per step, tab-separated obs components, action, reward.
void dump_trajectory(const Trajectory& traj, std::ostream& out);

}  // namespace polyakgrad
