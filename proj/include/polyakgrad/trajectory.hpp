#pragma once

#include <vector>

namespace polyakgrad {

struct TrajectoryStep {
  std::vector<double> obs;  // state in which the action was taken
  int action;
  double reward;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  bool truncated = false;  // hit the horizon before a terminal state
};

// Sum over t of gamma^t * reward_t, t starting at 0.
double discounted_return(const Trajectory& traj, double gamma);

}  // namespace polyakgrad
