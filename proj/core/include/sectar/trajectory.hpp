#pragma once

#include <string>
#include <vector>

#include "sectar/tensor.hpp"

namespace sectar {

// One T-step segment: T+1 states and the T actions taken between them.
// Discrete actions are stored as a single column of indices.
struct Trajectory {
  Tensor states;   // (T+1) x state_dim
  Tensor actions;  // T x action_dim

  int steps() const { return states.rows() - 1; }
  int state_dim() const { return states.cols(); }
  int action_dim() const { return actions.cols(); }

  std::vector<double> state_row(int t) const;
};

void validate_trajectory(const Trajectory& traj, int steps, int state_dim,
                         int action_dim);

// Binary dataset of equally shaped trajectories.
void save_trajectories(const std::vector<Trajectory>& trajs, const std::string& path);
std::vector<Trajectory> load_trajectories(const std::string& path);

}  // namespace sectar
