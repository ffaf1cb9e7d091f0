#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sectar/rng.hpp"

namespace sectar {

enum class EnvKind { nav2d, wheeled, blocks };

EnvKind env_kind_from_name(const std::string& name);
std::string env_kind_name(EnvKind kind);

// Static facts about an environment's observation and action spaces.
// num_actions > 0 means a discrete space; 0 means continuous with
// action_dim components.
struct EnvSpec {
  EnvKind kind = EnvKind::nav2d;
  int state_dim = 2;
  int action_dim = 1;
  int num_actions = 4;
  bool discrete() const { return num_actions > 0; }
};

EnvSpec make_env_spec(EnvKind kind);

struct Action {
  int index = -1;
  std::vector<double> values;

  static Action discrete(int i) {
    Action a;
    a.index = i;
    return a;
  }
  static Action continuous(std::vector<double> v) {
    Action a;
    a.values = std::move(v);
    return a;
  }
};

// Physical constants. Defaults scale every task to the arena [-1, 1]^2.
struct EnvParams {
  double nav_step = 0.05;
  double block_step = 0.05;
  double pickup_radius = 0.1;
  double wheel_radius = 0.1;
  double axle = 0.2;
  double omega_max = 5.0;
  double dt = 0.05;
};

// Ordered goal sequence shared by every environment. A goal is completed
// when the tracked point (the agent, or for block goals the designated
// block) comes within reach_radius of it; completing the k-th goal
// (1-based) pays reward 1 exactly when k is divisible by 3.
struct WaypointTask {
  std::vector<std::array<double, 2>> goals;
  std::vector<int> goal_block;  // parallel to goals, -1 tracks the agent;
                                // empty means every goal tracks the agent
  double reach_radius = 0.1;

  int size() const { return static_cast<int>(goals.size()); }
};

// Mutable bookkeeping for one episode of a task.
struct TaskProgress {
  int index = 0;
};

// Advances the waypoint index over one state (looping while consecutive
// goals are already satisfied) and returns the reward released by this
// state. Pure apart from `progress`.
double step_progress(const WaypointTask& task, TaskProgress& progress,
                     const std::vector<double>& state);

// Replays the waypoint bookkeeping over a state sequence starting from the
// given progress snapshot. Every row is processed; callers pass the states
// that come after the snapshot was taken.
double eval_reward_on_states(const WaypointTask& task, TaskProgress progress,
                             const std::vector<std::vector<double>>& states);

// Uniformly sampled goal layout. For blocks the goals are one per block in
// index order and m is ignored.
WaypointTask random_task(EnvKind kind, int m, double reach_radius, Rng& rng);

void save_goals(const WaypointTask& task, const std::string& path);
WaypointTask load_goals(const std::string& path, EnvKind kind, double reach_radius);

struct StepResult {
  std::vector<double> state;
  double reward = 0.0;
  bool done = false;
};

// One episodic environment instance. State layouts:
//   nav2d   [x, y]
//   wheeled [x, y, heading, v, omega]   heading in (-pi, pi]
//   blocks  [ax, ay, b0x, b0y, ..., b3x, b3y, held]   held in {-1, 0..3}
class Env {
 public:
  Env(EnvKind kind, WaypointTask task, EnvParams params = EnvParams{});

  const EnvSpec& spec() const { return spec_; }
  const EnvParams& params() const { return params_; }
  const WaypointTask& task() const { return task_; }
  const TaskProgress& progress() const { return progress_; }
  const std::vector<double>& state() const { return state_; }

  // Fixed default start, waypoint progress cleared.
  std::vector<double> reset();
  // Start from an arbitrary valid state, waypoint progress cleared.
  std::vector<double> reset_to(const std::vector<double>& state);
  // Resume a meta-episode: state and progress restored together.
  void restore(const std::vector<double>& state, const TaskProgress& progress);

  StepResult step(const Action& action);

 private:
  void validate_state(const std::vector<double>& s) const;
  void apply_dynamics(const Action& action);

  EnvSpec spec_;
  EnvParams params_;
  WaypointTask task_;
  TaskProgress progress_;
  std::vector<double> state_;
};

}  // namespace sectar
