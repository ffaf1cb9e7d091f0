#include "sectar/envs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sectar {

namespace {

constexpr double kArena = 1.0;
constexpr double kPi = 3.14159265358979323846;
constexpr int kNumBlocks = 4;

double clip_arena(double v) { return std::clamp(v, -kArena, kArena); }

double wrap_angle(double a) {
  // to (-pi, pi]
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double dist2d(double ax, double ay, double bx, double by) {
  return std::hypot(ax - bx, ay - by);
}

// The point whose distance to the current goal decides completion.
void tracked_point(const WaypointTask& task, int goal_index,
                   const std::vector<double>& state, double& x, double& y) {
  int block = task.goal_block.empty() ? -1 : task.goal_block[static_cast<std::size_t>(goal_index)];
  if (block < 0) {
    x = state[0];
    y = state[1];
  } else {
    x = state[static_cast<std::size_t>(2 + 2 * block)];
    y = state[static_cast<std::size_t>(3 + 2 * block)];
  }
}

// direction order: 0 east, 1 north, 2 west, 3 south
void move_cardinal(double& x, double& y, int dir, double step) {
  switch (dir) {
    case 0: x = clip_arena(x + step); break;
    case 1: y = clip_arena(y + step); break;
    case 2: x = clip_arena(x - step); break;
    case 3: y = clip_arena(y - step); break;
    default: throw std::out_of_range("bad direction");
  }
}

}  // namespace

EnvKind env_kind_from_name(const std::string& name) {
  if (name == "nav2d") return EnvKind::nav2d;
  if (name == "wheeled") return EnvKind::wheeled;
  if (name == "blocks") return EnvKind::blocks;
  throw std::invalid_argument("unknown environment '" + name +
                              "' (expected nav2d, wheeled, or blocks)");
}

std::string env_kind_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::nav2d: return "nav2d";
    case EnvKind::wheeled: return "wheeled";
    case EnvKind::blocks: return "blocks";
  }
  throw std::logic_error("bad EnvKind");
}

EnvSpec make_env_spec(EnvKind kind) {
  EnvSpec s;
  s.kind = kind;
  switch (kind) {
    case EnvKind::nav2d:
      s.state_dim = 2;
      s.action_dim = 1;
      s.num_actions = 4;
      break;
    case EnvKind::wheeled:
      s.state_dim = 5;
      s.action_dim = 2;
      s.num_actions = 0;
      break;
    case EnvKind::blocks:
      s.state_dim = 2 + 2 * kNumBlocks + 1;
      s.action_dim = 1;
      s.num_actions = 6;
      break;
  }
  return s;
}

double step_progress(const WaypointTask& task, TaskProgress& progress,
                     const std::vector<double>& state) {
  double reward = 0.0;
  while (progress.index < task.size()) {
    double px, py;
    tracked_point(task, progress.index, state, px, py);
    const auto& g = task.goals[static_cast<std::size_t>(progress.index)];
    if (dist2d(px, py, g[0], g[1]) >= task.reach_radius) break;
    ++progress.index;
    if (progress.index % 3 == 0) reward += 1.0;
  }
  return reward;
}

double eval_reward_on_states(const WaypointTask& task, TaskProgress progress,
                             const std::vector<std::vector<double>>& states) {
  double total = 0.0;
  for (const auto& s : states) total += step_progress(task, progress, s);
  return total;
}

WaypointTask random_task(EnvKind kind, int m, double reach_radius, Rng& rng) {
  WaypointTask task;
  task.reach_radius = reach_radius;
  int count = kind == EnvKind::blocks ? kNumBlocks : m;
  if (count <= 0) throw std::invalid_argument("random_task: m must be positive");
  for (int i = 0; i < count; ++i) {
    double x = rng.uniform(-kArena, kArena);
    double y = rng.uniform(-kArena, kArena);
    task.goals.push_back({x, y});
    task.goal_block.push_back(kind == EnvKind::blocks ? i : -1);
  }
  return task;
}

void save_goals(const WaypointTask& task, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open goals file for writing: " + path);
  char line[128];
  for (int i = 0; i < task.size(); ++i) {
    int block = task.goal_block[static_cast<std::size_t>(i)];
    if (block >= 0) {
      std::snprintf(line, sizeof line, "%d %.17g %.17g\n", block,
                    task.goals[static_cast<std::size_t>(i)][0],
                    task.goals[static_cast<std::size_t>(i)][1]);
    } else {
      std::snprintf(line, sizeof line, "%.17g %.17g\n",
                    task.goals[static_cast<std::size_t>(i)][0],
                    task.goals[static_cast<std::size_t>(i)][1]);
    }
    out << line;
  }
  if (!out) throw std::runtime_error("failed writing goals file: " + path);
}

WaypointTask load_goals(const std::string& path, EnvKind kind, double reach_radius) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open goals file: " + path);
  WaypointTask task;
  task.reach_radius = reach_radius;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    double x, y;
    if (kind == EnvKind::blocks) {
      int block;
      if (!(ls >> block >> x >> y) || block < 0 || block >= kNumBlocks) {
        throw std::runtime_error("bad goals line " + std::to_string(lineno) +
                                 " in " + path + " (want: block_index x y)");
      }
      task.goal_block.push_back(block);
    } else {
      if (!(ls >> x >> y)) {
        throw std::runtime_error("bad goals line " + std::to_string(lineno) +
                                 " in " + path + " (want: x y)");
      }
      task.goal_block.push_back(-1);
    }
    task.goals.push_back({x, y});
  }
  if (task.goals.empty()) throw std::runtime_error("goals file is empty: " + path);
  return task;
}

Env::Env(EnvKind kind, WaypointTask task, EnvParams params)
    : spec_(make_env_spec(kind)), params_(params), task_(std::move(task)) {
  if (task_.goal_block.empty()) {
    task_.goal_block.assign(task_.goals.size(), -1);
  }
  if (task_.goal_block.size() != task_.goals.size()) {
    throw std::invalid_argument("WaypointTask: goal_block must parallel goals");
  }
  for (int b : task_.goal_block) {
    bool want_block = kind == EnvKind::blocks;
    if (want_block != (b >= 0) || b >= kNumBlocks) {
      throw std::invalid_argument("WaypointTask: goal tracking does not match env");
    }
  }
  reset();
}

std::vector<double> Env::reset() {
  switch (spec_.kind) {
    case EnvKind::nav2d:
      state_ = {0.0, 0.0};
      break;
    case EnvKind::wheeled:
      state_ = {0.0, 0.0, 0.0, 0.0, 0.0};
      break;
    case EnvKind::blocks:
      // agent at the origin, blocks at the four half-arena corners
      state_ = {0.0, 0.0, 0.5, 0.5, -0.5, 0.5, -0.5, -0.5, 0.5, -0.5, -1.0};
      break;
  }
  progress_ = TaskProgress{};
  return state_;
}

std::vector<double> Env::reset_to(const std::vector<double>& state) {
  validate_state(state);
  state_ = state;
  if (spec_.kind == EnvKind::wheeled) state_[2] = wrap_angle(state_[2]);
  progress_ = TaskProgress{};
  return state_;
}

void Env::restore(const std::vector<double>& state, const TaskProgress& progress) {
  validate_state(state);
  if (progress.index < 0 || progress.index > task_.size()) {
    throw std::invalid_argument("restore: waypoint index out of range");
  }
  state_ = state;
  if (spec_.kind == EnvKind::wheeled) state_[2] = wrap_angle(state_[2]);
  progress_ = progress;
}

void Env::validate_state(const std::vector<double>& s) const {
  if (static_cast<int>(s.size()) != spec_.state_dim) {
    throw std::invalid_argument("state has dimension " + std::to_string(s.size()) +
                                ", expected " + std::to_string(spec_.state_dim));
  }
  for (double v : s) {
    if (!std::isfinite(v)) throw std::invalid_argument("state has non-finite entry");
  }
  auto check_pos = [&](double x, double y, const char* what) {
    if (std::fabs(x) > kArena + 1e-9 || std::fabs(y) > kArena + 1e-9) {
      throw std::invalid_argument(std::string(what) + " outside the arena");
    }
  };
  switch (spec_.kind) {
    case EnvKind::nav2d:
      check_pos(s[0], s[1], "agent position");
      break;
    case EnvKind::wheeled:
      check_pos(s[0], s[1], "agent position");
      break;
    case EnvKind::blocks: {
      check_pos(s[0], s[1], "agent position");
      for (int k = 0; k < kNumBlocks; ++k) {
        check_pos(s[static_cast<std::size_t>(2 + 2 * k)],
                  s[static_cast<std::size_t>(3 + 2 * k)], "block position");
      }
      double held = s[10];
      if (held != std::floor(held) || held < -1.0 || held > 3.0) {
        throw std::invalid_argument("held flag must be an integer in [-1, 3]");
      }
      if (held >= 0.0) {
        int k = static_cast<int>(held);
        if (std::fabs(s[static_cast<std::size_t>(2 + 2 * k)] - s[0]) > 1e-9 ||
            std::fabs(s[static_cast<std::size_t>(3 + 2 * k)] - s[1]) > 1e-9) {
          throw std::invalid_argument("held block must sit at the agent position");
        }
      }
      break;
    }
  }
}

void Env::apply_dynamics(const Action& action) {
  switch (spec_.kind) {
    case EnvKind::nav2d: {
      if (action.index < 0 || action.index >= 4) {
        throw std::out_of_range("nav2d action index out of range: " +
                                std::to_string(action.index));
      }
      move_cardinal(state_[0], state_[1], action.index, params_.nav_step);
      break;
    }
    case EnvKind::wheeled: {
      if (action.values.size() != 2) {
        throw std::invalid_argument("wheeled action needs 2 wheel velocities");
      }
      for (double v : action.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite wheel velocity");
      }
      double wl = std::clamp(action.values[0], -params_.omega_max, params_.omega_max);
      double wr = std::clamp(action.values[1], -params_.omega_max, params_.omega_max);
      double v = params_.wheel_radius * (wl + wr) / 2.0;
      double omega = params_.wheel_radius * (wr - wl) / params_.axle;
      double theta = state_[2];
      state_[0] = clip_arena(state_[0] + v * std::cos(theta) * params_.dt);
      state_[1] = clip_arena(state_[1] + v * std::sin(theta) * params_.dt);
      state_[2] = wrap_angle(theta + omega * params_.dt);
      state_[3] = v;
      state_[4] = omega;
      break;
    }
    case EnvKind::blocks: {
      if (action.index < 0 || action.index >= 6) {
        throw std::out_of_range("blocks action index out of range: " +
                                std::to_string(action.index));
      }
      int held = static_cast<int>(state_[10]);
      if (action.index < 4) {
        move_cardinal(state_[0], state_[1], action.index, params_.block_step);
        if (held >= 0) {
          state_[static_cast<std::size_t>(2 + 2 * held)] = state_[0];
          state_[static_cast<std::size_t>(3 + 2 * held)] = state_[1];
        }
      } else if (action.index == 4) {
        // pickup: nearest block within reach, lowest index on ties
        if (held < 0) {
          int best = -1;
          double best_d = params_.pickup_radius;
          for (int k = 0; k < kNumBlocks; ++k) {
            double d = dist2d(state_[0], state_[1],
                              state_[static_cast<std::size_t>(2 + 2 * k)],
                              state_[static_cast<std::size_t>(3 + 2 * k)]);
            if (d < best_d) {
              best = k;
              best_d = d;
            }
          }
          if (best >= 0) {
            state_[10] = static_cast<double>(best);
            state_[static_cast<std::size_t>(2 + 2 * best)] = state_[0];
            state_[static_cast<std::size_t>(3 + 2 * best)] = state_[1];
          }
        }
      } else {
        // drop: the block stays where it is
        if (held >= 0) state_[10] = -1.0;
      }
      break;
    }
  }
}

StepResult Env::step(const Action& action) {
  apply_dynamics(action);
  StepResult res;
  res.reward = step_progress(task_, progress_, state_);
  res.state = state_;
  res.done = progress_.index >= task_.size();
  return res;
}

}  // namespace sectar
