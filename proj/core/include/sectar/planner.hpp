#pragma once

#include <vector>

#include "sectar/envs.hpp"
#include "sectar/model.hpp"

namespace sectar {

// Frozen trajectory-level dynamics used for planning: the mean states that
// follow each start row under each latent row, decoded open loop.
class TrajectoryModel {
 public:
  virtual ~TrajectoryModel() = default;
  virtual int latent_dim() const = 0;
  virtual int state_dim() const = 0;
  virtual int horizon() const = 0;
  // z (B x d_z), s0 (B x state_dim) -> horizon()+1 matrices of
  // (B x state_dim), the first exactly s0. Must be safe to call from
  // several threads at once.
  virtual std::vector<Tensor> predict_mean_states(const Tensor& z,
                                                  const Tensor& s0) const = 0;
};

// Latent-conditioned low-level policy that executes a chosen latent.
class LatentPolicy {
 public:
  virtual ~LatentPolicy() = default;
  virtual Action act(const std::vector<double>& state, const Tensor& z,
                     Rng& rng) const = 0;
};

// Adapters over the trajectory autoencoder.
class ModelDynamics : public TrajectoryModel {
 public:
  explicit ModelDynamics(const SectarModel& model) : model_(&model) {}
  int latent_dim() const override { return model_->config().latent_dim; }
  int state_dim() const override { return model_->config().state_dim; }
  int horizon() const override { return model_->config().horizon; }
  std::vector<Tensor> predict_mean_states(const Tensor& z,
                                          const Tensor& s0) const override {
    return model_->decode_mean_states(z, s0);
  }

 private:
  const SectarModel* model_;
};

class ModelPolicy : public LatentPolicy {
 public:
  explicit ModelPolicy(const SectarModel& model) : model_(&model) {}
  Action act(const std::vector<double>& state, const Tensor& z,
             Rng& rng) const override {
    return sample_action(model_->policy(state, z), rng);
  }

 private:
  const SectarModel* model_;
};

struct PlannerConfig {
  int candidates = 2048;   // latent sequences sampled per planning call
  int depth = 5;           // latents chained per candidate
  int segment_steps = 19;  // env steps per latent, must match the model
  double gamma = 0.99;
  int jobs = 1;            // worker threads over candidate blocks

  void validate() const;
};

struct Plan {
  Tensor latents;  // depth x d_z
  Tensor states;   // (depth * segment_steps + 1) x state_dim mean chain
  double predicted_return = 0.0;
  int candidate = 0;  // winning row in the candidate matrix
};

// Chains depth segments from s0, each seeded by the previous segment's
// final mean state, and scores every predicted post-step state through the
// waypoint rule with a flat per-step discount from the given progress.
Plan simulate_latents(const TrajectoryModel& model, const Tensor& latents,
                      const std::vector<double>& s0, const WaypointTask& task,
                      TaskProgress progress, double gamma);

// Scores each candidate row (depth * d_z flattened latents) and returns the
// best plan; equal returns go to the lowest row index. returns_out, when
// given, receives every candidate's predicted return.
Plan plan_over(const TrajectoryModel& model, const Tensor& candidates,
               const std::vector<double>& s0, const WaypointTask& task,
               TaskProgress progress, const PlannerConfig& cfg,
               std::vector<double>* returns_out = nullptr);

// Random-shooting search: samples cfg.candidates latent sequences from the
// standard normal prior, candidate by candidate, and plans over them.
Plan plan(const TrajectoryModel& model, const std::vector<double>& s0,
          const WaypointTask& task, TaskProgress progress,
          const PlannerConfig& cfg, Rng& rng);

struct MpcResult {
  Trajectory executed;
  double total_reward = 0.0;
  std::vector<std::vector<double>> visited;  // steps + 1 states
  std::vector<Plan> plans;                   // one per replanning point
};

// Receding-horizon control: plan from the live state, execute the first
// latent for one segment, replan. A final partial segment runs truncated
// when steps is not a multiple of the segment length. The env must already
// be at its start state; its task and progress drive both planning and the
// executed rewards.
MpcResult mpc_episode(Env& env, const TrajectoryModel& model,
                      const LatentPolicy& policy, const PlannerConfig& cfg,
                      int steps, Rng& rng);

}  // namespace sectar
