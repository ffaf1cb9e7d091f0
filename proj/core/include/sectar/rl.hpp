#pragma once

#include <vector>

#include "sectar/envs.hpp"
#include "sectar/policy.hpp"
#include "sectar/trajectory.hpp"

namespace sectar {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// Generalized advantage estimation for one episode. values carries one
// trailing bootstrap entry for the state after the last reward, so
// values.size() == rewards.size() + 1; pass 0 there at true terminals.
GaeResult gae_advantages(const std::vector<double>& rewards,
                         const std::vector<double>& values, double gamma,
                         double lam);

struct PpoConfig {
  double clip = 0.2;
  int epochs = 10;
  int minibatch = 64;
  double gamma = 0.99;
  double lam = 0.95;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double lr = 3e-4;

  void validate() const;
};

// One episode as collected: per-step observation rows (what the policy saw,
// latent included when it conditions on one), the actions taken, rewards,
// collection-time log-probs and value estimates, and the value bootstrap
// for the truncation state (zero when the episode really ended).
struct EpisodeRollout {
  std::vector<std::vector<double>> obs;
  std::vector<Action> actions;
  std::vector<double> rewards;
  std::vector<double> logprobs;
  std::vector<double> values;
  double bootstrap_value = 0.0;
};

// Flattened rollout set ready for updates. assemble_rollouts fills
// advantages and returns before any parameter changes; logprobs and values
// stay the collection-time numbers throughout.
struct RolloutBatch {
  bool discrete = true;
  Tensor obs;                // N x obs_dim
  Tensor acts;               // N x action_dim for continuous policies
  std::vector<int> act_idx;  // N entries for discrete policies
  std::vector<double> rewards;
  std::vector<double> logprobs;
  std::vector<double> values;
  std::vector<double> advantages;
  std::vector<double> returns;
  std::vector<int> episode_start;  // row offsets, final entry == N

  int size() const { return obs.size() == 0 ? 0 : obs.rows(); }
};

RolloutBatch assemble_rollouts(const std::vector<EpisodeRollout>& episodes,
                               double gamma, double lam);

struct PpoStats {
  double surrogate = 0.0;       // mean clipped surrogate across all passes
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;       // mean(old logprob - new logprob) after update
  double clip_fraction = 0.0;   // samples with |ratio - 1| > clip
  double first_ratio_dev = 0.0; // max |ratio - 1| on the very first minibatch
};

// Clipped-surrogate update of a policy together with its value head, run as
// shuffled minibatches over several epochs. Advantages are normalized to
// mean 0, std 1 across the batch first. The policy binds under "pi" and the
// value net under "vf" so one Adam instance can follow both across calls.
PpoStats ppo_update(PolicyNet& policy, Mlp& value_net,
                    const RolloutBatch& batch, const PpoConfig& cfg, Adam& opt,
                    Rng& rng);

// One imitation item: a trajectory and the latent its policy conditions on.
// An empty latent means the policy observes the raw state alone.
struct BcItem {
  const Trajectory* traj = nullptr;
  Tensor z;
};

// Minibatched maximum-likelihood imitation of the recorded actions. Returns
// the mean action NLL over the final epoch, measured before each update;
// epochs == 0 just evaluates and leaves the parameters untouched.
double behavior_clone(PolicyNet& policy, const std::vector<BcItem>& batch,
                      int epochs, int minibatch, Adam& opt, Rng& rng);

}  // namespace sectar
