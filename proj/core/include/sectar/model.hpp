#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sectar/dists.hpp"
#include "sectar/nets.hpp"
#include "sectar/optim.hpp"
#include "sectar/policy.hpp"
#include "sectar/trajectory.hpp"

namespace sectar {

struct ModelConfig {
  int state_dim = 2;
  int action_dim = 1;
  int num_actions = 4;  // 0 means continuous actions
  int latent_dim = 8;
  int horizon = 19;  // steps per latent segment
  int enc_hidden = 300;
  int dec_hidden = 256;
  std::vector<int> policy_hidden = {400, 300, 200};

  bool discrete() const { return num_actions > 0; }
  void validate() const;
};

struct VaeParts {
  double recon_nll = 0.0;
  double kl = 0.0;
};

// Per-step absolute-state Gaussians from the state decoder: means[t] is the
// integrated mean of s_{t+1} for every batch row, log_stds[t] its spread.
struct DecodedSteps {
  std::vector<Tensor> means;
  std::vector<Tensor> log_stds;
};

template <class V>
struct EncoderVars {
  LstmVars<V> f0, b0, f1, b1;
  LinearVars<V> head;
};

template <class V>
struct DecoderVars {
  LstmVars<V> cell;
  LinearVars<V> head;
};

// The trajectory autoencoder: a bidirectional recurrent encoder over state
// sequences, an open-loop recurrent state decoder emitting per-step state
// deltas, and a feedforward policy conditioned on [state; z].
//
// The decoder works in the frame of the segment's start state: its constant
// per-step input is [z; s0 in start-centered coordinates], and the second
// block is identically zero by construction. Deltas therefore depend on z
// alone and decoded mean trajectories translate exactly with s0.
class SectarModel {
 public:
  SectarModel(const ModelConfig& cfg, Rng& rng);
  SectarModel(const SectarModel&) = delete;
  SectarModel& operator=(const SectarModel&) = delete;

  const ModelConfig& config() const { return cfg_; }
  ParamRegistry& params() { return reg_; }
  const ParamRegistry& params() const { return reg_; }
  PolicyNet& policy_net() { return policy_; }
  const PolicyNet& policy_net() const { return policy_; }

  // Posterior over the latent for one trajectory (rank-1 mean/log-std).
  DiagGaussian encode(const Trajectory& traj) const;

  // Open-loop decode for a batch: z is (B x d_z) and s0 (B x state_dim);
  // rank-1 inputs are treated as one row. Returns T step distributions.
  DecodedSteps decode_steps(const Tensor& z, const Tensor& s0) const;
  // The anchored mean path: T+1 tensors of (B x state_dim), first is s0.
  std::vector<Tensor> decode_mean_states(const Tensor& z, const Tensor& s0) const;

  ActionDist policy(const std::vector<double>& state, const Tensor& z) const;

  // Negative evidence bound for a batch: reconstruction NLL of all post-s0
  // states plus beta times KL(posterior || N(0, I)), averaged over the
  // batch, with one reparameterized latent per trajectory driven by the
  // supplied noise rows eps (B x d_z).
  Var vae_loss(TapeBind& tb, const std::vector<const Trajectory*>& batch,
               double beta, const Tensor& eps, VaeParts* parts = nullptr);
  Var vae_loss(TapeBind& tb, const std::vector<Trajectory>& batch, double beta,
               const Tensor& eps, VaeParts* parts = nullptr);

  // Behavior-cloning NLL of the recorded actions under the policy decoder,
  // with the latent reparameterized from the encoder as in vae_loss so
  // gradients reach the encoder here too.
  Var bc_loss(TapeBind& tb, const std::vector<const Trajectory*>& batch,
              const Tensor& eps);
  Var bc_loss(TapeBind& tb, const std::vector<Trajectory>& batch, const Tensor& eps);

  // r_t = log p(s_{t+1} | z, step t) under the decoder's step Gaussians for
  // a trajectory executed from the same (z, s0).
  std::vector<double> consistency_rewards(const Trajectory& rolled,
                                          const Tensor& z) const;

 private:
  EncoderVars<Var> bind_encoder(TapeBind& tb);
  EncoderVars<Tensor> eager_encoder() const;
  DecoderVars<Var> bind_decoder(TapeBind& tb);
  DecoderVars<Tensor> eager_decoder() const;

  template <class Ctx, class V>
  std::pair<V, V> encoder_graph(const Ctx& cx, const EncoderVars<V>& ev,
                                const std::vector<V>& xs) const;
  template <class Ctx, class V>
  void decoder_graph(const Ctx& cx, const DecoderVars<V>& dv, V z,
                     const Tensor& s0, std::vector<V>& means,
                     std::vector<V>& log_stds) const;
  template <class Ctx, class V>
  std::pair<V, V> posterior_graph(const Ctx& cx, const EncoderVars<V>& ev,
                                  const std::vector<const Trajectory*>& batch) const;

  ModelConfig cfg_;
  LstmCell enc_f0_, enc_b0_, enc_f1_, enc_b1_;
  Linear enc_head_;
  LstmCell dec_cell_;
  Linear dec_head_;
  PolicyNet policy_;
  ParamRegistry reg_;
};

// Checkpoint plus a text sidecar (path + ".meta") recording the model
// configuration and environment kind.
void save_model(const SectarModel& model, EnvKind kind, const std::string& path);

struct LoadedModel {
  ModelConfig config;
  EnvKind kind = EnvKind::nav2d;
  std::unique_ptr<SectarModel> model;
};

LoadedModel load_model(const std::string& path);

}  // namespace sectar
