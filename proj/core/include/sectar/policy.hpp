#pragma once

#include <string>
#include <vector>

#include "sectar/dists.hpp"
#include "sectar/envs.hpp"
#include "sectar/nets.hpp"

namespace sectar {

// Action distribution for one observation; exactly one member is active.
struct ActionDist {
  bool discrete = true;
  Categorical cat;
  DiagGaussian gauss;
};

Action sample_action(const ActionDist& d, Rng& rng);
Action mode_action(const ActionDist& d);
double action_logprob(const ActionDist& d, const Action& a);
double action_entropy(const ActionDist& d);

template <class V>
struct PolicyVars {
  MlpVars<V> net;
  V log_std;  // continuous heads only
  bool discrete = true;
  int action_dim = 1;
};

// Feedforward stochastic policy over flat observation rows. Discrete heads
// emit logits; continuous heads emit means plus a learned state-independent
// log-std vector, clamped on every use.
struct PolicyNet {
  Mlp net;
  Tensor log_std;  // 1 x action_dim
  int obs_dim = 0;
  int num_actions = 0;  // 0 means continuous
  int action_dim = 1;

  bool discrete() const { return num_actions > 0; }

  void init(int obs, const std::vector<int>& hidden, int num_actions_or_zero,
            int act_dim, Rng& rng);
  void register_params(ParamRegistry& reg, const std::string& prefix);
  PolicyVars<Var> bind(TapeBind& tb, const std::string& prefix);
  PolicyVars<Tensor> eager() const;

  ActionDist action_dist(const std::vector<double>& obs) const;
};

// Per-row log probability of the given actions under the policy, obs is
// (N x obs_dim); returns a length-N tensor.
template <class Ctx, class V = typename Ctx::V>
V policy_logprob_rows(const Ctx& cx, const PolicyVars<V>& pv, V obs,
                      const std::vector<int>& actions) {
  return categorical_logprob_rows(cx, mlp_forward(cx, pv.net, obs), actions);
}

template <class Ctx, class V = typename Ctx::V>
V policy_logprob_rows(const Ctx& cx, const PolicyVars<V>& pv, V obs, V actions) {
  V mean = mlp_forward(cx, pv.net, obs);
  int n = cx.value(mean).rows();
  V ls = cx.tile_rows(cx.clip(pv.log_std, kLogStdMin, kLogStdMax), n);
  return gaussian_logprob_rows(cx, mean, ls, actions);
}

template <class Ctx, class V = typename Ctx::V>
V policy_entropy_rows(const Ctx& cx, const PolicyVars<V>& pv, V obs) {
  if (pv.discrete) {
    return categorical_entropy_rows(cx, mlp_forward(cx, pv.net, obs));
  }
  int n = cx.value(obs).rows();
  V ls = cx.tile_rows(cx.clip(pv.log_std, kLogStdMin, kLogStdMax), n);
  return gaussian_entropy_rows(cx, ls);
}

}  // namespace sectar
