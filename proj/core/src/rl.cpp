#include "sectar/rl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "sectar/context.hpp"

namespace sectar {

namespace {

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i) {
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
  }
}

Tensor gather_rows(const Tensor& m, const std::vector<int>& idx, int s, int e) {
  Tensor out({e - s, m.cols()});
  for (int r = s; r < e; ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out.at(r - s, c) = m.at(idx[static_cast<std::size_t>(r)], c);
    }
  }
  return out;
}

int discrete_action_of(const Tensor& actions, int row, int num_actions) {
  double raw = actions.at(row, 0);
  int a = static_cast<int>(std::lround(raw));
  if (raw != static_cast<double>(a) || a < 0 || a >= num_actions) {
    throw std::invalid_argument("behavior_clone: action index out of range");
  }
  return a;
}

}  // namespace

GaeResult gae_advantages(const std::vector<double>& rewards,
                         const std::vector<double>& values, double gamma,
                         double lam) {
  if (values.size() != rewards.size() + 1) {
    throw std::invalid_argument(
        "gae_advantages: values must hold one bootstrap entry past rewards");
  }
  if (gamma < 0.0 || gamma > 1.0 || lam < 0.0 || lam > 1.0) {
    throw std::invalid_argument("gae_advantages: gamma and lambda must be in [0, 1]");
  }
  const int steps = static_cast<int>(rewards.size());
  GaeResult out;
  out.advantages.resize(static_cast<std::size_t>(steps));
  out.returns.resize(static_cast<std::size_t>(steps));
  double running = 0.0;
  for (int t = steps - 1; t >= 0; --t) {
    const std::size_t ti = static_cast<std::size_t>(t);
    const double delta = rewards[ti] + gamma * values[ti + 1] - values[ti];
    running = delta + gamma * lam * running;
    out.advantages[ti] = running;
    out.returns[ti] = running + values[ti];
  }
  return out;
}

void PpoConfig::validate() const {
  if (!(clip > 0.0 && clip < 1.0)) {
    throw std::invalid_argument("PpoConfig: clip must be in (0, 1)");
  }
  if (gamma < 0.0 || gamma > 1.0 || lam < 0.0 || lam > 1.0) {
    throw std::invalid_argument("PpoConfig: gamma and lambda must be in [0, 1]");
  }
  if (epochs < 0 || minibatch <= 0) {
    throw std::invalid_argument("PpoConfig: bad epoch or minibatch count");
  }
  if (value_coef < 0.0 || entropy_coef < 0.0 || lr < 0.0) {
    throw std::invalid_argument("PpoConfig: coefficients must be nonnegative");
  }
}

RolloutBatch assemble_rollouts(const std::vector<EpisodeRollout>& episodes,
                               double gamma, double lam) {
  if (episodes.empty()) {
    throw std::invalid_argument("assemble_rollouts: no episodes");
  }
  int total = 0;
  for (const EpisodeRollout& ep : episodes) {
    const std::size_t steps = ep.obs.size();
    if (steps == 0 || ep.actions.size() != steps || ep.rewards.size() != steps ||
        ep.logprobs.size() != steps || ep.values.size() != steps) {
      throw std::invalid_argument("assemble_rollouts: ragged episode");
    }
    total += static_cast<int>(steps);
  }
  const int obs_dim = static_cast<int>(episodes[0].obs[0].size());
  const bool discrete = episodes[0].actions[0].index >= 0;
  const int action_dim =
      discrete ? 1 : static_cast<int>(episodes[0].actions[0].values.size());

  RolloutBatch out;
  out.discrete = discrete;
  out.obs = Tensor({total, obs_dim});
  if (!discrete) out.acts = Tensor({total, action_dim});
  out.rewards.reserve(static_cast<std::size_t>(total));
  out.logprobs.reserve(static_cast<std::size_t>(total));
  out.values.reserve(static_cast<std::size_t>(total));
  out.advantages.reserve(static_cast<std::size_t>(total));
  out.returns.reserve(static_cast<std::size_t>(total));

  int row = 0;
  for (const EpisodeRollout& ep : episodes) {
    out.episode_start.push_back(row);
    std::vector<double> values_with_boot = ep.values;
    values_with_boot.push_back(ep.bootstrap_value);
    GaeResult gae = gae_advantages(ep.rewards, values_with_boot, gamma, lam);
    for (std::size_t t = 0; t < ep.obs.size(); ++t) {
      if (static_cast<int>(ep.obs[t].size()) != obs_dim) {
        throw std::invalid_argument("assemble_rollouts: observation width varies");
      }
      for (int c = 0; c < obs_dim; ++c) out.obs.at(row, c) = ep.obs[t][static_cast<std::size_t>(c)];
      if (discrete) {
        if (ep.actions[t].index < 0) {
          throw std::invalid_argument("assemble_rollouts: mixed action kinds");
        }
        out.act_idx.push_back(ep.actions[t].index);
      } else {
        if (static_cast<int>(ep.actions[t].values.size()) != action_dim) {
          throw std::invalid_argument("assemble_rollouts: action width varies");
        }
        for (int c = 0; c < action_dim; ++c) {
          out.acts.at(row, c) = ep.actions[t].values[static_cast<std::size_t>(c)];
        }
      }
      out.rewards.push_back(ep.rewards[t]);
      out.logprobs.push_back(ep.logprobs[t]);
      out.values.push_back(ep.values[t]);
      out.advantages.push_back(gae.advantages[t]);
      out.returns.push_back(gae.returns[t]);
      ++row;
    }
  }
  out.episode_start.push_back(row);
  return out;
}

PpoStats ppo_update(PolicyNet& policy, Mlp& value_net,
                    const RolloutBatch& batch, const PpoConfig& cfg, Adam& opt,
                    Rng& rng) {
  cfg.validate();
  const int n = batch.size();
  if (n == 0) throw std::invalid_argument("ppo_update: empty batch");
  if (batch.obs.cols() != policy.obs_dim || value_net.in != policy.obs_dim ||
      value_net.out != 1) {
    throw std::invalid_argument("ppo_update: observation width mismatch");
  }
  if (batch.discrete != policy.discrete()) {
    throw std::invalid_argument("ppo_update: action kind mismatch");
  }
  if (batch.discrete && static_cast<int>(batch.act_idx.size()) != n) {
    throw std::invalid_argument("ppo_update: missing action indices");
  }
  if (!batch.discrete &&
      (batch.acts.rows() != n || batch.acts.cols() != policy.action_dim)) {
    throw std::invalid_argument("ppo_update: action matrix mismatch");
  }

  std::vector<double> adv = batch.advantages;
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double stddev = std::sqrt(var / n);
  for (double& a : adv) a = (a - mean) / (stddev + 1e-8);

  PpoStats stats;
  double surr_sum = 0.0, vloss_sum = 0.0, ent_sum = 0.0;
  long long clipped = 0, seen = 0;
  bool first_pass = true;

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (int s = 0; s < n; s += cfg.minibatch) {
      const int e = std::min(n, s + cfg.minibatch);
      const int m = e - s;
      Tensor mb_obs = gather_rows(batch.obs, order, s, e);
      Tensor mb_lp_old({m}), mb_adv({m}), mb_ret({m, 1});
      std::vector<int> mb_idx;
      Tensor mb_acts;
      if (batch.discrete) {
        mb_idx.reserve(static_cast<std::size_t>(m));
      } else {
        mb_acts = gather_rows(batch.acts, order, s, e);
      }
      for (int r = s; r < e; ++r) {
        const std::size_t src = static_cast<std::size_t>(order[static_cast<std::size_t>(r)]);
        mb_lp_old.at(r - s) = batch.logprobs[src];
        mb_adv.at(r - s) = adv[src];
        mb_ret.at(r - s, 0) = batch.returns[src];
        if (batch.discrete) mb_idx.push_back(batch.act_idx[src]);
      }

      Tape tape;
      TapeCtx cx(tape);
      TapeBind tb(tape);
      PolicyVars<Var> pv = policy.bind(tb, "pi");
      MlpVars<Var> vv = value_net.bind(tb, "vf");
      Var obs_v = tape.constant(mb_obs);
      Var lp_new = batch.discrete
                       ? policy_logprob_rows(cx, pv, obs_v, mb_idx)
                       : policy_logprob_rows(cx, pv, obs_v, tape.constant(mb_acts));
      Var ratio = cx.exp(cx.sub(lp_new, tape.constant(mb_lp_old)));
      Var adv_v = tape.constant(mb_adv);
      Var surr = cx.minimum(cx.mul(ratio, adv_v),
                            cx.mul(cx.clip(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip), adv_v));
      Var surr_mean = cx.mean_all(surr);
      Var verr = cx.sub(mlp_forward(cx, vv, obs_v), tape.constant(mb_ret));
      Var vloss = cx.mean_all(cx.mul(verr, verr));
      Var ent = cx.mean_all(policy_entropy_rows(cx, pv, obs_v));
      Var loss = cx.add(cx.scale(surr_mean, -1.0),
                        cx.add(cx.scale(vloss, cfg.value_coef),
                               cx.scale(ent, -cfg.entropy_coef)));

      const double loss_value = tape.value(loss).at(0);
      if (!std::isfinite(loss_value)) {
        throw std::runtime_error("ppo_update: loss is not finite");
      }
      const Tensor& ratio_value = tape.value(ratio);
      for (int i = 0; i < m; ++i) {
        if (std::fabs(ratio_value.at(i) - 1.0) > cfg.clip) ++clipped;
        if (first_pass) {
          stats.first_ratio_dev =
              std::max(stats.first_ratio_dev, std::fabs(ratio_value.at(i) - 1.0));
        }
      }
      first_pass = false;
      seen += m;
      surr_sum += tape.value(surr_mean).at(0) * m;
      vloss_sum += tape.value(vloss).at(0) * m;
      ent_sum += tape.value(ent).at(0) * m;

      std::vector<Tensor> grads = tape.gradients(loss, tb.vars());
      opt.step(tb.names(), tb.params(), std::move(grads));
    }
  }

  if (seen > 0) {
    stats.surrogate = surr_sum / seen;
    stats.value_loss = vloss_sum / seen;
    stats.entropy = ent_sum / seen;
    stats.clip_fraction = static_cast<double>(clipped) / seen;
  }

  EagerCtx ec;
  PolicyVars<Tensor> pe = policy.eager();
  Tensor lp_final = batch.discrete
                        ? policy_logprob_rows(ec, pe, batch.obs, batch.act_idx)
                        : policy_logprob_rows(ec, pe, batch.obs, batch.acts);
  double kl = 0.0;
  for (int i = 0; i < n; ++i) kl += batch.logprobs[static_cast<std::size_t>(i)] - lp_final.at(i);
  stats.approx_kl = kl / n;
  return stats;
}

double behavior_clone(PolicyNet& policy, const std::vector<BcItem>& batch,
                      int epochs, int minibatch, Adam& opt, Rng& rng) {
  if (batch.empty()) throw std::invalid_argument("behavior_clone: empty batch");
  if (epochs < 0 || minibatch <= 0) {
    throw std::invalid_argument("behavior_clone: bad epoch or minibatch count");
  }

  int total = 0;
  for (const BcItem& item : batch) {
    if (item.traj == nullptr || item.traj->steps() < 1) {
      throw std::invalid_argument("behavior_clone: missing trajectory");
    }
    const int obs_dim = item.traj->state_dim() + item.z.size();
    if (obs_dim != policy.obs_dim) {
      throw std::invalid_argument("behavior_clone: observation width mismatch");
    }
    if (!policy.discrete() && item.traj->action_dim() != policy.action_dim) {
      throw std::invalid_argument("behavior_clone: action width mismatch");
    }
    if (policy.discrete() && item.traj->action_dim() != 1) {
      throw std::invalid_argument("behavior_clone: action width mismatch");
    }
    total += item.traj->steps();
  }

  Tensor obs({total, policy.obs_dim});
  Tensor acts;
  std::vector<int> act_idx;
  if (policy.discrete()) {
    act_idx.reserve(static_cast<std::size_t>(total));
  } else {
    acts = Tensor({total, policy.action_dim});
  }
  int row = 0;
  for (const BcItem& item : batch) {
    const Trajectory& t = *item.traj;
    for (int k = 0; k < t.steps(); ++k) {
      for (int c = 0; c < t.state_dim(); ++c) obs.at(row, c) = t.states.at(k, c);
      for (int c = 0; c < item.z.size(); ++c) {
        obs.at(row, t.state_dim() + c) = item.z.at(c);
      }
      if (policy.discrete()) {
        act_idx.push_back(discrete_action_of(t.actions, k, policy.num_actions));
      } else {
        for (int c = 0; c < policy.action_dim; ++c) acts.at(row, c) = t.actions.at(k, c);
      }
      ++row;
    }
  }

  if (epochs == 0) {
    EagerCtx ec;
    PolicyVars<Tensor> pe = policy.eager();
    Tensor lp = policy.discrete() ? policy_logprob_rows(ec, pe, obs, act_idx)
                                  : policy_logprob_rows(ec, pe, obs, acts);
    double sum = 0.0;
    for (int i = 0; i < total; ++i) sum += lp.at(i);
    return -sum / total;
  }

  std::vector<int> order(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) order[static_cast<std::size_t>(i)] = i;
  double epoch_nll = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    shuffle_indices(order, rng);
    double nll_sum = 0.0;
    for (int s = 0; s < total; s += minibatch) {
      const int e = std::min(total, s + minibatch);
      const int m = e - s;
      Tensor mb_obs = gather_rows(obs, order, s, e);
      std::vector<int> mb_idx;
      Tensor mb_acts;
      if (policy.discrete()) {
        for (int r = s; r < e; ++r) {
          mb_idx.push_back(act_idx[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])]);
        }
      } else {
        mb_acts = gather_rows(acts, order, s, e);
      }

      Tape tape;
      TapeCtx cx(tape);
      TapeBind tb(tape);
      PolicyVars<Var> pv = policy.bind(tb, "pi");
      Var obs_v = tape.constant(mb_obs);
      Var lp = policy.discrete()
                   ? policy_logprob_rows(cx, pv, obs_v, mb_idx)
                   : policy_logprob_rows(cx, pv, obs_v, tape.constant(mb_acts));
      Var loss = cx.scale(cx.mean_all(lp), -1.0);
      const double loss_value = tape.value(loss).at(0);
      if (!std::isfinite(loss_value)) {
        throw std::runtime_error("behavior_clone: loss is not finite");
      }
      nll_sum += loss_value * m;
      std::vector<Tensor> grads = tape.gradients(loss, tb.vars());
      opt.step(tb.names(), tb.params(), std::move(grads));
    }
    epoch_nll = nll_sum / total;
  }
  return epoch_nll;
}

}  // namespace sectar
