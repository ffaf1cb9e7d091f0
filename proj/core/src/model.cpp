#include "sectar/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sectar/checkpoint.hpp"

namespace sectar {

namespace {

Tensor as_row_matrix(const Tensor& t) {
  if (t.rank() == 2) return t;
  return Tensor({1, t.size()}, std::vector<double>(t.data(), t.data() + t.size()));
}

std::vector<const Trajectory*> pointer_view(const std::vector<Trajectory>& batch) {
  std::vector<const Trajectory*> ptrs;
  ptrs.reserve(batch.size());
  for (const Trajectory& t : batch) ptrs.push_back(&t);
  return ptrs;
}

}  // namespace

void ModelConfig::validate() const {
  if (state_dim <= 0 || action_dim <= 0 || latent_dim <= 0 || horizon <= 0 ||
      enc_hidden <= 0 || dec_hidden <= 0 || num_actions < 0) {
    throw std::invalid_argument("ModelConfig: dimensions must be positive");
  }
  for (int h : policy_hidden) {
    if (h <= 0) throw std::invalid_argument("ModelConfig: bad policy hidden size");
  }
}

SectarModel::SectarModel(const ModelConfig& cfg, Rng& rng) : cfg_(cfg) {
  cfg_.validate();
  enc_f0_.init(cfg_.state_dim, cfg_.enc_hidden, rng);
  enc_b0_.init(cfg_.state_dim, cfg_.enc_hidden, rng);
  enc_f1_.init(2 * cfg_.enc_hidden, cfg_.enc_hidden, rng);
  enc_b1_.init(2 * cfg_.enc_hidden, cfg_.enc_hidden, rng);
  enc_head_.init(2 * cfg_.enc_hidden, 2 * cfg_.latent_dim, rng);
  dec_cell_.init(cfg_.latent_dim + cfg_.state_dim, cfg_.dec_hidden, rng);
  dec_head_.init(cfg_.dec_hidden, 2 * cfg_.state_dim, rng);
  policy_.init(cfg_.state_dim + cfg_.latent_dim, cfg_.policy_hidden,
               cfg_.num_actions, cfg_.action_dim, rng);

  enc_f0_.register_params(reg_, "enc.f0");
  enc_b0_.register_params(reg_, "enc.b0");
  enc_f1_.register_params(reg_, "enc.f1");
  enc_b1_.register_params(reg_, "enc.b1");
  enc_head_.register_params(reg_, "enc.head");
  dec_cell_.register_params(reg_, "dec.cell");
  dec_head_.register_params(reg_, "dec.head");
  policy_.register_params(reg_, "pi");
}

EncoderVars<Var> SectarModel::bind_encoder(TapeBind& tb) {
  return {enc_f0_.bind(tb, "enc.f0"), enc_b0_.bind(tb, "enc.b0"),
          enc_f1_.bind(tb, "enc.f1"), enc_b1_.bind(tb, "enc.b1"),
          enc_head_.bind(tb, "enc.head")};
}

EncoderVars<Tensor> SectarModel::eager_encoder() const {
  return {enc_f0_.eager(), enc_b0_.eager(), enc_f1_.eager(), enc_b1_.eager(),
          enc_head_.eager()};
}

DecoderVars<Var> SectarModel::bind_decoder(TapeBind& tb) {
  return {dec_cell_.bind(tb, "dec.cell"), dec_head_.bind(tb, "dec.head")};
}

DecoderVars<Tensor> SectarModel::eager_decoder() const {
  return {dec_cell_.eager(), dec_head_.eager()};
}

template <class Ctx, class V>
std::pair<V, V> SectarModel::encoder_graph(const Ctx& cx, const EncoderVars<V>& ev,
                                           const std::vector<V>& xs) const {
  if (xs.empty()) throw std::invalid_argument("encoder needs at least one state");
  std::vector<V> l1 = bilstm_layer(cx, ev.f0, ev.b0, xs);
  std::vector<V> l2 = bilstm_layer(cx, ev.f1, ev.b1, l1);
  V pooled = mean_over_steps(cx, l2);
  V out = linear_forward(cx, ev.head, pooled);
  V mean = cx.slice_cols(out, 0, cfg_.latent_dim);
  V log_std = cx.clip(cx.slice_cols(out, cfg_.latent_dim, 2 * cfg_.latent_dim),
                      kLogStdMin, kLogStdMax);
  return {mean, log_std};
}

template <class Ctx, class V>
void SectarModel::decoder_graph(const Ctx& cx, const DecoderVars<V>& dv, V z,
                                const Tensor& s0, std::vector<V>& means,
                                std::vector<V>& log_stds) const {
  const int b = s0.rows();
  const int sd = cfg_.state_dim;
  V input = cx.concat_cols(z, cx.constant(Tensor::zeros({b, sd})));
  LstmState<V> st = lstm_zero_state(cx, b, cfg_.dec_hidden);
  V cur = cx.constant(s0);
  means.reserve(static_cast<std::size_t>(cfg_.horizon));
  log_stds.reserve(static_cast<std::size_t>(cfg_.horizon));
  for (int t = 0; t < cfg_.horizon; ++t) {
    st = lstm_step(cx, dv.cell, input, st);
    V out = linear_forward(cx, dv.head, st.h);
    V delta = cx.slice_cols(out, 0, sd);
    V ls = cx.clip(cx.slice_cols(out, sd, 2 * sd), kLogStdMin, kLogStdMax);
    cur = cx.add(cur, delta);
    means.push_back(cur);
    log_stds.push_back(ls);
  }
}

template <class Ctx, class V>
std::pair<V, V> SectarModel::posterior_graph(
    const Ctx& cx, const EncoderVars<V>& ev,
    const std::vector<const Trajectory*>& batch) const {
  const int b = static_cast<int>(batch.size());
  const int sd = cfg_.state_dim;
  std::vector<V> xs;
  xs.reserve(static_cast<std::size_t>(cfg_.horizon) + 1);
  for (int t = 0; t <= cfg_.horizon; ++t) {
    Tensor x({b, sd});
    for (int r = 0; r < b; ++r) {
      for (int c = 0; c < sd; ++c) x.at(r, c) = batch[static_cast<std::size_t>(r)]->states.at(t, c);
    }
    xs.push_back(cx.constant(std::move(x)));
  }
  return encoder_graph(cx, ev, xs);
}

DiagGaussian SectarModel::encode(const Trajectory& traj) const {
  validate_trajectory(traj, cfg_.horizon, cfg_.state_dim, cfg_.action_dim);
  EagerCtx cx;
  std::vector<const Trajectory*> one{&traj};
  auto [mean, log_std] = posterior_graph(cx, eager_encoder(), one);
  Tensor m({cfg_.latent_dim});
  Tensor l({cfg_.latent_dim});
  for (int i = 0; i < cfg_.latent_dim; ++i) {
    m.at(i) = mean.at(0, i);
    l.at(i) = log_std.at(0, i);
  }
  return DiagGaussian{std::move(m), std::move(l)};
}

DecodedSteps SectarModel::decode_steps(const Tensor& z, const Tensor& s0) const {
  Tensor zm = as_row_matrix(z);
  Tensor sm = as_row_matrix(s0);
  if (zm.cols() != cfg_.latent_dim) {
    throw std::invalid_argument("latent has " + std::to_string(zm.cols()) +
                                " columns, expected " + std::to_string(cfg_.latent_dim));
  }
  if (sm.cols() != cfg_.state_dim || sm.rows() != zm.rows()) {
    throw std::invalid_argument("start states are " + sm.shape_str() +
                                ", expected (" + std::to_string(zm.rows()) + ", " +
                                std::to_string(cfg_.state_dim) + ")");
  }
  EagerCtx cx;
  DecodedSteps out;
  decoder_graph(cx, eager_decoder(), zm, sm, out.means, out.log_stds);
  return out;
}

std::vector<Tensor> SectarModel::decode_mean_states(const Tensor& z,
                                                    const Tensor& s0) const {
  DecodedSteps steps = decode_steps(z, s0);
  std::vector<Tensor> path;
  path.reserve(steps.means.size() + 1);
  path.push_back(as_row_matrix(s0));
  for (Tensor& m : steps.means) path.push_back(std::move(m));
  return path;
}

ActionDist SectarModel::policy(const std::vector<double>& state,
                               const Tensor& z) const {
  if (static_cast<int>(state.size()) != cfg_.state_dim) {
    throw std::invalid_argument("state has wrong dimension for policy");
  }
  Tensor zr = as_row_matrix(z);
  if (zr.cols() != cfg_.latent_dim || zr.rows() != 1) {
    throw std::invalid_argument("latent has wrong dimension for policy");
  }
  std::vector<double> obs = state;
  for (int i = 0; i < cfg_.latent_dim; ++i) obs.push_back(zr.at(0, i));
  return policy_.action_dist(obs);
}

Var SectarModel::vae_loss(TapeBind& tb, const std::vector<const Trajectory*>& batch,
                          double beta, const Tensor& eps, VaeParts* parts) {
  if (batch.empty()) throw std::invalid_argument("vae_loss: empty batch");
  if (beta < 0.0) throw std::invalid_argument("vae_loss: beta must be >= 0");
  const int b = static_cast<int>(batch.size());
  for (const Trajectory* t : batch) {
    validate_trajectory(*t, cfg_.horizon, cfg_.state_dim, cfg_.action_dim);
  }
  if (eps.rank() != 2 || eps.rows() != b || eps.cols() != cfg_.latent_dim) {
    throw std::invalid_argument("vae_loss: eps must be (batch x latent_dim)");
  }

  Tape& tape = tb.tape();
  TapeCtx cx(tape);
  auto [mean, log_std] = posterior_graph(cx, bind_encoder(tb), batch);
  Var z = tape.add(mean, tape.mul(tape.exp(log_std), tape.constant(eps)));

  Tensor s0({b, cfg_.state_dim});
  for (int r = 0; r < b; ++r) {
    for (int c = 0; c < cfg_.state_dim; ++c) {
      s0.at(r, c) = batch[static_cast<std::size_t>(r)]->states.at(0, c);
    }
  }
  std::vector<Var> means, log_stds;
  decoder_graph(cx, bind_decoder(tb), z, s0, means, log_stds);

  Var lp_total{};
  for (int t = 0; t < cfg_.horizon; ++t) {
    Tensor x({b, cfg_.state_dim});
    for (int r = 0; r < b; ++r) {
      for (int c = 0; c < cfg_.state_dim; ++c) {
        x.at(r, c) = batch[static_cast<std::size_t>(r)]->states.at(t + 1, c);
      }
    }
    Var lp = gaussian_logprob_rows(cx, means[static_cast<std::size_t>(t)],
                                   log_stds[static_cast<std::size_t>(t)],
                                   tape.constant(std::move(x)));
    lp_total = t == 0 ? lp : tape.add(lp_total, lp);
  }
  Var recon = tape.scale(tape.mean_all(lp_total), -1.0);
  Var kl = tape.mean_all(gaussian_kl_to_standard_rows(cx, mean, log_std));
  Var loss = tape.add(recon, tape.scale(kl, beta));
  if (parts != nullptr) {
    parts->recon_nll = tape.value(recon).at(0);
    parts->kl = tape.value(kl).at(0);
  }
  return loss;
}

Var SectarModel::vae_loss(TapeBind& tb, const std::vector<Trajectory>& batch,
                          double beta, const Tensor& eps, VaeParts* parts) {
  return vae_loss(tb, pointer_view(batch), beta, eps, parts);
}

Var SectarModel::bc_loss(TapeBind& tb, const std::vector<const Trajectory*>& batch,
                         const Tensor& eps) {
  if (batch.empty()) throw std::invalid_argument("bc_loss: empty batch");
  const int b = static_cast<int>(batch.size());
  const int t_steps = cfg_.horizon;
  for (const Trajectory* t : batch) {
    validate_trajectory(*t, t_steps, cfg_.state_dim, cfg_.action_dim);
  }
  if (eps.rank() != 2 || eps.rows() != b || eps.cols() != cfg_.latent_dim) {
    throw std::invalid_argument("bc_loss: eps must be (batch x latent_dim)");
  }

  Tape& tape = tb.tape();
  TapeCtx cx(tape);
  auto [mean, log_std] = posterior_graph(cx, bind_encoder(tb), batch);
  Var z = tape.add(mean, tape.mul(tape.exp(log_std), tape.constant(eps)));

  // rows stacked step-major: row t*b + r is (state of trajectory r at step t)
  const int rows = b * t_steps;
  Tensor states({rows, cfg_.state_dim});
  for (int t = 0; t < t_steps; ++t) {
    for (int r = 0; r < b; ++r) {
      for (int c = 0; c < cfg_.state_dim; ++c) {
        states.at(t * b + r, c) = batch[static_cast<std::size_t>(r)]->states.at(t, c);
      }
    }
  }
  Var obs = tape.concat_cols(tape.constant(std::move(states)), tape.tile_rows(z, t_steps));

  PolicyVars<Var> pv = policy_.bind(tb, "pi");
  Var lp{};
  if (cfg_.discrete()) {
    std::vector<int> acts(static_cast<std::size_t>(rows));
    for (int t = 0; t < t_steps; ++t) {
      for (int r = 0; r < b; ++r) {
        double a = batch[static_cast<std::size_t>(r)]->actions.at(t, 0);
        int ai = static_cast<int>(a);
        if (a != ai || ai < 0 || ai >= cfg_.num_actions) {
          throw std::invalid_argument("bc_loss: recorded action out of range");
        }
        acts[static_cast<std::size_t>(t * b + r)] = ai;
      }
    }
    lp = policy_logprob_rows(cx, pv, obs, acts);
  } else {
    Tensor acts({rows, cfg_.action_dim});
    for (int t = 0; t < t_steps; ++t) {
      for (int r = 0; r < b; ++r) {
        for (int c = 0; c < cfg_.action_dim; ++c) {
          acts.at(t * b + r, c) = batch[static_cast<std::size_t>(r)]->actions.at(t, c);
        }
      }
    }
    lp = policy_logprob_rows(cx, pv, obs, tape.constant(std::move(acts)));
  }
  return tape.scale(tape.mean_all(lp), -1.0);
}

Var SectarModel::bc_loss(TapeBind& tb, const std::vector<Trajectory>& batch,
                         const Tensor& eps) {
  return bc_loss(tb, pointer_view(batch), eps);
}

std::vector<double> SectarModel::consistency_rewards(const Trajectory& rolled,
                                                     const Tensor& z) const {
  validate_trajectory(rolled, cfg_.horizon, cfg_.state_dim, cfg_.action_dim);
  Tensor s0({1, cfg_.state_dim});
  for (int c = 0; c < cfg_.state_dim; ++c) s0.at(0, c) = rolled.states.at(0, c);
  DecodedSteps steps = decode_steps(z, s0);
  std::vector<double> rewards(static_cast<std::size_t>(cfg_.horizon));
  for (int t = 0; t < cfg_.horizon; ++t) {
    double lp = 0.0;
    for (int c = 0; c < cfg_.state_dim; ++c) {
      double ls = steps.log_stds[static_cast<std::size_t>(t)].at(0, c);
      double m = steps.means[static_cast<std::size_t>(t)].at(0, c);
      double zd = (rolled.states.at(t + 1, c) - m) * std::exp(-ls);
      lp += -0.5 * zd * zd - ls - 0.5 * kLogTwoPi;
    }
    rewards[static_cast<std::size_t>(t)] = lp;
  }
  return rewards;
}

void save_model(const SectarModel& model, EnvKind kind, const std::string& path) {
  save_checkpoint(model.params(), path);
  std::ofstream meta(path + ".meta");
  if (!meta) throw std::runtime_error("cannot write model metadata: " + path + ".meta");
  const ModelConfig& c = model.config();
  meta << "env " << env_kind_name(kind) << "\n";
  meta << "state_dim " << c.state_dim << "\n";
  meta << "action_dim " << c.action_dim << "\n";
  meta << "num_actions " << c.num_actions << "\n";
  meta << "latent_dim " << c.latent_dim << "\n";
  meta << "horizon " << c.horizon << "\n";
  meta << "enc_hidden " << c.enc_hidden << "\n";
  meta << "dec_hidden " << c.dec_hidden << "\n";
  meta << "policy_hidden";
  for (std::size_t i = 0; i < c.policy_hidden.size(); ++i) {
    meta << (i == 0 ? " " : ",") << c.policy_hidden[i];
  }
  meta << "\n";
  if (!meta) throw std::runtime_error("failed writing model metadata");
}

LoadedModel load_model(const std::string& path) {
  std::ifstream meta(path + ".meta");
  if (!meta) throw std::runtime_error("cannot open model metadata: " + path + ".meta");
  LoadedModel out;
  out.config.policy_hidden.clear();
  std::string key;
  bool have_env = false;
  while (meta >> key) {
    if (key == "env") {
      std::string name;
      meta >> name;
      out.kind = env_kind_from_name(name);
      have_env = true;
    } else if (key == "policy_hidden") {
      std::string list;
      meta >> list;
      std::istringstream ls(list);
      std::string item;
      while (std::getline(ls, item, ',')) {
        out.config.policy_hidden.push_back(std::stoi(item));
      }
    } else {
      int v = 0;
      if (!(meta >> v)) throw std::runtime_error("bad model metadata near " + key);
      if (key == "state_dim") out.config.state_dim = v;
      else if (key == "action_dim") out.config.action_dim = v;
      else if (key == "num_actions") out.config.num_actions = v;
      else if (key == "latent_dim") out.config.latent_dim = v;
      else if (key == "horizon") out.config.horizon = v;
      else if (key == "enc_hidden") out.config.enc_hidden = v;
      else if (key == "dec_hidden") out.config.dec_hidden = v;
      else throw std::runtime_error("unknown model metadata key " + key);
    }
  }
  if (!have_env) throw std::runtime_error("model metadata is missing the env line");
  Rng rng(0);
  out.model = std::make_unique<SectarModel>(out.config, rng);
  load_checkpoint(out.model->params(), path);
  return out;
}

}  // namespace sectar
