#pragma once

#include <string>
#include <vector>

#include "sectar/context.hpp"
#include "sectar/optim.hpp"
#include "sectar/rng.hpp"
#include "sectar/tensor.hpp"

namespace sectar {

// Parameter-owning layer structs plus context-templated forward functions.
// A struct holds the trainable tensors; bind() lifts them onto a tape as
// requires-grad leaves for a training graph, eager() snapshots them for
// direct evaluation. Forward code is shared between the two paths.

template <class V>
struct LinearVars {
  V w;
  V b;
};

struct Linear {
  Tensor w;  // in x out
  Tensor b;  // out
  int in = 0;
  int out = 0;

  void init(int in_dim, int out_dim, Rng& rng);
  void register_params(ParamRegistry& reg, const std::string& prefix);
  LinearVars<Var> bind(TapeBind& tb, const std::string& prefix);
  LinearVars<Tensor> eager() const { return {w, b}; }
};

template <class Ctx, class V = typename Ctx::V>
V linear_forward(const Ctx& cx, const LinearVars<V>& lin, V x) {
  return cx.add_rowvec(cx.matmul(x, lin.w), lin.b);
}

template <class V>
struct MlpVars {
  std::vector<LinearVars<V>> layers;
};

// Fully connected net, relu between layers, linear output.
struct Mlp {
  std::vector<Linear> layers;
  int in = 0;
  int out = 0;

  void init(int in_dim, const std::vector<int>& hidden, int out_dim, Rng& rng);
  void register_params(ParamRegistry& reg, const std::string& prefix);
  MlpVars<Var> bind(TapeBind& tb, const std::string& prefix);
  MlpVars<Tensor> eager() const;
};

template <class Ctx, class V = typename Ctx::V>
V mlp_forward(const Ctx& cx, const MlpVars<V>& net, V x) {
  for (std::size_t i = 0; i + 1 < net.layers.size(); ++i) {
    x = cx.relu(linear_forward(cx, net.layers[i], x));
  }
  return linear_forward(cx, net.layers.back(), x);
}

template <class V>
struct LstmVars {
  V wx;
  V wh;
  V b;
  int hidden = 0;
};

template <class V>
struct LstmState {
  V h;
  V c;
};

// Single LSTM cell. Gate matrices are packed along columns as
// [input, forget, cell, output]; the forget gate bias starts at 1.
struct LstmCell {
  Tensor wx;  // in x 4h
  Tensor wh;  // h x 4h
  Tensor b;   // 4h
  int in = 0;
  int hidden = 0;

  void init(int in_dim, int hidden_dim, Rng& rng);
  void register_params(ParamRegistry& reg, const std::string& prefix);
  LstmVars<Var> bind(TapeBind& tb, const std::string& prefix);
  LstmVars<Tensor> eager() const { return {wx, wh, b, hidden}; }
};

template <class Ctx, class V = typename Ctx::V>
LstmState<V> lstm_step(const Ctx& cx, const LstmVars<V>& cell, V x, LstmState<V> s) {
  int h = cell.hidden;
  V gates = cx.add_rowvec(cx.add(cx.matmul(x, cell.wx), cx.matmul(s.h, cell.wh)),
                          cell.b);
  V gi = cx.sigmoid(cx.slice_cols(gates, 0, h));
  V gf = cx.sigmoid(cx.slice_cols(gates, h, 2 * h));
  V gg = cx.tanh(cx.slice_cols(gates, 2 * h, 3 * h));
  V go = cx.sigmoid(cx.slice_cols(gates, 3 * h, 4 * h));
  V c = cx.add(cx.mul(gf, s.c), cx.mul(gi, gg));
  V hh = cx.mul(go, cx.tanh(c));
  return {hh, c};
}

template <class Ctx, class V = typename Ctx::V>
LstmState<V> lstm_zero_state(const Ctx& cx, int batch, int hidden) {
  return {cx.constant(Tensor::zeros({batch, hidden})),
          cx.constant(Tensor::zeros({batch, hidden}))};
}

// Runs a cell over a sequence of (B x in) steps, zero initial state.
// Output hs[t] aligns with xs[t] regardless of direction.
template <class Ctx, class V = typename Ctx::V>
std::vector<V> lstm_run(const Ctx& cx, const LstmVars<V>& cell,
                        const std::vector<V>& xs, bool reverse) {
  int batch = cx.value(xs.at(0)).rows();
  LstmState<V> s = lstm_zero_state(cx, batch, cell.hidden);
  std::vector<V> hs(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    std::size_t t = reverse ? xs.size() - 1 - k : k;
    s = lstm_step(cx, cell, xs[t], s);
    hs[t] = s.h;
  }
  return hs;
}

template <class Ctx, class V = typename Ctx::V>
std::vector<V> bilstm_layer(const Ctx& cx, const LstmVars<V>& fwd,
                            const LstmVars<V>& bwd, const std::vector<V>& xs) {
  std::vector<V> hf = lstm_run(cx, fwd, xs, false);
  std::vector<V> hb = lstm_run(cx, bwd, xs, true);
  std::vector<V> out;
  out.reserve(xs.size());
  for (std::size_t t = 0; t < xs.size(); ++t) {
    out.push_back(cx.concat_cols(hf[t], hb[t]));
  }
  return out;
}

template <class Ctx, class V = typename Ctx::V>
V mean_over_steps(const Ctx& cx, const std::vector<V>& hs) {
  V acc = hs.at(0);
  for (std::size_t t = 1; t < hs.size(); ++t) acc = cx.add(acc, hs[t]);
  return cx.scale(acc, 1.0 / static_cast<double>(hs.size()));
}

}  // namespace sectar
