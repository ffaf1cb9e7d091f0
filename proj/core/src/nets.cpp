#include "sectar/nets.hpp"

#include <cmath>
#include <stdexcept>

namespace sectar {

namespace {

Tensor uniform_tensor(std::vector<int> shape, double bound, Rng& rng) {
  Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i) {
    t.data()[i] = (2.0 * rng.uniform() - 1.0) * bound;
  }
  return t;
}

}  // namespace

void Linear::init(int in_dim, int out_dim, Rng& rng) {
  if (in_dim <= 0 || out_dim <= 0) {
    throw std::invalid_argument("Linear::init: dims must be positive");
  }
  in = in_dim;
  out = out_dim;
  double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  w = uniform_tensor({in, out}, bound, rng);
  b = Tensor::zeros({out});
}

void Linear::register_params(ParamRegistry& reg, const std::string& prefix) {
  reg.add(prefix + ".w", &w);
  reg.add(prefix + ".b", &b);
}

LinearVars<Var> Linear::bind(TapeBind& tb, const std::string& prefix) {
  return {tb.bind(prefix + ".w", w), tb.bind(prefix + ".b", b)};
}

void Mlp::init(int in_dim, const std::vector<int>& hidden, int out_dim, Rng& rng) {
  in = in_dim;
  out = out_dim;
  layers.clear();
  int cur = in_dim;
  for (int h : hidden) {
    Linear l;
    l.init(cur, h, rng);
    layers.push_back(std::move(l));
    cur = h;
  }
  Linear last;
  last.init(cur, out_dim, rng);
  layers.push_back(std::move(last));
}

void Mlp::register_params(ParamRegistry& reg, const std::string& prefix) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].register_params(reg, prefix + ".l" + std::to_string(i));
  }
}

MlpVars<Var> Mlp::bind(TapeBind& tb, const std::string& prefix) {
  MlpVars<Var> vars;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    vars.layers.push_back(layers[i].bind(tb, prefix + ".l" + std::to_string(i)));
  }
  return vars;
}

MlpVars<Tensor> Mlp::eager() const {
  MlpVars<Tensor> vars;
  for (const Linear& l : layers) vars.layers.push_back(l.eager());
  return vars;
}

void LstmCell::init(int in_dim, int hidden_dim, Rng& rng) {
  if (in_dim <= 0 || hidden_dim <= 0) {
    throw std::invalid_argument("LstmCell::init: dims must be positive");
  }
  in = in_dim;
  hidden = hidden_dim;
  double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  wx = uniform_tensor({in, 4 * hidden}, bound, rng);
  wh = uniform_tensor({hidden, 4 * hidden}, bound, rng);
  b = Tensor::zeros({4 * hidden});
  for (int j = hidden; j < 2 * hidden; ++j) b.data()[j] = 1.0;
}

void LstmCell::register_params(ParamRegistry& reg, const std::string& prefix) {
  reg.add(prefix + ".wx", &wx);
  reg.add(prefix + ".wh", &wh);
  reg.add(prefix + ".b", &b);
}

LstmVars<Var> LstmCell::bind(TapeBind& tb, const std::string& prefix) {
  return {tb.bind(prefix + ".wx", wx), tb.bind(prefix + ".wh", wh),
          tb.bind(prefix + ".b", b), hidden};
}

}  // namespace sectar
