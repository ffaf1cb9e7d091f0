#include "sectar/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace sectar {

Action sample_action(const ActionDist& d, Rng& rng) {
  if (d.discrete) return Action::discrete(categorical_sample(d.cat, rng));
  Tensor s = gaussian_sample(d.gauss, rng);
  return Action::continuous(std::vector<double>(s.data(), s.data() + s.size()));
}

Action mode_action(const ActionDist& d) {
  if (d.discrete) {
    int best = 0;
    for (int i = 1; i < d.cat.logits.size(); ++i) {
      if (d.cat.logits.at(i) > d.cat.logits.at(best)) best = i;
    }
    return Action::discrete(best);
  }
  const Tensor& m = d.gauss.mean;
  return Action::continuous(std::vector<double>(m.data(), m.data() + m.size()));
}

double action_logprob(const ActionDist& d, const Action& a) {
  if (d.discrete) return categorical_logprob(d.cat, a.index);
  if (static_cast<int>(a.values.size()) != d.gauss.mean.size()) {
    throw std::invalid_argument("action has wrong dimension");
  }
  Tensor x({d.gauss.mean.size()}, a.values);
  return gaussian_logprob(d.gauss, x);
}

double action_entropy(const ActionDist& d) {
  return d.discrete ? categorical_entropy(d.cat) : gaussian_entropy(d.gauss);
}

void PolicyNet::init(int obs, const std::vector<int>& hidden, int num_actions_or_zero,
                     int act_dim, Rng& rng) {
  obs_dim = obs;
  num_actions = num_actions_or_zero;
  action_dim = act_dim;
  int head = discrete() ? num_actions : action_dim;
  net.init(obs, hidden, head, rng);
  log_std = Tensor::zeros({1, action_dim});
}

void PolicyNet::register_params(ParamRegistry& reg, const std::string& prefix) {
  net.register_params(reg, prefix + ".net");
  if (!discrete()) reg.add(prefix + ".log_std", &log_std);
}

PolicyVars<Var> PolicyNet::bind(TapeBind& tb, const std::string& prefix) {
  PolicyVars<Var> pv;
  pv.net = net.bind(tb, prefix + ".net");
  pv.discrete = discrete();
  pv.action_dim = action_dim;
  if (!discrete()) pv.log_std = tb.bind(prefix + ".log_std", log_std);
  return pv;
}

PolicyVars<Tensor> PolicyNet::eager() const {
  PolicyVars<Tensor> pv;
  pv.net = net.eager();
  pv.discrete = discrete();
  pv.action_dim = action_dim;
  if (!discrete()) pv.log_std = log_std;
  return pv;
}

ActionDist PolicyNet::action_dist(const std::vector<double>& obs) const {
  if (static_cast<int>(obs.size()) != obs_dim) {
    throw std::invalid_argument("observation has dimension " +
                                std::to_string(obs.size()) + ", expected " +
                                std::to_string(obs_dim));
  }
  EagerCtx cx;
  Tensor out = mlp_forward(cx, net.eager(), Tensor({1, obs_dim}, obs));
  ActionDist d;
  if (discrete()) {
    d.discrete = true;
    d.cat.logits = Tensor({num_actions},
                          std::vector<double>(out.data(), out.data() + out.size()));
  } else {
    d.discrete = false;
    Tensor mean({action_dim},
                std::vector<double>(out.data(), out.data() + out.size()));
    Tensor ls({action_dim},
              std::vector<double>(log_std.data(), log_std.data() + log_std.size()));
    d.gauss = make_diag_gaussian(std::move(mean), std::move(ls));
  }
  return d;
}

}  // namespace sectar
