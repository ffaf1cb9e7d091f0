#include "sectar/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace sectar {

void ParamRegistry::add(std::string name, Tensor* t) {
  if (t == nullptr) throw std::invalid_argument("registry: null tensor for " + name);
  if (find(name) != nullptr)
    throw std::invalid_argument("registry: duplicate parameter name " + name);
  items_.emplace_back(std::move(name), t);
}

Tensor* ParamRegistry::find(const std::string& name) const {
  for (const auto& [n, t] : items_)
    if (n == name) return t;
  return nullptr;
}

double global_grad_norm(const std::vector<Tensor>& grads) {
  double sq = 0.0;
  for (const Tensor& g : grads)
    for (int i = 0; i < g.size(); ++i) sq += g.at(i) * g.at(i);
  return std::sqrt(sq);
}

void clip_global_norm(std::vector<Tensor>& grads, double max_norm) {
  const double norm = global_grad_norm(grads);
  if (norm <= max_norm || norm == 0.0) return;
  const double s = max_norm / norm;
  for (Tensor& g : grads)
    for (int i = 0; i < g.size(); ++i) g.at(i) *= s;
}

void Adam::step(const std::vector<std::string>& names,
                const std::vector<Tensor*>& params, std::vector<Tensor> grads) {
  if (names.size() != params.size() || names.size() != grads.size())
    throw std::invalid_argument("adam: names, params and grads must align");
  clip_global_norm(grads, cfg_.max_grad_norm);
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& w = *params[p];
    const Tensor& g = grads[p];
    if (!w.same_shape(g))
      throw std::invalid_argument("adam: gradient shape " + g.shape_str() +
                                  " does not match parameter " + names[p] + " " +
                                  w.shape_str());
    auto it = moments_.find(names[p]);
    if (it == moments_.end())
      it = moments_
               .emplace(names[p], std::make_pair(Tensor::zeros(w.shape()),
                                                 Tensor::zeros(w.shape())))
               .first;
    Tensor& m = it->second.first;
    Tensor& v = it->second.second;
    if (!m.same_shape(w))
      throw std::invalid_argument("adam: stale moment shape for " + names[p]);
    for (int i = 0; i < w.size(); ++i) {
      const double gi = g.at(i);
      m.at(i) = cfg_.beta1 * m.at(i) + (1.0 - cfg_.beta1) * gi;
      v.at(i) = cfg_.beta2 * v.at(i) + (1.0 - cfg_.beta2) * gi * gi;
      const double mh = m.at(i) / bc1;
      const double vh = v.at(i) / bc2;
      w.at(i) -= cfg_.lr * mh / (std::sqrt(vh) + cfg_.eps);
    }
  }
}

}  // namespace sectar
