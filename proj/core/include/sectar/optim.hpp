#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sectar/tape.hpp"
#include "sectar/tensor.hpp"

namespace sectar {

// Named view over the trainable tensors of a model. Owning structs register
// their members; the registry never owns storage. Registration order is the
// serialization order.
class ParamRegistry {
 public:
  void add(std::string name, Tensor* t);
  Tensor* find(const std::string& name) const;
  const std::vector<std::pair<std::string, Tensor*>>& items() const {
    return items_;
  }
  std::size_t count() const { return items_.size(); }

 private:
  std::vector<std::pair<std::string, Tensor*>> items_;
};

// Binds parameter tensors as requires-grad leaves on a tape, remembering the
// (name, tensor, var) triples so gradients can be routed back by position.
class TapeBind {
 public:
  explicit TapeBind(Tape& tape) : tape_(&tape) {}

  Var bind(const std::string& name, Tensor& t) {
    Var v = tape_->leaf(t, true);
    names_.push_back(name);
    params_.push_back(&t);
    vars_.push_back(v);
    return v;
  }

  Tape& tape() { return *tape_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Tensor*>& params() const { return params_; }
  const std::vector<Var>& vars() const { return vars_; }

 private:
  Tape* tape_;
  std::vector<std::string> names_;
  std::vector<Tensor*> params_;
  std::vector<Var> vars_;
};

double global_grad_norm(const std::vector<Tensor>& grads);

// Scales all gradients by max_norm / norm when the global norm exceeds
// max_norm. No-op otherwise.
void clip_global_norm(std::vector<Tensor>& grads, double max_norm);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double max_grad_norm = 10.0;
};

// Adam with bias correction. Moments are keyed by parameter name so one
// optimizer instance can follow a parameter subset across steps regardless
// of binding order.
class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

  void step(const std::vector<std::string>& names,
            const std::vector<Tensor*>& params, std::vector<Tensor> grads);

  const AdamConfig& config() const { return cfg_; }
  long long steps_taken() const { return t_; }

 private:
  AdamConfig cfg_;
  long long t_ = 0;
  std::unordered_map<std::string, std::pair<Tensor, Tensor>> moments_;
};

}  // namespace sectar
