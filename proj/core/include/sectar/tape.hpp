#pragma once

#include <vector>

#include "sectar/tensor.hpp"

namespace sectar {

// Handle into a Tape node.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Reverse-mode autodiff over the ops:: kernels. Each differentiable op
// computes its forward value through ops:: (so taped and eager forwards are
// bit-identical) and records one node. gradients() walks the node list
// backwards; it may be called repeatedly on the same tape.
//
// Tapes are cheap, single-use scratch objects. Concurrent use of one tape is
// not allowed, but distinct tapes reading shared parameter tensors are safe.
class Tape {
 public:
  Tape();

  // requires_grad marks a trainable leaf; constants should leave it false so
  // backward can prune whole subgraphs.
  Var leaf(Tensor value, bool requires_grad = false);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var add_rowvec(Var m, Var v);

  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var clip(Var a, double lo, double hi);
  Var minimum(Var a, Var b);

  Var sum_all(Var a);
  Var mean_all(Var a);
  Var row_sum(Var m);

  Var concat_cols(Var a, Var b);
  Var slice_cols(Var a, int c0, int c1);
  Var tile_rows(Var m, int times);

  Var softmax_rows(Var a);
  Var log_softmax_rows(Var a);
  Var select_cols(Var m, std::vector<int> idx);

  const Tensor& value(Var v) const;
  int size() const { return static_cast<int>(nodes_.size()); }

  // d(loss)/d(wrt[i]) for a scalar loss. Vars that the loss does not reach
  // get a zero tensor of their shape.
  std::vector<Tensor> gradients(Var loss, const std::vector<Var>& wrt);

 private:
  enum class Op {
    leaf, matmul, add, sub, mul, scale, add_scalar, add_rowvec,
    tanh_, sigmoid_, relu_, exp_, log_, clip_, minimum_,
    sum_all, mean_all, row_sum,
    concat_cols, slice_cols, tile_rows,
    softmax_rows, log_softmax_rows, select_cols,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    Tensor value;
    double c0 = 0.0;
    double c1 = 0.0;
    std::vector<int> idx;
    bool needs_grad = false;
  };

  Var push(Op op, int a, int b, Tensor value, double c0 = 0.0, double c1 = 0.0,
           std::vector<int> idx = {});
  const Node& node(Var v) const;
  void backward_into(const Node& n, const Tensor& g, std::vector<Tensor>& grads);

  std::vector<Node> nodes_;
};

}  // namespace sectar
