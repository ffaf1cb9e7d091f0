#pragma once

#include <vector>

#include "sectar/tape.hpp"
#include "sectar/tensor.hpp"

namespace sectar {

// Two interchangeable evaluation contexts. Network forward code is written
// once as a template over a context; EagerCtx evaluates kernels directly
// (inference, no gradient bookkeeping) while TapeCtx records onto a tape for
// backward. Both route through the same ops:: kernels, so the two paths
// produce bit-identical values.

struct EagerCtx {
  using V = Tensor;

  Tensor constant(Tensor t) const { return t; }
  const Tensor& value(const Tensor& t) const { return t; }

  Tensor matmul(const Tensor& a, const Tensor& b) const { return ops::matmul(a, b); }
  Tensor add(const Tensor& a, const Tensor& b) const { return ops::add(a, b); }
  Tensor sub(const Tensor& a, const Tensor& b) const { return ops::sub(a, b); }
  Tensor mul(const Tensor& a, const Tensor& b) const { return ops::mul(a, b); }
  Tensor scale(const Tensor& a, double c) const { return ops::scale(a, c); }
  Tensor add_scalar(const Tensor& a, double c) const { return ops::add_scalar(a, c); }
  Tensor add_rowvec(const Tensor& m, const Tensor& v) const {
    return ops::add_rowvec(m, v);
  }
  Tensor tanh(const Tensor& a) const { return ops::tanh(a); }
  Tensor sigmoid(const Tensor& a) const { return ops::sigmoid(a); }
  Tensor relu(const Tensor& a) const { return ops::relu(a); }
  Tensor exp(const Tensor& a) const { return ops::exp(a); }
  Tensor log(const Tensor& a) const { return ops::log(a); }
  Tensor clip(const Tensor& a, double lo, double hi) const {
    return ops::clip(a, lo, hi);
  }
  Tensor minimum(const Tensor& a, const Tensor& b) const { return ops::minimum(a, b); }
  Tensor sum_all(const Tensor& a) const { return ops::sum_all(a); }
  Tensor mean_all(const Tensor& a) const { return ops::mean_all(a); }
  Tensor row_sum(const Tensor& m) const { return ops::row_sum(m); }
  Tensor concat_cols(const Tensor& a, const Tensor& b) const {
    return ops::concat_cols(a, b);
  }
  Tensor slice_cols(const Tensor& a, int c0, int c1) const {
    return ops::slice_cols(a, c0, c1);
  }
  Tensor tile_rows(const Tensor& m, int times) const { return ops::tile_rows(m, times); }
  Tensor softmax_rows(const Tensor& a) const { return ops::softmax_rows(a); }
  Tensor log_softmax_rows(const Tensor& a) const { return ops::log_softmax_rows(a); }
  Tensor select_cols(const Tensor& m, std::vector<int> idx) const {
    return ops::select_cols(m, idx);
  }
};

struct TapeCtx {
  using V = Var;
  Tape* tape;

  explicit TapeCtx(Tape& t) : tape(&t) {}

  Var constant(Tensor t) const { return tape->constant(std::move(t)); }
  const Tensor& value(Var v) const { return tape->value(v); }

  Var matmul(Var a, Var b) const { return tape->matmul(a, b); }
  Var add(Var a, Var b) const { return tape->add(a, b); }
  Var sub(Var a, Var b) const { return tape->sub(a, b); }
  Var mul(Var a, Var b) const { return tape->mul(a, b); }
  Var scale(Var a, double c) const { return tape->scale(a, c); }
  Var add_scalar(Var a, double c) const { return tape->add_scalar(a, c); }
  Var add_rowvec(Var m, Var v) const { return tape->add_rowvec(m, v); }
  Var tanh(Var a) const { return tape->tanh(a); }
  Var sigmoid(Var a) const { return tape->sigmoid(a); }
  Var relu(Var a) const { return tape->relu(a); }
  Var exp(Var a) const { return tape->exp(a); }
  Var log(Var a) const { return tape->log(a); }
  Var clip(Var a, double lo, double hi) const { return tape->clip(a, lo, hi); }
  Var minimum(Var a, Var b) const { return tape->minimum(a, b); }
  Var sum_all(Var a) const { return tape->sum_all(a); }
  Var mean_all(Var a) const { return tape->mean_all(a); }
  Var row_sum(Var m) const { return tape->row_sum(m); }
  Var concat_cols(Var a, Var b) const { return tape->concat_cols(a, b); }
  Var slice_cols(Var a, int c0, int c1) const { return tape->slice_cols(a, c0, c1); }
  Var tile_rows(Var m, int times) const { return tape->tile_rows(m, times); }
  Var softmax_rows(Var a) const { return tape->softmax_rows(a); }
  Var log_softmax_rows(Var a) const { return tape->log_softmax_rows(a); }
  Var select_cols(Var m, std::vector<int> idx) const {
    return tape->select_cols(m, std::move(idx));
  }
};

}  // namespace sectar
