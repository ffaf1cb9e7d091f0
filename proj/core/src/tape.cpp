#include "sectar/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace sectar {

namespace {

void accumulate(Tensor& dst, const Tensor& g, const Tensor& shape_like) {
  if (dst.size() == 0) dst = Tensor::zeros(shape_like.shape());
  for (int i = 0; i < dst.size(); ++i) dst.at(i) += g.at(i);
}

}  // namespace

Tape::Tape() { nodes_.reserve(256); }

Var Tape::push(Op op, int a, int b, Tensor value, double c0, double c1,
               std::vector<int> idx) {
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  n.value = std::move(value);
  n.c0 = c0;
  n.c1 = c1;
  n.idx = std::move(idx);
  n.needs_grad = (a >= 0 && nodes_[static_cast<std::size_t>(a)].needs_grad) ||
                 (b >= 0 && nodes_[static_cast<std::size_t>(b)].needs_grad);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || v.id >= size())
    throw std::invalid_argument("tape: invalid var handle");
  return nodes_[static_cast<std::size_t>(v.id)];
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  Var v = push(Op::leaf, -1, -1, std::move(value));
  nodes_.back().needs_grad = requires_grad;
  return v;
}

const Tensor& Tape::value(Var v) const { return node(v).value; }

Var Tape::matmul(Var a, Var b) {
  return push(Op::matmul, a.id, b.id, ops::matmul(value(a), value(b)));
}
Var Tape::add(Var a, Var b) {
  return push(Op::add, a.id, b.id, ops::add(value(a), value(b)));
}
Var Tape::sub(Var a, Var b) {
  return push(Op::sub, a.id, b.id, ops::sub(value(a), value(b)));
}
Var Tape::mul(Var a, Var b) {
  return push(Op::mul, a.id, b.id, ops::mul(value(a), value(b)));
}
Var Tape::scale(Var a, double c) {
  return push(Op::scale, a.id, -1, ops::scale(value(a), c), c);
}
Var Tape::add_scalar(Var a, double c) {
  return push(Op::add_scalar, a.id, -1, ops::add_scalar(value(a), c), c);
}
Var Tape::add_rowvec(Var m, Var v) {
  return push(Op::add_rowvec, m.id, v.id, ops::add_rowvec(value(m), value(v)));
}
Var Tape::tanh(Var a) { return push(Op::tanh_, a.id, -1, ops::tanh(value(a))); }
Var Tape::sigmoid(Var a) {
  return push(Op::sigmoid_, a.id, -1, ops::sigmoid(value(a)));
}
Var Tape::relu(Var a) { return push(Op::relu_, a.id, -1, ops::relu(value(a))); }
Var Tape::exp(Var a) { return push(Op::exp_, a.id, -1, ops::exp(value(a))); }
Var Tape::log(Var a) { return push(Op::log_, a.id, -1, ops::log(value(a))); }
Var Tape::clip(Var a, double lo, double hi) {
  return push(Op::clip_, a.id, -1, ops::clip(value(a), lo, hi), lo, hi);
}
Var Tape::minimum(Var a, Var b) {
  return push(Op::minimum_, a.id, b.id, ops::minimum(value(a), value(b)));
}
Var Tape::sum_all(Var a) {
  return push(Op::sum_all, a.id, -1, ops::sum_all(value(a)));
}
Var Tape::mean_all(Var a) {
  return push(Op::mean_all, a.id, -1, ops::mean_all(value(a)));
}
Var Tape::row_sum(Var m) {
  return push(Op::row_sum, m.id, -1, ops::row_sum(value(m)));
}
Var Tape::concat_cols(Var a, Var b) {
  return push(Op::concat_cols, a.id, b.id, ops::concat_cols(value(a), value(b)));
}
Var Tape::slice_cols(Var a, int c0, int c1) {
  return push(Op::slice_cols, a.id, -1, ops::slice_cols(value(a), c0, c1),
              static_cast<double>(c0), static_cast<double>(c1));
}
Var Tape::tile_rows(Var m, int times) {
  return push(Op::tile_rows, m.id, -1, ops::tile_rows(value(m), times),
              static_cast<double>(times));
}
Var Tape::softmax_rows(Var a) {
  return push(Op::softmax_rows, a.id, -1, ops::softmax_rows(value(a)));
}
Var Tape::log_softmax_rows(Var a) {
  return push(Op::log_softmax_rows, a.id, -1, ops::log_softmax_rows(value(a)));
}
Var Tape::select_cols(Var m, std::vector<int> idx) {
  Tensor out = ops::select_cols(value(m), idx);
  return push(Op::select_cols, m.id, -1, std::move(out), 0.0, 0.0, std::move(idx));
}

void Tape::backward_into(const Node& n, const Tensor& g,
                         std::vector<Tensor>& grads) {
  auto want = [&](int id) {
    return id >= 0 && nodes_[static_cast<std::size_t>(id)].needs_grad;
  };
  auto& va = nodes_[n.a >= 0 ? static_cast<std::size_t>(n.a) : 0].value;
  auto* vb = n.b >= 0 ? &nodes_[static_cast<std::size_t>(n.b)].value : nullptr;
  auto add_to = [&](int id, const Tensor& delta) {
    Tensor& dst = grads[static_cast<std::size_t>(id)];
    accumulate(dst, delta, nodes_[static_cast<std::size_t>(id)].value);
  };

  switch (n.op) {
    case Op::leaf:
      break;
    case Op::matmul: {
      const int m = va.dim(0), k = va.dim(1), c = vb->dim(1);
      if (want(n.a)) {
        Tensor da({m, k});
        for (int i = 0; i < m; ++i)
          for (int p = 0; p < k; ++p) {
            double s = 0.0;
            for (int j = 0; j < c; ++j) s += g.at(i, j) * vb->at(p, j);
            da.at(i, p) = s;
          }
        add_to(n.a, da);
      }
      if (want(n.b)) {
        Tensor db({k, c});
        for (int p = 0; p < k; ++p)
          for (int i = 0; i < m; ++i) {
            const double apk = va.at(i, p);
            for (int j = 0; j < c; ++j) db.at(p, j) += apk * g.at(i, j);
          }
        add_to(n.b, db);
      }
      break;
    }
    case Op::add:
      if (want(n.a)) add_to(n.a, g);
      if (want(n.b)) add_to(n.b, g);
      break;
    case Op::sub:
      if (want(n.a)) add_to(n.a, g);
      if (want(n.b)) add_to(n.b, ops::scale(g, -1.0));
      break;
    case Op::mul:
      if (want(n.a)) add_to(n.a, ops::mul(g, *vb));
      if (want(n.b)) add_to(n.b, ops::mul(g, va));
      break;
    case Op::scale:
      if (want(n.a)) add_to(n.a, ops::scale(g, n.c0));
      break;
    case Op::add_scalar:
      if (want(n.a)) add_to(n.a, g);
      break;
    case Op::add_rowvec: {
      if (want(n.a)) add_to(n.a, g);
      if (want(n.b)) {
        Tensor dv({vb->dim(0)});
        for (int r = 0; r < g.dim(0); ++r)
          for (int c = 0; c < g.dim(1); ++c) dv.at(c) += g.at(r, c);
        add_to(n.b, dv);
      }
      break;
    }
    case Op::tanh_: {
      if (want(n.a)) {
        Tensor d(g.shape());
        for (int i = 0; i < g.size(); ++i)
          d.at(i) = g.at(i) * (1.0 - n.value.at(i) * n.value.at(i));
        add_to(n.a, d);
      }
      break;
    }
    case Op::sigmoid_: {
      if (want(n.a)) {
        Tensor d(g.shape());
        for (int i = 0; i < g.size(); ++i) {
          const double y = n.value.at(i);
          d.at(i) = g.at(i) * y * (1.0 - y);
        }
        add_to(n.a, d);
      }
      break;
    }
    case Op::relu_: {
      if (want(n.a)) {
        Tensor d(g.shape());
        for (int i = 0; i < g.size(); ++i)
          d.at(i) = va.at(i) > 0.0 ? g.at(i) : 0.0;
        add_to(n.a, d);
      }
      break;
    }
    case Op::exp_:
      if (want(n.a)) add_to(n.a, ops::mul(g, n.value));
      break;
    case Op::log_: {
      if (want(n.a)) {
        Tensor d(g.shape());
        for (int i = 0; i < g.size(); ++i) d.at(i) = g.at(i) / va.at(i);
        add_to(n.a, d);
      }
      break;
    }
    case Op::clip_: {
      if (want(n.a)) {
        Tensor d(g.shape());
        for (int i = 0; i < g.size(); ++i) {
          const double x = va.at(i);
          d.at(i) = (x > n.c0 && x < n.c1) ? g.at(i) : 0.0;
        }
        add_to(n.a, d);
      }
      break;
    }
    case Op::minimum_: {
      // Ties route to the first argument, matching the forward convention.
      if (want(n.a)) {
        Tensor d(g.shape());
        for (int i = 0; i < g.size(); ++i)
          d.at(i) = va.at(i) <= vb->at(i) ? g.at(i) : 0.0;
        add_to(n.a, d);
      }
      if (want(n.b)) {
        Tensor d(g.shape());
        for (int i = 0; i < g.size(); ++i)
          d.at(i) = va.at(i) <= vb->at(i) ? 0.0 : g.at(i);
        add_to(n.b, d);
      }
      break;
    }
    case Op::sum_all:
      if (want(n.a)) add_to(n.a, Tensor::full(va.shape(), g.at(0)));
      break;
    case Op::mean_all:
      if (want(n.a))
        add_to(n.a, Tensor::full(va.shape(), g.at(0) / static_cast<double>(va.size())));
      break;
    case Op::row_sum: {
      if (want(n.a)) {
        Tensor d(va.shape());
        for (int r = 0; r < va.dim(0); ++r)
          for (int c = 0; c < va.dim(1); ++c) d.at(r, c) = g.at(r);
        add_to(n.a, d);
      }
      break;
    }
    case Op::concat_cols: {
      const bool vec = va.rank() == 1;
      const int ca = vec ? va.dim(0) : va.dim(1);
      const int cb = vec ? vb->dim(0) : vb->dim(1);
      if (want(n.a)) add_to(n.a, ops::slice_cols(g, 0, ca));
      if (want(n.b)) add_to(n.b, ops::slice_cols(g, ca, ca + cb));
      break;
    }
    case Op::slice_cols: {
      if (want(n.a)) {
        const int c0 = static_cast<int>(n.c0), c1 = static_cast<int>(n.c1);
        Tensor d = Tensor::zeros(va.shape());
        if (va.rank() == 1) {
          for (int c = c0; c < c1; ++c) d.at(c) = g.at(c - c0);
        } else {
          for (int r = 0; r < va.dim(0); ++r)
            for (int c = c0; c < c1; ++c) d.at(r, c) = g.at(r, c - c0);
        }
        add_to(n.a, d);
      }
      break;
    }
    case Op::tile_rows: {
      if (want(n.a)) {
        const int times = static_cast<int>(n.c0);
        const int rows = va.dim(0), cols = va.dim(1);
        Tensor d = Tensor::zeros(va.shape());
        for (int t = 0; t < times; ++t)
          for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) d.at(r, c) += g.at(t * rows + r, c);
        add_to(n.a, d);
      }
      break;
    }
    case Op::softmax_rows: {
      if (want(n.a)) {
        const int rows = n.value.rows(), cols = n.value.cols();
        Tensor d(va.shape());
        for (int r = 0; r < rows; ++r) {
          double dot = 0.0;
          for (int c = 0; c < cols; ++c)
            dot += g.at(r * cols + c) * n.value.at(r * cols + c);
          for (int c = 0; c < cols; ++c) {
            const int i = r * cols + c;
            d.at(i) = n.value.at(i) * (g.at(i) - dot);
          }
        }
        add_to(n.a, d);
      }
      break;
    }
    case Op::log_softmax_rows: {
      if (want(n.a)) {
        const int rows = n.value.rows(), cols = n.value.cols();
        Tensor d(va.shape());
        for (int r = 0; r < rows; ++r) {
          double gs = 0.0;
          for (int c = 0; c < cols; ++c) gs += g.at(r * cols + c);
          for (int c = 0; c < cols; ++c) {
            const int i = r * cols + c;
            d.at(i) = g.at(i) - std::exp(n.value.at(i)) * gs;
          }
        }
        add_to(n.a, d);
      }
      break;
    }
    case Op::select_cols: {
      if (want(n.a)) {
        Tensor d = Tensor::zeros(va.shape());
        for (int r = 0; r < va.dim(0); ++r)
          d.at(r, n.idx[static_cast<std::size_t>(r)]) += g.at(r);
        add_to(n.a, d);
      }
      break;
    }
  }
}

std::vector<Tensor> Tape::gradients(Var loss, const std::vector<Var>& wrt) {
  const Node& ln = node(loss);
  if (ln.value.size() != 1)
    throw std::invalid_argument("gradients: loss must be a scalar, got shape " +
                                ln.value.shape_str());

  std::vector<Tensor> grads(nodes_.size());
  grads[static_cast<std::size_t>(loss.id)] = Tensor::full(ln.value.shape(), 1.0);

  std::vector<char> keep(nodes_.size(), 0);
  for (Var v : wrt) {
    node(v);  // validates the handle
    keep[static_cast<std::size_t>(v.id)] = 1;
  }

  for (int id = loss.id; id >= 0; --id) {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    Tensor& g = grads[static_cast<std::size_t>(id)];
    if (!n.needs_grad || g.size() == 0) continue;
    backward_into(n, g, grads);
    if (!keep[static_cast<std::size_t>(id)]) g = Tensor();  // free once consumed
  }

  std::vector<Tensor> out;
  out.reserve(wrt.size());
  for (Var v : wrt) {
    const Node& n = node(v);
    Tensor& g = grads[static_cast<std::size_t>(v.id)];
    out.push_back(g.size() != 0 ? std::move(g) : Tensor::zeros(n.value.shape()));
  }
  return out;
}

}  // namespace sectar
