#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "sectar/checkpoint.hpp"
#include "sectar/nets.hpp"
#include "sectar/tape.hpp"
#include "support/oracles.hpp"

using namespace sectar;

namespace {

bool same_bits(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data(), b.data(),
                     sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// plain-loop lstm cell by the gate equations, nothing shared with the library
void lstm_cell_ref(const LstmCell& cell, const Tensor& x, const Tensor& h,
                   const Tensor& c, Tensor& h_out, Tensor& c_out) {
  int b = x.rows(), in = cell.in, hd = cell.hidden;
  h_out = Tensor({b, hd});
  c_out = Tensor({b, hd});
  for (int r = 0; r < b; ++r) {
    for (int j = 0; j < hd; ++j) {
      double pre[4];
      for (int g = 0; g < 4; ++g) {
        double s = cell.b.at(g * hd + j);
        for (int k = 0; k < in; ++k) s += x.at(r, k) * cell.wx.at(k, g * hd + j);
        for (int k = 0; k < hd; ++k) s += h.at(r, k) * cell.wh.at(k, g * hd + j);
        pre[g] = s;
      }
      double gi = sigmoid_ref(pre[0]);
      double gf = sigmoid_ref(pre[1]);
      double gg = std::tanh(pre[2]);
      double go = sigmoid_ref(pre[3]);
      double cc = gf * c.at(r, j) + gi * gg;
      c_out.at(r, j) = cc;
      h_out.at(r, j) = go * std::tanh(cc);
    }
  }
}

}  // namespace

TEST_SUITE("nets") {

TEST_CASE("linear forward is x w plus b") {
  Rng rng(501);
  Linear lin;
  lin.init(3, 2, rng);
  Tensor x = oracles::random_tensor({4, 3}, rng);
  EagerCtx cx;
  Tensor y = linear_forward(cx, lin.eager(), x);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 2; ++c) {
      double s = lin.b.at(c);
      for (int k = 0; k < 3; ++k) s += x.at(r, k) * lin.w.at(k, c);
      CHECK(y.at(r, c) == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("mlp forward matches a plain-loop recompute") {
  Rng rng(502);
  Mlp net;
  net.init(3, {5, 4}, 2, rng);
  Tensor x = oracles::random_tensor({6, 3}, rng);
  EagerCtx cx;
  Tensor y = mlp_forward(cx, net.eager(), x);

  for (int r = 0; r < 6; ++r) {
    std::vector<double> cur(3);
    for (int k = 0; k < 3; ++k) cur[static_cast<std::size_t>(k)] = x.at(r, k);
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
      const Linear& l = net.layers[li];
      std::vector<double> nxt(static_cast<std::size_t>(l.out));
      for (int c = 0; c < l.out; ++c) {
        double s = l.b.at(c);
        for (int k = 0; k < l.in; ++k) s += cur[static_cast<std::size_t>(k)] * l.w.at(k, c);
        if (li + 1 < net.layers.size()) s = std::max(0.0, s);
        nxt[static_cast<std::size_t>(c)] = s;
      }
      cur = nxt;
    }
    for (int c = 0; c < 2; ++c) {
      CHECK(y.at(r, c) == doctest::Approx(cur[static_cast<std::size_t>(c)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("taped mlp forward is bit-identical to the eager path") {
  Rng rng(503);
  Mlp net;
  net.init(4, {6, 5}, 3, rng);
  Tensor x = oracles::random_tensor({5, 4}, rng);

  EagerCtx ecx;
  Tensor ey = mlp_forward(ecx, net.eager(), x);

  Tape tape;
  TapeBind tb(tape);
  TapeCtx tcx(tape);
  MlpVars<Var> vars = net.bind(tb, "pi");
  Var ty = mlp_forward(tcx, vars, tape.constant(x));
  CHECK(same_bits(ey, tape.value(ty)));
}

TEST_CASE("mlp init is deterministic in the seed and layer shapes line up") {
  Rng a(504), b(504);
  Mlp m1, m2;
  m1.init(3, {8}, 2, a);
  m2.init(3, {8}, 2, b);
  REQUIRE(m1.layers.size() == 2);
  CHECK(same_bits(m1.layers[0].w, m2.layers[0].w));
  CHECK(same_bits(m1.layers[1].w, m2.layers[1].w));
  CHECK(m1.layers[0].w.shape() == std::vector<int>({3, 8}));
  CHECK(m1.layers[1].w.shape() == std::vector<int>({8, 2}));

  ParamRegistry reg;
  m1.register_params(reg, "pi");
  CHECK(reg.count() == 4);
  CHECK(reg.find("pi.l0.w") == &m1.layers[0].w);
  CHECK(reg.find("pi.l1.b") == &m1.layers[1].b);
}

TEST_CASE("lstm cell matches the gate equations") {
  Rng rng(505);
  LstmCell cell;
  cell.init(2, 3, rng);
  Tensor x = oracles::random_tensor({2, 2}, rng);
  Tensor h = oracles::random_tensor({2, 3}, rng, -0.5, 0.5);
  Tensor c = oracles::random_tensor({2, 3}, rng, -0.5, 0.5);

  EagerCtx cx;
  LstmState<Tensor> out = lstm_step(cx, cell.eager(), x, LstmState<Tensor>{h, c});

  Tensor h_ref, c_ref;
  lstm_cell_ref(cell, x, h, c, h_ref, c_ref);
  for (int r = 0; r < 2; ++r) {
    for (int j = 0; j < 3; ++j) {
      CHECK(out.h.at(r, j) == doctest::Approx(h_ref.at(r, j)).epsilon(1e-12));
      CHECK(out.c.at(r, j) == doctest::Approx(c_ref.at(r, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("lstm forget-gate bias starts at one, other biases at zero") {
  Rng rng(506);
  LstmCell cell;
  cell.init(3, 4, rng);
  for (int j = 0; j < 16; ++j) {
    double expect = (j >= 4 && j < 8) ? 1.0 : 0.0;
    CHECK(cell.b.at(j) == expect);
  }
}

TEST_CASE("running a cell in reverse equals running it on the reversed input") {
  Rng rng(507);
  LstmCell cell;
  cell.init(2, 3, rng);
  int steps = 5, batch = 2;
  std::vector<Tensor> xs, rxs;
  for (int t = 0; t < steps; ++t) xs.push_back(oracles::random_tensor({batch, 2}, rng));
  for (int t = steps - 1; t >= 0; --t) rxs.push_back(xs[static_cast<std::size_t>(t)]);

  EagerCtx cx;
  std::vector<Tensor> back = lstm_run(cx, cell.eager(), xs, true);
  std::vector<Tensor> fwd_on_reversed = lstm_run(cx, cell.eager(), rxs, false);
  for (int t = 0; t < steps; ++t) {
    CHECK(same_bits(back[static_cast<std::size_t>(t)],
                    fwd_on_reversed[static_cast<std::size_t>(steps - 1 - t)]));
  }
}

TEST_CASE("bidirectional layer with tied directions mirrors under reversal") {
  // with identical forward and backward cells, reversing the input sequence
  // swaps the two concatenated halves of the reversed output
  Rng rng(508);
  LstmCell cell;
  cell.init(2, 3, rng);
  int steps = 4, batch = 2;
  std::vector<Tensor> xs, rxs;
  for (int t = 0; t < steps; ++t) xs.push_back(oracles::random_tensor({batch, 2}, rng));
  for (int t = steps - 1; t >= 0; --t) rxs.push_back(xs[static_cast<std::size_t>(t)]);

  EagerCtx cx;
  std::vector<Tensor> a = bilstm_layer(cx, cell.eager(), cell.eager(), xs);
  std::vector<Tensor> b = bilstm_layer(cx, cell.eager(), cell.eager(), rxs);
  for (int t = 0; t < steps; ++t) {
    const Tensor& at = a[static_cast<std::size_t>(t)];
    const Tensor& bt = b[static_cast<std::size_t>(steps - 1 - t)];
    Tensor swapped = ops::concat_cols(ops::slice_cols(bt, 3, 6), ops::slice_cols(bt, 0, 3));
    CHECK(same_bits(at, swapped));
  }
}

TEST_CASE("mean over steps of a constant sequence is that constant") {
  Rng rng(509);
  Tensor x = oracles::random_tensor({3, 4}, rng);
  EagerCtx cx;
  Tensor m = mean_over_steps(cx, std::vector<Tensor>{x, x, x});
  for (int i = 0; i < m.size(); ++i) {
    CHECK(m.at(i) == doctest::Approx(x.at(i)).epsilon(1e-14));
  }
}

TEST_CASE("gradients through a pooled bidirectional stack check out against fd") {
  Rng rng(510);
  LstmCell f0, b0;
  f0.init(2, 3, rng);
  b0.init(2, 3, rng);
  Linear head;
  head.init(6, 2, rng);
  int steps = 4, batch = 2;
  std::vector<Tensor> xs;
  for (int t = 0; t < steps; ++t) xs.push_back(oracles::random_tensor({batch, 2}, rng));

  auto forward_loss = [&](const LstmCell& fc, const LstmCell& bc, const Linear& hd) {
    EagerCtx cx;
    std::vector<Tensor> hs = bilstm_layer(cx, fc.eager(), bc.eager(), xs);
    Tensor pooled = mean_over_steps(cx, hs);
    Tensor y = linear_forward(cx, hd.eager(), pooled);
    return ops::sum_all(ops::tanh(y)).at(0);
  };

  auto loss_of = [&](const std::vector<Tensor>& in) {
    LstmCell fc = f0, bc = b0;
    Linear hd = head;
    fc.wx = in[0];
    fc.wh = in[1];
    fc.b = in[2];
    bc.wx = in[3];
    hd.w = in[4];
    return forward_loss(fc, bc, hd);
  };

  Tape tape;
  TapeBind tb(tape);
  TapeCtx cx(tape);
  LstmVars<Var> vf = f0.bind(tb, "f0");
  LstmVars<Var> vb = b0.bind(tb, "b0");
  LinearVars<Var> vh = head.bind(tb, "head");
  std::vector<Var> vxs;
  for (const Tensor& x : xs) vxs.push_back(tape.constant(x));
  std::vector<Var> hs = bilstm_layer(cx, vf, vb, vxs);
  Var pooled = mean_over_steps(cx, hs);
  Var loss = tape.sum_all(tape.tanh(linear_forward(cx, vh, pooled)));
  std::vector<Tensor> grads =
      tape.gradients(loss, {vf.wx, vf.wh, vf.b, vb.wx, vh.w});

  auto res = oracles::fd_check(loss_of, {f0.wx, f0.wh, f0.b, b0.wx, head.w},
                               grads, 4, 1e-6, rng);
  CHECK(res.points >= 20);
  CHECK(res.max_rel < 1e-5);
}

TEST_CASE("net parameters survive a checkpoint round trip") {
  Rng rng(511);
  Mlp net;
  net.init(3, {4}, 2, rng);
  LstmCell cell;
  cell.init(2, 3, rng);
  ParamRegistry reg;
  net.register_params(reg, "pi");
  cell.register_params(reg, "enc.f0");

  std::string path = "nets_roundtrip.bin";
  save_checkpoint(reg, path);

  Mlp net2;
  net2.init(3, {4}, 2, rng);
  LstmCell cell2;
  cell2.init(2, 3, rng);
  ParamRegistry reg2;
  net2.register_params(reg2, "pi");
  cell2.register_params(reg2, "enc.f0");
  load_checkpoint(reg2, path);

  CHECK(same_bits(net.layers[0].w, net2.layers[0].w));
  CHECK(same_bits(net.layers[1].b, net2.layers[1].b));
  CHECK(same_bits(cell.wx, cell2.wx));
  CHECK(same_bits(cell.b, cell2.b));
  std::remove(path.c_str());
}

}  // TEST_SUITE
