#pragma once

// Independent oracles used across the test suites: central finite
// differences for gradients, Simpson quadrature for distribution checks, and
// plain-loop reference implementations. Nothing here calls back into the
// code paths under test.

#include <cmath>
#include <functional>
#include <vector>

#include "sectar/rng.hpp"
#include "sectar/tensor.hpp"

namespace oracles {

using sectar::Rng;
using sectar::Tensor;

// Scalar loss as a pure function of a set of input tensors. Implementations
// must rebuild any graph from scratch on every call.
using LossFn = std::function<double(const std::vector<Tensor>&)>;

struct FdResult {
  double max_rel = 0.0;
  int points = 0;
};

inline double rel_err(double a, double b) {
  const double denom = std::max({std::fabs(a), std::fabs(b), 1e-5});
  return std::fabs(a - b) / denom;
}

// Central finite differences at h on randomly chosen entries of every input,
// compared against the supplied analytic gradients.
inline FdResult fd_check(const LossFn& f, std::vector<Tensor> inputs,
                         const std::vector<Tensor>& analytic,
                         int points_per_tensor, double h, Rng& rng) {
  FdResult res;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const int n = inputs[t].size();
    const int points = std::min(points_per_tensor, n);
    for (int p = 0; p < points; ++p) {
      const int i = n <= points_per_tensor ? p : rng.uniform_int(n);
      const double saved = inputs[t].at(i);
      inputs[t].at(i) = saved + h;
      const double fp = f(inputs);
      inputs[t].at(i) = saved - h;
      const double fm = f(inputs);
      inputs[t].at(i) = saved;
      const double fd = (fp - fm) / (2.0 * h);
      const double an = analytic[t].at(i);
      res.max_rel = std::max(res.max_rel, rel_err(fd, an));
      ++res.points;
    }
  }
  return res;
}

inline Tensor random_tensor(std::vector<int> shape, Rng& rng, double lo = -1.5,
                            double hi = 1.5) {
  Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i) t.at(i) = rng.uniform(lo, hi);
  return t;
}

// Random tensor whose entries stay clear of the given kink locations, so
// finite differences of piecewise ops are well defined.
inline Tensor random_tensor_away_from(std::vector<int> shape, Rng& rng,
                                      const std::vector<double>& kinks,
                                      double margin = 0.05, double lo = -1.5,
                                      double hi = 1.5) {
  Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i) {
    double v;
    bool ok;
    do {
      v = rng.uniform(lo, hi);
      ok = true;
      for (double k : kinks)
        if (std::fabs(v - k) < margin) ok = false;
    } while (!ok);
    t.at(i) = v;
  }
  return t;
}

// Composite Simpson rule on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i)
    s += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Textbook univariate normal log-density, kept separate from the library.
inline double normal_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * std::log(2.0 * 3.14159265358979323846) - std::log(sd) -
         0.5 * z * z;
}

// KL(q || p) between two univariate normals by quadrature over q's support.
inline double kl_by_quadrature(double mq, double sq, double mp, double sp) {
  auto f = [&](double x) {
    const double lq = normal_logpdf(x, mq, sq);
    return std::exp(lq) * (lq - normal_logpdf(x, mp, sp));
  };
  return simpson(f, mq - 12.0 * sq, mq + 12.0 * sq, 8000);
}

// Differential entropy of a univariate normal by quadrature.
inline double entropy_by_quadrature(double mean, double sd) {
  auto f = [&](double x) {
    const double l = normal_logpdf(x, mean, sd);
    return -std::exp(l) * l;
  };
  return simpson(f, mean - 12.0 * sd, mean + 12.0 * sd, 8000);
}

// Advantage recomputation by the definition: a double loop over the
// exponentially weighted sum of one-step TD errors.
inline std::vector<double> gae_brute_force(const std::vector<double>& rewards,
                                           const std::vector<double>& values,
                                           double bootstrap, double gamma,
                                           double lambda) {
  const int n = static_cast<int>(rewards.size());
  std::vector<double> adv(static_cast<std::size_t>(n), 0.0);
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int k = t; k < n; ++k) {
      const double vnext = k + 1 < n ? values[static_cast<std::size_t>(k) + 1] : bootstrap;
      const double delta =
          rewards[static_cast<std::size_t>(k)] + gamma * vnext - values[static_cast<std::size_t>(k)];
      acc += std::pow(gamma * lambda, k - t) * delta;
    }
    adv[static_cast<std::size_t>(t)] = acc;
  }
  return adv;
}

}  // namespace oracles
