#include "sectar/dists.hpp"

#include <cmath>
#include <stdexcept>

namespace sectar {

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
  }
}

}  // namespace

DiagGaussian make_diag_gaussian(Tensor mean, Tensor log_std) {
  check_same_shape(mean, log_std, "make_diag_gaussian");
  return DiagGaussian{std::move(mean), ops::clip(log_std, kLogStdMin, kLogStdMax)};
}

double gaussian_logprob(const DiagGaussian& d, const Tensor& x) {
  check_same_shape(d.mean, x, "gaussian_logprob");
  double total = 0.0;
  for (int i = 0; i < d.mean.size(); ++i) {
    double ls = d.log_std.data()[i];
    double z = (x.data()[i] - d.mean.data()[i]) * std::exp(-ls);
    total += -0.5 * z * z - ls - 0.5 * kLogTwoPi;
  }
  return total;
}

Tensor gaussian_sample(const DiagGaussian& d, Rng& rng) {
  Tensor out = d.mean;
  for (int i = 0; i < out.size(); ++i) {
    out.data()[i] += std::exp(d.log_std.data()[i]) * rng.normal();
  }
  return out;
}

double gaussian_entropy(const DiagGaussian& d) {
  double total = 0.0;
  for (int i = 0; i < d.log_std.size(); ++i) {
    total += d.log_std.data()[i] + 0.5 * (kLogTwoPi + 1.0);
  }
  return total;
}

double gaussian_kl(const DiagGaussian& q, const DiagGaussian& p) {
  check_same_shape(q.mean, p.mean, "gaussian_kl");
  double total = 0.0;
  for (int i = 0; i < q.mean.size(); ++i) {
    double ql = q.log_std.data()[i];
    double pl = p.log_std.data()[i];
    double dm = q.mean.data()[i] - p.mean.data()[i];
    double ratio = (std::exp(2.0 * ql) + dm * dm) * std::exp(-2.0 * pl);
    total += pl - ql + 0.5 * ratio - 0.5;
  }
  return total;
}

double gaussian_kl_to_standard(const DiagGaussian& q) {
  double total = 0.0;
  for (int i = 0; i < q.mean.size(); ++i) {
    double ql = q.log_std.data()[i];
    double m = q.mean.data()[i];
    total += 0.5 * (std::exp(2.0 * ql) + m * m - 1.0 - 2.0 * ql);
  }
  return total;
}

double categorical_logprob(const Categorical& d, int index) {
  if (index < 0 || index >= d.logits.size()) {
    throw std::out_of_range("categorical_logprob: index " + std::to_string(index) +
                            " out of range for " + std::to_string(d.logits.size()) +
                            " categories");
  }
  Tensor lp = ops::log_softmax_rows(d.logits);
  return lp.data()[index];
}

int categorical_sample(const Categorical& d, Rng& rng) {
  Tensor p = ops::softmax_rows(d.logits);
  double u = rng.uniform();
  double acc = 0.0;
  int n = p.size();
  for (int i = 0; i < n; ++i) {
    acc += p.data()[i];
    if (u < acc) return i;
  }
  return n - 1;
}

double categorical_entropy(const Categorical& d) {
  Tensor lp = ops::log_softmax_rows(d.logits);
  double total = 0.0;
  for (int i = 0; i < lp.size(); ++i) {
    total -= std::exp(lp.data()[i]) * lp.data()[i];
  }
  return total;
}

}  // namespace sectar
