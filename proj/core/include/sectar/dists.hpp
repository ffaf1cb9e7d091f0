#pragma once

#include <vector>

#include "sectar/context.hpp"
#include "sectar/rng.hpp"
#include "sectar/tensor.hpp"

namespace sectar {

// Log standard deviations are clamped to this range everywhere a network
// head produces them, keeping densities and KL terms finite.
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kLogTwoPi = 1.8378770664093453;

// Diagonal Gaussian over a vector. mean and log_std share an arbitrary
// common shape; log probabilities sum over every entry.
struct DiagGaussian {
  Tensor mean;
  Tensor log_std;
};

DiagGaussian make_diag_gaussian(Tensor mean, Tensor log_std);

double gaussian_logprob(const DiagGaussian& d, const Tensor& x);
Tensor gaussian_sample(const DiagGaussian& d, Rng& rng);
double gaussian_entropy(const DiagGaussian& d);
double gaussian_kl(const DiagGaussian& q, const DiagGaussian& p);
// KL(q || N(0, I)).
double gaussian_kl_to_standard(const DiagGaussian& q);

// Categorical over {0, ..., n-1} parameterized by unnormalized logits
// (rank-1 tensor).
struct Categorical {
  Tensor logits;
};

double categorical_logprob(const Categorical& d, int index);
int categorical_sample(const Categorical& d, Rng& rng);
double categorical_entropy(const Categorical& d);

// Rowwise graph forms. Parameters are (B x d) matrices; the result is a
// (B x 1) column of per-row scalars. Written over a context so the same
// expressions serve inference and loss graphs.

template <class Ctx, class V = typename Ctx::V>
V gaussian_logprob_rows(const Ctx& cx, V mean, V log_std, V x) {
  V zd = cx.mul(cx.sub(x, mean), cx.exp(cx.scale(log_std, -1.0)));
  V per_entry = cx.sub(cx.scale(cx.mul(zd, zd), -0.5),
                       cx.add_scalar(log_std, 0.5 * kLogTwoPi));
  return cx.row_sum(per_entry);
}

template <class Ctx, class V = typename Ctx::V>
V gaussian_entropy_rows(const Ctx& cx, V log_std) {
  V per_entry = cx.add_scalar(log_std, 0.5 * (kLogTwoPi + 1.0));
  return cx.row_sum(per_entry);
}

template <class Ctx, class V = typename Ctx::V>
V gaussian_kl_rows(const Ctx& cx, V q_mean, V q_log_std, V p_mean, V p_log_std) {
  V log_ratio = cx.sub(p_log_std, q_log_std);
  V inv_p_var = cx.exp(cx.scale(p_log_std, -2.0));
  V q_var = cx.exp(cx.scale(q_log_std, 2.0));
  V dm = cx.sub(q_mean, p_mean);
  V quad = cx.mul(cx.add(q_var, cx.mul(dm, dm)), inv_p_var);
  V per_entry = cx.add_scalar(cx.add(log_ratio, cx.scale(quad, 0.5)), -0.5);
  return cx.row_sum(per_entry);
}

// KL(q || N(0, I)) per row.
template <class Ctx, class V = typename Ctx::V>
V gaussian_kl_to_standard_rows(const Ctx& cx, V q_mean, V q_log_std) {
  V q_var = cx.exp(cx.scale(q_log_std, 2.0));
  V per_entry = cx.scale(
      cx.add_scalar(cx.sub(cx.add(q_var, cx.mul(q_mean, q_mean)),
                           cx.scale(q_log_std, 2.0)),
                    -1.0),
      0.5);
  return cx.row_sum(per_entry);
}

template <class Ctx, class V = typename Ctx::V>
V categorical_logprob_rows(const Ctx& cx, V logits, const std::vector<int>& index) {
  return cx.select_cols(cx.log_softmax_rows(logits), index);
}

template <class Ctx, class V = typename Ctx::V>
V categorical_entropy_rows(const Ctx& cx, V logits) {
  V lp = cx.log_softmax_rows(logits);
  return cx.scale(cx.row_sum(cx.mul(cx.exp(lp), lp)), -1.0);
}

}  // namespace sectar
