#pragma once

#include <string>
#include <vector>

namespace sectar {

// Dense row-major double tensor. Everything in this project is rank 1 or 2;
// rank 2 is (rows x cols) with batch along rows.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<double> values);

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, double v);

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(values_.size()); }
  int rows() const;
  int cols() const;

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  double& at(int i) { return values_[static_cast<std::size_t>(i)]; }
  double at(int i) const { return values_[static_cast<std::size_t>(i)]; }
  double& at(int r, int c);
  double at(int r, int c) const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  std::string shape_str() const;

 private:
  std::vector<int> shape_;
  std::vector<double> values_;
};

// Pure forward kernels. Inputs are never mutated; every kernel validates
// shapes and rejects non-finite outputs. These are the single source of the
// forward math, shared by the eager (inference) and taped (training) paths.
namespace ops {

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
// (rows x cols) + (cols) broadcast over rows; bias addition.
Tensor add_rowvec(const Tensor& m, const Tensor& v);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor clip(const Tensor& a, double lo, double hi);
Tensor minimum(const Tensor& a, const Tensor& b);

Tensor sum_all(const Tensor& a);   // -> scalar
Tensor mean_all(const Tensor& a);  // -> scalar
Tensor row_sum(const Tensor& m);   // (rows x cols) -> (rows)

Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor slice_cols(const Tensor& a, int c0, int c1);  // half-open [c0, c1)
Tensor tile_rows(const Tensor& m, int times);        // stack copies vertically

Tensor softmax_rows(const Tensor& a);
Tensor log_softmax_rows(const Tensor& a);
// One entry per row: m(r, idx[r]).
Tensor select_cols(const Tensor& m, const std::vector<int>& idx);

}  // namespace ops

}  // namespace sectar
