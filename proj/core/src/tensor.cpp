#include "sectar/tensor.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace sectar {

namespace {

std::size_t shape_product(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor dimension must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                              a.shape_str() + " vs " + b.shape_str());
}

[[noreturn]] void rank_error(const char* op, const Tensor& a) {
  throw std::invalid_argument(std::string(op) + ": unsupported shape " +
                              a.shape_str());
}

void check_finite(const char* op, const Tensor& t) {
  if (!t.all_finite())
    throw std::runtime_error(std::string(op) + ": non-finite value in result");
}

}  // namespace

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), values_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (shape_product(shape_) != values_.size())
    throw std::invalid_argument("tensor value count does not match shape " +
                                shape_str());
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<int> shape, double v) {
  Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i) t.at(i) = v;
  return t;
}

int Tensor::rows() const {
  if (rank() == 2) return shape_[0];
  if (rank() == 1) return 1;
  throw std::invalid_argument("rows(): tensor has rank " + std::to_string(rank()));
}

int Tensor::cols() const {
  if (rank() == 2) return shape_[1];
  if (rank() == 1) return shape_[0];
  throw std::invalid_argument("cols(): tensor has rank " + std::to_string(rank()));
}

double& Tensor::at(int r, int c) {
  return values_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols()) +
                 static_cast<std::size_t>(c)];
}

double Tensor::at(int r, int c) const {
  return values_[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols()) +
                 static_cast<std::size_t>(c)];
}

bool Tensor::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape_[i]);
  }
  s += ")";
  return s;
}

namespace ops {

namespace {

template <class F>
Tensor unary(const char* op, const Tensor& a, F f) {
  Tensor out(a.shape());
  for (int i = 0; i < a.size(); ++i) out.at(i) = f(a.at(i));
  check_finite(op, out);
  return out;
}

template <class F>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, F f) {
  if (!a.same_shape(b)) shape_error(op, a, b);
  Tensor out(a.shape());
  for (int i = 0; i < a.size(); ++i) out.at(i) = f(a.at(i), b.at(i));
  check_finite(op, out);
  return out;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0))
    shape_error("matmul", a, b);
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out({m, n});
  for (int i = 0; i < m; ++i) {
    double* dst = out.data() + static_cast<std::size_t>(i) * n;
    const double* arow = a.data() + static_cast<std::size_t>(i) * k;
    for (int p = 0; p < k; ++p) {
      const double aik = arow[p];
      const double* brow = b.data() + static_cast<std::size_t>(p) * n;
      for (int j = 0; j < n; ++j) dst[j] += aik * brow[j];
    }
  }
  check_finite("matmul", out);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary("add", a, b, [](double x, double y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary("sub", a, b, [](double x, double y) { return x - y; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary("mul", a, b, [](double x, double y) { return x * y; });
}

Tensor scale(const Tensor& a, double c) {
  return unary("scale", a, [c](double x) { return c * x; });
}

Tensor add_scalar(const Tensor& a, double c) {
  return unary("add_scalar", a, [c](double x) { return x + c; });
}

Tensor add_rowvec(const Tensor& m, const Tensor& v) {
  if (m.rank() != 2 || v.rank() != 1 || v.dim(0) != m.dim(1))
    shape_error("add_rowvec", m, v);
  Tensor out(m.shape());
  const int rows = m.dim(0), cols = m.dim(1);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(r, c) = m.at(r, c) + v.at(c);
  check_finite("add_rowvec", out);
  return out;
}

Tensor tanh(const Tensor& a) {
  return unary("tanh", a, [](double x) { return std::tanh(x); });
}

Tensor sigmoid(const Tensor& a) {
  return unary("sigmoid", a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Tensor relu(const Tensor& a) {
  return unary("relu", a, [](double x) { return x > 0.0 ? x : 0.0; });
}

Tensor exp(const Tensor& a) {
  return unary("exp", a, [](double x) { return std::exp(x); });
}

Tensor log(const Tensor& a) {
  return unary("log", a, [](double x) { return std::log(x); });
}

Tensor clip(const Tensor& a, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("clip: lo > hi");
  return unary("clip", a, [lo, hi](double x) {
    return x < lo ? lo : (x > hi ? hi : x);
  });
}

Tensor minimum(const Tensor& a, const Tensor& b) {
  return binary("minimum", a, b,
                [](double x, double y) { return x <= y ? x : y; });
}

Tensor sum_all(const Tensor& a) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.at(i);
  Tensor out = Tensor::scalar(s);
  check_finite("sum_all", out);
  return out;
}

Tensor mean_all(const Tensor& a) {
  Tensor s = sum_all(a);
  s.at(0) /= static_cast<double>(a.size());
  check_finite("mean_all", s);
  return s;
}

Tensor row_sum(const Tensor& m) {
  if (m.rank() != 2) rank_error("row_sum", m);
  Tensor out({m.dim(0)});
  for (int r = 0; r < m.dim(0); ++r) {
    double s = 0.0;
    for (int c = 0; c < m.dim(1); ++c) s += m.at(r, c);
    out.at(r) = s;
  }
  check_finite("row_sum", out);
  return out;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rank() == 1 && b.rank() == 1) {
    Tensor out({a.dim(0) + b.dim(0)});
    for (int i = 0; i < a.dim(0); ++i) out.at(i) = a.at(i);
    for (int i = 0; i < b.dim(0); ++i) out.at(a.dim(0) + i) = b.at(i);
    return out;
  }
  if (a.rank() != 2 || b.rank() != 2 || a.dim(0) != b.dim(0))
    shape_error("concat_cols", a, b);
  const int rows = a.dim(0), ca = a.dim(1), cb = b.dim(1);
  Tensor out({rows, ca + cb});
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < ca; ++c) out.at(r, c) = a.at(r, c);
    for (int c = 0; c < cb; ++c) out.at(r, ca + c) = b.at(r, c);
  }
  return out;
}

Tensor slice_cols(const Tensor& a, int c0, int c1) {
  const bool vec = a.rank() == 1;
  if (a.rank() != 2 && !vec) rank_error("slice_cols", a);
  const int cols = vec ? a.dim(0) : a.dim(1);
  if (c0 < 0 || c1 > cols || c0 >= c1)
    throw std::invalid_argument("slice_cols: bounds [" + std::to_string(c0) +
                                ", " + std::to_string(c1) + ") out of range for " +
                                a.shape_str());
  if (vec) {
    Tensor out({c1 - c0});
    for (int c = c0; c < c1; ++c) out.at(c - c0) = a.at(c);
    return out;
  }
  Tensor out({a.dim(0), c1 - c0});
  for (int r = 0; r < a.dim(0); ++r)
    for (int c = c0; c < c1; ++c) out.at(r, c - c0) = a.at(r, c);
  return out;
}

Tensor tile_rows(const Tensor& m, int times) {
  if (m.rank() != 2) rank_error("tile_rows", m);
  if (times <= 0) throw std::invalid_argument("tile_rows: times must be positive");
  const int rows = m.dim(0), cols = m.dim(1);
  Tensor out({rows * times, cols});
  for (int t = 0; t < times; ++t)
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out.at(t * rows + r, c) = m.at(r, c);
  return out;
}

namespace {

void softmax_row(const double* x, double* y, int n, bool log_form) {
  double mx = x[0];
  for (int i = 1; i < n; ++i) mx = x[i] > mx ? x[i] : mx;
  double z = 0.0;
  for (int i = 0; i < n; ++i) z += std::exp(x[i] - mx);
  if (log_form) {
    const double lz = std::log(z);
    for (int i = 0; i < n; ++i) y[i] = x[i] - mx - lz;
  } else {
    for (int i = 0; i < n; ++i) y[i] = std::exp(x[i] - mx) / z;
  }
}

Tensor softmax_impl(const char* op, const Tensor& a, bool log_form) {
  if (a.rank() != 1 && a.rank() != 2) rank_error(op, a);
  Tensor out(a.shape());
  const int rows = a.rows(), cols = a.cols();
  for (int r = 0; r < rows; ++r)
    softmax_row(a.data() + static_cast<std::size_t>(r) * cols,
                out.data() + static_cast<std::size_t>(r) * cols, cols, log_form);
  check_finite(op, out);
  return out;
}

}  // namespace

Tensor softmax_rows(const Tensor& a) { return softmax_impl("softmax_rows", a, false); }

Tensor log_softmax_rows(const Tensor& a) {
  return softmax_impl("log_softmax_rows", a, true);
}

Tensor select_cols(const Tensor& m, const std::vector<int>& idx) {
  if (m.rank() != 2) rank_error("select_cols", m);
  if (static_cast<int>(idx.size()) != m.dim(0))
    throw std::invalid_argument("select_cols: need one index per row");
  Tensor out({m.dim(0)});
  for (int r = 0; r < m.dim(0); ++r) {
    const int c = idx[static_cast<std::size_t>(r)];
    if (c < 0 || c >= m.dim(1))
      throw std::invalid_argument("select_cols: index " + std::to_string(c) +
                                  " out of range for " + m.shape_str());
    out.at(r) = m.at(r, c);
  }
  return out;
}

}  // namespace ops

}  // namespace sectar
