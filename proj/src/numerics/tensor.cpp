#include "hoi/numerics/tensor.hpp"

#include <cmath>

namespace hoi {

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

bool Tensor::has_nan() const {
  for (double v : data)
    if (!std::isfinite(v)) return true;
  return false;
}

// i-k-j order: the inner loop walks contiguous rows of b and c, which is what
// the auto-vectorizer wants. Accumulation order is fixed, so results are
// bit-stable across runs.
void matmul(const Tensor& a, const Tensor& b, Tensor& c) {
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  check(b.rows() == k, "matmul: inner dims " + a.shape_str() + " x " + b.shape_str());
  c = Tensor::zeros(m, n);
  const double* __restrict__ pa = a.data.data();
  const double* __restrict__ pb = b.data.data();
  double* __restrict__ pc = c.data.data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* __restrict__ brow = pb + p * n;
      double* __restrict__ crow = pc + i * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_nt(const Tensor& a, const Tensor& b, Tensor& c) {
  const int64_t m = a.rows(), n = a.cols(), k = b.rows();
  check(b.cols() == n, "matmul_nt: inner dims " + a.shape_str() + " x " + b.shape_str());
  c = Tensor::zeros(m, k);
  const double* __restrict__ pa = a.data.data();
  const double* __restrict__ pb = b.data.data();
  double* __restrict__ pc = c.data.data();
  for (int64_t i = 0; i < m; ++i) {
    const double* __restrict__ arow = pa + i * n;
    for (int64_t p = 0; p < k; ++p) {
      const double* __restrict__ brow = pb + p * n;
      double acc = 0.0;
      for (int64_t j = 0; j < n; ++j) acc += arow[j] * brow[j];
      pc[i * k + p] = acc;
    }
  }
}

void matmul_tn(const Tensor& a, const Tensor& b, Tensor& c) {
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  check(b.rows() == m, "matmul_tn: inner dims " + a.shape_str() + " x " + b.shape_str());
  c = Tensor::zeros(k, n);
  const double* __restrict__ pa = a.data.data();
  const double* __restrict__ pb = b.data.data();
  double* __restrict__ pc = c.data.data();
  for (int64_t i = 0; i < m; ++i) {
    const double* __restrict__ brow = pb + i * n;
    for (int64_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      double* __restrict__ crow = pc + p * n;
      for (int64_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void colsum(const Tensor& a, Tensor& out) {
  const int64_t m = a.rows(), n = a.cols();
  out = Tensor::zeros(1, n);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) out.data[size_t(j)] += a.data[size_t(i * n + j)];
}

void rowsum(const Tensor& a, Tensor& out) {
  const int64_t m = a.rows(), n = a.cols();
  out = Tensor::zeros(m, 1);
  for (int64_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int64_t j = 0; j < n; ++j) acc += a.data[size_t(i * n + j)];
    out.data[size_t(i)] = acc;
  }
}

}  // namespace hoi
