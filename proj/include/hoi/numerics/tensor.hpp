#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hoi/error.hpp"

namespace hoi {

// Dense row-major tensor of doubles. Everything numeric in the project flows
// through this type; in practice ranks 1 and 2 are what the math uses.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> data;

  Tensor() = default;

  static Tensor zeros(int64_t r, int64_t c) {
    Tensor t;
    t.shape = {r, c};
    t.data.assign(size_t(r * c), 0.0);
    return t;
  }
  static Tensor zeros(int64_t n) {
    Tensor t;
    t.shape = {n};
    t.data.assign(size_t(n), 0.0);
    return t;
  }
  static Tensor scalar(double v) {
    Tensor t;
    t.shape = {1};
    t.data = {v};
    return t;
  }
  static Tensor from(std::vector<double> v) {
    Tensor t;
    t.shape = {int64_t(v.size())};
    t.data = std::move(v);
    return t;
  }
  static Tensor from(int64_t r, int64_t c, std::vector<double> v) {
    check(int64_t(v.size()) == r * c, "Tensor::from: size mismatch");
    Tensor t;
    t.shape = {r, c};
    t.data = std::move(v);
    return t;
  }

  int64_t numel() const { return int64_t(data.size()); }
  int64_t rank() const { return int64_t(shape.size()); }
  // Rank-1 tensors are treated as single rows by the matrix kernels.
  int64_t rows() const { return rank() == 2 ? shape[0] : 1; }
  int64_t cols() const { return rank() == 2 ? shape[1] : (rank() == 1 ? shape[0] : 1); }

  double& at(int64_t i, int64_t j) { return data[size_t(i * cols() + j)]; }
  double at(int64_t i, int64_t j) const { return data[size_t(i * cols() + j)]; }
  double& operator[](int64_t i) { return data[size_t(i)]; }
  double operator[](int64_t i) const { return data[size_t(i)]; }

  bool same_shape(const Tensor& o) const { return rows() == o.rows() && cols() == o.cols(); }
  std::string shape_str() const;
  bool has_nan() const;
};

// c[m x n] = a[m x k] * b[k x n]
void matmul(const Tensor& a, const Tensor& b, Tensor& c);
// c[m x k] = a[m x n] * b[k x n]^T
void matmul_nt(const Tensor& a, const Tensor& b, Tensor& c);
// c[k x n] = a[m x k]^T * b[m x n]
void matmul_tn(const Tensor& a, const Tensor& b, Tensor& c);

// out[1 x n] = column sums of a[m x n]; out[m x 1] = row sums.
void colsum(const Tensor& a, Tensor& out);
void rowsum(const Tensor& a, Tensor& out);

}  // namespace hoi
