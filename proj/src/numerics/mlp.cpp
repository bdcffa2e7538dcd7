#include "hoi/numerics/mlp.hpp"

#include <cmath>

#include "hoi/error.hpp"

namespace hoi {

MlpParams mlp_init(int64_t in, const std::vector<int64_t>& hidden, int64_t out, Rng& rng,
                   double out_gain) {
  check(in > 0 && out > 0, "mlp_init: bad dims");
  MlpParams p;
  p.in_dim = in;
  p.out_dim = out;
  std::vector<int64_t> dims;
  dims.push_back(in);
  for (int64_t h : hidden) dims.push_back(h);
  dims.push_back(out);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const int64_t fi = dims[l], fo = dims[l + 1];
    const bool last = (l + 2 == dims.size());
    const double lim = std::sqrt(6.0 / double(fi + fo)) * (last ? out_gain : 1.0);
    Tensor W = Tensor::zeros(fi, fo);
    for (double& v : W.data) v = rng.uniform(-lim, lim);
    p.W.push_back(std::move(W));
    p.b.push_back(Tensor::zeros(1, fo));
  }
  return p;
}

Tensor mlp_forward(const MlpParams& p, const Tensor& x) {
  check(x.cols() == p.in_dim, "mlp_forward: input width " + x.shape_str());
  Tensor h = x;
  if (h.rank() == 1) h.shape = {1, h.numel()};
  for (int64_t l = 0; l < p.layers(); ++l) {
    Tensor z;
    matmul(h, p.W[size_t(l)], z);
    const int64_t m = z.rows(), c = z.cols();
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < c; ++j) z.data[size_t(i * c + j)] += p.b[size_t(l)].data[size_t(j)];
    if (l + 1 < p.layers())
      for (double& v : z.data) v = v > 0.0 ? v : std::expm1(v);
    h = std::move(z);
  }
  return h;
}

Tensor mlp_hidden(const MlpParams& p, const Tensor& x, int64_t layer) {
  check(layer >= 0 && layer < p.layers() - 1, "mlp_hidden: layer out of range");
  Tensor h = x;
  if (h.rank() == 1) h.shape = {1, h.numel()};
  for (int64_t l = 0; l <= layer; ++l) {
    Tensor z;
    matmul(h, p.W[size_t(l)], z);
    const int64_t m = z.rows(), c = z.cols();
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < c; ++j) z.data[size_t(i * c + j)] += p.b[size_t(l)].data[size_t(j)];
    for (double& v : z.data) v = v > 0.0 ? v : std::expm1(v);
    h = std::move(z);
  }
  return h;
}

MlpVars mlp_leaves(Tape& t, const MlpParams& p) {
  MlpVars v;
  for (size_t l = 0; l < p.W.size(); ++l) {
    v.W.push_back(t.leaf(p.W[l]));
    v.b.push_back(t.leaf(p.b[l]));
  }
  return v;
}

Var mlp_forward(Tape& t, const MlpVars& v, Var x) {
  Var h = x;
  const size_t L = v.W.size();
  for (size_t l = 0; l < L; ++l) {
    h = t.add_row(t.matmul(h, v.W[l]), v.b[l]);
    if (l + 1 < L) h = t.elu(h);
  }
  return h;
}

void mlp_append_named(NamedTensors& out, const std::string& prefix, const MlpParams& p) {
  for (size_t l = 0; l < p.W.size(); ++l) {
    out.emplace_back(prefix + ".W" + std::to_string(l), p.W[l]);
    out.emplace_back(prefix + ".b" + std::to_string(l), p.b[l]);
  }
}

MlpParams mlp_from_named(const NamedTensors& named, const std::string& prefix, int64_t in,
                         const std::vector<int64_t>& hidden, int64_t out) {
  MlpParams p;
  p.in_dim = in;
  p.out_dim = out;
  std::vector<int64_t> dims{in};
  for (int64_t h : hidden) dims.push_back(h);
  dims.push_back(out);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    const Tensor* W = find_param(named, prefix + ".W" + std::to_string(l));
    const Tensor* b = find_param(named, prefix + ".b" + std::to_string(l));
    if (W == nullptr || b == nullptr)
      throw ContractError("checkpoint missing layer " + prefix + ".W/b" + std::to_string(l));
    if (W->rows() != dims[l] || W->cols() != dims[l + 1] || b->cols() != dims[l + 1])
      throw ContractError("checkpoint shape mismatch at " + prefix + ".W" + std::to_string(l) +
                          ": got " + W->shape_str());
    p.W.push_back(*W);
    p.b.push_back(*b);
  }
  return p;
}

}  // namespace hoi
