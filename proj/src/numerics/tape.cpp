#include "hoi/numerics/tape.hpp"

#include <cmath>

namespace hoi {

namespace {
void accumulate(Tensor& dst, const Tensor& src) {
  if (dst.numel() == 0) {
    dst = src;
    return;
  }
  for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += src.data[i];
}
}  // namespace

Var Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var{this, int(nodes_.size() - 1)};
}

Var Tape::leaf(Tensor v) {
  Node n;
  n.op = Op::kLeaf;
  n.val = std::move(v);
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::constant(Tensor v) {
  Node n;
  n.op = Op::kConst;
  n.val = std::move(v);
  n.needs_grad = false;
  return push(std::move(n));
}

#define HOI_NODE(OP, A, B)                            \
  Node n;                                             \
  n.op = Op::OP;                                      \
  n.a = (A);                                          \
  n.b = (B);                                          \
  n.needs_grad = ((A) >= 0 && nodes_[size_t(A)].needs_grad) || \
                 ((B) >= 0 && nodes_[size_t(B)].needs_grad)

Var Tape::matmul(Var a, Var b) {
  check(a.tp == this && b.tp == this, "tape: foreign var");
  HOI_NODE(kMatMul, a.id, b.id);
  hoi::matmul(nodes_[size_t(a.id)].val, nodes_[size_t(b.id)].val, n.val);
  return push(std::move(n));
}

Var Tape::add_row(Var a, Var r) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& v = nodes_[size_t(r.id)].val;
  check(v.rows() == 1 && v.cols() == x.cols(), "add_row: bad row vector");
  HOI_NODE(kAddRow, a.id, r.id);
  n.val = x;
  const int64_t m = x.rows(), c = x.cols();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < c; ++j) n.val.data[size_t(i * c + j)] += v.data[size_t(j)];
  return push(std::move(n));
}

Var Tape::mul_row(Var a, Var r) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& v = nodes_[size_t(r.id)].val;
  check(v.rows() == 1 && v.cols() == x.cols(), "mul_row: bad row vector");
  HOI_NODE(kMulRow, a.id, r.id);
  n.val = x;
  const int64_t m = x.rows(), c = x.cols();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < c; ++j) n.val.data[size_t(i * c + j)] *= v.data[size_t(j)];
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& y = nodes_[size_t(b.id)].val;
  check(x.same_shape(y), "add: shape " + x.shape_str() + " vs " + y.shape_str());
  HOI_NODE(kAdd, a.id, b.id);
  n.val = x;
  for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] += y.data[i];
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& y = nodes_[size_t(b.id)].val;
  check(x.same_shape(y), "sub: shape " + x.shape_str() + " vs " + y.shape_str());
  HOI_NODE(kSub, a.id, b.id);
  n.val = x;
  for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] -= y.data[i];
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& y = nodes_[size_t(b.id)].val;
  check(x.same_shape(y), "mul: shape " + x.shape_str() + " vs " + y.shape_str());
  HOI_NODE(kMul, a.id, b.id);
  n.val = x;
  for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] *= y.data[i];
  return push(std::move(n));
}

Var Tape::neg(Var a) {
  HOI_NODE(kNeg, a.id, -1);
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v = -v;
  return push(std::move(n));
}

Var Tape::scale(Var a, double s) {
  HOI_NODE(kScale, a.id, -1);
  n.s0 = s;
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v *= s;
  return push(std::move(n));
}

Var Tape::add_scalar(Var a, double s) {
  HOI_NODE(kAddS, a.id, -1);
  n.s0 = s;
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v += s;
  return push(std::move(n));
}

Var Tape::add_scalar_var(Var a, Var s) {
  check(nodes_[size_t(s.id)].val.numel() == 1, "add_scalar_var: rhs not scalar");
  HOI_NODE(kAddSV, a.id, s.id);
  n.val = nodes_[size_t(a.id)].val;
  const double sv = nodes_[size_t(s.id)].val.data[0];
  for (double& v : n.val.data) v += sv;
  return push(std::move(n));
}

Var Tape::elu(Var a) {
  HOI_NODE(kElu, a.id, -1);
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v = v > 0.0 ? v : std::expm1(v);
  return push(std::move(n));
}

Var Tape::exp(Var a) {
  HOI_NODE(kExp, a.id, -1);
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v = std::exp(v);
  return push(std::move(n));
}

Var Tape::log(Var a) {
  HOI_NODE(kLog, a.id, -1);
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v = std::log(v);
  return push(std::move(n));
}

Var Tape::sqrt(Var a) {
  HOI_NODE(kSqrt, a.id, -1);
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v = std::sqrt(v);
  return push(std::move(n));
}

Var Tape::square(Var a) {
  HOI_NODE(kSquare, a.id, -1);
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v = v * v;
  return push(std::move(n));
}

Var Tape::acos(Var a) {
  HOI_NODE(kAcos, a.id, -1);
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v = std::acos(v);
  return push(std::move(n));
}

Var Tape::clamp(Var a, double lo, double hi) {
  HOI_NODE(kClamp, a.id, -1);
  n.s0 = lo;
  n.s1 = hi;
  n.val = nodes_[size_t(a.id)].val;
  for (double& v : n.val.data) v = v < lo ? lo : (v > hi ? hi : v);
  return push(std::move(n));
}

Var Tape::max2(Var a, Var b) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& y = nodes_[size_t(b.id)].val;
  check(x.same_shape(y), "max2: shape mismatch");
  HOI_NODE(kMax2, a.id, b.id);
  n.val = x;
  for (size_t i = 0; i < n.val.data.size(); ++i)
    n.val.data[i] = x.data[i] >= y.data[i] ? x.data[i] : y.data[i];
  return push(std::move(n));
}

Var Tape::row_sum(Var a) {
  HOI_NODE(kRowSum, a.id, -1);
  rowsum(nodes_[size_t(a.id)].val, n.val);
  return push(std::move(n));
}

Var Tape::mean_all(Var a) {
  HOI_NODE(kMeanAll, a.id, -1);
  const Tensor& x = nodes_[size_t(a.id)].val;
  double acc = 0.0;
  for (double v : x.data) acc += v;
  n.val = Tensor::scalar(acc / double(x.numel()));
  return push(std::move(n));
}

Var Tape::sum_all(Var a) {
  HOI_NODE(kSumAll, a.id, -1);
  const Tensor& x = nodes_[size_t(a.id)].val;
  double acc = 0.0;
  for (double v : x.data) acc += v;
  n.val = Tensor::scalar(acc);
  return push(std::move(n));
}

Var Tape::slice_cols(Var a, int64_t j0, int64_t j1) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  check(0 <= j0 && j0 < j1 && j1 <= x.cols(), "slice_cols: bad range");
  HOI_NODE(kSliceCols, a.id, -1);
  n.s0 = double(j0);
  n.s1 = double(j1);
  const int64_t m = x.rows(), c = x.cols(), w = j1 - j0;
  n.val = Tensor::zeros(m, w);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < w; ++j) n.val.data[size_t(i * w + j)] = x.data[size_t(i * c + j0 + j)];
  return push(std::move(n));
}

Var Tape::concat_cols(Var a, Var b) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& y = nodes_[size_t(b.id)].val;
  check(x.rows() == y.rows(), "concat_cols: row mismatch");
  HOI_NODE(kConcatCols, a.id, b.id);
  const int64_t m = x.rows(), ca = x.cols(), cb = y.cols();
  n.val = Tensor::zeros(m, ca + cb);
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < ca; ++j) n.val.data[size_t(i * (ca + cb) + j)] = x.data[size_t(i * ca + j)];
    for (int64_t j = 0; j < cb; ++j) n.val.data[size_t(i * (ca + cb) + ca + j)] = y.data[size_t(i * cb + j)];
  }
  return push(std::move(n));
}

Var Tape::div_col(Var a, Var c) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& d = nodes_[size_t(c.id)].val;
  check(d.rows() == x.rows() && d.cols() == 1, "div_col: bad divisor");
  HOI_NODE(kDivCol, a.id, c.id);
  n.val = x;
  const int64_t m = x.rows(), w = x.cols();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < w; ++j) n.val.data[size_t(i * w + j)] /= d.data[size_t(i)];
  return push(std::move(n));
}

Var Tape::mul_col(Var a, Var c) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& d = nodes_[size_t(c.id)].val;
  check(d.rows() == x.rows() && d.cols() == 1, "mul_col: bad multiplier");
  HOI_NODE(kMulCol, a.id, c.id);
  n.val = x;
  const int64_t m = x.rows(), w = x.cols();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < w; ++j) n.val.data[size_t(i * w + j)] *= d.data[size_t(i)];
  return push(std::move(n));
}

Var Tape::cross3(Var a, Var b) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  const Tensor& y = nodes_[size_t(b.id)].val;
  check(x.cols() == 3 && y.cols() == 3 && x.rows() == y.rows(), "cross3: need [m,3]");
  HOI_NODE(kCross3, a.id, b.id);
  const int64_t m = x.rows();
  n.val = Tensor::zeros(m, 3);
  for (int64_t i = 0; i < m; ++i) {
    const double* u = &x.data[size_t(i * 3)];
    const double* v = &y.data[size_t(i * 3)];
    double* o = &n.val.data[size_t(i * 3)];
    o[0] = u[1] * v[2] - u[2] * v[1];
    o[1] = u[2] * v[0] - u[0] * v[2];
    o[2] = u[0] * v[1] - u[1] * v[0];
  }
  return push(std::move(n));
}

Var Tape::pose_cloud(Var b1, Var b2, Var b3, Var p, const Tensor& cloud) {
  const Tensor& c1 = nodes_[size_t(b1.id)].val;
  check(c1.cols() == 3 && cloud.cols() == 3, "pose_cloud: need [m,3] basis and [N,3] cloud");
  Node n;
  n.op = Op::kPoseCloud;
  n.a = b1.id;
  n.b = b2.id;
  n.c = b3.id;
  n.d = p.id;
  n.ext = &cloud;
  n.needs_grad = nodes_[size_t(b1.id)].needs_grad || nodes_[size_t(b2.id)].needs_grad ||
                 nodes_[size_t(b3.id)].needs_grad || nodes_[size_t(p.id)].needs_grad;
  const int64_t m = c1.rows(), N = cloud.rows();
  const Tensor& c2 = nodes_[size_t(b2.id)].val;
  const Tensor& c3 = nodes_[size_t(b3.id)].val;
  const Tensor& cp = nodes_[size_t(p.id)].val;
  n.val = Tensor::zeros(m * N, 3);
  for (int64_t s = 0; s < m; ++s) {
    const double* e1 = &c1.data[size_t(s * 3)];
    const double* e2 = &c2.data[size_t(s * 3)];
    const double* e3 = &c3.data[size_t(s * 3)];
    const double* pp = &cp.data[size_t(s * 3)];
    for (int64_t i = 0; i < N; ++i) {
      const double px = cloud.data[size_t(i * 3)], py = cloud.data[size_t(i * 3 + 1)],
                   pz = cloud.data[size_t(i * 3 + 2)];
      double* o = &n.val.data[size_t((s * N + i) * 3)];
      o[0] = e1[0] * px + e2[0] * py + e3[0] * pz + pp[0];
      o[1] = e1[1] * px + e2[1] * py + e3[1] * pz + pp[1];
      o[2] = e1[2] * px + e2[2] * py + e3[2] * pz + pp[2];
    }
  }
  return push(std::move(n));
}

Var Tape::group_max(Var a, int64_t group) {
  const Tensor& x = nodes_[size_t(a.id)].val;
  check(group > 0 && x.rows() % group == 0, "group_max: group must divide rows");
  HOI_NODE(kGroupMax, a.id, -1);
  n.s0 = double(group);
  const int64_t m = x.rows() / group, w = x.cols();
  n.val = Tensor::zeros(m, w);
  n.aux.assign(size_t(m * w), 0);
  for (int64_t g = 0; g < m; ++g) {
    for (int64_t j = 0; j < w; ++j) {
      double best = x.data[size_t(g * group * w + j)];
      int32_t bi = int32_t(g * group);
      for (int64_t r = 1; r < group; ++r) {
        const double v = x.data[size_t((g * group + r) * w + j)];
        if (v > best) {
          best = v;
          bi = int32_t(g * group + r);
        }
      }
      n.val.data[size_t(g * w + j)] = best;
      n.aux[size_t(g * w + j)] = bi;
    }
  }
  return push(std::move(n));
}

#undef HOI_NODE

const Tensor& Tape::grad(Var v) const {
  const Node& n = nodes_[size_t(v.id)];
  check(n.grad.numel() > 0, "grad: not computed for this node (run backward first)");
  return n.grad;
}

void Tape::backward(Var out) {
  const Tensor& v = nodes_[size_t(out.id)].val;
  check(v.numel() == 1, "backward: output is not scalar; pass an explicit seed gradient");
  backward(out, Tensor::scalar(1.0));
}

void Tape::backward(Var out, const Tensor& seed) {
  check(out.tp == this, "backward: foreign var");
  Node& root = nodes_[size_t(out.id)];
  check(seed.numel() == root.val.numel(), "backward: seed shape mismatch");
  for (Node& n : nodes_) n.grad = Tensor();
  root.grad = seed;
  root.grad.shape = root.val.shape;

  for (int id = out.id; id >= 0; --id) {
    Node& n = nodes_[size_t(id)];
    if (!n.needs_grad || n.grad.numel() == 0) continue;
    const Tensor& g = n.grad;
    auto gets = [&](int pid) {
      return pid >= 0 && nodes_[size_t(pid)].needs_grad;
    };
    auto gref = [&](int pid) -> Tensor& { return nodes_[size_t(pid)].grad; };
    auto bump = [&](int pid, const Tensor& d) {
      Tensor& dst = gref(pid);
      if (dst.numel() == 0) {
        dst = Tensor::zeros(nodes_[size_t(pid)].val.rows(), nodes_[size_t(pid)].val.cols());
        dst.shape = nodes_[size_t(pid)].val.shape;
      }
      accumulate(dst, d);
    };

    switch (n.op) {
      case Op::kLeaf:
      case Op::kConst:
        break;
      case Op::kMatMul: {
        if (gets(n.a)) {
          Tensor da;
          matmul_nt(g, nodes_[size_t(n.b)].val, da);
          bump(n.a, da);
        }
        if (gets(n.b)) {
          Tensor db;
          matmul_tn(nodes_[size_t(n.a)].val, g, db);
          bump(n.b, db);
        }
        break;
      }
      case Op::kAddRow: {
        if (gets(n.a)) bump(n.a, g);
        if (gets(n.b)) {
          Tensor db;
          colsum(g, db);
          bump(n.b, db);
        }
        break;
      }
      case Op::kMulRow: {
        const Tensor& x = nodes_[size_t(n.a)].val;
        const Tensor& r = nodes_[size_t(n.b)].val;
        const int64_t m = x.rows(), w = x.cols();
        if (gets(n.a)) {
          Tensor da = g;
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < w; ++j) da.data[size_t(i * w + j)] *= r.data[size_t(j)];
          bump(n.a, da);
        }
        if (gets(n.b)) {
          Tensor db = Tensor::zeros(1, w);
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < w; ++j)
              db.data[size_t(j)] += g.data[size_t(i * w + j)] * x.data[size_t(i * w + j)];
          bump(n.b, db);
        }
        break;
      }
      case Op::kAdd:
        if (gets(n.a)) bump(n.a, g);
        if (gets(n.b)) bump(n.b, g);
        break;
      case Op::kSub: {
        if (gets(n.a)) bump(n.a, g);
        if (gets(n.b)) {
          Tensor db = g;
          for (double& v : db.data) v = -v;
          bump(n.b, db);
        }
        break;
      }
      case Op::kMul: {
        if (gets(n.a)) {
          Tensor da = g;
          const Tensor& y = nodes_[size_t(n.b)].val;
          for (size_t i = 0; i < da.data.size(); ++i) da.data[i] *= y.data[i];
          bump(n.a, da);
        }
        if (gets(n.b)) {
          Tensor db = g;
          const Tensor& x = nodes_[size_t(n.a)].val;
          for (size_t i = 0; i < db.data.size(); ++i) db.data[i] *= x.data[i];
          bump(n.b, db);
        }
        break;
      }
      case Op::kNeg: {
        if (gets(n.a)) {
          Tensor da = g;
          for (double& v : da.data) v = -v;
          bump(n.a, da);
        }
        break;
      }
      case Op::kScale: {
        if (gets(n.a)) {
          Tensor da = g;
          for (double& v : da.data) v *= n.s0;
          bump(n.a, da);
        }
        break;
      }
      case Op::kAddS:
        if (gets(n.a)) bump(n.a, g);
        break;
      case Op::kAddSV: {
        if (gets(n.a)) bump(n.a, g);
        if (gets(n.b)) {
          double acc = 0.0;
          for (double v : g.data) acc += v;
          bump(n.b, Tensor::scalar(acc));
        }
        break;
      }
      case Op::kElu: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          Tensor da = g;
          for (size_t i = 0; i < da.data.size(); ++i)
            da.data[i] *= x.data[i] > 0.0 ? 1.0 : n.val.data[i] + 1.0;
          bump(n.a, da);
        }
        break;
      }
      case Op::kExp: {
        if (gets(n.a)) {
          Tensor da = g;
          for (size_t i = 0; i < da.data.size(); ++i) da.data[i] *= n.val.data[i];
          bump(n.a, da);
        }
        break;
      }
      case Op::kLog: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          Tensor da = g;
          for (size_t i = 0; i < da.data.size(); ++i) da.data[i] /= x.data[i];
          bump(n.a, da);
        }
        break;
      }
      case Op::kSqrt: {
        if (gets(n.a)) {
          Tensor da = g;
          for (size_t i = 0; i < da.data.size(); ++i) da.data[i] *= 0.5 / n.val.data[i];
          bump(n.a, da);
        }
        break;
      }
      case Op::kSquare: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          Tensor da = g;
          for (size_t i = 0; i < da.data.size(); ++i) da.data[i] *= 2.0 * x.data[i];
          bump(n.a, da);
        }
        break;
      }
      case Op::kAcos: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          Tensor da = g;
          for (size_t i = 0; i < da.data.size(); ++i)
            da.data[i] *= -1.0 / std::sqrt(1.0 - x.data[i] * x.data[i]);
          bump(n.a, da);
        }
        break;
      }
      case Op::kClamp: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          Tensor da = g;
          for (size_t i = 0; i < da.data.size(); ++i)
            if (x.data[i] < n.s0 || x.data[i] > n.s1) da.data[i] = 0.0;
          bump(n.a, da);
        }
        break;
      }
      case Op::kMax2: {
        const Tensor& x = nodes_[size_t(n.a)].val;
        const Tensor& y = nodes_[size_t(n.b)].val;
        if (gets(n.a)) {
          Tensor da = g;
          for (size_t i = 0; i < da.data.size(); ++i)
            if (x.data[i] < y.data[i]) da.data[i] = 0.0;
          bump(n.a, da);
        }
        if (gets(n.b)) {
          Tensor db = g;
          for (size_t i = 0; i < db.data.size(); ++i)
            if (x.data[i] >= y.data[i]) db.data[i] = 0.0;
          bump(n.b, db);
        }
        break;
      }
      case Op::kRowSum: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          const int64_t m = x.rows(), w = x.cols();
          Tensor da = Tensor::zeros(m, w);
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < w; ++j) da.data[size_t(i * w + j)] = g.data[size_t(i)];
          bump(n.a, da);
        }
        break;
      }
      case Op::kMeanAll: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          Tensor da = Tensor::zeros(x.rows(), x.cols());
          da.shape = x.shape;
          const double gv = g.data[0] / double(x.numel());
          for (double& v : da.data) v = gv;
          bump(n.a, da);
        }
        break;
      }
      case Op::kSumAll: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          Tensor da = Tensor::zeros(x.rows(), x.cols());
          da.shape = x.shape;
          for (double& v : da.data) v = g.data[0];
          bump(n.a, da);
        }
        break;
      }
      case Op::kSliceCols: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          const int64_t m = x.rows(), c = x.cols();
          const int64_t j0 = int64_t(n.s0), w = int64_t(n.s1) - j0;
          Tensor da = Tensor::zeros(m, c);
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < w; ++j)
              da.data[size_t(i * c + j0 + j)] = g.data[size_t(i * w + j)];
          bump(n.a, da);
        }
        break;
      }
      case Op::kConcatCols: {
        const Tensor& x = nodes_[size_t(n.a)].val;
        const Tensor& y = nodes_[size_t(n.b)].val;
        const int64_t m = x.rows(), ca = x.cols(), cb = y.cols();
        if (gets(n.a)) {
          Tensor da = Tensor::zeros(m, ca);
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < ca; ++j)
              da.data[size_t(i * ca + j)] = g.data[size_t(i * (ca + cb) + j)];
          bump(n.a, da);
        }
        if (gets(n.b)) {
          Tensor db = Tensor::zeros(m, cb);
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < cb; ++j)
              db.data[size_t(i * cb + j)] = g.data[size_t(i * (ca + cb) + ca + j)];
          bump(n.b, db);
        }
        break;
      }
      case Op::kDivCol: {
        const Tensor& x = nodes_[size_t(n.a)].val;
        const Tensor& d = nodes_[size_t(n.b)].val;
        const int64_t m = x.rows(), w = x.cols();
        if (gets(n.a)) {
          Tensor da = g;
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < w; ++j) da.data[size_t(i * w + j)] /= d.data[size_t(i)];
          bump(n.a, da);
        }
        if (gets(n.b)) {
          Tensor db = Tensor::zeros(m, 1);
          for (int64_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (int64_t j = 0; j < w; ++j)
              acc -= g.data[size_t(i * w + j)] * n.val.data[size_t(i * w + j)];
            db.data[size_t(i)] = acc / d.data[size_t(i)];
          }
          bump(n.b, db);
        }
        break;
      }
      case Op::kMulCol: {
        const Tensor& x = nodes_[size_t(n.a)].val;
        const Tensor& d = nodes_[size_t(n.b)].val;
        const int64_t m = x.rows(), w = x.cols();
        if (gets(n.a)) {
          Tensor da = g;
          for (int64_t i = 0; i < m; ++i)
            for (int64_t j = 0; j < w; ++j) da.data[size_t(i * w + j)] *= d.data[size_t(i)];
          bump(n.a, da);
        }
        if (gets(n.b)) {
          Tensor db = Tensor::zeros(m, 1);
          for (int64_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (int64_t j = 0; j < w; ++j)
              acc += g.data[size_t(i * w + j)] * x.data[size_t(i * w + j)];
            db.data[size_t(i)] = acc;
          }
          bump(n.b, db);
        }
        break;
      }
      case Op::kCross3: {
        const Tensor& x = nodes_[size_t(n.a)].val;
        const Tensor& y = nodes_[size_t(n.b)].val;
        const int64_t m = x.rows();
        // d(a x b): ga = b x g, gb = g x a (per row).
        if (gets(n.a)) {
          Tensor da = Tensor::zeros(m, 3);
          for (int64_t i = 0; i < m; ++i) {
            const double* v = &y.data[size_t(i * 3)];
            const double* gg = &g.data[size_t(i * 3)];
            double* o = &da.data[size_t(i * 3)];
            o[0] = v[1] * gg[2] - v[2] * gg[1];
            o[1] = v[2] * gg[0] - v[0] * gg[2];
            o[2] = v[0] * gg[1] - v[1] * gg[0];
          }
          bump(n.a, da);
        }
        if (gets(n.b)) {
          Tensor db = Tensor::zeros(m, 3);
          for (int64_t i = 0; i < m; ++i) {
            const double* u = &x.data[size_t(i * 3)];
            const double* gg = &g.data[size_t(i * 3)];
            double* o = &db.data[size_t(i * 3)];
            o[0] = gg[1] * u[2] - gg[2] * u[1];
            o[1] = gg[2] * u[0] - gg[0] * u[2];
            o[2] = gg[0] * u[1] - gg[1] * u[0];
          }
          bump(n.b, db);
        }
        break;
      }
      case Op::kPoseCloud: {
        const Tensor& cloud = *n.ext;
        const int64_t N = cloud.rows();
        const int64_t m = nodes_[size_t(n.a)].val.rows();
        int pids[4] = {n.a, n.b, n.c, n.d};
        for (int bi = 0; bi < 4; ++bi) {
          if (!gets(pids[bi])) continue;
          Tensor dp = Tensor::zeros(m, 3);
          for (int64_t s = 0; s < m; ++s) {
            double acc[3] = {0, 0, 0};
            for (int64_t i = 0; i < N; ++i) {
              const double wgt = bi == 3 ? 1.0 : cloud.data[size_t(i * 3 + bi)];
              const double* gg = &g.data[size_t((s * N + i) * 3)];
              acc[0] += wgt * gg[0];
              acc[1] += wgt * gg[1];
              acc[2] += wgt * gg[2];
            }
            dp.data[size_t(s * 3)] = acc[0];
            dp.data[size_t(s * 3 + 1)] = acc[1];
            dp.data[size_t(s * 3 + 2)] = acc[2];
          }
          bump(pids[bi], dp);
        }
        break;
      }
      case Op::kGroupMax: {
        if (gets(n.a)) {
          const Tensor& x = nodes_[size_t(n.a)].val;
          const int64_t w = x.cols(), mg = n.val.rows();
          Tensor da = Tensor::zeros(x.rows(), w);
          for (int64_t gi = 0; gi < mg; ++gi)
            for (int64_t j = 0; j < w; ++j)
              da.data[size_t(int64_t(n.aux[size_t(gi * w + j)]) * w + j)] +=
                  g.data[size_t(gi * w + j)];
          bump(n.a, da);
        }
        break;
      }
    }
  }
}

}  // namespace hoi
