#pragma once

#include <vector>

#include "hoi/numerics/tensor.hpp"

namespace hoi {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid until the tape is reset.
struct Var {
  Tape* tp = nullptr;
  int id = -1;
  const Tensor& val() const;
  const Tensor& grad() const;
};

// Reverse-mode autodiff over tensor-level ops. Values are computed eagerly as
// the graph is built; backward() replays the ops in reverse. Nodes only ever
// reference earlier nodes, so creation order is a valid topological order.
class Tape {
 public:
  enum class Op {
    kLeaf, kConst, kMatMul, kAddRow, kMulRow, kAdd, kSub, kMul, kNeg, kScale,
    kAddS, kAddSV, kElu, kExp, kLog, kSqrt, kSquare, kAcos, kClamp, kMax2,
    kRowSum, kMeanAll, kSumAll, kSliceCols, kConcatCols, kDivCol, kMulCol,
    kCross3, kPoseCloud, kGroupMax
  };

  struct Node {
    Op op;
    int a = -1, b = -1, c = -1, d = -1;
    Tensor val;
    Tensor grad;
    double s0 = 0.0, s1 = 0.0;
    std::vector<int32_t> aux;    // argmax rows for kGroupMax
    const Tensor* ext = nullptr; // borrowed constant (point cloud)
    bool needs_grad = false;
  };

  // Differentiable leaf (parameter or input we want gradients for).
  Var leaf(Tensor v);
  // Non-differentiable leaf; backward never propagates into it.
  Var constant(Tensor v);

  Var matmul(Var a, Var b);              // [m,k]x[k,n]
  Var add_row(Var a, Var r);             // a[m,n] + r[1,n] broadcast over rows
  Var mul_row(Var a, Var r);             // a[m,n] * r[1,n]
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);                 // elementwise
  Var neg(Var a);
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  Var add_scalar_var(Var a, Var s);      // a[m,n] + s[1] broadcast
  Var elu(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var sqrt(Var a);
  Var square(Var a);
  Var acos(Var a);                       // caller keeps inputs inside (-1, 1)
  Var clamp(Var a, double lo, double hi);
  Var max2(Var a, Var b);                // elementwise max; ties keep a
  Var row_sum(Var a);                    // [m,n] -> [m,1]
  Var mean_all(Var a);                   // -> [1]
  Var sum_all(Var a);                    // -> [1]
  Var slice_cols(Var a, int64_t j0, int64_t j1);
  Var concat_cols(Var a, Var b);
  Var div_col(Var a, Var c);             // a[m,n] / c[m,1]
  Var mul_col(Var a, Var c);             // a[m,n] * c[m,1]
  Var cross3(Var a, Var b);              // per-row cross product, [m,3]
  // Per-row rigid placement of a fixed cloud: rows of the output hold
  // b1_s*P_i.x + b2_s*P_i.y + b3_s*P_i.z + p_s for sample s, point i.
  // `cloud` [N,3] is borrowed and must outlive the tape.
  Var pose_cloud(Var b1, Var b2, Var b3, Var p, const Tensor& cloud);
  // Max over blocks of `group` consecutive rows, per column.
  Var group_max(Var a, int64_t group);

  // Seeds the output gradient and accumulates gradients into every node that
  // needs them. A non-scalar output requires an explicit seed.
  void backward(Var out);
  void backward(Var out, const Tensor& seed);

  const Tensor& val(Var v) const { return nodes_[size_t(v.id)].val; }
  const Tensor& grad(Var v) const;
  size_t size() const { return nodes_.size(); }
  void reset() { nodes_.clear(); }

 private:
  Var push(Node n);
  std::vector<Node> nodes_;
};

inline const Tensor& Var::val() const { return tp->val(*this); }
inline const Tensor& Var::grad() const { return tp->grad(*this); }

inline Var operator+(Var a, Var b) { return a.tp->add(a, b); }
inline Var operator-(Var a, Var b) { return a.tp->sub(a, b); }
inline Var operator*(Var a, Var b) { return a.tp->mul(a, b); }
inline Var operator*(double s, Var a) { return a.tp->scale(a, s); }
inline Var operator-(Var a) { return a.tp->neg(a); }

}  // namespace hoi
