#pragma once

// Finite-difference oracle for the tape: rebuilds the graph from perturbed
// leaves (values are eager, so rebuilding re-evaluates) and compares central
// differences against reverse-mode gradients.

#include <cmath>
#include <functional>
#include <vector>

#include "hoi/numerics/tape.hpp"
#include "hoi/rng.hpp"

namespace hoi::testing {

using GraphFn = std::function<Var(Tape&, std::vector<Var>&)>;

// Max mixed relative error |ad - fd| / max(1, |ad|, |fd|) over all leaf
// elements. Leaves a graph never touches count as zero gradient.
inline double gradcheck(std::vector<Tensor> leaves, const GraphFn& build, double h = 1e-5) {
  auto eval = [&](const std::vector<Tensor>& xs) {
    Tape t;
    std::vector<Var> vs;
    for (const auto& x : xs) vs.push_back(t.leaf(x));
    Var out = build(t, vs);
    return out.val()[0];
  };

  Tape t;
  std::vector<Var> vs;
  for (const auto& x : leaves) vs.push_back(t.leaf(x));
  Var out = build(t, vs);
  t.backward(out);

  double worst = 0.0;
  for (size_t li = 0; li < leaves.size(); ++li) {
    const Tensor& gt = t.val(vs[li]);  // shape reference
    for (int64_t e = 0; e < gt.numel(); ++e) {
      double ad = 0.0;
      {
        // Unreached leaves have no grad buffer.
        const auto& node_grad = [&]() -> const Tensor* {
          try {
            return &vs[li].grad();
          } catch (...) {
            return nullptr;
          }
        }();
        if (node_grad) ad = node_grad->data[size_t(e)];
      }
      std::vector<Tensor> xp = leaves, xm = leaves;
      xp[li].data[size_t(e)] += h;
      xm[li].data[size_t(e)] -= h;
      const double fd = (eval(xp) - eval(xm)) / (2.0 * h);
      const double err = std::abs(ad - fd) / std::max({1.0, std::abs(ad), std::abs(fd)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

// Randomly shaped, randomly composed graph; returns its gradcheck error.
// Ops are arranged so every input stays inside the smooth interior of its
// domain (no finite difference across a kink).
inline double random_graph_check(uint64_t seed) {
  Rng rng = Rng::keyed(seed, 0xabcdef, 17);
  auto rand_leaf = [&](int64_t r, int64_t c) {
    Tensor t = Tensor::zeros(r, c);
    for (double& v : t.data) {
      const double mag = rng.uniform(0.2, 1.2);
      v = rng.uniform01() < 0.5 ? -mag : mag;
    }
    return t;
  };

  const int64_t m = 1 + int64_t(rng.uniform_int(3));
  int64_t c = 1 + int64_t(rng.uniform_int(4));
  std::vector<Tensor> leaves = {rand_leaf(m, c)};
  struct Step {
    int op;
    int64_t arg;
  };
  std::vector<Step> steps;
  const int n_ops = 3 + rng.uniform_int(5);
  for (int i = 0; i < n_ops; ++i) {
    const int op = rng.uniform_int(15);
    Step s{op, 0};
    switch (op) {
      case 6:
      case 7:
      case 8:
        leaves.push_back(rand_leaf(m, c));
        break;
      case 9: {
        const int64_t k = 1 + int64_t(rng.uniform_int(4));
        leaves.push_back(rand_leaf(c, k));
        s.arg = k;
        c = k;
        break;
      }
      case 10:
      case 11:
        leaves.push_back(rand_leaf(1, c));
        break;
      case 14: {
        leaves.push_back(rand_leaf(m, 2));
        c += 2;
        break;
      }
      case 12:
      case 13:
        break;
      default:
        break;
    }
    steps.push_back(s);
  }

  static const Tensor kCloud = Tensor::from(3, 3, {0.3, -0.7, 0.2, 1.1, 0.4, -0.2, -0.5, 0.9, 0.6});

  auto build = [&, m](Tape& t, std::vector<Var>& vs) -> Var {
    Var x = vs[0];
    size_t next = 1;
    for (const Step& s : steps) {
      switch (s.op) {
        case 0: x = t.elu(x); break;
        case 1: x = t.exp(t.scale(x, 0.3)); break;
        case 2: x = t.log(t.add_scalar(t.square(x), 0.3)); break;
        case 3: x = t.sqrt(t.add_scalar(t.square(x), 0.3)); break;
        case 4: x = t.square(x); break;
        case 5: x = t.add_scalar(t.scale(x, -1.3), 0.7); break;
        case 6: x = t.add(x, vs[next++]); break;
        case 7: x = t.sub(x, vs[next++]); break;
        case 8: x = t.mul(x, vs[next++]); break;
        case 9: x = t.matmul(x, vs[next++]); break;
        case 10: x = t.add_row(x, vs[next++]); break;
        case 11: x = t.mul_row(x, vs[next++]); break;
        case 12: x = t.div_col(x, t.add_scalar(t.square(t.row_sum(x)), 0.5)); break;
        case 13: x = t.mul_col(x, t.add_scalar(t.scale(t.row_sum(x), 0.1), 1.0)); break;
        case 14: x = t.concat_cols(x, vs[next++]); break;
      }
    }
    // Exercise the geometry ops on a fixed-width tail when the shape allows.
    if (t.val(x).cols() >= 3) {
      Var tri = t.slice_cols(x, 0, 3);
      Var crs = t.cross3(tri, t.add_scalar(t.scale(tri, -0.4), 0.9));
      Var posed = t.pose_cloud(tri, crs, t.add_scalar(tri, 0.3), crs, kCloud);
      x = t.add_scalar_var(x, t.mean_all(t.square(posed)));
      // acos on a value pinned inside (-1, 1)
      Var bounded = t.scale(t.exp(t.neg(t.square(t.row_sum(x)))), 0.7);
      x = t.concat_cols(x, t.acos(bounded));
    }
    return t.mean_all(t.square(x));
  };

  (void)m;
  return gradcheck(leaves, build);
}

}  // namespace hoi::testing
