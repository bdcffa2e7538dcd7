#pragma once

#include <string>
#include <vector>

#include "hoi/numerics/serialize.hpp"
#include "hoi/numerics/tape.hpp"
#include "hoi/rng.hpp"

namespace hoi {

// Plain fully connected net: ELU between layers, linear head. Weights are
// stored [in x out] so a batch of row vectors multiplies from the left.
struct MlpParams {
  std::vector<Tensor> W;
  std::vector<Tensor> b;
  int64_t in_dim = 0, out_dim = 0;

  int64_t layers() const { return int64_t(W.size()); }
};

// Xavier-uniform init; `out_gain` scales the final layer (small values make
// the initial outputs near zero, which keeps early policy targets tame).
MlpParams mlp_init(int64_t in, const std::vector<int64_t>& hidden, int64_t out, Rng& rng,
                   double out_gain = 1.0);

// Inference path. Identical arithmetic order to the taped path.
Tensor mlp_forward(const MlpParams& p, const Tensor& x);

// Leaf handles for one optimization step.
struct MlpVars {
  std::vector<Var> W, b;
};
MlpVars mlp_leaves(Tape& t, const MlpParams& p);
// Forward recorded on the tape for differentiation.
Var mlp_forward(Tape& t, const MlpVars& v, Var x);

// Activations of a chosen hidden layer (0-based), eval path; used to read a
// trunk feature without re-running the net.
Tensor mlp_hidden(const MlpParams& p, const Tensor& x, int64_t layer);

// Checkpoint flattening: layers appear as prefix.W0, prefix.b0, prefix.W1, ...
void mlp_append_named(NamedTensors& out, const std::string& prefix, const MlpParams& p);
// Rebuilds a net of the declared dimensions from a checkpoint; throws
// ContractError on missing layers or shape mismatches.
MlpParams mlp_from_named(const NamedTensors& named, const std::string& prefix, int64_t in,
                         const std::vector<int64_t>& hidden, int64_t out);

}  // namespace hoi
