#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hoi/numerics/tensor.hpp"

namespace hoi {

// Checkpoint container: ordered list of named tensors. Order is part of the
// format so files are byte-stable for identical contents.
using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

// Binary layout: magic "HAICWM1", version byte, u64 entry count, then per
// entry u32 name length + UTF-8 name, u32 rank, u64 dims, row-major doubles.
// All integers and doubles little-endian.
void save_params(const std::string& path, const NamedTensors& params);
NamedTensors load_params(const std::string& path);

const Tensor* find_param(const NamedTensors& params, const std::string& name);

}  // namespace hoi
