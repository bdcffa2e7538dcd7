#pragma once

#include <stdexcept>
#include <string>

namespace hoi {

// API misuse: shape mismatches, out-of-contract arguments. Bugs, not inputs.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Bad user input: malformed config, unknown keys, missing files at startup.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fault while running: NaN in dynamics or losses, I/O failure mid-run.
struct RuntimeFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw ContractError(msg);
}

inline void check_config(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

inline void check_runtime(bool cond, const std::string& msg) {
  if (!cond) throw RuntimeFault(msg);
}

}  // namespace hoi
