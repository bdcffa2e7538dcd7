#pragma once

// JSONL trajectory logging: one frame per line with simulated state, required
// contacts, and optional reference / body-position / reward-breakdown blocks.
// Numbers survive a write-read round trip bit-exactly.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hoi/sim/world.hpp"

namespace hoi::sim {

struct ContactRecord {
  int object = 0;
  int ee = 0;
  bool mask = false;
  double force = 0;
  Vec3 tgt{};
};

struct RefSnapshot {
  std::vector<double> q;
  RigidState root;
  std::vector<RigidState> objects;
  std::array<bool, 2> feet{};
};

struct TrajFrame {
  double t = 0;
  std::vector<double> q, qd;
  RigidState root;
  std::vector<RigidState> objects;
  std::array<bool, 2> feet{};
  std::vector<ContactRecord> contacts;
  // optional blocks
  std::vector<Vec3> bodies;  // tracked body world positions, when logged
  std::optional<RefSnapshot> ref;
  std::vector<std::pair<std::string, double>> rewards;  // per-term weighted values
};

void write_trajectory(const std::string& path, const std::vector<TrajFrame>& frames);
std::vector<TrajFrame> read_trajectory(const std::string& path);  // throws ContractError

class Env;
// snapshot the environment's current frame, with grasp contacts resolved to
// world-frame site targets
TrajFrame capture_frame(const Env& env, bool with_ref = false);

}  // namespace hoi::sim
