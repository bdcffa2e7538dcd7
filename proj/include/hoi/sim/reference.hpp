#pragma once

// Scripted kinematic reference motions for the interaction tasks: a phase
// variable, joint and body trajectories, object trajectories, per-frame
// contact specifications with target points, and foot contact flags.

#include <string>
#include <vector>

#include "hoi/sim/world.hpp"

namespace hoi::sim {

enum class Task {
  kCarryBox,
  kPushCart,
  kPullCart,
  kSkateboard,
  kCartWithBox,
  kTerrainCarry,
};

Task task_from_string(const std::string& s);  // throws ConfigError on unknown names
const char* task_name(Task t);

// one required robot-object contact at one frame
struct ContactSpec {
  int object = 0;  // index into the frame's object list
  int site = 0;    // attachment site on that object
  int ee = kLeftHand;
  bool mask = false;  // whether the contact is required at this frame
  Vec3 p_tgt{};       // world-frame target point for the end effector
};

struct RefFrame {
  double phase = 0;  // strictly increasing, 0 at the start, 1 at the end
  std::array<double, kNumJoints> q{}, qd{};
  RigidState root;
  std::array<Vec3, kNumBodies> body_p{};
  std::array<Quat, kNumBodies> body_q{};
  std::vector<RigidState> objects;
  std::array<bool, 2> feet_contact{};
  std::vector<ContactSpec> contacts;
  // tracked body velocities: root linear, root angular, feet, hands
  std::array<Vec3, 6> body_v{};
};

struct ReferenceMotion {
  Task task = Task::kCarryBox;
  double fps = 50.0;
  int num_objects = 0;
  std::vector<RefFrame> frames;
  double duration() const { return frames.empty() ? 0.0 : double(frames.size() - 1) / fps; }
};

// objects and terrain pieces a task is set in, in observation-slot order
std::vector<ObjectModel> task_objects(Task t);
std::vector<TerrainPiece> task_terrain(Task t);

// deterministic scripted reference; duration is clamped to at least 2 s
ReferenceMotion generate_reference(Task task, double duration);

// world state matching frame 0 of the reference
WorldState init_state_from_reference(const World& w, const ReferenceMotion& ref);

// planar two-link reach used by the reference scripts: returns proximal pitch
// and distal flexion for a target (dx, dz) below the chain root; flex_backward
// selects the knee convention (distal flexes to -x), otherwise the elbow one
std::array<double, 2> two_link_ik(double dx, double dz, double l1, double l2, bool flex_backward);

}  // namespace hoi::sim
