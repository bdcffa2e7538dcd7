#pragma once

// Reduced articulated robot and the interactable objects: a floating base with
// two 4-joint legs and two 4-joint arms (J=16), plus box / cart / skateboard /
// terrain pieces with canonical point clouds and attachment sites.

#include <array>
#include <string>
#include <vector>

#include "hoi/numerics/rotation.hpp"

namespace hoi::sim {

inline constexpr int kNumJoints = 16;
inline constexpr int kNumBodies = 15;  // root + hips/knees/ankles + shoulders/elbows/wrists/hands

// joint index layout: [leg L: hip_pitch hip_roll knee ankle_pitch] [leg R: ...]
//                     [arm L: sh_pitch sh_roll elbow wrist_pitch] [arm R: ...]
enum JointIndex {
  kLHipPitch = 0, kLHipRoll, kLKnee, kLAnklePitch,
  kRHipPitch, kRHipRoll, kRKnee, kRAnklePitch,
  kLShoulderPitch, kLShoulderRoll, kLElbow, kLWristPitch,
  kRShoulderPitch, kRShoulderRoll, kRElbow, kRWristPitch,
};

// body index layout used by forward kinematics, rewards, and metrics
enum BodyIndex {
  kBodyRoot = 0,
  kBodyLHip, kBodyRHip, kBodyLKnee, kBodyRKnee, kBodyLAnkle, kBodyRAnkle,
  kBodyLShoulder, kBodyRShoulder, kBodyLElbow, kBodyRElbow,
  kBodyLWrist, kBodyRWrist, kBodyLHand, kBodyRHand,
};

struct RobotModel {
  int num_joints = kNumJoints;
  std::array<double, kNumJoints> q_lo{}, q_hi{};     // rad
  std::array<double, kNumJoints> tau_limit{};        // N·m
  std::array<double, kNumJoints> kp{}, kd{};         // PD gains
  std::array<double, kNumJoints> joint_inertia{};    // reflected inertia, kg·m²
  double base_mass = 0;                              // lumped trunk mass, kg
  std::array<double, kNumJoints> link_mass{};        // per-joint link masses, kg
  Vec3 base_inertia{};                               // diagonal, about base frame
  // geometry (m)
  double hip_off_y = 0.12, hip_off_z = -0.05;
  double thigh = 0.325, shank = 0.325;
  double sole_drop = 0.05, toe_x = 0.12, heel_x = -0.06;
  double shoulder_off_y = 0.20, shoulder_off_z = 0.35;
  double upper_arm = 0.25, forearm = 0.25, palm_drop = 0.08;
  double rest_root_height() const { return -hip_off_z + thigh + shank + sole_drop; }
  double total_mass() const;
};

RobotModel make_robot();

// forward kinematics output: world pose of every tracked body
struct BodyKin {
  std::array<Vec3, kNumBodies> p{};
  std::array<Quat, kNumBodies> q{};
  // foot contact points, rigid in the foot frame
  std::array<Vec3, 2> toe{}, heel{};  // [left, right]
  Vec3 foot(int side) const { return p[size_t(kBodyLAnkle + side)]; }
  Vec3 hand(int side) const { return p[size_t(kBodyLHand + side)]; }
};

BodyKin forward_kinematics(const RobotModel& robot, const Vec3& root_p, const Quat& root_q,
                           const std::array<double, kNumJoints>& q);

enum class ObjectKind { kBox, kCart, kSkateboard, kTerrain };

struct Wheel {
  Vec3 pos{};     // hub position in body frame
  double radius = 0;
  // rolling axis is body +y for all wheel sets: the object rolls along body +x
  double joint_friction = 0;  // N·m
  double joint_damping = 0;   // N·m·s/rad
  double armature = 0;        // kg·m²
  double mass = 0;            // kg
};

struct AttachmentSite {
  std::string name;     // which end-effector this site is meant for
  Vec3 pos{};           // body frame
};

struct ObjectModel {
  ObjectKind kind = ObjectKind::kBox;
  std::string name;
  double mass = 1.0;
  Vec3 inertia{};                       // diagonal, body frame
  Vec3 half_extents{};                  // collision box of the main body
  Vec3 geom_center{};                   // collision box center in body frame
  std::vector<Wheel> wheels;
  std::vector<AttachmentSite> sites;
  std::vector<Vec3> cloud;              // canonical point cloud (unscaled prior)
  bool is_static = false;               // terrain pieces do not integrate
  double rest_height = 0;               // body origin height when resting on flat ground
  std::vector<Vec3> contact_points() const;  // body-frame points for ground contact
};

// canonical clouds are sampled at a fixed size by farthest-point sampling
inline constexpr int kCloudSize = 64;

ObjectModel make_box();
ObjectModel make_cart();
ObjectModel make_skateboard();
// terrain pieces: a platform slab, a 15-degree slope, and a three-step stair
ObjectModel make_platform();
ObjectModel make_slope();
ObjectModel make_stair();

// deterministic farthest-point downsampling of a candidate surface set
std::vector<Vec3> farthest_point_sample(const std::vector<Vec3>& candidates, int n);

}  // namespace hoi::sim
