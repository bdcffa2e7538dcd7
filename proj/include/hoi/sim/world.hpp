#pragma once

// Rigid-body stepping at 200 Hz: decoupled PD-driven joints, a floating base
// coupled to the ground through foot contact impulses, underactuated wheeled
// objects with bilateral lateral-slip rows, grasp springs, terrain height
// queries, and scheduled external pushes.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hoi/sim/env_params.hpp"
#include "hoi/sim/model.hpp"

namespace hoi::sim {

struct SimConfig {
  double dt = 1.0 / 200.0;
  double gravity = 9.81;
  double baumgarte = 0.2;   // positional bias factor for contact impulses
  double slop = 5e-5;       // tolerated resting penetration, m
  double max_depth = 1e-4;  // hard non-penetration backstop, m
  double pgs_tol = 1e-12;
  int pgs_max_iters = 256;
  double restitution_threshold = 0.2;  // m/s approach speed before bounce
  double hand_spring_k = 400, hand_spring_c = 30;
  double foot_spring_k = 4000, foot_spring_c = 200;
  // foot contact labeling (height above support, point speed, hold frames)
  double label_h = 0.14;
  double label_v = 1.0;
  int label_hold = 2;
  double action_scale = 0.25;  // rad per unit action
};

enum class TerrainProfile { kPlatform, kSlopeUp, kStair };

struct TerrainPiece {
  TerrainProfile profile = TerrainProfile::kPlatform;
  double x0 = 0;     // world x where the piece starts
  double scale = 1;  // uniform scale from randomization
  double height_at(double x, double y) const;
};

// ground height under (x, y): flat zero plus any terrain pieces
double terrain_height(const std::vector<TerrainPiece>& terrain, double x, double y);

struct World {
  RobotModel robot;
  std::vector<ObjectModel> objects;  // dynamic bodies first; static pieces flagged
  std::vector<TerrainPiece> terrain;
  SimConfig cfg;
};

struct RigidState {
  Vec3 p{};
  Quat q{};
  Vec3 v{}, w{};      // world-frame linear / angular velocity
  Vec3 a{}, alpha{};  // accelerations measured over the last step
};

struct FootLabelState {
  bool label = false;
  int streak = 0;  // consecutive frames the opposite condition held
};

struct WorldState {
  double t = 0;
  std::array<double, kNumJoints> q{}, qd{};
  RigidState root;
  std::vector<RigidState> objects;
  std::array<FootLabelState, 2> feet{};
  std::array<double, 2> foot_normal_force{};  // N, averaged over the step
  // previous body-frame foot contact points, for the joint-driven conveyor term
  std::array<Vec3, 2> prev_toe_local{}, prev_heel_local{};
  bool have_prev_foot = false;
};

// end-effector ids used by grasp commands and contact specs
enum EndEffector { kLeftHand = 0, kRightHand = 1, kLeftFoot = 2, kRightFoot = 3 };
const char* ee_name(int ee);

struct GraspCommand {
  int object = 0;
  int site = 0;
  int ee = kLeftHand;
  bool active = false;
};

struct StepForces {
  std::array<double, 2> foot_normal{};   // N
  std::array<double, 2> foot_impulse{};  // N·s, normal impulse accumulated this step
  std::vector<double> grasp_force;       // N, one per grasp command
  Vec3 push{};                           // external push applied this step
};

// raw thresholds, no hysteresis
bool foot_contact_raw(double h, double v, const SimConfig& cfg);
// hysteresis update: a flip requires the new condition on `hold` consecutive frames
bool update_foot_label(FootLabelState& st, bool raw, int hold);

// tau = kp (q_target - q) - kd qd, then clamped to the joint torque limit
double pd_torque(double kp, double kd, double q_target, double q, double qd, double tau_limit);

// q_target = q + scale * a, clamped to joint limits
std::array<double, kNumJoints> action_to_target(const RobotModel& robot,
                                                const std::array<double, kNumJoints>& q,
                                                const std::vector<double>& action, double scale);

// one 200 Hz substep; throws RuntimeFault with a state dump if the state
// goes non-finite
WorldState step(const World& w, const WorldState& s, const std::array<double, kNumJoints>& tau,
                const EnvParams& env, const std::vector<GraspCommand>& grasps,
                StepForces* forces = nullptr);

// standing rest state: zero joints, soles engaged at the resting penetration
WorldState rest_state(const World& w);

// world construction for a task: robot plus that task's objects and terrain,
// with EnvParams applied (masses, scales, wheel parameters)
World make_world_for_objects(const std::vector<ObjectModel>& objects,
                             const std::vector<TerrainPiece>& terrain, const EnvParams& env);

}  // namespace hoi::sim
