#pragma once

// Domain randomization: sampled physical parameters for the robot and the
// objects, plus the external push schedule. Every value is drawn uniformly
// from a configured range; the critic observes the flattened vector.

#include <array>
#include <vector>

#include "hoi/numerics/rotation.hpp"
#include "hoi/rng.hpp"
#include "hoi/sim/model.hpp"

namespace hoi::sim {

struct PushEvent {
  double t = 0;         // s
  double duration = 0;  // s
  Vec3 force{};         // N, horizontal
};

struct EnvParams {
  // robot dynamics
  double link_mass_scale = 1.0;
  Vec3 com_offset{};  // m, base frame
  double static_friction = 1.0;
  double dynamic_friction = 0.8;
  // actuation
  std::array<double, kNumJoints> joint_offset{};  // rad, sensing offset
  double kp_scale = 1.0, kd_scale = 1.0;
  double action_delay_ms = 0.0;
  // object surfaces
  double obj_dynamic_friction = 0.55;
  double obj_static_ratio = 1.5;
  double restitution = 0.0;
  // per-object physicals
  double box_mass = 1.3, box_scale = 1.0;
  double cart_mass = 13.0, cart_wheel_mass = 0.3;
  double cart_wheel_friction = 0.05, cart_wheel_damping = 0.05, cart_scale = 1.0;
  double skate_mass = 3.269, skate_wheel_mass = 0.15;
  double skate_wheel_armature = 5e-5, skate_wheel_damping = 5e-4, skate_scale = 1.0;
  double terrain_scale = 1.0;
  // external perturbation
  double push_force_scale = 0.0;  // x robot weight
  std::vector<PushEvent> pushes;

  // fixed-order flattening observed by the critic (push schedule excluded)
  std::vector<double> to_vector() const;
  static constexpr int kVectorDim = 24 + kNumJoints;
  static EnvParams nominal();
};

struct RandRange {
  double lo = 0, hi = 0;
};

struct RandomizationConfig {
  RandRange link_mass_scale{0.9, 1.1};
  RandRange com_offset{-0.02, 0.02};
  RandRange static_friction{0.3, 1.6};
  RandRange dynamic_friction{0.3, 1.2};
  RandRange joint_offset{-0.01, 0.01};
  RandRange kp_scale{0.9, 1.1};
  RandRange kd_scale{0.9, 1.1};
  RandRange action_delay_ms{40, 120};
  RandRange obj_dynamic_friction{0.3, 0.8};
  RandRange obj_static_ratio{1.0, 2.0};
  RandRange restitution{0.0, 0.2};
  RandRange box_mass{1.0, 2.0};
  RandRange box_scale{0.9, 1.1};
  RandRange cart_mass{11.0, 13.0};
  RandRange cart_wheel_mass{0.2, 0.4};
  RandRange cart_wheel_friction{0.01, 0.1};
  RandRange cart_wheel_damping{0.01, 0.1};
  RandRange cart_scale{0.9, 1.1};
  RandRange skate_mass{2.0, 5.0};
  RandRange skate_wheel_mass{0.1, 0.2};
  RandRange skate_wheel_armature{0.0, 1e-4};
  RandRange skate_wheel_damping{0.0, 1e-3};
  RandRange skate_scale{0.9, 1.1};
  RandRange terrain_scale{0.98, 1.02};
  RandRange push_force_scale{0.2, 0.5};
  double push_min_interval = 2.0;  // s
  double push_duration = 0.1;     // s
  double push_horizon = 60.0;     // schedule length, s
  void validate() const;          // every range ordered lo <= hi
};

EnvParams randomize(const RandomizationConfig& cfg, Rng& rng);

}  // namespace hoi::sim
