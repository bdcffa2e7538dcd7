#include "hoi/sim/env_params.hpp"

#include <cmath>

#include "hoi/error.hpp"

namespace hoi::sim {

std::vector<double> EnvParams::to_vector() const {
  std::vector<double> v;
  v.reserve(kVectorDim);
  v.push_back(link_mass_scale);
  v.push_back(com_offset[0]);
  v.push_back(com_offset[1]);
  v.push_back(com_offset[2]);
  v.push_back(static_friction);
  v.push_back(dynamic_friction);
  v.push_back(kp_scale);
  v.push_back(kd_scale);
  v.push_back(action_delay_ms / 100.0);
  v.push_back(obj_dynamic_friction);
  v.push_back(obj_static_ratio);
  v.push_back(restitution);
  v.push_back(box_mass);
  v.push_back(box_scale);
  v.push_back(cart_mass / 10.0);
  v.push_back(cart_wheel_mass);
  v.push_back(cart_wheel_friction * 10.0);
  v.push_back(cart_wheel_damping * 10.0);
  v.push_back(cart_scale);
  v.push_back(skate_mass);
  v.push_back(skate_wheel_mass);
  v.push_back(skate_wheel_armature * 1e4);
  v.push_back(skate_wheel_damping * 1e3);
  v.push_back(terrain_scale);
  for (double jo : joint_offset) v.push_back(jo * 100.0);
  check(int(v.size()) == kVectorDim, "EnvParams::to_vector dimension drifted");
  return v;
}

EnvParams EnvParams::nominal() { return EnvParams{}; }

void RandomizationConfig::validate() const {
  const RandRange* all[] = {&link_mass_scale, &com_offset,        &static_friction,
                            &dynamic_friction, &joint_offset,      &kp_scale,
                            &kd_scale,         &action_delay_ms,   &obj_dynamic_friction,
                            &obj_static_ratio, &restitution,       &box_mass,
                            &box_scale,        &cart_mass,         &cart_wheel_mass,
                            &cart_wheel_friction, &cart_wheel_damping, &cart_scale,
                            &skate_mass,       &skate_wheel_mass,  &skate_wheel_armature,
                            &skate_wheel_damping, &skate_scale,    &terrain_scale,
                            &push_force_scale};
  for (const RandRange* r : all)
    check_config(r->lo <= r->hi && std::isfinite(r->lo) && std::isfinite(r->hi),
                 "randomization range must be ordered and finite");
  check_config(push_min_interval >= 0 && push_duration >= 0 && push_horizon >= 0,
               "push schedule parameters must be nonnegative");
}

EnvParams randomize(const RandomizationConfig& cfg, Rng& rng) {
  cfg.validate();
  EnvParams p;
  auto u = [&rng](const RandRange& r) { return rng.uniform(r.lo, r.hi); };
  p.link_mass_scale = u(cfg.link_mass_scale);
  for (auto& c : p.com_offset) c = u(cfg.com_offset);
  p.static_friction = u(cfg.static_friction);
  p.dynamic_friction = u(cfg.dynamic_friction);
  for (auto& jo : p.joint_offset) jo = u(cfg.joint_offset);
  p.kp_scale = u(cfg.kp_scale);
  p.kd_scale = u(cfg.kd_scale);
  p.action_delay_ms = u(cfg.action_delay_ms);
  p.obj_dynamic_friction = u(cfg.obj_dynamic_friction);
  p.obj_static_ratio = u(cfg.obj_static_ratio);
  p.restitution = u(cfg.restitution);
  p.box_mass = u(cfg.box_mass);
  p.box_scale = u(cfg.box_scale);
  p.cart_mass = u(cfg.cart_mass);
  p.cart_wheel_mass = u(cfg.cart_wheel_mass);
  p.cart_wheel_friction = u(cfg.cart_wheel_friction);
  p.cart_wheel_damping = u(cfg.cart_wheel_damping);
  p.cart_scale = u(cfg.cart_scale);
  p.skate_mass = u(cfg.skate_mass);
  p.skate_wheel_mass = u(cfg.skate_wheel_mass);
  p.skate_wheel_armature = u(cfg.skate_wheel_armature);
  p.skate_wheel_damping = u(cfg.skate_wheel_damping);
  p.skate_scale = u(cfg.skate_scale);
  p.terrain_scale = u(cfg.terrain_scale);
  p.push_force_scale = u(cfg.push_force_scale);
  // pushes at least push_min_interval apart, horizontal, random heading;
  // stored as weight multiples, the stepper scales by m g
  double t = cfg.push_min_interval + rng.uniform(0.0, cfg.push_min_interval);
  while (t < cfg.push_horizon) {
    const double yaw = rng.uniform(0.0, 2.0 * M_PI);
    const double mag = u(cfg.push_force_scale);
    PushEvent ev;
    ev.t = t;
    ev.duration = cfg.push_duration;
    ev.force = {mag * std::cos(yaw), mag * std::sin(yaw), 0.0};
    p.pushes.push_back(ev);
    t += cfg.push_min_interval + rng.uniform(0.0, cfg.push_min_interval);
  }
  return p;
}

}  // namespace hoi::sim
