#include "hoi/sim/env.hpp"

#include <algorithm>
#include <cmath>

#include "hoi/error.hpp"

namespace hoi::sim {

namespace {
constexpr double kCtrlDt = 0.02;  // 50 Hz

Vec3 sole_mid(const BodyKin& k, int side) {
  return 0.5 * (k.toe[size_t(side)] + k.heel[size_t(side)]);
}
}  // namespace

Env::Env(const EnvConfig& cfg) : cfg_(cfg) {
  cfg_.reward.validate();
  if (cfg_.randomize) cfg_.rand.validate();
  ref_ = generate_reference(cfg_.task, cfg_.episode_s);
  reset(0);
}

const RefFrame& Env::ref_frame() const {
  const int i = std::min(frame_, int(ref_.frames.size()) - 1);
  return ref_.frames[size_t(i)];
}

void Env::build_world(uint64_t seed) {
  if (cfg_.fixed_params) {
    params_ = *cfg_.fixed_params;
  } else if (cfg_.randomize) {
    Rng rng = Rng::keyed(seed, 0x656e76);
    params_ = randomize(cfg_.rand, rng);
  } else {
    params_ = EnvParams{};
  }
  world_ = make_world_for_objects(task_objects(cfg_.task), task_terrain(cfg_.task), params_);
}

void Env::refresh_kinematics() {
  kin_ = forward_kinematics(world_.robot, state_.root.p, state_.root.q, state_.q);
}

void Env::reset(uint64_t seed) {
  build_world(seed);
  state_ = init_state_from_reference(world_, ref_);
  frame_ = 0;
  delay_ticks_ = int(std::lround(params_.action_delay_ms / (kCtrlDt * 1e3)));
  action_fifo_.clear();
  for (int i = 0; i < delay_ticks_; ++i)
    action_fifo_.push_back(std::vector<double>(kNumJoints, 0.0));
  applied_action_.assign(kNumJoints, 0.0);
  prev_applied_action_.assign(kNumJoints, 0.0);
  const auto& specs = ref_.frames[0].contacts;
  grasps_.assign(specs.size(), GraspCommand{});
  engaged_.assign(specs.size(), false);
  forces_ = StepForces{};
  refresh_kinematics();
  prev_ee_ = {sole_mid(kin_, 0), sole_mid(kin_, 1), kin_.hand(0), kin_.hand(1)};
  air_time_ = {0, 0};
  prev_grounded_ = {state_.feet[0].label, state_.feet[1].label};
}

rewards::RewardReference Env::make_reference_inputs(const RefFrame& f) const {
  rewards::RewardReference r;
  r.q.assign(f.q.begin(), f.q.end());
  r.qd.assign(f.qd.begin(), f.qd.end());
  r.root_p = f.root.p;
  r.root_q = f.root.q;
  for (int b = kBodyLShoulder; b <= kBodyRHand; ++b) {
    r.up_p.push_back(f.body_p[size_t(b)]);
    r.up_q.push_back(f.body_q[size_t(b)]);
  }
  for (int b = kBodyLHip; b <= kBodyRAnkle; ++b) {
    r.low_p.push_back(f.body_p[size_t(b)]);
    r.low_q.push_back(f.body_q[size_t(b)]);
  }
  r.body_vel.assign(f.body_v.begin(), f.body_v.end());
  for (const auto& o : f.objects) {
    r.obj_p.push_back(o.p);
    r.obj_q.push_back(o.q);
  }
  r.feet_contact = f.feet_contact;
  return r;
}

EnvStepResult Env::step(const std::vector<double>& action) {
  check(int(action.size()) == kNumJoints, "action dimension mismatch");
  for (double a : action) check_runtime(std::isfinite(a), "non-finite action");

  // constant-latency FIFO
  action_fifo_.push_back(action);
  prev_applied_action_ = applied_action_;
  applied_action_ = action_fifo_.front();
  action_fifo_.pop_front();

  const RobotModel& robot = world_.robot;
  const std::array<double, kNumJoints> q_target =
      action_to_target(robot, state_.q, applied_action_, world_.cfg.action_scale);

  ++frame_;
  const RefFrame& f = ref_frame();

  // grasp hysteresis against the simulated object sites
  const auto& specs = f.contacts;
  std::vector<bool> engage_event(specs.size(), false);
  for (size_t i = 0; i < specs.size(); ++i) {
    const ContactSpec& c = specs[i];
    const ObjectModel& om = world_.objects[size_t(c.object)];
    const RigidState& os = state_.objects[size_t(c.object)];
    const Vec3 site = os.p + quat_rotate(os.q, om.sites[size_t(c.site)].pos);
    const Vec3 ee = c.ee == kLeftHand || c.ee == kRightHand ? kin_.hand(c.ee - kLeftHand)
                                                            : sole_mid(kin_, c.ee - kLeftFoot);
    const double d = norm(site - ee);
    const bool was = engaged_[i];
    if (!was && c.mask && d < cfg_.engage_radius) {
      engaged_[i] = true;
      engage_event[i] = true;
    } else if (was && (!c.mask || d > cfg_.release_radius)) {
      engaged_[i] = false;
    }
    grasps_[i] = GraspCommand{c.object, c.site, c.ee, engaged_[i]};
  }

  // physics substeps
  std::array<double, kNumJoints> tau{};
  for (int sub = 0; sub < cfg_.substeps; ++sub) {
    for (int j = 0; j < kNumJoints; ++j) {
      const size_t sj = size_t(j);
      const double q_sensed = state_.q[sj] + params_.joint_offset[sj];
      tau[sj] = pd_torque(robot.kp[sj] * params_.kp_scale, robot.kd[sj] * params_.kd_scale,
                          q_target[sj], q_sensed, state_.qd[sj], robot.tau_limit[sj]);
    }
    state_ = sim::step(world_, state_, tau, params_, grasps_, &forces_);
  }
  refresh_kinematics();

  // foot bookkeeping at the control rate
  std::array<rewards::FootState, 2> feet{};
  std::vector<double> impacts;
  const double mg = robot.total_mass() * world_.cfg.gravity;
  for (int s = 0; s < 2; ++s) {
    const size_t ss = size_t(s);
    const bool grounded = state_.feet[ss].label;
    feet[ss].grounded = grounded;
    feet[ss].touchdown = grounded && !prev_grounded_[ss];
    if (feet[ss].touchdown) {
      feet[ss].air_time = air_time_[ss];
      // normalized excess over the tolerated static load
      impacts.push_back(
          std::max(0.0, state_.foot_normal_force[ss] - cfg_.impact_load_factor * mg) / mg);
    }
    air_time_[ss] = grounded ? 0.0 : air_time_[ss] + kCtrlDt;
    prev_grounded_[ss] = grounded;
    const Vec3 sole = sole_mid(kin_, s);
    feet[ss].height = sole[2] - terrain_height(world_.terrain, sole[0], sole[1]);
    feet[ss].v = (1.0 / kCtrlDt) * (sole - prev_ee_[ss]);
  }
  for (size_t i = 0; i < specs.size(); ++i)
    if (engage_event[i] && (specs[i].ee == kLeftHand || specs[i].ee == kRightHand))
      impacts.push_back(forces_.grasp_force.size() > i ? forces_.grasp_force[i] / mg : 0.0);

  // reward inputs from the simulated state
  rewards::RewardInputs& in = inputs_;
  in = rewards::RewardInputs{};
  in.q.assign(state_.q.begin(), state_.q.end());
  in.qd.assign(state_.qd.begin(), state_.qd.end());
  in.root_p = state_.root.p;
  in.root_q = state_.root.q;
  for (int b = kBodyLShoulder; b <= kBodyRHand; ++b) {
    in.up_p.push_back(kin_.p[size_t(b)]);
    in.up_q.push_back(kin_.q[size_t(b)]);
  }
  for (int b = kBodyLHip; b <= kBodyRAnkle; ++b) {
    in.low_p.push_back(kin_.p[size_t(b)]);
    in.low_q.push_back(kin_.q[size_t(b)]);
  }
  in.body_vel.push_back(state_.root.v);
  in.body_vel.push_back(state_.root.w);
  const std::array<Vec3, 4> ee_now = {sole_mid(kin_, 0), sole_mid(kin_, 1), kin_.hand(0),
                                      kin_.hand(1)};
  for (int e = 0; e < 4; ++e)
    in.body_vel.push_back((1.0 / kCtrlDt) * (ee_now[size_t(e)] - prev_ee_[size_t(e)]));
  prev_ee_ = ee_now;
  for (const auto& o : state_.objects) {
    in.obj_p.push_back(o.p);
    in.obj_q.push_back(o.q);
  }
  for (size_t i = 0; i < specs.size(); ++i) {
    const ContactSpec& c = specs[i];
    rewards::ContactPair pair;
    pair.object = c.object;
    pair.active = c.mask;
    const ObjectModel& om = world_.objects[size_t(c.object)];
    const RigidState& os = state_.objects[size_t(c.object)];
    pair.p_tgt = os.p + quat_rotate(os.q, om.sites[size_t(c.site)].pos);
    pair.p_e = c.ee == kLeftHand || c.ee == kRightHand ? kin_.hand(c.ee - kLeftHand)
                                                       : sole_mid(kin_, c.ee - kLeftFoot);
    pair.force = engaged_[i] && forces_.grasp_force.size() > i ? forces_.grasp_force[i] : 0.0;
    in.contacts.push_back(pair);
  }
  in.feet = feet;
  in.impact_forces = impacts;
  in.prev_action = prev_applied_action_;
  in.action = applied_action_;
  in.tau.assign(tau.begin(), tau.end());
  in.q_lo.assign(robot.q_lo.begin(), robot.q_lo.end());
  in.q_hi.assign(robot.q_hi.begin(), robot.q_hi.end());
  in.tau_limit.assign(robot.tau_limit.begin(), robot.tau_limit.end());

  EnvStepResult out;
  out.reward = rewards::total_reward(in, make_reference_inputs(f), cfg_.reward);

  // termination
  const double support = terrain_height(world_.terrain, state_.root.p[0], state_.root.p[1]);
  if (state_.root.p[2] - support < cfg_.fall_fraction * robot.rest_root_height())
    out.terminated = true;
  for (size_t o = 0; o < state_.objects.size(); ++o)
    if (norm(state_.objects[o].p - f.objects[o].p) > cfg_.divergence_m) out.terminated = true;
  if (frame_ >= int(ref_.frames.size()) - 1) out.truncated = true;
  return out;
}

}  // namespace hoi::sim
