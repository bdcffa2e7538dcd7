#pragma once

// Control-rate (50 Hz) episode wrapper: action delay, PD control with sensed
// offsets, grasp engagement with hysteresis, foot air-time accounting, reward
// assembly against the scripted reference, and termination checks.

#include <deque>
#include <optional>
#include <vector>

#include "hoi/rewards/rewards.hpp"
#include "hoi/rng.hpp"
#include "hoi/sim/reference.hpp"

namespace hoi::sim {

struct EnvConfig {
  Task task = Task::kCarryBox;
  double episode_s = 8.0;  // reference duration per episode
  bool randomize = true;
  RandomizationConfig rand;
  std::optional<EnvParams> fixed_params;  // overrides randomization when set
  rewards::RewardConfig reward;
  int substeps = 4;  // physics substeps per control step
  double engage_radius = 0.10;   // m, grasp spring engages inside this
  double release_radius = 0.15;  // m, and lets go beyond this
  double fall_fraction = 0.6;    // of nominal root height above support
  double divergence_m = 1.0;     // object deviation from reference
  double impact_load_factor = 1.5;  // multiples of standing load tolerated at touchdown
};

struct EnvStepResult {
  rewards::RewardBreakdown reward;
  bool terminated = false;  // fall or object divergence
  bool truncated = false;   // reference exhausted
};

class Env {
 public:
  explicit Env(const EnvConfig& cfg);

  void reset(uint64_t seed);
  EnvStepResult step(const std::vector<double>& action);

  const EnvConfig& config() const { return cfg_; }
  const World& world() const { return world_; }
  const WorldState& state() const { return state_; }
  const ReferenceMotion& reference() const { return ref_; }
  const EnvParams& params() const { return params_; }
  int frame() const { return frame_; }
  const RefFrame& ref_frame() const;  // clamped to the last frame
  int delay_ticks() const { return delay_ticks_; }
  const std::vector<GraspCommand>& grasps() const { return grasps_; }
  const StepForces& last_forces() const { return forces_; }
  const rewards::RewardInputs& last_inputs() const { return inputs_; }
  const std::vector<double>& last_applied_action() const { return applied_action_; }
  double time() const { return state_.t; }

 private:
  void build_world(uint64_t seed);
  void refresh_kinematics();
  rewards::RewardReference make_reference_inputs(const RefFrame& f) const;

  EnvConfig cfg_;
  ReferenceMotion ref_;
  World world_;
  WorldState state_;
  EnvParams params_;
  int frame_ = 0;
  int delay_ticks_ = 0;
  std::deque<std::vector<double>> action_fifo_;
  std::vector<double> applied_action_, prev_applied_action_;
  std::vector<GraspCommand> grasps_;      // one per reference contact spec
  std::vector<bool> engaged_;             // hysteresis state per spec
  StepForces forces_;
  rewards::RewardInputs inputs_;
  BodyKin kin_;
  std::array<Vec3, 4> prev_ee_{};  // lf, rf, lh, rh at the previous control step
  std::array<double, 2> air_time_{};
  std::array<bool, 2> prev_grounded_{};
};

}  // namespace hoi::sim
