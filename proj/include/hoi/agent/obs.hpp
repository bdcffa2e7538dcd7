#pragma once

// Observation assembly: the actor's onboard-sensor view, the critic's
// privileged simulation view, and the stacked sensor windows the world model
// consumes. The actor builder's inputs carry no path to EnvParams or true
// object states; privileged terms exist only on the critic side.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hoi/numerics/tensor.hpp"
#include "hoi/rng.hpp"
#include "hoi/sim/env.hpp"
#include "hoi/worldmodel/worldmodel.hpp"

namespace hoi::agent {

// sensor history depths shared by the observation layout and the world-model
// window: joint-position lags and future reference leads, in control steps
inline constexpr std::array<int, 6> kJointHistSteps{0, 1, 2, 3, 4, 8};
inline constexpr std::array<int, 4> kRefLeads{0, 1, 2, 4};
inline constexpr int kPrevActions = 3;
inline constexpr int kCleanHistDepth = 9;  // critic reads noise-free steps 0..8
inline constexpr int kContactSlots = 2;    // contact-target slots per object

// per-step world-model frame widths: proprio [q, ang vel, gravity] and
// reference [phase, ref joints]
inline constexpr int64_t kWmPropDim = sim::kNumJoints + 6;
inline constexpr int64_t kWmRefDim = 1 + sim::kNumJoints;

// one named segment of an observation vector
struct ObsTerm {
  std::string name;
  int64_t dim = 0;
  double sigma = 0;  // half-width of the additive uniform noise
};

struct ObservationSpec {
  sim::Task task = sim::Task::kCarryBox;
  int num_objects = 1;        // observation slots; terrain rides as object 2
  bool object_clouds = true;  // canonical clouds appear in the actor obs
  std::vector<ObsTerm> actor, critic;

  int64_t actor_dim() const;
  int64_t critic_dim() const;
  uint64_t config_hash() const;  // stable fingerprint of the resolved layout
};

// resolved term layout for a task; object_clouds=false drops the cloud terms
// (proprioception-only and vector-representation policies)
ObservationSpec make_observation_spec(sim::Task task, bool object_clouds = true);

// one control step of sensor readings; sensed joints carry the calibration
// offset, the clean values are for the critic
struct ProprioFrame {
  std::array<double, sim::kNumJoints> q{}, qd{}, q_sensed{};
  Vec3 w_local{}, g_local{};
};

// ring of the last kCleanHistDepth sensor frames plus the recent actions;
// reset fills the ring with the initial reading, push refreshes once per
// control step after the env has stepped
struct ObsHistory {
  std::vector<ProprioFrame> frames;               // frames[0] = newest
  std::vector<std::vector<double>> prev_actions;  // [kPrevActions][J], [0] = latest
  void reset(const sim::Env& env);
  void push(const sim::Env& env, const std::vector<double>& action);
};

// canonical (unscaled) cloud of an object slot as an [N,3] tensor
Tensor canonical_cloud(const sim::Env& env, int slot);

// reference frame at an absolute index, clamped to the last frame
const sim::RefFrame& ref_at(const sim::ReferenceMotion& ref, int frame);

// actor observation: fixed-order concatenation with per-term uniform noise in
// [-sigma, sigma], drawn fresh on every build; deterministic for a fixed rng
std::vector<double> build_actor_obs(const ObservationSpec& spec, const ObsHistory& hist,
                                    const Vec3& root_p, const Quat& root_q,
                                    const sim::ReferenceMotion& ref, int frame,
                                    const std::vector<Tensor>& clouds, Rng& rng);

// critic observation: clean histories, true body/object states, applied
// actions and torques, and the randomization vector. env == nullptr means no
// privileged access and raises ContractError.
std::vector<double> build_critic_obs(const ObservationSpec& spec, const ObsHistory& hist,
                                     const sim::Env* env, Rng& rng);

// world-model input window at the configured lags/leads, using the actor's
// sensor noise model on the proprio frames
wm::ObservationWindow wm_window(const ObservationSpec& spec, const ObsHistory& hist,
                                const sim::ReferenceMotion& ref, int frame, Rng& rng);

// world-model config wired to this spec's frame widths and slot count
wm::WorldModelConfig wm_config_for(const ObservationSpec& spec, wm::Variant variant);

// ground-truth object state in the robot base frame: pose relative to the
// root, velocities/accelerations relative to the root expressed in the base
// frame. World-model target and critic term.
wm::ObjectStateEstimate true_object_state(const sim::Env& env, int slot);

}  // namespace hoi::agent
