#pragma once

// Per-step reward terms for the tracking task: exp-form kernels over tracking
// errors, the multi-object contact term, foot-constraint terms, and
// regularization penalties, combined as a weighted sum with a full breakdown.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "hoi/numerics/rotation.hpp"

namespace hoi::rewards {

struct RewardConfig {
  // scales for the exp-form kernels (units of the squared error)
  double sigma_q = 0.25;      // joint positions (rad^2)
  double sigma_qd = 0.25;     // joint velocities
  double sigma_p = 0.05;      // body/object/root positions (m^2)
  double sigma_theta = 0.25;  // orientations (rad^2)
  double sigma_v = 0.25;      // body lin/ang velocities
  // contact term
  double eps_tol = 0.02;  // m, slack before the position kernel decays
  double sigma_pc = 0.05; // m, position decay scale
  double f_thr = 5.0;     // N, required contact force
  double sigma_f = 5.0;   // N, force-deficit decay scale
  // foot constraints
  double t_thr = 0.2;      // s, desired minimum swing duration
  double sigma_air = 0.25; // s, air-time shortfall decay
  double sigma_cm = 0.25;  // contact-match decay (squared mismatch count)
  double h_min = 0.05;     // m, minimum swing-foot clearance

  struct Weights {
    double joint_pos = 0.5;
    double joint_vel = 0.5;
    double upper_pos = 0.5;
    double upper_ori = 0.5;
    double lower_pos = 0.5;
    double lower_ori = 0.5;
    double root_pos = 0.5;
    double root_ori = 0.5;
    double body_vel = 0.5;
    double object_pos = 1.0;
    double object_ori = 1.0;
    double contact = 1.0;
    double feet_air_time = 0.5;
    double feet_slip = 0.5;
    double feet_contact_match = 0.5;
    double feet_air_lift = 0.5;
    double impact_force = 1.0;
    double action_rate = 0.1;
    double joint_vel_l2 = 5e-4;
    double joint_limits = 10.0;
    double torque_limits = 0.01;
    double survival = 1.0;
  } w;

  void validate() const;  // finite weights, positive scales
};

// one (object, end-effector) contact spec
struct ContactPair {
  int object = 0;    // which object this pair belongs to
  bool active = false;  // reference contact mask
  Vec3 p_e{};        // end-effector position
  Vec3 p_tgt{};      // attachment target on the object
  double force = 0;  // measured contact force magnitude, >= 0
};

struct FootState {
  bool grounded = false;
  bool touchdown = false;   // air -> ground transition this step
  double air_time = 0;      // s airborne before touchdown (valid when touchdown)
  double height = 0;        // clearance above support, m
  Vec3 v{};                 // world linear velocity
};

struct RewardInputs {
  std::vector<double> q, qd;  // joint positions / velocities
  Vec3 root_p{};
  Quat root_q{};
  std::vector<Vec3> up_p;   // shoulder/elbow/wrist link positions
  std::vector<Quat> up_q;
  std::vector<Vec3> low_p;  // hip/knee/ankle link positions
  std::vector<Quat> low_q;
  std::vector<Vec3> body_vel;  // stacked lin then ang velocities of tracked bodies
  std::vector<Vec3> obj_p;
  std::vector<Quat> obj_q;
  std::vector<ContactPair> contacts;
  std::array<FootState, 2> feet{};
  std::vector<double> impact_forces;  // magnitudes on touchdown frames (feet + hands)
  std::vector<double> action, prev_action;
  std::vector<double> tau;
  std::vector<double> q_lo, q_hi, tau_limit;
};

struct RewardReference {
  std::vector<double> q, qd;
  Vec3 root_p{};
  Quat root_q{};
  std::vector<Vec3> up_p;
  std::vector<Quat> up_q;
  std::vector<Vec3> low_p;
  std::vector<Quat> low_q;
  std::vector<Vec3> body_vel;
  std::vector<Vec3> obj_p;
  std::vector<Quat> obj_q;
  std::array<bool, 2> feet_contact{};
};

struct RewardTerm {
  std::string name;
  double raw = 0;
  double weighted = 0;
};

struct RewardBreakdown {
  std::vector<RewardTerm> terms;  // fixed order, all table terms present
  double total = 0;
  bool contact_empty = false;  // no contact pairs were supplied
  const RewardTerm* find(std::string_view name) const;
};

// exp(-||actual - reference||^2 / sigma); throws on shape mismatch or sigma <= 0
double tracking_reward(const std::vector<double>& actual, const std::vector<double>& reference,
                       double sigma);

// mean over objects of the mean over their end-effectors of I * r_pos * r_force;
// empty spec list returns 0 and sets *empty if provided
double contact_reward(const std::vector<ContactPair>& pairs, const RewardConfig& cfg,
                      bool* empty = nullptr);

struct FootRewards {
  double air_time = 0;
  double slip = 0;
  double contact_match = 0;
  double air_lift = 0;
  double impact = 0;
};
FootRewards foot_rewards(const std::array<FootState, 2>& feet,
                         const std::array<bool, 2>& ref_contact,
                         const std::vector<double>& impact_forces, const RewardConfig& cfg);

struct Regularization {
  double action_rate = 0;
  double joint_vel = 0;
  double joint_limits = 0;
  double torque_limits = 0;
  double survival = 1.0;
};
Regularization regularization(const std::vector<double>& action,
                              const std::vector<double>& prev_action,
                              const std::vector<double>& qd, const std::vector<double>& q,
                              const std::vector<double>& tau, const std::vector<double>& q_lo,
                              const std::vector<double>& q_hi,
                              const std::vector<double>& tau_limit);

RewardBreakdown total_reward(const RewardInputs& in, const RewardReference& ref,
                             const RewardConfig& cfg);

}  // namespace hoi::rewards
