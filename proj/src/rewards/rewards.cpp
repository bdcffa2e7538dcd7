#include "hoi/rewards/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hoi/error.hpp"

namespace hoi::rewards {

namespace {

double sq(double x) { return x * x; }

double vec_err_sq(const std::vector<double>& a, const std::vector<double>& b) {
  check(a.size() == b.size(), "tracking vectors must have equal length");
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += sq(a[i] - b[i]);
  return s;
}

double pos_err_sq(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  check(a.size() == b.size(), "position lists must have equal length");
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < 3; ++k) s += sq(a[i][size_t(k)] - b[i][size_t(k)]);
  return s;
}

double ori_err_sq(const std::vector<Quat>& a, const std::vector<Quat>& b) {
  check(a.size() == b.size(), "orientation lists must have equal length");
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += sq(quat_geodesic(a[i], b[i]));
  return s;
}

double kernel(double err_sq, double sigma) { return std::exp(-err_sq / sigma); }

}  // namespace

void RewardConfig::validate() const {
  for (double s : {sigma_q, sigma_qd, sigma_p, sigma_theta, sigma_v, sigma_pc, sigma_f, sigma_air,
                   sigma_cm})
    check_config(std::isfinite(s) && s > 0, "reward scales must be positive and finite");
  for (double v : {eps_tol, f_thr, t_thr, h_min})
    check_config(std::isfinite(v) && v >= 0, "reward tolerances must be nonnegative");
  for (double wt : {w.joint_pos, w.joint_vel, w.upper_pos, w.upper_ori, w.lower_pos, w.lower_ori,
                    w.root_pos, w.root_ori, w.body_vel, w.object_pos, w.object_ori, w.contact,
                    w.feet_air_time, w.feet_slip, w.feet_contact_match, w.feet_air_lift,
                    w.impact_force, w.action_rate, w.joint_vel_l2, w.joint_limits, w.torque_limits,
                    w.survival})
    check_config(std::isfinite(wt), "reward weights must be finite");
}

const RewardTerm* RewardBreakdown::find(std::string_view name) const {
  for (const auto& t : terms)
    if (t.name == name) return &t;
  return nullptr;
}

double tracking_reward(const std::vector<double>& actual, const std::vector<double>& reference,
                       double sigma) {
  check(sigma > 0, "tracking kernel scale must be positive");
  return kernel(vec_err_sq(actual, reference), sigma);
}

double contact_reward(const std::vector<ContactPair>& pairs, const RewardConfig& cfg,
                      bool* empty) {
  if (empty) *empty = pairs.empty();
  if (pairs.empty()) return 0.0;
  std::map<int, std::pair<double, int>> per_object;  // object -> (sum, count)
  for (const auto& pr : pairs) {
    check(pr.force >= 0, "contact force magnitudes must be nonnegative");
    double r = 0;
    if (pr.active) {
      const double dist = norm(pr.p_e - pr.p_tgt);
      const double r_pos = std::exp(-std::max(0.0, dist - cfg.eps_tol) / cfg.sigma_pc);
      const double r_force = std::exp(-std::max(0.0, cfg.f_thr - pr.force) / cfg.sigma_f);
      r = r_pos * r_force;
    }
    auto& acc = per_object[pr.object];
    acc.first += r;
    acc.second += 1;
  }
  double total = 0;
  for (const auto& [obj, acc] : per_object) total += acc.first / double(acc.second);
  return total / double(per_object.size());
}

FootRewards foot_rewards(const std::array<FootState, 2>& feet,
                         const std::array<bool, 2>& ref_contact,
                         const std::vector<double>& impact_forces, const RewardConfig& cfg) {
  FootRewards out;
  double mismatch_sq = 0;
  for (size_t i = 0; i < 2; ++i) {
    const FootState& f = feet[i];
    if (f.touchdown)
      out.air_time += std::exp(std::min(0.0, f.air_time - cfg.t_thr) / cfg.sigma_air);
    if (f.grounded) out.slip -= std::sqrt(sq(f.v[0]) + sq(f.v[1]));
    if (!f.grounded && f.height < cfg.h_min) out.air_lift -= 1.0;
    mismatch_sq += sq(double(f.grounded) - double(ref_contact[i]));
  }
  out.contact_match = kernel(mismatch_sq, cfg.sigma_cm);
  for (double fmag : impact_forces) out.impact -= sq(fmag);
  return out;
}

Regularization regularization(const std::vector<double>& action,
                              const std::vector<double>& prev_action,
                              const std::vector<double>& qd, const std::vector<double>& q,
                              const std::vector<double>& tau, const std::vector<double>& q_lo,
                              const std::vector<double>& q_hi,
                              const std::vector<double>& tau_limit) {
  check(action.size() == prev_action.size(), "action history length mismatch");
  check(q.size() == q_lo.size() && q.size() == q_hi.size(), "joint limit vector length mismatch");
  check(tau.size() == tau_limit.size(), "torque limit vector length mismatch");
  Regularization out;
  out.action_rate = -vec_err_sq(action, prev_action);
  for (double v : qd) out.joint_vel -= sq(v);
  for (size_t j = 0; j < q.size(); ++j)
    out.joint_limits -= std::max(0.0, q[j] - q_hi[j]) + std::max(0.0, q_lo[j] - q[j]);
  for (size_t j = 0; j < tau.size(); ++j)
    out.torque_limits -= std::max(0.0, std::fabs(tau[j]) - tau_limit[j]);
  out.survival = 1.0;
  return out;
}

RewardBreakdown total_reward(const RewardInputs& in, const RewardReference& ref,
                             const RewardConfig& cfg) {
  cfg.validate();
  check(!ref.q.empty(), "reference frame is missing joint data");
  check(in.q.size() == ref.q.size() && in.qd.size() == ref.qd.size(),
        "reference joint shape mismatch");

  RewardBreakdown bd;
  auto push = [&bd](const char* name, double raw, double weight) {
    bd.terms.push_back({name, raw, raw * weight});
  };

  push("joint_pos", kernel(vec_err_sq(in.q, ref.q), cfg.sigma_q), cfg.w.joint_pos);
  push("joint_vel", kernel(vec_err_sq(in.qd, ref.qd), cfg.sigma_qd), cfg.w.joint_vel);
  push("upper_pos", kernel(pos_err_sq(in.up_p, ref.up_p), cfg.sigma_p), cfg.w.upper_pos);
  push("upper_ori", kernel(ori_err_sq(in.up_q, ref.up_q), cfg.sigma_theta), cfg.w.upper_ori);
  push("lower_pos", kernel(pos_err_sq(in.low_p, ref.low_p), cfg.sigma_p), cfg.w.lower_pos);
  push("lower_ori", kernel(ori_err_sq(in.low_q, ref.low_q), cfg.sigma_theta), cfg.w.lower_ori);
  {
    double e = 0;
    for (int k = 0; k < 3; ++k) e += sq(in.root_p[size_t(k)] - ref.root_p[size_t(k)]);
    push("root_pos", kernel(e, cfg.sigma_p), cfg.w.root_pos);
    push("root_ori", kernel(sq(quat_geodesic(in.root_q, ref.root_q)), cfg.sigma_theta),
         cfg.w.root_ori);
  }
  push("body_vel", kernel(pos_err_sq(in.body_vel, ref.body_vel), cfg.sigma_v), cfg.w.body_vel);

  push("object_pos", kernel(pos_err_sq(in.obj_p, ref.obj_p), cfg.sigma_p), cfg.w.object_pos);
  push("object_ori", kernel(ori_err_sq(in.obj_q, ref.obj_q), cfg.sigma_theta), cfg.w.object_ori);
  bool contact_empty = false;
  push("contact", contact_reward(in.contacts, cfg, &contact_empty), cfg.w.contact);
  bd.contact_empty = contact_empty;

  const FootRewards fr = foot_rewards(in.feet, ref.feet_contact, in.impact_forces, cfg);
  push("feet_air_time", fr.air_time, cfg.w.feet_air_time);
  push("feet_slip", fr.slip, cfg.w.feet_slip);
  push("feet_contact_match", fr.contact_match, cfg.w.feet_contact_match);
  push("feet_air_lift", fr.air_lift, cfg.w.feet_air_lift);
  push("impact_force", fr.impact, cfg.w.impact_force);

  const Regularization rg = regularization(in.action, in.prev_action, in.qd, in.q, in.tau,
                                           in.q_lo, in.q_hi, in.tau_limit);
  push("action_rate", rg.action_rate, cfg.w.action_rate);
  push("joint_vel_l2", rg.joint_vel, cfg.w.joint_vel_l2);
  push("joint_limits", rg.joint_limits, cfg.w.joint_limits);
  push("torque_limits", rg.torque_limits, cfg.w.torque_limits);
  push("survival", rg.survival, cfg.w.survival);

  for (const auto& t : bd.terms) bd.total += t.weighted;
  return bd;
}

}  // namespace hoi::rewards
