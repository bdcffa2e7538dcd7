#include "hoi/agent/obs.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hoi/error.hpp"

namespace hoi::agent {
namespace {

using sim::kNumJoints;

// per-term sensor noise half-widths
constexpr double kSigmaAngVel = 0.05;
constexpr double kSigmaGravity = 0.05;
constexpr double kSigmaJoint = 0.015;
constexpr double kSigmaContact = 0.01;
constexpr double kSigmaObjState = 0.01;

// end-effector bodies whose reference positions the actor tracks
constexpr std::array<int, 4> kEeBodies{sim::kBodyLAnkle, sim::kBodyRAnkle, sim::kBodyLHand,
                                       sim::kBodyRHand};

constexpr int64_t kProprioFrameDim = 2 * kNumJoints + 6;  // q, qd, ang vel, gravity
constexpr int64_t kGraspForceSlots = 4;

// appends values for the next declared term, checking name and width
struct TermWriter {
  const std::vector<ObsTerm>& terms;
  Rng& rng;
  std::vector<double> out;
  size_t at = 0;

  void emit(const char* name, const std::vector<double>& v) {
    if (at >= terms.size() || terms[at].name != name || terms[at].dim != int64_t(v.size()))
      throw ContractError(std::string("observation term mismatch at '") + name + "'");
    const double s = terms[at].sigma;
    for (double x : v) out.push_back(s > 0.0 ? x + rng.uniform(-s, s) : x);
    ++at;
  }
  std::vector<double> finish() {
    if (at != terms.size())
      throw ContractError("observation missing term '" + terms[at].name + "'");
    return std::move(out);
  }
};

void push3(std::vector<double>& v, const Vec3& p) {
  v.push_back(p[0]);
  v.push_back(p[1]);
  v.push_back(p[2]);
}

ProprioFrame read_frame(const sim::Env& env) {
  ProprioFrame f;
  const sim::WorldState& s = env.state();
  f.q = s.q;
  f.qd = s.qd;
  const auto& off = env.params().joint_offset;
  for (int j = 0; j < kNumJoints; ++j) f.q_sensed[size_t(j)] = s.q[size_t(j)] + off[size_t(j)];
  f.w_local = quat_rotate_inv(s.root.q, s.root.w);
  f.g_local = quat_rotate_inv(s.root.q, {0.0, 0.0, -1.0});
  return f;
}

void check_history(const ObsHistory& hist) {
  if (hist.frames.size() != size_t(kCleanHistDepth) ||
      hist.prev_actions.size() != size_t(kPrevActions))
    throw ContractError("observation history not initialized to full depth");
}

std::vector<double> vec3s(const Vec3& a) { return {a[0], a[1], a[2]}; }

// contact-target positions on one object slot in the base frame, padded to
// kContactSlots entries
std::vector<double> contact_targets(const sim::RefFrame& rf, int slot, const Vec3& root_p,
                                    const Quat& root_q) {
  std::vector<double> v;
  for (const sim::ContactSpec& c : rf.contacts) {
    if (c.object != slot || int64_t(v.size()) >= 3 * kContactSlots) continue;
    push3(v, quat_rotate_inv(root_q, c.p_tgt - root_p));
  }
  v.resize(size_t(3 * kContactSlots), 0.0);
  return v;
}

std::vector<double> ref_joint_block(const sim::ReferenceMotion& ref, int frame) {
  std::vector<double> v;
  for (int lead : kRefLeads) {
    const sim::RefFrame& rf = ref_at(ref, frame + lead);
    v.insert(v.end(), rf.q.begin(), rf.q.end());
  }
  return v;
}

uint64_t fnv_mix(uint64_t h, uint64_t x) {
  h ^= x;
  return h * 0x100000001b3ull;
}

uint64_t fnv_str(uint64_t h, const std::string& s) {
  for (char c : s) h = fnv_mix(h, uint64_t(uint8_t(c)));
  return h;
}

}  // namespace

int64_t ObservationSpec::actor_dim() const {
  int64_t d = 0;
  for (const ObsTerm& t : actor) d += t.dim;
  return d;
}

int64_t ObservationSpec::critic_dim() const {
  int64_t d = 0;
  for (const ObsTerm& t : critic) d += t.dim;
  return d;
}

uint64_t ObservationSpec::config_hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  h = fnv_str(h, sim::task_name(task));
  h = fnv_mix(h, uint64_t(num_objects));
  h = fnv_mix(h, uint64_t(object_clouds));
  for (const std::vector<ObsTerm>* side : {&actor, &critic})
    for (const ObsTerm& t : *side) {
      h = fnv_str(h, t.name);
      h = fnv_mix(h, uint64_t(t.dim));
      uint64_t bits;
      static_assert(sizeof bits == sizeof t.sigma);
      std::memcpy(&bits, &t.sigma, sizeof bits);
      h = fnv_mix(h, bits);
    }
  return h;
}

ObservationSpec make_observation_spec(sim::Task task, bool object_clouds) {
  ObservationSpec s;
  s.task = task;
  s.num_objects = int(sim::task_objects(task).size());
  s.object_clouds = object_clouds;
  const int64_t J = kNumJoints;
  const int64_t L = int64_t(kRefLeads.size());

  s.actor = {
      {"ang_vel", 3, kSigmaAngVel},
      {"gravity", 3, kSigmaGravity},
      {"joint_pos_hist", int64_t(kJointHistSteps.size()) * J, kSigmaJoint},
      {"prev_actions", kPrevActions * J, 0.0},
      {"phase", 1, 0.0},
      {"ref_joints", L * J, 0.0},
      {"ref_body_pos", L * int64_t(kEeBodies.size()) * 3, 0.0},
      {"contact1_tgt", 3 * kContactSlots, kSigmaContact},
  };
  if (s.num_objects > 1) s.actor.push_back({"contact2_tgt", 3 * kContactSlots, kSigmaContact});
  if (object_clouds) {
    s.actor.push_back({"cloud1", 3 * sim::kCloudSize, 0.0});
    if (s.num_objects > 1) s.actor.push_back({"cloud2", 3 * sim::kCloudSize, 0.0});
  }

  s.critic = {
      {"phase", 1, 0.0},
      {"ref_joints", L * J, 0.0},
      {"contact1_tgt", 3 * kContactSlots, 0.0},
  };
  if (s.num_objects > 1) s.critic.push_back({"contact2_tgt", 3 * kContactSlots, 0.0});
  s.critic.push_back({"clean_proprio", kCleanHistDepth * kProprioFrameDim, 0.0});
  s.critic.push_back({"root_lin_vel", 3, 0.0});
  s.critic.push_back({"body_vel", int64_t(kEeBodies.size()) * 3, 0.0});
  s.critic.push_back({"body_height", 3, 0.0});
  s.critic.push_back({"ref_root_global", L * 7, 0.0});
  s.critic.push_back({"ref_diff", 6 + J, 0.0});
  s.critic.push_back({"obj1_state", 15, kSigmaObjState});
  if (s.num_objects > 1) s.critic.push_back({"obj2_state", 15, kSigmaObjState});
  s.critic.push_back({"applied_forces", 2 * J + 2 + kGraspForceSlots, 0.0});
  s.critic.push_back({"env_params", sim::EnvParams::kVectorDim, 0.0});
  return s;
}

void ObsHistory::reset(const sim::Env& env) {
  frames.assign(size_t(kCleanHistDepth), read_frame(env));
  prev_actions.assign(size_t(kPrevActions), std::vector<double>(kNumJoints, 0.0));
}

void ObsHistory::push(const sim::Env& env, const std::vector<double>& action) {
  check_history(*this);
  if (action.size() != size_t(kNumJoints))
    throw ContractError("observation history: action width mismatch");
  frames.insert(frames.begin(), read_frame(env));
  frames.resize(size_t(kCleanHistDepth));
  prev_actions.insert(prev_actions.begin(), action);
  prev_actions.resize(size_t(kPrevActions));
}

Tensor canonical_cloud(const sim::Env& env, int slot) {
  const auto& objects = env.world().objects;
  if (slot < 0 || size_t(slot) >= objects.size())
    throw ContractError("canonical_cloud: no such object slot");
  const std::vector<Vec3>& cloud = objects[size_t(slot)].cloud;
  Tensor t = Tensor::zeros(int64_t(cloud.size()), 3);
  for (size_t i = 0; i < cloud.size(); ++i)
    for (int64_t j = 0; j < 3; ++j) t.at(int64_t(i), j) = cloud[i][size_t(j)];
  return t;
}

const sim::RefFrame& ref_at(const sim::ReferenceMotion& ref, int frame) {
  if (ref.frames.empty()) throw ContractError("reference motion has no frames");
  const int last = int(ref.frames.size()) - 1;
  return ref.frames[size_t(std::clamp(frame, 0, last))];
}

std::vector<double> build_actor_obs(const ObservationSpec& spec, const ObsHistory& hist,
                                    const Vec3& root_p, const Quat& root_q,
                                    const sim::ReferenceMotion& ref, int frame,
                                    const std::vector<Tensor>& clouds, Rng& rng) {
  check_history(hist);
  if (frame < 0) throw ContractError("build_actor_obs: negative frame index");
  TermWriter w{spec.actor, rng, {}, 0};

  const ProprioFrame& now = hist.frames[0];
  w.emit("ang_vel", vec3s(now.w_local));
  w.emit("gravity", vec3s(now.g_local));

  std::vector<double> jh;
  for (int lag : kJointHistSteps) {
    const ProprioFrame& f = hist.frames[size_t(lag)];
    jh.insert(jh.end(), f.q_sensed.begin(), f.q_sensed.end());
  }
  w.emit("joint_pos_hist", jh);

  std::vector<double> pa;
  for (const std::vector<double>& a : hist.prev_actions) pa.insert(pa.end(), a.begin(), a.end());
  w.emit("prev_actions", pa);

  const sim::RefFrame& rf0 = ref_at(ref, frame);
  w.emit("phase", {rf0.phase});
  w.emit("ref_joints", ref_joint_block(ref, frame));

  std::vector<double> rb;
  for (int lead : kRefLeads) {
    const sim::RefFrame& rf = ref_at(ref, frame + lead);
    for (int b : kEeBodies) push3(rb, quat_rotate_inv(root_q, rf.body_p[size_t(b)] - root_p));
  }
  w.emit("ref_body_pos", rb);

  w.emit("contact1_tgt", contact_targets(rf0, 0, root_p, root_q));
  if (spec.num_objects > 1) w.emit("contact2_tgt", contact_targets(rf0, 1, root_p, root_q));

  if (spec.object_clouds) {
    if (clouds.size() != size_t(spec.num_objects))
      throw ContractError("build_actor_obs: cloud count mismatch");
    for (int k = 0; k < spec.num_objects; ++k) {
      const Tensor& c = clouds[size_t(k)];
      if (c.rows() != sim::kCloudSize || c.cols() != 3)
        throw ContractError("build_actor_obs: cloud shape " + c.shape_str());
      w.emit(k == 0 ? "cloud1" : "cloud2", c.data);
    }
  }
  return w.finish();
}

std::vector<double> build_critic_obs(const ObservationSpec& spec, const ObsHistory& hist,
                                     const sim::Env* env, Rng& rng) {
  if (env == nullptr)
    throw ContractError("critic observation requires privileged simulation access");
  check_history(hist);
  TermWriter w{spec.critic, rng, {}, 0};

  const sim::WorldState& st = env->state();
  const Vec3& root_p = st.root.p;
  const Quat& root_q = st.root.q;
  const int frame = env->frame();
  const sim::ReferenceMotion& ref = env->reference();
  const sim::RefFrame& rf0 = ref_at(ref, frame);

  w.emit("phase", {rf0.phase});
  w.emit("ref_joints", ref_joint_block(ref, frame));
  w.emit("contact1_tgt", contact_targets(rf0, 0, root_p, root_q));
  if (spec.num_objects > 1) w.emit("contact2_tgt", contact_targets(rf0, 1, root_p, root_q));

  std::vector<double> cp;
  for (const ProprioFrame& f : hist.frames) {
    cp.insert(cp.end(), f.q.begin(), f.q.end());
    cp.insert(cp.end(), f.qd.begin(), f.qd.end());
    push3(cp, f.w_local);
    push3(cp, f.g_local);
  }
  w.emit("clean_proprio", cp);

  w.emit("root_lin_vel", vec3s(quat_rotate_inv(root_q, st.root.v)));

  // end-effector velocities live in the reward inputs once the env has
  // stepped; before that they are zero by construction
  std::vector<double> bv;
  const std::vector<Vec3>& body_vel = env->last_inputs().body_vel;
  for (size_t e = 0; e < kEeBodies.size(); ++e) {
    const Vec3 v = body_vel.size() >= 6 ? body_vel[2 + e] : Vec3{};
    push3(bv, quat_rotate_inv(root_q, v));
  }
  w.emit("body_vel", bv);

  const sim::BodyKin kin = forward_kinematics(env->world().robot, root_p, root_q, st.q);
  auto height = [&](const Vec3& p) {
    return p[2] - sim::terrain_height(env->world().terrain, p[0], p[1]);
  };
  w.emit("body_height", {height(root_p), height(kin.foot(0)), height(kin.foot(1))});

  std::vector<double> rr;
  for (int lead : kRefLeads) {
    const sim::RigidState& r = ref_at(ref, frame + lead).root;
    push3(rr, r.p);
    rr.insert(rr.end(), {r.q.w, r.q.x, r.q.y, r.q.z});
  }
  w.emit("ref_root_global", rr);

  std::vector<double> rd;
  push3(rd, quat_rotate_inv(root_q, rf0.root.p - root_p));
  push3(rd, quat_log(quat_mul(quat_conj(root_q), rf0.root.q)));
  for (int j = 0; j < kNumJoints; ++j) rd.push_back(rf0.q[size_t(j)] - st.q[size_t(j)]);
  w.emit("ref_diff", rd);

  for (int k = 0; k < spec.num_objects; ++k) {
    const wm::ObjectStateEstimate o = true_object_state(*env, k);
    std::vector<double> ov;
    push3(ov, o.p);
    const std::array<double, 9> cols = wm::rot_cols_of(o.R);
    ov.insert(ov.end(), cols.begin(), cols.begin() + 6);
    push3(ov, o.v_lin);
    push3(ov, o.v_ang);
    w.emit(k == 0 ? "obj1_state" : "obj2_state", ov);
  }

  std::vector<double> af = env->last_applied_action();
  const std::vector<double>& tau = env->last_inputs().tau;
  for (int j = 0; j < kNumJoints; ++j)
    af.push_back(tau.size() == size_t(kNumJoints) ? tau[size_t(j)] : 0.0);
  af.push_back(env->last_forces().foot_normal[0]);
  af.push_back(env->last_forces().foot_normal[1]);
  std::vector<double> gf = env->last_forces().grasp_force;
  gf.resize(size_t(kGraspForceSlots), 0.0);
  af.insert(af.end(), gf.begin(), gf.begin() + kGraspForceSlots);
  w.emit("applied_forces", af);

  w.emit("env_params", env->params().to_vector());
  return w.finish();
}

wm::ObservationWindow wm_window(const ObservationSpec& spec, const ObsHistory& hist,
                                const sim::ReferenceMotion& ref, int frame, Rng& rng) {
  (void)spec;
  check_history(hist);
  wm::ObservationWindow win;
  for (int lag : kJointHistSteps) {
    const ProprioFrame& f = hist.frames[size_t(lag)];
    Tensor t = Tensor::zeros(1, kWmPropDim);
    int64_t at = 0;
    for (int j = 0; j < kNumJoints; ++j)
      t[at++] = f.q_sensed[size_t(j)] + rng.uniform(-kSigmaJoint, kSigmaJoint);
    for (int64_t i = 0; i < 3; ++i)
      t[at++] = f.w_local[size_t(i)] + rng.uniform(-kSigmaAngVel, kSigmaAngVel);
    for (int64_t i = 0; i < 3; ++i)
      t[at++] = f.g_local[size_t(i)] + rng.uniform(-kSigmaGravity, kSigmaGravity);
    win.history.push_back(std::move(t));
  }
  for (int lead : kRefLeads) {
    const sim::RefFrame& rf = ref_at(ref, frame + lead);
    Tensor t = Tensor::zeros(1, kWmRefDim);
    t[0] = rf.phase;
    for (int j = 0; j < kNumJoints; ++j) t[1 + j] = rf.q[size_t(j)];
    win.future.push_back(std::move(t));
  }
  return win;
}

wm::WorldModelConfig wm_config_for(const ObservationSpec& spec, wm::Variant variant) {
  wm::WorldModelConfig cfg;
  cfg.variant = variant;
  cfg.num_objects = spec.num_objects;
  cfg.prop_dim = kWmPropDim;
  cfg.ref_dim = kWmRefDim;
  cfg.history_steps.assign(kJointHistSteps.begin(), kJointHistSteps.end());
  cfg.future_steps.assign(kRefLeads.begin(), kRefLeads.end());
  cfg.validate();
  return cfg;
}

wm::ObjectStateEstimate true_object_state(const sim::Env& env, int slot) {
  const sim::WorldState& st = env.state();
  if (slot < 0 || size_t(slot) >= st.objects.size())
    throw ContractError("true_object_state: no such object slot");
  const sim::RigidState& o = st.objects[size_t(slot)];
  const sim::RigidState& r = st.root;
  wm::ObjectStateEstimate e;
  e.p = quat_rotate_inv(r.q, o.p - r.p);
  e.R = quat_normalize(quat_mul(quat_conj(r.q), o.q));
  e.v_lin = quat_rotate_inv(r.q, o.v - r.v);
  e.v_ang = quat_rotate_inv(r.q, o.w - r.w);
  e.a_lin = quat_rotate_inv(r.q, o.a - r.a);
  e.a_ang = quat_rotate_inv(r.q, o.alpha - r.alpha);
  return e;
}

}  // namespace hoi::agent
