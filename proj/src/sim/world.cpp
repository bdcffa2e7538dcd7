#include "hoi/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hoi/error.hpp"

namespace hoi::sim {

namespace {

Vec3 diag_solve(const Vec3& d, const Vec3& v) { return {v[0] / d[0], v[1] / d[1], v[2] / d[2]}; }

// world-frame inverse inertia application for a diagonal body-frame tensor
Vec3 inv_inertia_apply(const Quat& q, const Vec3& inertia, const Vec3& torque) {
  return quat_rotate(q, diag_solve(inertia, quat_rotate_inv(q, torque)));
}

struct BodyRef {
  double inv_mass = 0;
  Vec3 inertia{1, 1, 1};  // body-frame diagonal
  Quat q{};
  Vec3 x{};    // center of mass
  Vec3* v = nullptr;
  Vec3* w = nullptr;
};

Vec3 point_velocity(const BodyRef& b, const Vec3& p) {
  return *b.v + cross(*b.w, p - b.x);
}

void apply_impulse(BodyRef& b, const Vec3& p, const Vec3& imp) {
  if (b.inv_mass == 0) return;
  *b.v += b.inv_mass * imp;
  *b.w += inv_inertia_apply(b.q, b.inertia, cross(p - b.x, imp));
}

struct ContactRow {
  int a = -1, b = -1;  // body indices; -1 = static world
  Vec3 p{}, n{};
  double depth = 0;
  double mu_dynamic = 0, mu_static = 0;
  double restitution = 0;
  bool equality = false;  // bilateral row (wheel lateral): unclamped, zero target
  Vec3 conveyor{};  // extra velocity of side a's material point (joint-driven feet)
  Vec3 t1{}, t2{};
  double lam_n = 0, lam_t1 = 0, lam_t2 = 0;
  int foot = -1;  // which robot foot produced this row, for force bookkeeping
};

void make_tangent_basis(const Vec3& n, Vec3& t1, Vec3& t2) {
  const Vec3 ref = std::fabs(n[2]) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
  t1 = cross(ref, n);
  const double l = norm(t1);
  t1 = (1.0 / l) * t1;
  t2 = cross(n, t1);
}

double effective_mass(const BodyRef& a, const BodyRef& b, const Vec3& p, const Vec3& dir) {
  double k = a.inv_mass + b.inv_mass;
  if (a.inv_mass > 0) {
    const Vec3 rn = quat_rotate_inv(a.q, cross(p - a.x, dir));
    k += dot(rn, diag_solve(a.inertia, rn));
  }
  if (b.inv_mass > 0) {
    const Vec3 rn = quat_rotate_inv(b.q, cross(p - b.x, dir));
    k += dot(rn, diag_solve(b.inertia, rn));
  }
  return k;
}

}  // namespace

double TerrainPiece::height_at(double x, double y) const {
  const double lx = (x - x0) / scale;
  if (std::fabs(y) > 0.4 * scale) return 0.0;
  double h = 0.0;
  switch (profile) {
    case TerrainProfile::kPlatform:
      if (lx >= 0.0 && lx <= 0.8) h = 0.15;
      break;
    case TerrainProfile::kSlopeUp:
      // 0.30 m rise over a 1.10 m run, then a 0.8 m landing at the top
      if (lx >= 0.0 && lx <= 1.9) h = 0.30 * std::min(1.0, std::max(0.0, lx / 1.1));
      break;
    case TerrainProfile::kStair:
      // three 10 cm steps with 30 cm treads
      if (lx >= 0.0 && lx <= 1.5) h = 0.10 * std::min(3.0, std::floor(lx / 0.3) + 1.0);
      break;
  }
  return h * scale;
}

double terrain_height(const std::vector<TerrainPiece>& terrain, double x, double y) {
  double h = 0.0;
  for (const auto& t : terrain) h = std::max(h, t.height_at(x, y));
  return h;
}

const char* ee_name(int ee) {
  switch (ee) {
    case kLeftHand: return "left_hand";
    case kRightHand: return "right_hand";
    case kLeftFoot: return "left_foot";
    case kRightFoot: return "right_foot";
  }
  return "unknown";
}

bool foot_contact_raw(double h, double v, const SimConfig& cfg) {
  return h < cfg.label_h && v < cfg.label_v;
}

bool update_foot_label(FootLabelState& st, bool raw, int hold) {
  if (raw == st.label) {
    st.streak = 0;
  } else {
    ++st.streak;
    if (st.streak >= hold) {
      st.label = raw;
      st.streak = 0;
    }
  }
  return st.label;
}

double pd_torque(double kp, double kd, double q_target, double q, double qd, double tau_limit) {
  check(kp >= 0 && kd >= 0, "PD gains must be nonnegative");
  const double tau = kp * (q_target - q) - kd * qd;
  return std::clamp(tau, -tau_limit, tau_limit);
}

std::array<double, kNumJoints> action_to_target(const RobotModel& robot,
                                                const std::array<double, kNumJoints>& q,
                                                const std::vector<double>& action, double scale) {
  check(int(action.size()) == robot.num_joints, "action dimension mismatch");
  std::array<double, kNumJoints> target{};
  for (int j = 0; j < kNumJoints; ++j)
    target[size_t(j)] =
        std::clamp(q[size_t(j)] + scale * action[size_t(j)], robot.q_lo[size_t(j)],
                   robot.q_hi[size_t(j)]);
  return target;
}

World make_world_for_objects(const std::vector<ObjectModel>& objects,
                             const std::vector<TerrainPiece>& terrain, const EnvParams& env) {
  World w;
  w.robot = make_robot();
  w.robot.base_mass *= env.link_mass_scale;
  for (auto& m : w.robot.link_mass) m *= env.link_mass_scale;
  for (auto& i : w.robot.base_inertia) i *= env.link_mass_scale;
  w.terrain = terrain;
  for (auto& t : w.terrain) t.scale *= env.terrain_scale;
  for (ObjectModel o : objects) {
    double scale = 1.0;
    switch (o.kind) {
      case ObjectKind::kBox:
        o.mass = env.box_mass;
        scale = env.box_scale;
        break;
      case ObjectKind::kCart:
        o.mass = env.cart_mass;
        scale = env.cart_scale;
        for (auto& wh : o.wheels) {
          wh.mass = env.cart_wheel_mass;
          wh.joint_friction = env.cart_wheel_friction;
          wh.joint_damping = env.cart_wheel_damping;
        }
        break;
      case ObjectKind::kSkateboard:
        o.mass = env.skate_mass;
        scale = env.skate_scale;
        for (auto& wh : o.wheels) {
          wh.mass = env.skate_wheel_mass;
          wh.armature = env.skate_wheel_armature;
          wh.joint_damping = env.skate_wheel_damping;
        }
        break;
      case ObjectKind::kTerrain:
        scale = env.terrain_scale;
        break;
    }
    for (auto& h : o.half_extents) h *= scale;
    for (auto& c : o.geom_center) c *= scale;
    o.rest_height *= scale;
    for (auto& s : o.sites) s.pos = scale * s.pos;
    for (auto& wh : o.wheels) {
      wh.pos = scale * wh.pos;
      wh.radius *= scale;
    }
    const double s2 = scale * scale;
    o.inertia = {o.inertia[0] * s2, o.inertia[1] * s2, o.inertia[2] * s2};
    // the canonical cloud is a fixed prior and is deliberately not rescaled
    w.objects.push_back(std::move(o));
  }
  return w;
}

WorldState rest_state(const World& w) {
  WorldState s;
  s.root.p = {0, 0, w.robot.rest_root_height() - w.cfg.slop +
                     terrain_height(w.terrain, 0.0, 0.0)};
  s.root.q = Quat{};
  s.objects.resize(w.objects.size());
  for (size_t i = 0; i < w.objects.size(); ++i) {
    s.objects[i].p = {0.8 + 0.8 * double(i), 0, w.objects[i].rest_height - w.cfg.slop};
    s.objects[i].q = Quat{};
  }
  s.feet[0].label = s.feet[1].label = true;
  return s;
}

// translational mass including wheel spin inertia reflected through the radius
static double rolling_mass(const ObjectModel& o) {
  double m = o.mass;
  for (const auto& wh : o.wheels)
    m += wh.mass + (wh.armature + 0.5 * wh.mass * wh.radius * wh.radius) /
                       (wh.radius * wh.radius);
  return m;
}

WorldState step(const World& w, const WorldState& s, const std::array<double, kNumJoints>& tau,
                const EnvParams& env, const std::vector<GraspCommand>& grasps,
                StepForces* forces) {
  const SimConfig& cfg = w.cfg;
  const double dt = cfg.dt;
  WorldState out = s;
  out.t = s.t + dt;

  // --- joints: decoupled second-order dynamics, semi-implicit ---
  for (int j = 0; j < kNumJoints; ++j) {
    const size_t sj = size_t(j);
    const double tq = std::clamp(tau[sj], -w.robot.tau_limit[sj], w.robot.tau_limit[sj]);
    out.qd[sj] += dt * tq / w.robot.joint_inertia[sj];
    out.q[sj] += dt * out.qd[sj];
    if (out.q[sj] < w.robot.q_lo[sj]) {
      out.q[sj] = w.robot.q_lo[sj];
      out.qd[sj] = std::max(0.0, out.qd[sj]);
    } else if (out.q[sj] > w.robot.q_hi[sj]) {
      out.q[sj] = w.robot.q_hi[sj];
      out.qd[sj] = std::min(0.0, out.qd[sj]);
    }
  }

  const BodyKin kin = forward_kinematics(w.robot, s.root.p, s.root.q, out.q);
  const double robot_mass = w.robot.total_mass();
  const Vec3 com = s.root.p + quat_rotate(s.root.q, env.com_offset);

  // joint-driven material velocity of the foot contact points (conveyor terms)
  std::array<Vec3, 2> toe_local{}, heel_local{}, toe_conv{}, heel_conv{};
  for (int f = 0; f < 2; ++f) {
    const size_t sf = size_t(f);
    toe_local[sf] = quat_rotate_inv(s.root.q, kin.toe[sf] - s.root.p);
    heel_local[sf] = quat_rotate_inv(s.root.q, kin.heel[sf] - s.root.p);
    if (s.have_prev_foot) {
      toe_conv[sf] = (1.0 / dt) * quat_rotate(s.root.q, toe_local[sf] - s.prev_toe_local[sf]);
      heel_conv[sf] = (1.0 / dt) * quat_rotate(s.root.q, heel_local[sf] - s.prev_heel_local[sf]);
    }
  }
  out.prev_toe_local = toe_local;
  out.prev_heel_local = heel_local;
  out.have_prev_foot = true;

  // --- force accumulation ---
  Vec3 f_root{0, 0, -cfg.gravity * robot_mass};
  Vec3 tq_root{};
  std::vector<Vec3> f_obj(w.objects.size()), tq_obj(w.objects.size());
  for (size_t i = 0; i < w.objects.size(); ++i)
    if (!w.objects[i].is_static) f_obj[i] = {0, 0, -cfg.gravity * w.objects[i].mass};

  // scheduled pushes (stored as weight multiples)
  Vec3 push{};
  for (const auto& ev : env.pushes)
    if (s.t >= ev.t && s.t < ev.t + ev.duration) push += (robot_mass * cfg.gravity) * ev.force;
  f_root += push;

  // grasp springs between end-effector points and object attachment sites
  if (forces) forces->grasp_force.assign(grasps.size(), 0.0);
  for (size_t gi = 0; gi < grasps.size(); ++gi) {
    const GraspCommand& g = grasps[gi];
    if (!g.active) continue;
    check(g.object >= 0 && g.object < int(w.objects.size()), "grasp object index out of range");
    const ObjectModel& om = w.objects[size_t(g.object)];
    check(g.site >= 0 && g.site < int(om.sites.size()), "grasp site index out of range");
    const RigidState& os = s.objects[size_t(g.object)];
    const Vec3 site_w = os.p + quat_rotate(os.q, om.sites[size_t(g.site)].pos);
    Vec3 ee_p;
    Vec3 ee_conv{};
    double k, c;
    if (g.ee == kLeftHand || g.ee == kRightHand) {
      ee_p = kin.hand(g.ee - kLeftHand);
      k = cfg.hand_spring_k;
      c = cfg.hand_spring_c;
    } else {
      const int f = g.ee - kLeftFoot;
      ee_p = 0.5 * (kin.toe[size_t(f)] + kin.heel[size_t(f)]);
      ee_conv = 0.5 * (toe_conv[size_t(f)] + heel_conv[size_t(f)]);
      k = cfg.foot_spring_k;
      c = cfg.foot_spring_c;
    }
    const Vec3 v_ee = s.root.v + cross(s.root.w, ee_p - com) + ee_conv;
    const Vec3 v_site = os.v + cross(os.w, site_w - os.p);
    const Vec3 f = k * (site_w - ee_p) + c * (v_site - v_ee);
    f_root += f;
    tq_root += cross(ee_p - com, f);
    if (!om.is_static) {
      f_obj[size_t(g.object)] -= f;
      tq_obj[size_t(g.object)] -= cross(site_w - os.p, f);
    }
    if (forces) forces->grasp_force[gi] = norm(f);
  }

  // wheel rolling resistance (damping + dry friction at the axle)
  for (size_t i = 0; i < w.objects.size(); ++i) {
    const ObjectModel& om = w.objects[i];
    if (om.wheels.empty() || om.is_static) continue;
    const RigidState& os = s.objects[i];
    const Vec3 xw = quat_rotate(os.q, {1, 0, 0});
    Vec3 d{xw[0], xw[1], 0};
    const double dl = norm(d);
    if (dl < 1e-9) continue;
    d = (1.0 / dl) * d;
    for (const auto& wh : om.wheels) {
      const Vec3 hub = os.p + quat_rotate(os.q, wh.pos);
      const Vec3 bottom = hub - Vec3{0, 0, wh.radius};
      if (bottom[2] - terrain_height(w.terrain, bottom[0], bottom[1]) > 5e-3) continue;
      const double v_roll = dot(d, os.v + cross(os.w, bottom - os.p));
      const double omega = v_roll / wh.radius;
      const double t_axle = wh.joint_damping * omega + wh.joint_friction * std::tanh(omega / 0.5);
      const Vec3 f = (-t_axle / wh.radius) * d;
      f_obj[i] += f;
      tq_obj[i] += cross(bottom - os.p, f);
    }
  }

  // --- velocity integration (gravity, springs, pushes) ---
  out.root.v += (dt / robot_mass) * f_root;
  {
    const Vec3 wb = quat_rotate_inv(s.root.q, s.root.w);
    const Vec3 Iw = quat_rotate(s.root.q, Vec3{w.robot.base_inertia[0] * wb[0],
                                               w.robot.base_inertia[1] * wb[1],
                                               w.robot.base_inertia[2] * wb[2]});
    const Vec3 gyro = cross(s.root.w, Iw);
    out.root.w += dt * inv_inertia_apply(s.root.q, w.robot.base_inertia, tq_root - gyro);
  }
  for (size_t i = 0; i < w.objects.size(); ++i) {
    if (w.objects[i].is_static) continue;
    const double m_eff = w.objects[i].wheels.empty() ? w.objects[i].mass : rolling_mass(w.objects[i]);
    out.objects[i].v += (dt / m_eff) * f_obj[i];
    const Vec3 wb = quat_rotate_inv(s.objects[i].q, s.objects[i].w);
    const Vec3 Iw = quat_rotate(s.objects[i].q, Vec3{w.objects[i].inertia[0] * wb[0],
                                                     w.objects[i].inertia[1] * wb[1],
                                                     w.objects[i].inertia[2] * wb[2]});
    const Vec3 gyro = cross(s.objects[i].w, Iw);
    out.objects[i].w += dt * inv_inertia_apply(s.objects[i].q, w.objects[i].inertia, tq_obj[i] - gyro);
  }

  // --- contact rows ---
  // body indexing for the solver: 0 = robot base, 1+i = object i
  std::vector<BodyRef> bodies(1 + w.objects.size());
  bodies[0] = {1.0 / robot_mass, w.robot.base_inertia, s.root.q, com, &out.root.v, &out.root.w};
  for (size_t i = 0; i < w.objects.size(); ++i) {
    const double m_eff = w.objects[i].wheels.empty() ? w.objects[i].mass : rolling_mass(w.objects[i]);
    bodies[1 + i] = {w.objects[i].is_static ? 0.0 : 1.0 / m_eff, w.objects[i].inertia,
                     s.objects[i].q, s.objects[i].p, &out.objects[i].v, &out.objects[i].w};
  }

  std::vector<ContactRow> rows;
  auto add_ground_row = [&](int body, const Vec3& p, double mu_d, double mu_s, double rest,
                            const Vec3& conveyor, int foot) {
    const double depth = terrain_height(w.terrain, p[0], p[1]) - p[2];
    if (depth <= 0) return;
    ContactRow r;
    r.a = body;
    r.b = -1;
    r.p = p;
    r.n = {0, 0, 1};
    r.depth = depth;
    r.mu_dynamic = mu_d;
    r.mu_static = mu_s;
    r.restitution = rest;
    r.conveyor = conveyor;
    r.foot = foot;
    make_tangent_basis(r.n, r.t1, r.t2);
    rows.push_back(r);
  };

  for (int f = 0; f < 2; ++f) {
    const size_t sf = size_t(f);
    add_ground_row(0, kin.toe[sf], env.dynamic_friction, env.static_friction, 0.0, toe_conv[sf], f);
    add_ground_row(0, kin.heel[sf], env.dynamic_friction, env.static_friction, 0.0, heel_conv[sf], f);
  }
  int cart_idx = -1, box_idx = -1;
  for (size_t i = 0; i < w.objects.size(); ++i) {
    const ObjectModel& om = w.objects[i];
    if (om.kind == ObjectKind::kCart) cart_idx = int(i);
    if (om.kind == ObjectKind::kBox) box_idx = int(i);
    if (om.is_static) continue;
    const double mu_d = env.obj_dynamic_friction;
    const double mu_s = env.obj_dynamic_friction * env.obj_static_ratio;
    for (const Vec3& cp : om.contact_points()) {
      const Vec3 p = s.objects[i].p + quat_rotate(s.objects[i].q, cp);
      add_ground_row(1 + int(i), p, mu_d, mu_s, env.restitution, {}, -1);
    }
    // wheels carry normal load only: rolling is free, axle losses come from
    // the resistance model, and a bilateral row kills lateral slip
    const Vec3 yw = quat_rotate(s.objects[i].q, {0, 1, 0});
    Vec3 lat{yw[0], yw[1], 0.0};
    const double ll = norm(lat);
    for (const auto& wh : om.wheels) {
      const Vec3 hub = s.objects[i].p + quat_rotate(s.objects[i].q, wh.pos);
      const Vec3 bottom = hub - Vec3{0, 0, wh.radius};
      add_ground_row(1 + int(i), bottom, 0.0, 0.0, 0.0, {}, -1);
      const double gap = bottom[2] - terrain_height(w.terrain, bottom[0], bottom[1]);
      if (gap < 5e-3 && ll > 1e-9) {
        ContactRow r;
        r.a = 1 + int(i);
        r.b = -1;
        r.p = bottom;
        r.n = (1.0 / ll) * lat;
        r.equality = true;
        rows.push_back(r);
      }
    }
  }
  // box resting on the cart platform (origin sits at the platform top face)
  if (cart_idx >= 0 && box_idx >= 0) {
    const RigidState& cs = s.objects[size_t(cart_idx)];
    const ObjectModel& cm = w.objects[size_t(cart_idx)];
    for (const Vec3& cp : w.objects[size_t(box_idx)].contact_points()) {
      const Vec3 p = s.objects[size_t(box_idx)].p + quat_rotate(s.objects[size_t(box_idx)].q, cp);
      const Vec3 local = quat_rotate_inv(cs.q, p - cs.p);
      if (std::fabs(local[0]) > cm.half_extents[0] || std::fabs(local[1]) > cm.half_extents[1])
        continue;
      const double depth = -local[2];
      if (depth <= 0 || depth > 0.05) continue;
      ContactRow r;
      r.a = 1 + box_idx;
      r.b = 1 + cart_idx;
      r.p = p;
      r.n = quat_rotate(cs.q, {0, 0, 1});
      r.depth = depth;
      r.mu_dynamic = env.obj_dynamic_friction;
      r.mu_static = env.obj_dynamic_friction * env.obj_static_ratio;
      r.restitution = env.restitution;
      make_tangent_basis(r.n, r.t1, r.t2);
      rows.push_back(r);
    }
  }

  // --- projected Gauss-Seidel impulse solve ---
  static const BodyRef kStatic{};
  for (int it = 0; it < cfg.pgs_max_iters; ++it) {
    double worst = 0;
    for (auto& r : rows) {
      BodyRef& A = bodies[size_t(r.a)];
      BodyRef& B = r.b >= 0 ? bodies[size_t(r.b)] : const_cast<BodyRef&>(kStatic);
      const Vec3 rel = point_velocity(A, r.p) + r.conveyor -
                       (r.b >= 0 ? point_velocity(B, r.p) : Vec3{});
      // normal (or the bilateral direction for equality rows)
      {
        const double vn = dot(r.n, rel);
        double target = 0.0;
        if (!r.equality) {
          target = (cfg.baumgarte / dt) * std::max(0.0, r.depth - cfg.slop);
          if (r.restitution > 0 && vn < -cfg.restitution_threshold)
            target = std::max(target, -r.restitution * vn);
        }
        const double k = effective_mass(A, B, r.p, r.n);
        const double dl = (target - vn) / k;
        const double old = r.lam_n;
        r.lam_n = r.equality ? r.lam_n + dl : std::max(0.0, r.lam_n + dl);
        const double applied = r.lam_n - old;
        if (applied != 0) {
          apply_impulse(A, r.p, applied * r.n);
          if (r.b >= 0) apply_impulse(B, r.p, (-applied) * r.n);
        }
        worst = std::max(worst, std::fabs(applied));
      }
      if (r.equality) continue;  // no friction cone on bilateral rows
      // friction, clamped to the current normal impulse
      const Vec3 rel2 = point_velocity(A, r.p) + r.conveyor -
                        (r.b >= 0 ? point_velocity(B, r.p) : Vec3{});
      const double slip = std::hypot(dot(r.t1, rel2), dot(r.t2, rel2));
      const double mu = slip < 1e-3 ? r.mu_static : r.mu_dynamic;
      for (int ti = 0; ti < 2; ++ti) {
        const Vec3& tdir = ti == 0 ? r.t1 : r.t2;
        double& lam = ti == 0 ? r.lam_t1 : r.lam_t2;
        const Vec3 relt = point_velocity(A, r.p) + r.conveyor -
                          (r.b >= 0 ? point_velocity(B, r.p) : Vec3{});
        const double vt = dot(tdir, relt);
        const double k = effective_mass(A, B, r.p, tdir);
        const double dl = -vt / k;
        const double old = lam;
        lam = std::clamp(lam + dl, -mu * r.lam_n, mu * r.lam_n);
        const double applied = lam - old;
        if (applied != 0) {
          apply_impulse(A, r.p, applied * tdir);
          if (r.b >= 0) apply_impulse(B, r.p, (-applied) * tdir);
        }
        worst = std::max(worst, std::fabs(applied));
      }
    }
    if (worst < cfg.pgs_tol) break;
  }

  // foot force bookkeeping
  out.foot_normal_force = {0, 0};
  std::array<double, 2> foot_imp{};
  for (const auto& r : rows)
    if (r.foot >= 0) foot_imp[size_t(r.foot)] += r.lam_n;
  for (int f = 0; f < 2; ++f) {
    out.foot_normal_force[size_t(f)] = foot_imp[size_t(f)] / dt;
    if (forces) {
      forces->foot_normal[size_t(f)] = foot_imp[size_t(f)] / dt;
      forces->foot_impulse[size_t(f)] = foot_imp[size_t(f)];
    }
  }
  if (forces) forces->push = push;

  // --- position integration ---
  out.root.p += dt * out.root.v;
  out.root.q = quat_normalize(quat_mul(quat_exp(dt * out.root.w), s.root.q));
  for (size_t i = 0; i < w.objects.size(); ++i) {
    if (w.objects[i].is_static) continue;
    out.objects[i].p += dt * out.objects[i].v;
    out.objects[i].q = quat_normalize(quat_mul(quat_exp(dt * out.objects[i].w), s.objects[i].q));
  }

  // --- non-penetration backstop vs terrain ---
  auto lift_body = [&](const std::vector<Vec3>& pts, Vec3& pos) {
    double worst = 0;
    for (const Vec3& lp : pts)
      worst = std::max(worst, terrain_height(w.terrain, lp[0], lp[1]) - lp[2]);
    if (worst > cfg.max_depth) pos[2] += worst - 0.75 * cfg.max_depth;
  };
  {
    const BodyKin k2 = forward_kinematics(w.robot, out.root.p, out.root.q, out.q);
    lift_body({k2.toe[0], k2.heel[0], k2.toe[1], k2.heel[1]}, out.root.p);
  }
  for (size_t i = 0; i < w.objects.size(); ++i) {
    if (w.objects[i].is_static) continue;
    std::vector<Vec3> pts;
    for (const Vec3& cp : w.objects[i].contact_points())
      pts.push_back(out.objects[i].p + quat_rotate(out.objects[i].q, cp));
    for (const auto& wh : w.objects[i].wheels)
      pts.push_back(out.objects[i].p + quat_rotate(out.objects[i].q, wh.pos) -
                    Vec3{0, 0, wh.radius});
    if (!pts.empty()) lift_body(pts, out.objects[i].p);
  }

  // --- foot contact labels (hysteresis at the substep rate) ---
  {
    const BodyKin k2 = forward_kinematics(w.robot, out.root.p, out.root.q, out.q);
    int skate = -1;
    for (size_t i = 0; i < w.objects.size(); ++i)
      if (w.objects[i].kind == ObjectKind::kSkateboard) skate = int(i);
    for (int f = 0; f < 2; ++f) {
      const size_t sf = size_t(f);
      const Vec3 sole = 0.5 * (k2.toe[sf] + k2.heel[sf]);
      double support = terrain_height(w.terrain, sole[0], sole[1]);
      if (skate >= 0) {
        const RigidState& bs = out.objects[size_t(skate)];
        const ObjectModel& bm = w.objects[size_t(skate)];
        const Vec3 local = quat_rotate_inv(bs.q, sole - bs.p);
        if (std::fabs(local[0]) <= bm.half_extents[0] && std::fabs(local[1]) <= bm.half_extents[1])
          support = std::max(support, sole[2] - local[2]);
      }
      const double h = std::min(k2.toe[sf][2], k2.heel[sf][2]) - support;
      const Vec3 v_foot =
          out.root.v + cross(out.root.w, sole - out.root.p) + 0.5 * (toe_conv[sf] + heel_conv[sf]);
      update_foot_label(out.feet[sf], foot_contact_raw(h, norm(v_foot), cfg), cfg.label_hold);
    }
  }

  // --- accelerations (ground truth for the dynamics targets) ---
  out.root.a = (1.0 / dt) * (out.root.v - s.root.v);
  out.root.alpha = (1.0 / dt) * (out.root.w - s.root.w);
  for (size_t i = 0; i < w.objects.size(); ++i) {
    out.objects[i].a = (1.0 / dt) * (out.objects[i].v - s.objects[i].v);
    out.objects[i].alpha = (1.0 / dt) * (out.objects[i].w - s.objects[i].w);
  }

  // --- fault detection ---
  auto finite3 = [](const Vec3& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
  };
  bool ok = true;
  for (double v : out.q) ok = ok && std::isfinite(v);
  for (double v : out.qd) ok = ok && std::isfinite(v);
  ok = ok && finite3(out.root.p) && finite3(out.root.v) && finite3(out.root.w) &&
       std::isfinite(out.root.q.w);
  for (const auto& o : out.objects) ok = ok && finite3(o.p) && finite3(o.v) && finite3(o.w);
  if (!ok) {
    std::ostringstream dump;
    dump << "simulation state became non-finite at t=" << out.t << "; root p=(" << out.root.p[0]
         << "," << out.root.p[1] << "," << out.root.p[2] << ") v=(" << out.root.v[0] << ","
         << out.root.v[1] << "," << out.root.v[2] << ") q0=" << out.q[0] << " qd0=" << out.qd[0];
    throw RuntimeFault(dump.str());
  }
  return out;
}

}  // namespace hoi::sim
