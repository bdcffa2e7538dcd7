#include "hoi/sim/model.hpp"

#include <algorithm>
#include <cmath>

#include "hoi/error.hpp"

namespace hoi::sim {

namespace {

Quat rx(double a) { return quat_exp({a, 0, 0}); }
Quat ry(double a) { return quat_exp({0, a, 0}); }

// dense deterministic sampling of a box surface, used as FPS candidates
void sample_box(std::vector<Vec3>& out, const Vec3& c, const Vec3& h, int res) {
  for (int i = 0; i <= res; ++i) {
    for (int j = 0; j <= res; ++j) {
      const double u = -1.0 + 2.0 * double(i) / res;
      const double v = -1.0 + 2.0 * double(j) / res;
      out.push_back(c + Vec3{h[0] * u, h[1] * v, h[2]});
      out.push_back(c + Vec3{h[0] * u, h[1] * v, -h[2]});
      out.push_back(c + Vec3{h[0] * u, h[1], h[2] * v});
      out.push_back(c + Vec3{h[0] * u, -h[1], h[2] * v});
      out.push_back(c + Vec3{h[0], h[1] * u, h[2] * v});
      out.push_back(c + Vec3{-h[0], h[1] * u, h[2] * v});
    }
  }
}

Vec3 box_inertia(double m, const Vec3& h) {
  // full extents are 2h
  const double x = 2 * h[0], y = 2 * h[1], z = 2 * h[2];
  return {m / 12.0 * (y * y + z * z), m / 12.0 * (x * x + z * z), m / 12.0 * (x * x + y * y)};
}

}  // namespace

double RobotModel::total_mass() const {
  double m = base_mass;
  for (double lm : link_mass) m += lm;
  return m;
}

RobotModel make_robot() {
  RobotModel r;
  // per-joint tables; legs then arms, left before right
  struct Row {
    double lo, hi, tau, kp, kd, inertia, mass;
  };
  const Row leg[4] = {
      {-2.0, 2.0, 88.0, 40.18, 2.558, 0.08, 1.2},   // hip pitch (thigh)
      {-0.8, 0.8, 88.0, 99.10, 6.309, 0.08, 0.0},   // hip roll
      {-0.1, 2.5, 139.0, 99.10, 6.309, 0.08, 0.8},  // knee (shank)
      {-0.9, 0.9, 50.0, 28.50, 1.814, 0.04, 0.3},   // ankle pitch (foot)
  };
  const Row arm[4] = {
      {-3.0, 3.0, 25.0, 14.25, 0.9072, 0.03, 0.5},  // shoulder pitch (upper arm)
      {-1.6, 1.6, 25.0, 14.25, 0.9072, 0.03, 0.0},  // shoulder roll
      {-2.3, 0.1, 25.0, 14.25, 0.9072, 0.03, 0.4},  // elbow (forearm, flexes forward = negative)
      {-1.6, 1.6, 5.0, 16.78, 1.068, 0.03, 0.1},    // wrist pitch (hand)
  };
  for (int side = 0; side < 2; ++side) {
    for (int j = 0; j < 4; ++j) {
      const int leg_idx = side * 4 + j;
      const int arm_idx = 8 + side * 4 + j;
      r.q_lo[size_t(leg_idx)] = leg[j].lo;
      r.q_hi[size_t(leg_idx)] = leg[j].hi;
      r.tau_limit[size_t(leg_idx)] = leg[j].tau;
      r.kp[size_t(leg_idx)] = leg[j].kp;
      r.kd[size_t(leg_idx)] = leg[j].kd;
      r.joint_inertia[size_t(leg_idx)] = leg[j].inertia;
      r.link_mass[size_t(leg_idx)] = leg[j].mass;
      r.q_lo[size_t(arm_idx)] = arm[j].lo;
      r.q_hi[size_t(arm_idx)] = arm[j].hi;
      r.tau_limit[size_t(arm_idx)] = arm[j].tau;
      r.kp[size_t(arm_idx)] = arm[j].kp;
      r.kd[size_t(arm_idx)] = arm[j].kd;
      r.joint_inertia[size_t(arm_idx)] = arm[j].inertia;
      r.link_mass[size_t(arm_idx)] = arm[j].mass;
    }
  }
  r.base_mass = 5.0;
  // effective whole-body inertia about the base, limbs included (configuration
  // dependence neglected)
  r.base_inertia = {1.1, 1.1, 0.35};
  return r;
}

BodyKin forward_kinematics(const RobotModel& m, const Vec3& root_p, const Quat& root_q,
                           const std::array<double, kNumJoints>& q) {
  BodyKin out;
  out.p[kBodyRoot] = root_p;
  out.q[kBodyRoot] = root_q;
  for (int side = 0; side < 2; ++side) {
    const double sy = side == 0 ? 1.0 : -1.0;
    const int jl = side * 4;      // leg joints
    const int ja = 8 + side * 4;  // arm joints
    // leg chain: hip roll about x, then hip pitch about y
    const Vec3 hip = root_p + quat_rotate(root_q, {0, sy * m.hip_off_y, m.hip_off_z});
    const Quat q_hip =
        quat_mul(root_q, quat_mul(rx(q[size_t(jl + 1)]), ry(q[size_t(jl + 0)])));
    const Vec3 knee = hip + quat_rotate(q_hip, {0, 0, -m.thigh});
    const Quat q_knee = quat_mul(q_hip, ry(q[size_t(jl + 2)]));
    const Vec3 ankle = knee + quat_rotate(q_knee, {0, 0, -m.shank});
    const Quat q_foot = quat_mul(q_knee, ry(q[size_t(jl + 3)]));
    out.p[size_t(kBodyLHip + side)] = hip;
    out.q[size_t(kBodyLHip + side)] = q_hip;
    out.p[size_t(kBodyLKnee + side)] = knee;
    out.q[size_t(kBodyLKnee + side)] = q_knee;
    out.p[size_t(kBodyLAnkle + side)] = ankle;
    out.q[size_t(kBodyLAnkle + side)] = q_foot;
    out.toe[size_t(side)] = ankle + quat_rotate(q_foot, {m.toe_x, 0, -m.sole_drop});
    out.heel[size_t(side)] = ankle + quat_rotate(q_foot, {m.heel_x, 0, -m.sole_drop});
    // arm chain: shoulder roll about x, then shoulder pitch about y
    const Vec3 sh = root_p + quat_rotate(root_q, {0, sy * m.shoulder_off_y, m.shoulder_off_z});
    const Quat q_sh =
        quat_mul(root_q, quat_mul(rx(q[size_t(ja + 1)]), ry(q[size_t(ja + 0)])));
    const Vec3 el = sh + quat_rotate(q_sh, {0, 0, -m.upper_arm});
    const Quat q_el = quat_mul(q_sh, ry(q[size_t(ja + 2)]));
    const Vec3 wr = el + quat_rotate(q_el, {0, 0, -m.forearm});
    const Quat q_wr = quat_mul(q_el, ry(q[size_t(ja + 3)]));
    out.p[size_t(kBodyLShoulder + side)] = sh;
    out.q[size_t(kBodyLShoulder + side)] = q_sh;
    out.p[size_t(kBodyLElbow + side)] = el;
    out.q[size_t(kBodyLElbow + side)] = q_el;
    out.p[size_t(kBodyLWrist + side)] = wr;
    out.q[size_t(kBodyLWrist + side)] = q_wr;
    out.p[size_t(kBodyLHand + side)] = wr + quat_rotate(q_wr, {0, 0, -m.palm_drop});
    out.q[size_t(kBodyLHand + side)] = q_wr;
  }
  return out;
}

std::vector<Vec3> farthest_point_sample(const std::vector<Vec3>& candidates, int n) {
  check(int(candidates.size()) >= n && n > 0, "not enough candidate points to sample");
  std::vector<Vec3> picked;
  picked.reserve(size_t(n));
  std::vector<double> dist(candidates.size(), 1e300);
  size_t cur = 0;  // deterministic start
  for (int k = 0; k < n; ++k) {
    picked.push_back(candidates[cur]);
    size_t next_i = 0;
    double best = -1.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
      const Vec3 d = candidates[i] - candidates[cur];
      dist[i] = std::min(dist[i], dot(d, d));
      if (dist[i] > best) {
        best = dist[i];
        next_i = i;
      }
    }
    cur = next_i;
  }
  return picked;
}

std::vector<Vec3> ObjectModel::contact_points() const {
  std::vector<Vec3> pts;
  if (kind == ObjectKind::kBox) {
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {-1, 1})
          pts.push_back(geom_center + Vec3{sx * half_extents[0], sy * half_extents[1],
                                           sz * half_extents[2]});
  }
  // wheeled objects touch the ground only through their wheels; terrain is static
  return pts;
}

ObjectModel make_box() {
  ObjectModel o;
  o.kind = ObjectKind::kBox;
  o.name = "box";
  o.mass = 1.3;
  o.half_extents = {0.18, 0.14, 0.175};  // 0.36 x 0.28 x 0.35
  o.inertia = box_inertia(o.mass, o.half_extents);
  o.rest_height = o.half_extents[2];
  o.sites = {{"left_hand", {0, 0.14, 0.05}}, {"right_hand", {0, -0.14, 0.05}}};
  std::vector<Vec3> cand;
  sample_box(cand, {0, 0, 0}, o.half_extents, 11);
  o.cloud = farthest_point_sample(cand, kCloudSize);
  return o;
}

ObjectModel make_cart() {
  ObjectModel o;
  o.kind = ObjectKind::kCart;
  o.name = "cart";
  o.mass = 13.0;
  // body origin at the platform top face center, 0.17 m above ground at rest
  o.half_extents = {0.45, 0.30, 0.02};  // platform slab: 0.90 x 0.60
  o.geom_center = {0, 0, -0.02};
  o.inertia = box_inertia(o.mass, {0.45, 0.30, 0.10});
  o.rest_height = 0.17;
  const double wheel_r = 0.085;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      o.wheels.push_back({{sx * 0.35, sy * 0.25, wheel_r - 0.17}, wheel_r, 0.05, 0.05, 0.0, 0.3});
  // pushing handle rises 0.85 m above ground at the rear edge
  o.sites = {{"left_hand", {-0.45, 0.15, 0.68}}, {"right_hand", {-0.45, -0.15, 0.68}}};
  std::vector<Vec3> cand;
  sample_box(cand, o.geom_center, o.half_extents, 11);
  sample_box(cand, {-0.45, 0, 0.34}, {0.02, 0.22, 0.34}, 7);  // handle frame
  o.cloud = farthest_point_sample(cand, kCloudSize);
  return o;
}

ObjectModel make_skateboard() {
  ObjectModel o;
  o.kind = ObjectKind::kSkateboard;
  o.name = "skateboard";
  o.mass = 3.269;
  // body origin at the deck top face center; clearance ~0.134 m unloaded
  o.half_extents = {0.395, 0.12, 0.015};  // deck: 0.79 x 0.24
  o.geom_center = {0, 0, -0.015};
  o.inertia = box_inertia(o.mass, o.half_extents);
  o.rest_height = 0.134;
  const double wheel_r = 0.03425;  // 6.85 cm diameter
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      o.wheels.push_back(
          {{sx * 0.27, sy * 0.095, wheel_r - 0.134}, wheel_r, 0.0, 5e-4, 5e-5, 0.15});
  o.sites = {{"left_foot", {0.20, 0, 0}}, {"right_foot", {-0.20, 0, 0}}};
  std::vector<Vec3> cand;
  sample_box(cand, o.geom_center, o.half_extents, 13);
  o.cloud = farthest_point_sample(cand, kCloudSize);
  return o;
}

namespace {

ObjectModel make_terrain(const char* name, const Vec3& half, const Vec3& center) {
  ObjectModel o;
  o.kind = ObjectKind::kTerrain;
  o.name = name;
  o.mass = 1e6;
  o.is_static = true;
  o.half_extents = half;
  o.geom_center = center;
  o.inertia = box_inertia(o.mass, half);
  o.rest_height = 0;
  std::vector<Vec3> cand;
  sample_box(cand, center, half, 11);
  o.cloud = farthest_point_sample(cand, kCloudSize);
  return o;
}

}  // namespace

// 80 x 80 cm slab, 15 cm tall; origin at the ground under its center
ObjectModel make_platform() { return make_terrain("platform", {0.40, 0.40, 0.075}, {0, 0, 0.075}); }

// 30 cm rise over a 110 cm run (about 15 degrees); modeled as its bounding
// wedge for the height query, origin at the foot of the slope
ObjectModel make_slope() {
  ObjectModel o = make_terrain("slope", {0.55, 0.40, 0.15}, {0.55, 0, 0.15});
  return o;
}

// three steps, 10 cm rise and 30 cm tread each; origin at the first step edge
ObjectModel make_stair() {
  ObjectModel o = make_terrain("stair", {0.45, 0.40, 0.15}, {0.45, 0, 0.15});
  return o;
}

}  // namespace hoi::sim
