#include "hoi/sim/reference.hpp"

#include <algorithm>
#include <cmath>

#include "hoi/error.hpp"

namespace hoi::sim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kStepHz = 1.4;   // gait cycle frequency
constexpr double kHipPerVel = 0.6;   // hip swing amplitude per m/s
constexpr double kKneePerVel = 0.8;  // knee lift amplitude per m/s

double smoothstep(double a, double b, double x) {
  const double t = std::clamp((x - a) / (b - a), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// von Mises style swing bump, peaks at theta = pi/2, near zero in stance
double swing_bump(double theta) { return std::exp(2.0 * (std::cos(theta - 0.5 * kPi) - 1.0)); }

// speed profile: smooth ramp in, cruise, smooth ramp out
double speed_profile(double t, double T, double vmax) {
  return vmax * smoothstep(0.3, 1.0, t) * (1.0 - smoothstep(T - 0.7, T - 0.2, t));
}

struct GaitPose {
  std::array<double, kNumJoints> q{};
  std::array<bool, 2> contact{true, true};
};

// cyclic leg motion scaled by the commanded speed (signed; negative walks backward)
GaitPose leg_gait(double t, double v) {
  GaitPose g;
  const double theta = 2.0 * kPi * kStepHz * t;
  const double mag = std::fabs(v);
  for (int side = 0; side < 2; ++side) {
    const double th = theta + (side == 1 ? kPi : 0.0);
    const double w = swing_bump(th);
    const double hip = -kHipPerVel * v * std::sin(th);
    const double knee = 0.05 + kKneePerVel * mag * w;
    const size_t base = size_t(side) * 4;
    g.q[base + 0] = hip;
    g.q[base + 1] = (side == 0 ? 1.0 : -1.0) * 0.02 * mag * std::sin(th);
    g.q[base + 2] = knee;
    g.q[base + 3] = -0.6 * (hip + knee);
    g.contact[size_t(side)] = !(w > 0.25 && mag > 0.05);
  }
  return g;
}

void set_arm(std::array<double, kNumJoints>& q, int side, double sh_pitch, double sh_roll,
             double elbow, double wrist) {
  const size_t base = 8 + size_t(side) * 4;
  q[base + 0] = sh_pitch;
  q[base + 1] = sh_roll;
  q[base + 2] = elbow;
  q[base + 3] = wrist;
}

Vec3 site_world(const ObjectModel& om, const RigidState& os, int site) {
  return os.p + quat_rotate(os.q, om.sites[size_t(site)].pos);
}

}  // namespace

std::array<double, 2> two_link_ik(double dx, double dz, double l1, double l2,
                                  bool flex_backward) {
  double rho = std::sqrt(dx * dx + dz * dz);
  const double lo = std::fabs(l1 - l2) + 1e-6, hi = l1 + l2 - 1e-6;
  if (rho < 1e-9) rho = lo;
  const double cl = std::clamp(rho, lo, hi) / rho;
  dx *= cl;
  dz *= cl;
  rho *= cl;
  const double ce = std::clamp((rho * rho - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double e = std::acos(ce);
  const double beta = std::atan2(l2 * std::sin(e), l1 + l2 * ce);
  const double alpha = std::atan2(dx, -dz);  // forward-positive angle from straight down
  if (flex_backward) return {-(alpha + beta), e};  // knee
  return {-(alpha - beta), -e};                    // elbow
}

Task task_from_string(const std::string& s) {
  if (s == "carry_box") return Task::kCarryBox;
  if (s == "push_cart") return Task::kPushCart;
  if (s == "pull_cart") return Task::kPullCart;
  if (s == "skateboard") return Task::kSkateboard;
  if (s == "cart_with_box") return Task::kCartWithBox;
  if (s == "terrain_carry") return Task::kTerrainCarry;
  throw ConfigError("unknown task: " + s);
}

const char* task_name(Task t) {
  switch (t) {
    case Task::kCarryBox: return "carry_box";
    case Task::kPushCart: return "push_cart";
    case Task::kPullCart: return "pull_cart";
    case Task::kSkateboard: return "skateboard";
    case Task::kCartWithBox: return "cart_with_box";
    case Task::kTerrainCarry: return "terrain_carry";
  }
  return "unknown";
}

std::vector<ObjectModel> task_objects(Task t) {
  switch (t) {
    case Task::kCarryBox: return {make_box()};
    case Task::kPushCart:
    case Task::kPullCart: return {make_cart()};
    case Task::kSkateboard: return {make_skateboard()};
    case Task::kCartWithBox: return {make_cart(), make_box()};
    case Task::kTerrainCarry: return {make_box(), make_platform()};
  }
  return {};
}

std::vector<TerrainPiece> task_terrain(Task t) {
  if (t == Task::kTerrainCarry)
    return {{TerrainProfile::kPlatform, 0.8, 1.0}, {TerrainProfile::kSlopeUp, 2.4, 1.0}};
  return {};
}

ReferenceMotion generate_reference(Task task, double duration) {
  const double T = std::max(duration, 2.0);
  const double fps = 50.0;
  const int N = int(std::lround(T * fps)) + 1;
  ReferenceMotion ref;
  ref.task = task;
  ref.fps = fps;
  const std::vector<ObjectModel> objs = task_objects(task);
  ref.num_objects = int(objs.size());
  const RobotModel robot = make_robot();
  const double h0 = robot.rest_root_height();

  ref.frames.resize(size_t(N));
  std::vector<std::array<Vec3, 4>> ee_pts;  // lf, rf, lh, rh per frame
  ee_pts.resize(size_t(N));

  // integrated forward progress (trapezoid); task-specific speed
  auto task_speed = [&](double t) {
    switch (task) {
      case Task::kCarryBox: return speed_profile(t, T, 0.5);
      case Task::kPushCart: return speed_profile(t, T, 0.5);
      case Task::kPullCart: return -speed_profile(t, T, 0.4);
      case Task::kSkateboard: return 0.6;
      case Task::kCartWithBox: return speed_profile(t, T, 0.45);
      case Task::kTerrainCarry: return speed_profile(t, T, 0.4);
    }
    return 0.0;
  };
  std::vector<double> root_x(size_t(N), 0.0);
  for (int i = 1; i < N; ++i) {
    const double t0 = double(i - 1) / fps, t1 = double(i) / fps;
    root_x[size_t(i)] = root_x[size_t(i - 1)] + 0.5 * (task_speed(t0) + task_speed(t1)) / fps;
  }

  for (int i = 0; i < N; ++i) {
    RefFrame& f = ref.frames[size_t(i)];
    const double t = double(i) / fps;
    f.phase = double(i) / double(N - 1);
    const double v = task_speed(t);
    double root_z = h0;
    GaitPose gait = leg_gait(t, v);

    switch (task) {
      case Task::kCarryBox:
      case Task::kTerrainCarry:
        for (int side = 0; side < 2; ++side)
          set_arm(f.q, side, -0.5, side == 0 ? -0.15 : 0.15, -1.1, 0.0);
        break;
      case Task::kPushCart:
      case Task::kPullCart:
      case Task::kCartWithBox: {
        // reach the handle bar: 0.35 m ahead of the shoulder, 0.25 m below
        const auto arm = two_link_ik(0.35, -0.25, robot.upper_arm, robot.forearm + robot.palm_drop,
                                     false);
        for (int side = 0; side < 2; ++side)
          set_arm(f.q, side, arm[0], side == 0 ? -0.12 : 0.12, arm[1], 0.0);
        break;
      }
      case Task::kSkateboard: {
        root_z = 0.134 + h0 - 0.08;  // crouched glide on the deck
        // ankle target sits sole_drop above the deck; hip is hip_off_z below the root
        const double dz = (0.134 + robot.sole_drop) - (root_z + robot.hip_off_z);
        for (int side = 0; side < 2; ++side) {
          const double dx = side == 0 ? 0.20 : -0.20;  // staggered stance
          const auto leg = two_link_ik(dx, dz, robot.thigh, robot.shank, true);
          const size_t base = size_t(side) * 4;
          gait.q[base + 0] = leg[0];
          gait.q[base + 1] = side == 0 ? -0.15 : 0.15;  // feet in over the centerline
          gait.q[base + 2] = leg[1];
          gait.q[base + 3] = -(leg[0] + leg[1]);
          gait.contact[size_t(side)] = true;
        }
        for (int side = 0; side < 2; ++side)
          set_arm(f.q, side, -0.2, side == 0 ? 0.3 : -0.3, -0.3, 0.0);
        break;
      }
    }
    for (int j = 0; j < 8; ++j) f.q[size_t(j)] = gait.q[size_t(j)];
    f.feet_contact = gait.contact;

    if (task == Task::kTerrainCarry) {
      // smoothed course height: platform step up/down, then the long ramp
      const double x = root_x[size_t(i)];
      root_z = h0 + 0.15 * (smoothstep(0.62, 0.88, x) - smoothstep(1.52, 1.78, x)) +
               0.30 * smoothstep(2.35, 3.55, x);
    }

    f.root.p = {root_x[size_t(i)], 0.0, root_z};
    f.root.q = Quat{};

    const BodyKin kin = forward_kinematics(robot, f.root.p, f.root.q, f.q);
    for (int b = 0; b < kNumBodies; ++b) {
      f.body_p[size_t(b)] = kin.p[size_t(b)];
      f.body_q[size_t(b)] = kin.q[size_t(b)];
    }
    ee_pts[size_t(i)] = {kin.foot(0), kin.foot(1), kin.hand(0), kin.hand(1)};

    // object trajectories and required contacts
    f.objects.resize(objs.size());
    auto add_contact = [&](int obj, int site, int ee) {
      ContactSpec c;
      c.object = obj;
      c.site = site;
      c.ee = ee;
      c.mask = true;
      c.p_tgt = site_world(objs[size_t(obj)], f.objects[size_t(obj)], site);
      f.contacts.push_back(c);
    };
    switch (task) {
      case Task::kCarryBox:
      case Task::kTerrainCarry: {
        const Vec3 mid = 0.5 * (kin.hand(0) + kin.hand(1));
        f.objects[0].p = mid - quat_rotate(f.root.q, {0, 0, 0.05});
        f.objects[0].q = f.root.q;
        if (task == Task::kTerrainCarry) {
          f.objects[1].p = {1.2, 0, 0};  // the platform slab, static
          f.objects[1].q = Quat{};
        }
        add_contact(0, 0, kLeftHand);
        add_contact(0, 1, kRightHand);
        break;
      }
      case Task::kPushCart:
      case Task::kPullCart:
      case Task::kCartWithBox: {
        f.objects[0].p = {0.80 + root_x[size_t(i)], 0, 0.17};
        f.objects[0].q = Quat{};
        if (task == Task::kCartWithBox) {
          f.objects[1].p = {0.90 + root_x[size_t(i)], 0, 0.17 + 0.175};
          f.objects[1].q = Quat{};
        }
        add_contact(0, 0, kLeftHand);
        add_contact(0, 1, kRightHand);
        break;
      }
      case Task::kSkateboard: {
        f.objects[0].p = {root_x[size_t(i)], 0, 0.134};
        f.objects[0].q = Quat{};
        add_contact(0, 0, kLeftFoot);
        add_contact(0, 1, kRightFoot);
        break;
      }
    }
  }

  // velocities by central finite differences (one-sided at the ends)
  auto at = [&](int i) -> RefFrame& { return ref.frames[size_t(std::clamp(i, 0, N - 1))]; };
  for (int i = 0; i < N; ++i) {
    RefFrame& f = ref.frames[size_t(i)];
    const int lo = std::max(0, i - 1), hi = std::min(N - 1, i + 1);
    const double inv_dt = fps / double(hi - lo);
    for (int j = 0; j < kNumJoints; ++j)
      f.qd[size_t(j)] = (at(hi).q[size_t(j)] - at(lo).q[size_t(j)]) * inv_dt;
    f.root.v = inv_dt * (at(hi).root.p - at(lo).root.p);
    f.root.w = inv_dt * quat_log(quat_mul(at(hi).root.q,
                                          Quat{at(lo).root.q.w, -at(lo).root.q.x,
                                               -at(lo).root.q.y, -at(lo).root.q.z}));
    for (size_t o = 0; o < objs.size(); ++o) {
      f.objects[o].v = inv_dt * (at(hi).objects[o].p - at(lo).objects[o].p);
      f.objects[o].w = inv_dt * quat_log(quat_mul(at(hi).objects[o].q,
                                                  Quat{at(lo).objects[o].q.w, -at(lo).objects[o].q.x,
                                                       -at(lo).objects[o].q.y,
                                                       -at(lo).objects[o].q.z}));
    }
    f.body_v[0] = f.root.v;
    f.body_v[1] = f.root.w;
    for (int e = 0; e < 4; ++e)
      f.body_v[size_t(2 + e)] =
          inv_dt * (ee_pts[size_t(std::min(N - 1, i + 1))][size_t(e)] -
                    ee_pts[size_t(std::max(0, i - 1))][size_t(e)]);
  }
  return ref;
}

WorldState init_state_from_reference(const World& w, const ReferenceMotion& ref) {
  check(!ref.frames.empty(), "reference has no frames");
  check(ref.num_objects == int(w.objects.size()), "object count mismatch between world and reference");
  const RefFrame& f = ref.frames[0];
  WorldState s;
  s.q = f.q;
  s.qd = f.qd;
  s.root = f.root;
  s.objects = f.objects;
  for (int i = 0; i < 2; ++i) s.feet[size_t(i)].label = f.feet_contact[size_t(i)];
  return s;
}

}  // namespace hoi::sim
