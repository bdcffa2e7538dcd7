#include "hoi/numerics/rotation.hpp"

#include <algorithm>

namespace hoi {

Vec3 quat_rotate(const Quat& q, const Vec3& v) {
  // v' = v + 2w(u x v) + 2u x (u x v), u = (x,y,z)
  const Vec3 u = {q.x, q.y, q.z};
  const Vec3 t = cross(u, v);
  const Vec3 t2 = {2.0 * t[0], 2.0 * t[1], 2.0 * t[2]};
  return v + (q.w * t2) + cross(u, t2);
}

Vec3 quat_rotate_inv(const Quat& q, const Vec3& v) { return quat_rotate(quat_conj(q), v); }

Mat3 quat_to_mat(const Quat& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  return {1 - 2 * (y * y + z * z), 2 * (x * y - w * z),     2 * (x * z + w * y),
          2 * (x * y + w * z),     1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
          2 * (x * z - w * y),     2 * (y * z + w * x),     1 - 2 * (x * x + y * y)};
}

Quat mat_to_quat(const Mat3& m) {
  // Shepperd's method: pick the largest diagonal combination for stability.
  const double tr = m[0] + m[4] + m[8];
  Quat q;
  if (tr > 0.0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m[7] - m[5]) / s;
    q.y = (m[2] - m[6]) / s;
    q.z = (m[3] - m[1]) / s;
  } else if (m[0] > m[4] && m[0] > m[8]) {
    double s = std::sqrt(1.0 + m[0] - m[4] - m[8]) * 2.0;
    q.w = (m[7] - m[5]) / s;
    q.x = 0.25 * s;
    q.y = (m[1] + m[3]) / s;
    q.z = (m[2] + m[6]) / s;
  } else if (m[4] > m[8]) {
    double s = std::sqrt(1.0 + m[4] - m[0] - m[8]) * 2.0;
    q.w = (m[2] - m[6]) / s;
    q.x = (m[1] + m[3]) / s;
    q.y = 0.25 * s;
    q.z = (m[5] + m[7]) / s;
  } else {
    double s = std::sqrt(1.0 + m[8] - m[0] - m[4]) * 2.0;
    q.w = (m[3] - m[1]) / s;
    q.x = (m[2] + m[6]) / s;
    q.y = (m[5] + m[7]) / s;
    q.z = 0.25 * s;
  }
  return quat_normalize(q);
}

double quat_geodesic(const Quat& a, const Quat& b) {
  const double d = std::min(1.0, std::abs(quat_dot(a, b)));
  // The self-distance of a unit quaternion lands a few ulps under 1 and acos
  // amplifies that to ~1e-8 rad; fold it to an exact zero.
  if (d >= 1.0 - 4e-15) return 0.0;
  return 2.0 * std::acos(d);
}

Quat quat_exp(const Vec3& w) {
  const double th = norm(w);
  if (th < 1e-12) return {1.0, 0.5 * w[0], 0.5 * w[1], 0.5 * w[2]};  // small-angle
  const double h = 0.5 * th;
  const double s = std::sin(h) / th;
  return {std::cos(h), s * w[0], s * w[1], s * w[2]};
}

Vec3 quat_log(const Quat& q) {
  const Quat u = q.w < 0 ? Quat{-q.w, -q.x, -q.y, -q.z} : q;
  const double vn = std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z);
  if (vn < 1e-12) return {2.0 * u.x, 2.0 * u.y, 2.0 * u.z};  // small-angle
  const double s = 2.0 * std::atan2(vn, u.w) / vn;
  return {s * u.x, s * u.y, s * u.z};
}

Quat quat_integrate(const Quat& q, const Vec3& w_body, double dt) {
  return quat_normalize(quat_mul(q, quat_exp(dt * w_body)));
}

Quat quat_from_yaw(double yaw) {
  return {std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw)};
}

Quat quat_from_yaw_pitch_roll(double yaw, double pitch, double roll) {
  const Quat qz = quat_from_yaw(yaw);
  const Quat qy = {std::cos(0.5 * pitch), 0.0, std::sin(0.5 * pitch), 0.0};
  const Quat qx = {std::cos(0.5 * roll), std::sin(0.5 * roll), 0.0, 0.0};
  return quat_mul(quat_mul(qz, qy), qx);
}

double quat_yaw(const Quat& q) {
  const Mat3 m = quat_to_mat(q);
  return std::atan2(m[3], m[0]);
}

Mat3 rot6_to_mat(const std::array<double, 6>& r) {
  Vec3 a = {r[0], r[1], r[2]};
  Vec3 b = {r[3], r[4], r[5]};
  const double na = norm(a);
  a = (1.0 / na) * a;
  b -= dot(a, b) * a;
  const double nb = norm(b);
  b = (1.0 / nb) * b;
  const Vec3 c = cross(a, b);
  // a, b, c are the columns.
  return {a[0], b[0], c[0], a[1], b[1], c[1], a[2], b[2], c[2]};
}

std::array<double, 6> mat_to_rot6(const Mat3& m) {
  return {m[0], m[3], m[6], m[1], m[4], m[7]};
}

}  // namespace hoi
