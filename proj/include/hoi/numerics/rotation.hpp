#pragma once

#include <array>
#include <cmath>

namespace hoi {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;  // row-major

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3& operator+=(Vec3& a, const Vec3& b) { a[0] += b[0]; a[1] += b[1]; a[2] += b[2]; return a; }
inline Vec3& operator-=(Vec3& a, const Vec3& b) { a[0] -= b[0]; a[1] -= b[1]; a[2] -= b[2]; return a; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Scalar-first unit quaternion.
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

inline Quat quat_mul(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quat quat_conj(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline double quat_dot(const Quat& a, const Quat& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Quat quat_normalize(const Quat& q) {
  const double n = std::sqrt(quat_dot(q, q));
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

// Rotate a vector by the quaternion (q must be unit norm).
Vec3 quat_rotate(const Quat& q, const Vec3& v);
// Rotate by the inverse.
Vec3 quat_rotate_inv(const Quat& q, const Vec3& v);

Mat3 quat_to_mat(const Quat& q);
Quat mat_to_quat(const Mat3& m);

// Geodesic angle 2*acos(|<q1,q2>|); the absolute value folds the double cover,
// so q and -q are the same rotation and the result lives in [0, pi].
double quat_geodesic(const Quat& a, const Quat& b);

// Axis-angle exponential: rotation of |w| radians about w/|w|.
Quat quat_exp(const Vec3& w);
// inverse of quat_exp: rotation vector of the shortest arc
Vec3 quat_log(const Quat& q);

// Integrate body-frame angular velocity over dt (exact exponential step).
Quat quat_integrate(const Quat& q, const Vec3& w_body, double dt);

Quat quat_from_yaw(double yaw);
Quat quat_from_yaw_pitch_roll(double yaw, double pitch, double roll);
double quat_yaw(const Quat& q);

// Two-column ("6D") rotation encoding: Gram-Schmidt the two 3-vectors into an
// orthonormal frame. Returns the rotation with those as first two columns.
Mat3 rot6_to_mat(const std::array<double, 6>& r);
std::array<double, 6> mat_to_rot6(const Mat3& m);

struct Pose {
  Vec3 p = {0, 0, 0};
  Quat q;
};

inline Vec3 pose_apply(const Pose& T, const Vec3& v) { return quat_rotate(T.q, v) + T.p; }

inline Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) c[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
  return c;
}

inline Mat3 mat_transpose(const Mat3& a) {
  return {a[0], a[3], a[6], a[1], a[4], a[7], a[2], a[5], a[8]};
}

inline Vec3 mat_apply(const Mat3& m, const Vec3& v) {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
          m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

}  // namespace hoi
