#pragma once

#include <array>
#include <string>
#include <vector>

#include "hoi/numerics/rotation.hpp"

namespace hoi::metrics {

// One 50 Hz frame of everything the tracking metrics consume. Actual and
// reference trajectories share this layout.
struct Frame {
  Vec3 root_p = {0, 0, 0};
  Quat root_q;
  std::vector<double> joints;
  std::vector<Vec3> body_p;
  std::vector<Quat> body_q;
  std::vector<Vec3> obj_p;
  std::vector<Quat> obj_q;
  // Feet currently in contact with object 1 (used by the glide predicate).
  std::array<uint8_t, 2> feet_on_obj = {0, 0};
};

struct Trajectory {
  std::vector<Frame> frames;
};

// Mean tracking errors. Positions in mm, angles in 1e-3 rad; velocities and
// accelerations are first/second per-frame differences at the trajectory
// rate, reported per frame.
struct MetricsReport {
  double mpbpe = 0;    // body position, root-relative (mm)
  double g_mpbpe = 0;  // body position, global (mm)
  double mpboe = 0;    // body orientation (1e-3 rad)
  double mpjpe = 0;    // joint position, L1 (1e-3 rad)
  double mpjve = 0;    // joint velocity, L1 (1e-3 rad/frame)
  double mpbve = 0;    // body linear velocity (mm/frame)
  double mpbae = 0;    // body linear acceleration (mm/frame^2)
  double mpope = 0;    // object position (mm)
  double mpooe = 0;    // object orientation (1e-3 rad)
  double mpove = 0;    // object velocity (mm/frame)
  double mpoae = 0;    // object acceleration (mm/frame^2)

  static std::string csv_header();
  std::string csv_row() const;
  std::array<double, 11> values() const {
    return {mpbpe, g_mpbpe, mpboe, mpjpe, mpjve, mpbve, mpbae, mpope, mpooe, mpove, mpoae};
  }
};

// Both trajectories must be non-empty, equally long, and shape-consistent
// frame by frame. Velocity metrics need at least 2 frames, acceleration 3.
MetricsReport compute_metrics(const Trajectory& actual, const Trajectory& reference);

struct SuccessConfig {
  double nominal_root_height = 0.75;
  double fall_fraction = 0.6;       // fell if root drops below this share
  double object_divergence = 1.0;   // metres; completion bound
  double glide_min_s = 1.0;
  double frame_hz = 50.0;
};

struct SuccessReport {
  bool fell = false;
  bool complete = false;
  bool glide = false;  // both feet continuously on object 1 long enough
};

SuccessReport compute_success(const Trajectory& actual, const Trajectory& reference,
                              const SuccessConfig& cfg);

}  // namespace hoi::metrics
