#include <cmath>

#include "doctest.h"
#include "hoi/error.hpp"
#include "hoi/metrics/metrics.hpp"
#include "metrics_oracle.hpp"

using namespace hoi;
using namespace hoi::metrics;
using hoi::testing::brute_force_metrics;
using hoi::testing::random_trajectory;

namespace {

Trajectory shifted(const Trajectory& src, const Vec3& dp, bool shift_root) {
  Trajectory out = src;
  for (auto& f : out.frames) {
    if (shift_root) f.root_p = f.root_p + dp;
    for (auto& p : f.body_p) p = p + dp;
  }
  return out;
}

}  // namespace

TEST_CASE("identical trajectories give exactly zero everywhere") {
  const Trajectory ref = random_trajectory(11, 20, 5, 8, 2);
  const MetricsReport rep = compute_metrics(ref, ref);
  for (double v : rep.values()) CHECK(v == 0.0);
}

TEST_CASE("rigid 1cm offset: global position error 10mm, root-relative zero") {
  const Trajectory ref = random_trajectory(12, 30, 6, 8, 1);
  const Trajectory act = shifted(ref, {0.01, 0.0, 0.0}, true);
  const MetricsReport rep = compute_metrics(act, ref);
  CHECK(rep.g_mpbpe == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(std::fabs(rep.mpbpe) < 1e-9);
  // constant offset: all derivative metrics stay zero
  CHECK(std::fabs(rep.mpbve) < 1e-9);
  CHECK(std::fabs(rep.mpbae) < 1e-9);
  CHECK(rep.mpboe == 0.0);
  CHECK(rep.mpjpe == 0.0);
}

TEST_CASE("offset bodies but not root shows up root-relative too") {
  const Trajectory ref = random_trajectory(13, 10, 4, 8, 1);
  const Trajectory act = shifted(ref, {0.0, 0.01, 0.0}, false);
  const MetricsReport rep = compute_metrics(act, ref);
  CHECK(rep.g_mpbpe == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(rep.mpbpe == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("quarter-turn orientation error in milliradians") {
  const Trajectory ref = random_trajectory(14, 12, 3, 8, 1);
  Trajectory act = ref;
  const Quat tilt = quat_from_yaw(M_PI / 2.0);
  for (auto& f : act.frames)
    for (auto& q : f.body_q) q = quat_mul(tilt, q);
  const MetricsReport rep = compute_metrics(act, ref);
  CHECK(rep.mpboe == doctest::Approx(1000.0 * M_PI / 2.0).epsilon(1e-9));
}

TEST_CASE("joint angle and joint velocity errors on a linear ramp") {
  const size_t T = 25, J = 8;
  Trajectory ref = random_trajectory(15, T, 2, J, 1);
  Trajectory act = ref;
  for (size_t t = 0; t < T; ++t)
    for (size_t j = 0; j < J; ++j) act.frames[t].joints[j] += 0.001 * double(t);
  const MetricsReport rep = compute_metrics(act, ref);
  // |offset| grows 0,1,2,...,T-1 milliradians; mean = (T-1)/2
  CHECK(rep.mpjpe == doctest::Approx(0.001 * double(T - 1) / 2.0 * 1e3).epsilon(1e-9));
  // per-frame joint velocity differs by exactly 1 mrad/frame
  CHECK(rep.mpjve == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("object velocity offset: 3mm per frame") {
  const size_t T = 16;
  Trajectory ref = random_trajectory(16, T, 2, 4, 2);
  Trajectory act = ref;
  for (size_t t = 0; t < T; ++t)
    for (auto& p : act.frames[t].obj_p) p[0] += 0.003 * double(t);
  const MetricsReport rep = compute_metrics(act, ref);
  CHECK(rep.mpove == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(std::fabs(rep.mpoae) < 1e-9);
}

TEST_CASE("quadratic body drift gives constant acceleration error") {
  const size_t T = 12;
  const double c = 0.0004;  // m/frame^2
  Trajectory ref = random_trajectory(17, T, 3, 4, 1);
  Trajectory act = ref;
  for (size_t t = 0; t < T; ++t)
    for (auto& p : act.frames[t].body_p) p[2] += 0.5 * c * double(t) * double(t);
  const MetricsReport rep = compute_metrics(act, ref);
  CHECK(rep.mpbae == doctest::Approx(1e3 * c).epsilon(1e-9));
}

TEST_CASE("matches brute-force recomputation on random pairs") {
  for (uint64_t seed = 100; seed < 130; ++seed) {
    const Trajectory a = random_trajectory(seed * 2 + 0, 14, 5, 8, 2);
    const Trajectory r = random_trajectory(seed * 2 + 1, 14, 5, 8, 2);
    const auto want = brute_force_metrics(a, r);
    const auto got = compute_metrics(a, r).values();
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) {
      CAPTURE(seed);
      CAPTURE(i);
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("csv header and row stay in sync") {
  const Trajectory a = random_trajectory(40, 8, 3, 8, 1);
  const Trajectory r = random_trajectory(41, 8, 3, 8, 1);
  const MetricsReport rep = compute_metrics(a, r);
  const std::string header = MetricsReport::csv_header();
  const std::string row = rep.csv_row();
  const auto count = [](const std::string& s) {
    size_t n = 1;
    for (char ch : s)
      if (ch == ',') ++n;
    return n;
  };
  CHECK(count(header) == 11);
  CHECK(count(row) == 11);
  CHECK(header.find("E_mpbpe[mm]") == 0);
  CHECK(header.find("E_mpoae[mm/frame^2]") != std::string::npos);
}

TEST_CASE("rejects malformed trajectory pairs") {
  Trajectory a = random_trajectory(50, 6, 3, 8, 1);
  Trajectory r = random_trajectory(51, 6, 3, 8, 1);
  SUBCASE("empty") {
    Trajectory e;
    CHECK_THROWS_AS((void)compute_metrics(e, e), ContractError);
  }
  SUBCASE("length mismatch") {
    r.frames.pop_back();
    CHECK_THROWS_AS((void)compute_metrics(a, r), ContractError);
  }
  SUBCASE("body count mismatch") {
    r.frames[2].body_p.pop_back();
    CHECK_THROWS_AS((void)compute_metrics(a, r), ContractError);
  }
  SUBCASE("joint count mismatch") {
    a.frames[3].joints.push_back(0.0);
    CHECK_THROWS_AS((void)compute_metrics(a, r), ContractError);
  }
}

TEST_CASE("fall detection against nominal root height") {
  Trajectory t = random_trajectory(60, 20, 2, 4, 1);
  SuccessConfig cfg;
  cfg.nominal_root_height = 0.75;
  for (auto& f : t.frames) f.root_p[2] = 0.70;
  CHECK_FALSE(compute_success(t, t, cfg).fell);
  t.frames[12].root_p[2] = 0.44;  // below 60% of 0.75
  const SuccessReport rep = compute_success(t, t, cfg);
  CHECK(rep.fell);
  CHECK_FALSE(rep.complete);
}

TEST_CASE("completion fails when an object diverges past a meter") {
  Trajectory a = random_trajectory(61, 20, 2, 4, 1);
  Trajectory r = a;
  for (auto& f : a.frames) f.root_p[2] = 0.75;
  for (auto& f : r.frames) f.root_p[2] = 0.75;
  SuccessConfig cfg;
  CHECK(compute_success(a, r, cfg).complete);
  a.frames[7].obj_p[0][1] += 1.2;
  CHECK_FALSE(compute_success(a, r, cfg).complete);
}

TEST_CASE("glide requires an unbroken both-feet streak of one second") {
  SuccessConfig cfg;
  cfg.frame_hz = 50;
  cfg.glide_min_s = 1.0;
  Trajectory a = random_trajectory(62, 120, 2, 4, 1);
  for (auto& f : a.frames) {
    f.root_p[2] = 0.75;
    f.feet_on_obj = {false, false};
  }
  Trajectory r = a;
  CHECK_FALSE(compute_success(a, r, cfg).glide);
  // 49-frame streak: just under a second
  for (size_t t = 10; t < 59; ++t) a.frames[t].feet_on_obj = {true, true};
  CHECK_FALSE(compute_success(a, r, cfg).glide);
  // extend to 50 frames
  a.frames[59].feet_on_obj = {true, true};
  CHECK(compute_success(a, r, cfg).glide);
  // a single-foot frame in the middle breaks the streak
  a.frames[30].feet_on_obj = {true, false};
  CHECK_FALSE(compute_success(a, r, cfg).glide);
}
