#include "hoi/metrics/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "hoi/error.hpp"

namespace hoi::metrics {

namespace {

void validate(const Trajectory& a, const Trajectory& r) {
  check(!a.frames.empty(), "metrics: empty trajectory");
  check(a.frames.size() == r.frames.size(), "metrics: length mismatch");
  const Frame& f0 = a.frames[0];
  for (size_t t = 0; t < a.frames.size(); ++t) {
    const Frame &fa = a.frames[t], &fr = r.frames[t];
    check(fa.joints.size() == f0.joints.size() && fr.joints.size() == f0.joints.size(),
          "metrics: joint count varies");
    check(fa.body_p.size() == f0.body_p.size() && fr.body_p.size() == f0.body_p.size(),
          "metrics: body count varies");
    check(fa.body_q.size() == fa.body_p.size() && fr.body_q.size() == fr.body_p.size(),
          "metrics: body pose arrays differ");
    check(fa.obj_p.size() == f0.obj_p.size() && fr.obj_p.size() == f0.obj_p.size(),
          "metrics: object count varies");
  }
}

struct Mean {
  double sum = 0;
  int64_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double get() const { return n ? sum / double(n) : 0.0; }
};

}  // namespace

MetricsReport compute_metrics(const Trajectory& actual, const Trajectory& reference) {
  validate(actual, reference);
  const size_t T = actual.frames.size();
  const size_t B = actual.frames[0].body_p.size();
  const size_t J = actual.frames[0].joints.size();
  const size_t O = actual.frames[0].obj_p.size();

  Mean m_rel, m_glob, m_bori, m_jpos, m_jvel, m_bvel, m_bacc, m_opos, m_oori, m_ovel, m_oacc;

  for (size_t t = 0; t < T; ++t) {
    const Frame &fa = actual.frames[t], &fr = reference.frames[t];
    for (size_t b = 0; b < B; ++b) {
      m_glob.add(norm(fa.body_p[b] - fr.body_p[b]));
      const Vec3 ra = fa.body_p[b] - fa.root_p;
      const Vec3 rr = fr.body_p[b] - fr.root_p;
      m_rel.add(norm(ra - rr));
      m_bori.add(quat_geodesic(fa.body_q[b], fr.body_q[b]));
    }
    for (size_t j = 0; j < J; ++j) m_jpos.add(std::abs(fa.joints[j] - fr.joints[j]));
    for (size_t o = 0; o < O; ++o) {
      m_opos.add(norm(fa.obj_p[o] - fr.obj_p[o]));
      m_oori.add(quat_geodesic(fa.obj_q[o], fr.obj_q[o]));
    }
    if (t >= 1) {
      const Frame &pa = actual.frames[t - 1], &pr = reference.frames[t - 1];
      for (size_t b = 0; b < B; ++b) {
        const Vec3 va = fa.body_p[b] - pa.body_p[b];
        const Vec3 vr = fr.body_p[b] - pr.body_p[b];
        m_bvel.add(norm(va - vr));
      }
      for (size_t j = 0; j < J; ++j)
        m_jvel.add(std::abs((fa.joints[j] - pa.joints[j]) - (fr.joints[j] - pr.joints[j])));
      for (size_t o = 0; o < O; ++o) {
        const Vec3 va = fa.obj_p[o] - pa.obj_p[o];
        const Vec3 vr = fr.obj_p[o] - pr.obj_p[o];
        m_ovel.add(norm(va - vr));
      }
    }
    if (t >= 2) {
      const Frame &pa = actual.frames[t - 1], &pr = reference.frames[t - 1];
      const Frame &qa = actual.frames[t - 2], &qr = reference.frames[t - 2];
      for (size_t b = 0; b < B; ++b) {
        const Vec3 aa = (fa.body_p[b] - pa.body_p[b]) - (pa.body_p[b] - qa.body_p[b]);
        const Vec3 ar = (fr.body_p[b] - pr.body_p[b]) - (pr.body_p[b] - qr.body_p[b]);
        m_bacc.add(norm(aa - ar));
      }
      for (size_t o = 0; o < O; ++o) {
        const Vec3 aa = (fa.obj_p[o] - pa.obj_p[o]) - (pa.obj_p[o] - qa.obj_p[o]);
        const Vec3 ar = (fr.obj_p[o] - pr.obj_p[o]) - (pr.obj_p[o] - qr.obj_p[o]);
        m_oacc.add(norm(aa - ar));
      }
    }
  }

  MetricsReport rep;
  rep.mpbpe = 1e3 * m_rel.get();
  rep.g_mpbpe = 1e3 * m_glob.get();
  rep.mpboe = 1e3 * m_bori.get();
  rep.mpjpe = 1e3 * m_jpos.get();
  rep.mpjve = 1e3 * m_jvel.get();
  rep.mpbve = 1e3 * m_bvel.get();
  rep.mpbae = 1e3 * m_bacc.get();
  rep.mpope = 1e3 * m_opos.get();
  rep.mpooe = 1e3 * m_oori.get();
  rep.mpove = 1e3 * m_ovel.get();
  rep.mpoae = 1e3 * m_oacc.get();
  return rep;
}

std::string MetricsReport::csv_header() {
  return "E_mpbpe[mm],E_g_mpbpe[mm],E_mpboe[1e-3 rad],E_mpjpe[1e-3 rad],"
         "E_mpjve[1e-3 rad/frame],E_mpbve[mm/frame],E_mpbae[mm/frame^2],"
         "E_mpope[mm],E_mpooe[1e-3 rad],E_mpove[mm/frame],E_mpoae[mm/frame^2]";
}

std::string MetricsReport::csv_row() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", mpbpe,
                g_mpbpe, mpboe, mpjpe, mpjve, mpbve, mpbae, mpope, mpooe, mpove, mpoae);
  return buf;
}

SuccessReport compute_success(const Trajectory& actual, const Trajectory& reference,
                              const SuccessConfig& cfg) {
  validate(actual, reference);
  SuccessReport rep;
  const double fall_z = cfg.fall_fraction * cfg.nominal_root_height;
  for (const Frame& f : actual.frames)
    if (f.root_p[2] < fall_z) rep.fell = true;

  bool diverged = false;
  for (size_t t = 0; t < actual.frames.size(); ++t) {
    const Frame &fa = actual.frames[t], &fr = reference.frames[t];
    for (size_t o = 0; o < fa.obj_p.size(); ++o)
      if (norm(fa.obj_p[o] - fr.obj_p[o]) > cfg.object_divergence) diverged = true;
  }
  rep.complete = !rep.fell && !diverged;

  // Longest streak with both feet on object 1, in frames.
  int64_t best = 0, run = 0;
  for (const Frame& f : actual.frames) {
    if (f.feet_on_obj[0] && f.feet_on_obj[1])
      ++run;
    else
      run = 0;
    best = std::max(best, run);
  }
  rep.glide = !rep.fell && double(best) >= cfg.glide_min_s * cfg.frame_hz;
  return rep;
}

}  // namespace hoi::metrics
