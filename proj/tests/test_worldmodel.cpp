#include <algorithm>
#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "gradcheck.hpp"
#include "hoi/error.hpp"
#include "hoi/numerics/serialize.hpp"
#include "hoi/worldmodel/worldmodel.hpp"

using namespace hoi;
using namespace hoi::wm;

namespace {

WorldModelConfig tiny_cfg(Variant v = Variant::kFull) {
  WorldModelConfig c;
  c.variant = v;
  c.num_objects = 2;
  c.prop_dim = 5;
  c.ref_dim = 3;
  c.latent_dim = 7;
  c.adapter_hidden = {16};
  c.priv_hidden = {16};
  c.cloud_hidden = {8};
  c.cloud_points = 6;
  c.cloud_feat = 4;
  return c;
}

Tensor rand_tensor(int64_t r, int64_t c, Rng& rng, double scale = 1.0) {
  Tensor t = Tensor::zeros(r, c);
  for (double& v : t.data) v = rng.uniform(-scale, scale);
  return t;
}

Quat rand_quat(Rng& rng) {
  return quat_normalize(
      {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
}

ObservationWindow rand_window(const WorldModelConfig& cfg, Rng& rng) {
  ObservationWindow w;
  for (size_t i = 0; i < cfg.history_steps.size(); ++i)
    w.history.push_back(rand_tensor(1, cfg.prop_dim, rng));
  for (size_t i = 0; i < cfg.future_steps.size(); ++i)
    w.future.push_back(rand_tensor(1, cfg.ref_dim, rng));
  return w;
}

// targets with generic rotations (far from the estimates, so the taped
// geodesic never sits on its clamp)
WmBatchTargets rand_targets(const WorldModelConfig& cfg, int64_t B, Rng& rng,
                            std::vector<std::vector<Quat>>* quats_out = nullptr) {
  WmBatchTargets t;
  const size_t K = size_t(cfg.num_objects);
  if (quats_out) quats_out->assign(K, {});
  for (size_t k = 0; k < K; ++k) {
    t.p.push_back(rand_tensor(B, 3, rng));
    Tensor rc = Tensor::zeros(B, 9);
    for (int64_t i = 0; i < B; ++i) {
      const Quat q = rand_quat(rng);
      if (quats_out) (*quats_out)[k].push_back(q);
      const std::array<double, 9> cols = rot_cols_of(q);
      for (int64_t j = 0; j < 9; ++j) rc.at(i, j) = cols[size_t(j)];
    }
    t.rot_cols.push_back(std::move(rc));
    if (predicts_dynamics(cfg.variant)) {
      t.v_lin.push_back(rand_tensor(B, 3, rng));
      t.v_ang.push_back(rand_tensor(B, 3, rng));
      t.a_lin.push_back(rand_tensor(B, 3, rng));
      t.a_ang.push_back(rand_tensor(B, 3, rng));
    }
  }
  t.z = rand_tensor(B, cfg.latent_dim, rng);
  return t;
}

}  // namespace

TEST_CASE("estimates are deterministic, complete, and unit-normalized") {
  const WorldModelConfig cfg = tiny_cfg();
  Rng rng = Rng::keyed(11, 0x776d, 0);
  const WorldModelParams p = wm_init(cfg, rng);
  const ObservationWindow w = rand_window(cfg, rng);

  const auto est1 = predict_object_state(p, w);
  const auto est2 = predict_object_state(p, w);
  REQUIRE(est1.size() == 2);
  for (size_t k = 0; k < est1.size(); ++k) {
    // 3 + 4 + 3 + 3 + 3 + 3 components, quaternion unit-norm
    const double n = std::sqrt(quat_dot(est1[k].R, est1[k].R));
    CHECK(std::fabs(n - 1.0) < 1e-9);
    CHECK(est1[k].p == est2[k].p);
    CHECK(quat_dot(est1[k].R, est2[k].R) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(est1[k].v_lin == est2[k].v_lin);
    CHECK(est1[k].a_ang == est2[k].a_ang);
    for (const double v : {est1[k].p[0], est1[k].v_lin[0], est1[k].v_ang[1], est1[k].a_lin[2]})
      CHECK(std::isfinite(v));
  }
}

TEST_CASE("window assembly keeps declared frame order and rejects misfits") {
  WorldModelConfig cfg = tiny_cfg();
  cfg.prop_dim = 2;
  cfg.ref_dim = 1;
  cfg.history_steps = {0, 1};
  cfg.future_steps = {0, 2};
  ObservationWindow w;
  w.history = {Tensor::from({1, 2}), Tensor::from({3, 4})};
  w.future = {Tensor::from({5}), Tensor::from({6})};
  const Tensor x = window_input(cfg, w);
  REQUIRE(x.numel() == 6);
  for (int64_t i = 0; i < 6; ++i) CHECK(x[i] == double(i + 1));

  ObservationWindow bad = w;
  bad.history.pop_back();
  CHECK_THROWS_AS((void)window_input(cfg, bad), ContractError);
  bad = w;
  bad.future[0] = Tensor::from({5, 9});
  CHECK_THROWS_AS((void)window_input(cfg, bad), ContractError);
}

TEST_CASE("projection matches the quaternion oracle and preserves distances") {
  Rng rng = Rng::keyed(12, 0x776d, 1);

  // worked example: quarter turn about z then shift along x
  ObjectStateEstimate e;
  e.R = quat_exp({0, 0, M_PI / 2});
  e.p = {1, 0, 0};
  const Tensor pt = Tensor::from(1, 3, {1, 0, 0});
  const Tensor moved = project_point_cloud(pt, e);
  CHECK(moved.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moved.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(moved.at(0, 2)) < 1e-12);

  // identity pose is the identity map
  ObjectStateEstimate id;
  const Tensor cloud0 = rand_tensor(16, 3, rng);
  const Tensor same = project_point_cloud(cloud0, id);
  for (size_t i = 0; i < cloud0.data.size(); ++i) CHECK(same.data[i] == cloud0.data[i]);

  for (int trial = 0; trial < 1000; ++trial) {
    ObjectStateEstimate est;
    est.R = rand_quat(rng);
    est.p = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const Tensor cloud = rand_tensor(64, 3, rng);
    const Tensor dyn = project_point_cloud(cloud, est);
    for (int64_t i = 0; i < 64; ++i) {
      const Vec3 want =
          quat_rotate(est.R, {cloud.at(i, 0), cloud.at(i, 1), cloud.at(i, 2)}) + est.p;
      for (int64_t j = 0; j < 3; ++j) CHECK(std::fabs(dyn.at(i, j) - want[size_t(j)]) < 1e-12);
    }
    if (trial == 0) {
      for (int64_t a = 0; a < 64; a += 7)
        for (int64_t b = a + 1; b < 64; b += 9) {
          auto dist = [](const Tensor& c, int64_t i, int64_t j) {
            const Vec3 d = {c.at(i, 0) - c.at(j, 0), c.at(i, 1) - c.at(j, 1),
                            c.at(i, 2) - c.at(j, 2)};
            return norm(d);
          };
          CHECK(dist(dyn, a, b) == doctest::Approx(dist(cloud, a, b)).epsilon(1e-9));
        }
    }
  }
  CHECK_THROWS_AS((void)project_point_cloud(Tensor::zeros(3, 2), id), ContractError);
}

TEST_CASE("privileged latent is deterministic and pooling ignores point order") {
  const WorldModelConfig cfg = tiny_cfg(Variant::kFull);
  Rng rng = Rng::keyed(13, 0x776d, 2);
  const WorldModelParams p = wm_init(cfg, rng);

  std::vector<Tensor> clouds;
  for (int k = 0; k < cfg.num_objects; ++k) clouds.push_back(rand_tensor(cfg.cloud_points, 3, rng));
  const Tensor est = rand_tensor(1, cfg.adapter_out(), rng);
  const Tensor prop = rand_tensor(1, cfg.prop_dim, rng);
  const Tensor ref = rand_tensor(1, cfg.ref_dim, rng);

  const Tensor z1 = privileged_latent(p, clouds, est, prop, ref);
  const Tensor z2 = privileged_latent(p, clouds, est, prop, ref);
  REQUIRE(z1.numel() == cfg.latent_dim);
  for (int64_t i = 0; i < z1.numel(); ++i) CHECK(z1[i] == z2[i]);

  // reverse the rows of every cloud: identical latent, bit for bit
  std::vector<Tensor> shuffled = clouds;
  for (Tensor& c : shuffled)
    for (int64_t i = 0; i < c.rows() / 2; ++i)
      for (int64_t j = 0; j < 3; ++j) std::swap(c.at(i, j), c.at(c.rows() - 1 - i, j));
  const Tensor z3 = privileged_latent(p, shuffled, est, prop, ref);
  for (int64_t i = 0; i < z1.numel(); ++i) CHECK(z1[i] == z3[i]);

  CHECK_THROWS_AS((void)privileged_latent(p, clouds, rand_tensor(1, 3, rng), prop, ref),
                  ContractError);
  CHECK_THROWS_AS((void)privileged_latent(p, {}, est, prop, ref), ContractError);
}

TEST_CASE("world model loss examples") {
  const WorldModelConfig cfg = tiny_cfg();

  ObjectStateEstimate a, b;
  a.R = b.R = quat_exp({0.3, -0.2, 0.9});
  SUBCASE("perfect predictions score zero") {
    const Tensor z = Tensor::from({0.1, -0.4});
    CHECK(world_model_loss(cfg, {a, a}, {a, a}, z, z, 1.0, 1.0) == 0.0);
  }
  SUBCASE("weighted sum of squared errors") {
    // object squared error 0.25 (pure position), latent squared error 0.04
    b = a;
    b.p = {0.5, 0, 0};
    const Tensor z0 = Tensor::from({0.0, 0.0});
    const Tensor z1 = Tensor::from({0.2, 0.0});
    const double loss = world_model_loss(cfg, {b}, {a}, z1, z0, 1.0, 1.0);
    CHECK(loss == doctest::Approx(0.29).epsilon(1e-9));
    // doubling lam_obj doubles exactly the object contribution
    const double base = world_model_loss(cfg, {b}, {a}, z1, z0, 0.0, 1.0);
    const double once = world_model_loss(cfg, {b}, {a}, z1, z0, 1.0, 1.0);
    const double twice = world_model_loss(cfg, {b}, {a}, z1, z0, 2.0, 1.0);
    CHECK(twice - base == 2.0 * (once - base));
  }
  SUBCASE("orientation term is the squared geodesic") {
    b = a;
    b.R = quat_mul(a.R, quat_exp({0, 0.4, 0}));
    const Tensor z = Tensor::from({0.0, 0.0});
    const double loss = world_model_loss(cfg, {b}, {a}, z, z, 1.0, 1.0);
    CHECK(loss == doctest::Approx(0.16).epsilon(1e-9));
  }
  SUBCASE("negative weights and mismatched slots are rejected") {
    const Tensor z = Tensor::from({0.0, 0.0});
    CHECK_THROWS_AS((void)world_model_loss(cfg, {a}, {a, a}, z, z, 1, 1), ContractError);
    CHECK_THROWS_AS((void)world_model_loss(cfg, {a}, {a}, z, z, -1, 1), ContractError);
  }
}

TEST_CASE("taped loss agrees with the scalar evaluation path") {
  for (Variant variant : {Variant::kFull, Variant::kGeoPose, Variant::kVecDyn, Variant::kVecPose}) {
    CAPTURE(variant_name(variant));
    const WorldModelConfig cfg = tiny_cfg(variant);
    Rng rng = Rng::keyed(14, 0x776d, uint64_t(variant));
    const WorldModelParams p = wm_init(cfg, rng);

    std::vector<Tensor> clouds;
    std::vector<const Tensor*> cloud_ptrs;
    for (int k = 0; k < cfg.num_objects; ++k) clouds.push_back(rand_tensor(cfg.cloud_points, 3, rng));
    for (const Tensor& c : clouds) cloud_ptrs.push_back(&c);
    if (!uses_projection(variant)) cloud_ptrs.clear();

    const ObservationWindow w = rand_window(cfg, rng);
    const Tensor x = window_input(cfg, w);
    std::vector<std::vector<Quat>> tgt_quats;
    const WmBatchTargets tgt = rand_targets(cfg, 1, rng, &tgt_quats);

    Tape t;
    const WmVars v = wm_leaves(t, p);
    const WmLossVars taped = wm_loss_graph(t, v, cfg, cloud_ptrs, x, tgt, 1.0, 1.0);

    // scalar path: decode, project, fuse, then the weighted loss
    const Tensor raw = adapter_forward(p, x);
    std::vector<ObjectStateEstimate> shat, strue;
    std::vector<Tensor> dyn;
    for (int k = 0; k < cfg.num_objects; ++k) {
      const ObjectStateEstimate e = decode_estimate(cfg, raw, 0, k);
      shat.push_back(e);
      if (uses_projection(variant)) dyn.push_back(project_point_cloud(clouds[size_t(k)], e));
      ObjectStateEstimate s;
      s.p = {tgt.p[size_t(k)][0], tgt.p[size_t(k)][1], tgt.p[size_t(k)][2]};
      s.R = tgt_quats[size_t(k)][0];
      if (predicts_dynamics(variant)) {
        auto v3 = [&](const Tensor& tt) { return Vec3{tt[0], tt[1], tt[2]}; };
        s.v_lin = v3(tgt.v_lin[size_t(k)]);
        s.v_ang = v3(tgt.v_ang[size_t(k)]);
        s.a_lin = v3(tgt.a_lin[size_t(k)]);
        s.a_ang = v3(tgt.a_ang[size_t(k)]);
      }
      strue.push_back(s);
    }
    const Tensor prop = w.history[0], ref = w.future[0];
    const Tensor zh = privileged_latent(p, dyn, raw, prop, ref);
    const double eval_loss = world_model_loss(cfg, shat, strue, zh, tgt.z, 1.0, 1.0);

    CHECK(taped.total.val()[0] == doctest::Approx(eval_loss).epsilon(1e-8));
    CHECK(taped.total.val()[0] ==
          doctest::Approx(taped.obj.val()[0] + taped.priv.val()[0]).epsilon(1e-12));
    CHECK(taped.obj.val()[0] >= 0.0);
    CHECK(taped.priv.val()[0] >= 0.0);
  }
}

TEST_CASE("taped loss gradients match finite differences") {
  for (Variant variant : {Variant::kFull, Variant::kVecPose}) {
    CAPTURE(variant_name(variant));
    WorldModelConfig cfg = tiny_cfg(variant);
    cfg.num_objects = 1;
    cfg.adapter_hidden = {8};
    cfg.priv_hidden = {8};
    cfg.cloud_hidden = {6};
    cfg.cloud_points = 4;
    cfg.cloud_feat = 3;
    Rng rng = Rng::keyed(15, 0x776d, uint64_t(variant));
    const WorldModelParams p = wm_init(cfg, rng);
    const int64_t B = 3;
    Tensor x = Tensor::zeros(B, cfg.window_dim());
    for (double& vv : x.data) vv = rng.uniform(-1, 1);
    const WmBatchTargets tgt = rand_targets(cfg, B, rng);
    const Tensor cloud = rand_tensor(cfg.cloud_points, 3, rng);
    std::vector<const Tensor*> cloud_ptrs;
    if (uses_projection(variant)) cloud_ptrs.push_back(&cloud);

    // leaves in wm_leaves order: adapter W/b pairs, cloud pairs, priv pairs
    std::vector<Tensor> leaves;
    for (const MlpParams* m : {&p.adapter, &p.cloud_enc, &p.priv})
      for (size_t l = 0; l < m->W.size(); ++l) {
        leaves.push_back(m->W[l]);
        leaves.push_back(m->b[l]);
      }
    const size_t n_adapter = p.adapter.W.size(), n_cloud = p.cloud_enc.W.size();
    auto build = [&](Tape& t, std::vector<Var>& vs) -> Var {
      WmVars v;
      size_t at = 0;
      auto take = [&](size_t layers, MlpVars& into) {
        for (size_t l = 0; l < layers; ++l) {
          into.W.push_back(vs[at++]);
          into.b.push_back(vs[at++]);
        }
      };
      take(n_adapter, v.adapter);
      take(n_cloud, v.cloud_enc);
      take(p.priv.W.size(), v.priv);
      return wm_loss_graph(t, v, cfg, cloud_ptrs, x, tgt, 1.0, 1.0).total;
    };
    CHECK(hoi::testing::gradcheck(leaves, build, 1e-6) < 1e-5);
  }
}

TEST_CASE("projection instrumentation counts taped and direct placements") {
  reset_projection_count();
  CHECK(projection_count() == 0);

  const WorldModelConfig cfg = tiny_cfg(Variant::kVecDyn);
  Rng rng = Rng::keyed(16, 0x776d, 4);
  const WorldModelParams p = wm_init(cfg, rng);
  const Tensor x = window_input(cfg, rand_window(cfg, rng));
  const WmBatchTargets tgt = rand_targets(cfg, 1, rng);
  Tape t;
  const WmVars v = wm_leaves(t, p);
  (void)wm_loss_graph(t, v, cfg, {}, x, tgt, 1.0, 1.0);
  CHECK(projection_count() == 0);  // vector variants never project

  const WorldModelConfig geo = tiny_cfg(Variant::kFull);
  Rng rng2 = Rng::keyed(16, 0x776d, 5);
  const WorldModelParams pg = wm_init(geo, rng2);
  std::vector<Tensor> clouds;
  for (int k = 0; k < geo.num_objects; ++k)
    clouds.push_back(rand_tensor(geo.cloud_points, 3, rng2));
  std::vector<const Tensor*> ptrs;
  for (const Tensor& c : clouds) ptrs.push_back(&c);
  const Tensor xg = window_input(geo, rand_window(geo, rng2));
  const WmBatchTargets tg = rand_targets(geo, 1, rng2);
  Tape t2;
  const WmVars vg = wm_leaves(t2, pg);
  (void)wm_loss_graph(t2, vg, geo, ptrs, xg, tg, 1.0, 1.0);
  CHECK(projection_count() == int64_t(geo.num_objects));  // one per slot at B=1

  (void)project_point_cloud(clouds[0], ObjectStateEstimate{});
  CHECK(projection_count() == int64_t(geo.num_objects) + 1);
  reset_projection_count();
  CHECK(projection_count() == 0);
}

TEST_CASE("ema contracts geometrically and hits its closed form") {
  const WorldModelConfig cfg = tiny_cfg();
  Rng rng = Rng::keyed(17, 0x776d, 6);
  WorldModelParams online = wm_init(cfg, rng);

  SUBCASE("beta edge cases") {
    EmaState e0 = ema_init(online, 0.0);
    WorldModelParams moved = online;
    moved.adapter.W[0].data[0] += 1.25;
    ema_update(e0, moved);
    CHECK(e0.shadow.adapter.W[0].data[0] == moved.adapter.W[0].data[0]);

    EmaState e1 = ema_init(online, 1.0);
    ema_update(e1, moved);
    CHECK(e1.shadow.adapter.W[0].data[0] == online.adapter.W[0].data[0]);
  }

  SUBCASE("closed form 1 - beta^k against a constant target") {
    // shadow starts at zero, online weights pinned at one
    WorldModelParams zeros = online, ones = online;
    for (MlpParams* m : {&zeros.adapter, &zeros.cloud_enc, &zeros.priv})
      for (size_t l = 0; l < m->W.size(); ++l) {
        std::fill(m->W[l].data.begin(), m->W[l].data.end(), 0.0);
        std::fill(m->b[l].data.begin(), m->b[l].data.end(), 0.0);
      }
    for (MlpParams* m : {&ones.adapter, &ones.cloud_enc, &ones.priv})
      for (size_t l = 0; l < m->W.size(); ++l) {
        std::fill(m->W[l].data.begin(), m->W[l].data.end(), 1.0);
        std::fill(m->b[l].data.begin(), m->b[l].data.end(), 1.0);
      }
    EmaState e = ema_init(zeros, 0.9);
    ema_update(e, ones);
    ema_update(e, ones);
    CHECK(e.shadow.adapter.W[0].data[0] == doctest::Approx(0.19).epsilon(1e-15));
  }

  SUBCASE("exact geometric contraction toward frozen zero weights") {
    WorldModelParams zeros = online;
    for (MlpParams* m : {&zeros.adapter, &zeros.cloud_enc, &zeros.priv})
      for (size_t l = 0; l < m->W.size(); ++l) {
        std::fill(m->W[l].data.begin(), m->W[l].data.end(), 0.0);
        std::fill(m->b[l].data.begin(), m->b[l].data.end(), 0.0);
      }
    const double beta = 0.97;
    EmaState e = ema_init(online, beta);
    std::array<double, 4> expect{};
    for (size_t i = 0; i < 4; ++i) expect[i] = online.adapter.W[0].data[i];
    for (int k = 1; k <= 5; ++k) {
      ema_update(e, zeros);
      // with a zero online term each update is a pure scale by beta, so the
      // shadow follows shadow_k = beta * shadow_{k-1} bit for bit
      for (size_t i = 0; i < 4; ++i) {
        expect[i] *= beta;
        CHECK(e.shadow.adapter.W[0].data[i] == expect[i]);
      }
    }
  }

  SUBCASE("shape mismatch is rejected") {
    EmaState e = ema_init(online, 0.5);
    WorldModelParams other = online;
    other.adapter.W[0] = Tensor::zeros(2, 2);
    CHECK_THROWS_AS(ema_update(e, other), ContractError);
  }
}

TEST_CASE("checkpoints round trip and validate shapes") {
  const WorldModelConfig cfg = tiny_cfg();
  Rng rng = Rng::keyed(18, 0x776d, 7);
  const WorldModelParams p = wm_init(cfg, rng);

  const NamedTensors named = wm_named(p);
  CHECK(named.size() == 2 * (p.adapter.W.size() + p.cloud_enc.W.size() + p.priv.W.size()));
  CHECK(named[0].first == "wm.adapter.W0");

  const std::string path = "/tmp/hoi_wm_roundtrip.bin";
  save_params(path, named);
  const NamedTensors loaded = load_params(path);
  const WorldModelParams q = wm_from_named(cfg, loaded);
  for (size_t l = 0; l < p.adapter.W.size(); ++l)
    for (size_t i = 0; i < p.adapter.W[l].data.size(); ++i)
      CHECK(q.adapter.W[l].data[i] == p.adapter.W[l].data[i]);
  for (size_t i = 0; i < p.priv.b.back().data.size(); ++i)
    CHECK(q.priv.b.back().data[i] == p.priv.b.back().data[i]);

  NamedTensors missing = loaded;
  missing.erase(missing.begin());  // drop wm.adapter.W0
  CHECK_THROWS_AS((void)wm_from_named(cfg, missing), ContractError);

  WorldModelConfig wrong = cfg;
  wrong.latent_dim = 9;
  CHECK_THROWS_AS((void)wm_from_named(wrong, loaded), ContractError);
}

TEST_CASE("variants shape the estimate and the fused input") {
  CHECK(tiny_cfg(Variant::kFull).slot_dim() == 21);
  CHECK(tiny_cfg(Variant::kVecDyn).slot_dim() == 21);
  CHECK(tiny_cfg(Variant::kVecPose).slot_dim() == 9);
  CHECK(tiny_cfg(Variant::kGeoPose).slot_dim() == 9);

  const WorldModelConfig vp = tiny_cfg(Variant::kVecPose);
  CHECK(vp.priv_in() == 2 * 9 + vp.prop_dim + vp.ref_dim);
  const WorldModelConfig full = tiny_cfg(Variant::kFull);
  CHECK(full.priv_in() == 2 * (full.cloud_feat + 21) + full.prop_dim + full.ref_dim);

  // pose-only decode leaves dynamics at zero
  Rng rng = Rng::keyed(19, 0x776d, 8);
  const WorldModelParams p = wm_init(vp, rng);
  const auto est = predict_object_state(p, rand_window(vp, rng));
  CHECK(est[0].v_lin == Vec3{0, 0, 0});
  CHECK(est[1].a_ang == Vec3{0, 0, 0});

  WorldModelConfig bad = tiny_cfg(Variant::kProprioOnly);
  Rng rng2 = Rng::keyed(19, 0x776d, 9);
  CHECK_THROWS_AS((void)wm_init(bad, rng2), ConfigError);

  WorldModelConfig steps = tiny_cfg();
  steps.history_steps = {1, 2};  // must start at lag 0
  CHECK_THROWS_AS(steps.validate(), ConfigError);
  steps = tiny_cfg();
  steps.future_steps = {0, 2, 2};
  CHECK_THROWS_AS(steps.validate(), ConfigError);
  steps = tiny_cfg();
  steps.ema_beta = 1.5;
  CHECK_THROWS_AS(steps.validate(), ConfigError);
}
