#include "hoi/worldmodel/worldmodel.hpp"

#include <atomic>
#include <cmath>

#include "hoi/error.hpp"

namespace hoi::wm {

namespace {

std::atomic<int64_t> g_projections{0};

constexpr double kBasisEps = 1e-12;   // keeps Gram-Schmidt finite on raw nets
constexpr double kTraceClamp = 1e-7;  // acos argument kept inside (-1, 1)

// eval-path Gram-Schmidt, same arithmetic as the taped decode
void basis_from_rot6(const double* r6, Vec3& b1, Vec3& b2, Vec3& b3) {
  const Vec3 u1{r6[0], r6[1], r6[2]}, u2{r6[3], r6[4], r6[5]};
  b1 = (1.0 / (norm(u1) + kBasisEps)) * u1;
  const Vec3 u2p = u2 - dot(b1, u2) * b1;
  b2 = (1.0 / (norm(u2p) + kBasisEps)) * u2p;
  b3 = cross(b1, b2);
}

double sq3(const Vec3& a, const Vec3& b) {
  const Vec3 d = a - b;
  return dot(d, d);
}

Tensor colmax(const Tensor& a) {
  const int64_t m = a.rows(), c = a.cols();
  check(m > 0, "colmax: empty input");
  Tensor out = Tensor::zeros(1, c);
  for (int64_t j = 0; j < c; ++j) {
    double best = a.at(0, j);
    for (int64_t i = 1; i < m; ++i) best = std::max(best, a.at(i, j));
    out[j] = best;
  }
  return out;
}

void lerp_into(Tensor& shadow, const Tensor& online, double beta) {
  if (!shadow.same_shape(online))
    throw ContractError("ema_update: shape mismatch " + shadow.shape_str() + " vs " +
                        online.shape_str());
  for (size_t i = 0; i < shadow.data.size(); ++i)
    shadow.data[i] = beta * shadow.data[i] + (1.0 - beta) * online.data[i];
}

// position of a required step inside the declared step list
int64_t step_index(const std::vector<int>& steps, int step, const char* which) {
  for (size_t i = 0; i < steps.size(); ++i)
    if (steps[i] == step) return int64_t(i);
  throw ConfigError(std::string(which) + " steps must include step 0");
}

}  // namespace

Variant variant_from_string(const std::string& name) {
  if (name == "proprio_only") return Variant::kProprioOnly;
  if (name == "vec_pose") return Variant::kVecPose;
  if (name == "vec_dyn") return Variant::kVecDyn;
  if (name == "geo_pose") return Variant::kGeoPose;
  if (name == "full") return Variant::kFull;
  throw ConfigError("unknown variant: " + name);
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kProprioOnly: return "proprio_only";
    case Variant::kVecPose: return "vec_pose";
    case Variant::kVecDyn: return "vec_dyn";
    case Variant::kGeoPose: return "geo_pose";
    case Variant::kFull: return "full";
  }
  return "?";
}

bool has_adapter(Variant v) { return v != Variant::kProprioOnly; }
bool predicts_dynamics(Variant v) { return v == Variant::kVecDyn || v == Variant::kFull; }
bool uses_projection(Variant v) { return v == Variant::kGeoPose || v == Variant::kFull; }

void WorldModelConfig::validate() const {
  if (!has_adapter(variant)) throw ConfigError("proprio-only variant has no world model");
  if (num_objects < 1) throw ConfigError("world model needs at least one object slot");
  if (prop_dim <= 0 || ref_dim <= 0) throw ConfigError("world model frame widths must be positive");
  if (latent_dim <= 0) throw ConfigError("latent width must be positive");
  if (cloud_points <= 0 || cloud_feat <= 0) throw ConfigError("cloud encoder dims must be positive");
  if (ema_beta < 0.0 || ema_beta > 1.0) throw ConfigError("ema decay must lie in [0, 1]");
  auto ordered = [](const std::vector<int>& s) {
    if (s.empty() || s[0] != 0) return false;
    for (size_t i = 1; i < s.size(); ++i)
      if (s[i] <= s[i - 1]) return false;
    return true;
  };
  if (!ordered(history_steps) || !ordered(future_steps))
    throw ConfigError("window steps must start at 0 and increase");
}

WorldModelParams wm_init(const WorldModelConfig& cfg, Rng& rng) {
  cfg.validate();
  WorldModelParams p;
  p.cfg = cfg;
  p.adapter = mlp_init(cfg.window_dim(), cfg.adapter_hidden, cfg.adapter_out(), rng, 0.1);
  p.cloud_enc = mlp_init(3, cfg.cloud_hidden, cfg.cloud_feat, rng);
  p.priv = mlp_init(cfg.priv_in(), cfg.priv_hidden, cfg.latent_dim, rng, 0.1);
  return p;
}

NamedTensors wm_named(const WorldModelParams& p, const std::string& prefix) {
  NamedTensors out;
  mlp_append_named(out, prefix + "adapter", p.adapter);
  mlp_append_named(out, prefix + "cloud", p.cloud_enc);
  mlp_append_named(out, prefix + "priv", p.priv);
  return out;
}

WorldModelParams wm_from_named(const WorldModelConfig& cfg, const NamedTensors& named,
                               const std::string& prefix) {
  cfg.validate();
  WorldModelParams p;
  p.cfg = cfg;
  p.adapter = mlp_from_named(named, prefix + "adapter", cfg.window_dim(), cfg.adapter_hidden,
                             cfg.adapter_out());
  p.cloud_enc = mlp_from_named(named, prefix + "cloud", 3, cfg.cloud_hidden, cfg.cloud_feat);
  p.priv = mlp_from_named(named, prefix + "priv", cfg.priv_in(), cfg.priv_hidden, cfg.latent_dim);
  return p;
}

Tensor window_input(const WorldModelConfig& cfg, const ObservationWindow& w) {
  if (w.history.size() != cfg.history_steps.size() || w.future.size() != cfg.future_steps.size())
    throw ContractError("observation window frame count does not match the configured steps");
  Tensor out = Tensor::zeros(1, cfg.window_dim());
  int64_t at = 0;
  auto put = [&](const Tensor& f, int64_t want, const char* which) {
    if (f.numel() != want)
      throw ContractError(std::string("observation window ") + which + " frame width " +
                          f.shape_str() + ", expected " + std::to_string(want));
    for (int64_t i = 0; i < want; ++i) out[at++] = f[i];
  };
  for (const Tensor& f : w.history) put(f, cfg.prop_dim, "history");
  for (const Tensor& f : w.future) put(f, cfg.ref_dim, "future");
  return out;
}

Tensor adapter_forward(const WorldModelParams& p, const Tensor& x) {
  if (x.cols() != p.cfg.window_dim())
    throw ContractError("adapter input width " + x.shape_str() + ", expected " +
                        std::to_string(p.cfg.window_dim()));
  return mlp_forward(p.adapter, x);
}

ObjectStateEstimate decode_estimate(const WorldModelConfig& cfg, const Tensor& raw, int64_t row,
                                    int slot) {
  const int64_t sd = cfg.slot_dim();
  if (slot < 0 || slot >= cfg.num_objects || row < 0 || row >= raw.rows() ||
      raw.cols() != cfg.adapter_out())
    throw ContractError("decode_estimate: slot/row out of range for " + raw.shape_str());
  const double* r = &raw.data[size_t(row * raw.cols() + int64_t(slot) * sd)];
  ObjectStateEstimate e;
  e.p = {r[0], r[1], r[2]};
  Vec3 b1, b2, b3;
  basis_from_rot6(r + 3, b1, b2, b3);
  const Mat3 m{b1[0], b2[0], b3[0], b1[1], b2[1], b3[1], b1[2], b2[2], b3[2]};
  e.R = quat_normalize(mat_to_quat(m));
  if (predicts_dynamics(cfg.variant)) {
    e.v_lin = {r[9], r[10], r[11]};
    e.v_ang = {r[12], r[13], r[14]};
    e.a_lin = {r[15], r[16], r[17]};
    e.a_ang = {r[18], r[19], r[20]};
  }
  return e;
}

std::vector<ObjectStateEstimate> predict_object_state(const WorldModelParams& p,
                                                      const ObservationWindow& w) {
  const Tensor raw = adapter_forward(p, window_input(p.cfg, w));
  std::vector<ObjectStateEstimate> out;
  out.reserve(size_t(p.cfg.num_objects));
  for (int k = 0; k < p.cfg.num_objects; ++k) out.push_back(decode_estimate(p.cfg, raw, 0, k));
  return out;
}

Tensor project_point_cloud(const Tensor& cloud, const ObjectStateEstimate& est) {
  if (cloud.rank() != 2 || cloud.cols() != 3 || cloud.rows() < 1)
    throw ContractError("project_point_cloud: cloud must be [N,3], got " + cloud.shape_str());
  const Mat3 R = quat_to_mat(est.R);
  Tensor out = Tensor::zeros(cloud.rows(), 3);
  for (int64_t i = 0; i < cloud.rows(); ++i) {
    const Vec3 q = mat_apply(R, {cloud.at(i, 0), cloud.at(i, 1), cloud.at(i, 2)}) + est.p;
    out.at(i, 0) = q[0];
    out.at(i, 1) = q[1];
    out.at(i, 2) = q[2];
  }
  g_projections.fetch_add(1, std::memory_order_relaxed);
  return out;
}

int64_t projection_count() { return g_projections.load(std::memory_order_relaxed); }
void reset_projection_count() { g_projections.store(0, std::memory_order_relaxed); }

Tensor privileged_latent(const WorldModelParams& p, const std::vector<Tensor>& dyn_clouds,
                         const Tensor& est_raw, const Tensor& prop, const Tensor& ref) {
  const WorldModelConfig& cfg = p.cfg;
  const bool geo = uses_projection(cfg.variant);
  if (geo && int64_t(dyn_clouds.size()) != cfg.num_objects)
    throw ContractError("privileged_latent: expected one placed cloud per object slot");
  if (!geo && !dyn_clouds.empty())
    throw ContractError("privileged_latent: this variant does not take point clouds");
  if (est_raw.numel() != cfg.adapter_out())
    throw ContractError("privileged_latent: estimate width " + est_raw.shape_str());
  if (prop.numel() != cfg.prop_dim || ref.numel() != cfg.ref_dim)
    throw ContractError("privileged_latent: frame width mismatch");

  Tensor in = Tensor::zeros(1, cfg.priv_in());
  int64_t at = 0;
  const int64_t sd = cfg.slot_dim();
  for (int k = 0; k < cfg.num_objects; ++k) {
    if (geo) {
      const Tensor& c = dyn_clouds[size_t(k)];
      if (c.rank() != 2 || c.cols() != 3 || c.rows() != cfg.cloud_points)
        throw ContractError("privileged_latent: cloud " + std::to_string(k) + " is " +
                            c.shape_str());
      const Tensor pooled = colmax(mlp_forward(p.cloud_enc, c));
      for (int64_t j = 0; j < cfg.cloud_feat; ++j) in[at++] = pooled[j];
    }
    for (int64_t j = 0; j < sd; ++j) in[at++] = est_raw[int64_t(k) * sd + j];
  }
  for (int64_t j = 0; j < cfg.prop_dim; ++j) in[at++] = prop[j];
  for (int64_t j = 0; j < cfg.ref_dim; ++j) in[at++] = ref[j];
  return mlp_forward(p.priv, in);
}

double object_state_error(const WorldModelConfig& cfg, const ObjectStateEstimate& shat,
                          const ObjectStateEstimate& s) {
  const double geo = quat_geodesic(shat.R, s.R);
  double e = sq3(shat.p, s.p) + geo * geo;
  if (predicts_dynamics(cfg.variant))
    e += sq3(shat.v_lin, s.v_lin) + sq3(shat.v_ang, s.v_ang) + sq3(shat.a_lin, s.a_lin) +
         sq3(shat.a_ang, s.a_ang);
  return e;
}

double world_model_loss(const WorldModelConfig& cfg, const std::vector<ObjectStateEstimate>& shat,
                        const std::vector<ObjectStateEstimate>& s, const Tensor& zhat,
                        const Tensor& z, double lam_obj, double lam_priv) {
  if (shat.size() != s.size())
    throw ContractError("world_model_loss: estimate/target slot count mismatch");
  if (zhat.numel() != z.numel())
    throw ContractError("world_model_loss: latent width mismatch");
  if (lam_obj < 0.0 || lam_priv < 0.0) throw ContractError("world_model_loss: negative weight");
  double obj = 0;
  for (size_t k = 0; k < shat.size(); ++k) obj += object_state_error(cfg, shat[k], s[k]);
  double priv = 0;
  for (int64_t i = 0; i < z.numel(); ++i) {
    const double d = zhat[i] - z[i];
    priv += d * d;
  }
  return lam_obj * obj + lam_priv * priv;
}

std::array<double, 9> rot_cols_of(const Quat& q) {
  const Mat3 m = quat_to_mat(q);  // row-major
  return {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
}

WmVars wm_leaves(Tape& t, const WorldModelParams& p) {
  WmVars v;
  v.adapter = mlp_leaves(t, p.adapter);
  v.cloud_enc = mlp_leaves(t, p.cloud_enc);
  v.priv = mlp_leaves(t, p.priv);
  return v;
}

WmLossVars wm_loss_graph(Tape& t, const WmVars& v, const WorldModelConfig& cfg,
                         const std::vector<const Tensor*>& clouds, const Tensor& x,
                         const WmBatchTargets& tgt, double lam_obj, double lam_priv) {
  cfg.validate();
  const bool geo = uses_projection(cfg.variant);
  const bool dyn = predicts_dynamics(cfg.variant);
  const int64_t B = x.rows(), sd = cfg.slot_dim();
  const size_t K = size_t(cfg.num_objects);
  if (x.cols() != cfg.window_dim())
    throw ContractError("wm_loss_graph: window width " + x.shape_str());
  if (geo && clouds.size() != K)
    throw ContractError("wm_loss_graph: expected one canonical cloud per slot");
  if (tgt.p.size() != K || tgt.rot_cols.size() != K ||
      (dyn && (tgt.v_lin.size() != K || tgt.v_ang.size() != K || tgt.a_lin.size() != K ||
               tgt.a_ang.size() != K)))
    throw ContractError("wm_loss_graph: target slot count mismatch");
  if (tgt.z.rows() != B || tgt.z.cols() != cfg.latent_dim)
    throw ContractError("wm_loss_graph: latent target is " + tgt.z.shape_str());

  const Var xin = t.constant(x);
  const Var raw = mlp_forward(t, v.adapter, xin);

  auto sumsq_vs = [&](Var a, const Tensor& target) {
    return t.row_sum(t.square(t.sub(a, t.constant(target))));  // [B,1]
  };

  Var obj_col;
  std::vector<Var> priv_parts;
  for (size_t k = 0; k < K; ++k) {
    const int64_t off = int64_t(k) * sd;
    const Var ph = t.slice_cols(raw, off, off + 3);
    const Var u1 = t.slice_cols(raw, off + 3, off + 6);
    const Var u2 = t.slice_cols(raw, off + 6, off + 9);
    const Var n1 = t.add_scalar(t.sqrt(t.row_sum(t.square(u1))), kBasisEps);
    const Var b1 = t.div_col(u1, n1);
    const Var u2p = t.sub(u2, t.mul_col(b1, t.row_sum(t.mul(b1, u2))));
    const Var n2 = t.add_scalar(t.sqrt(t.row_sum(t.square(u2p))), kBasisEps);
    const Var b2 = t.div_col(u2p, n2);
    const Var b3 = t.cross3(b1, b2);

    Var e = sumsq_vs(ph, tgt.p[k]);
    const Var rc = t.constant(tgt.rot_cols[k]);
    const Var tr = t.add(t.add(t.row_sum(t.mul(b1, t.slice_cols(rc, 0, 3))),
                               t.row_sum(t.mul(b2, t.slice_cols(rc, 3, 6)))),
                         t.row_sum(t.mul(b3, t.slice_cols(rc, 6, 9))));
    const Var y = t.clamp(t.scale(t.add_scalar(tr, -1.0), 0.5), -1.0 + kTraceClamp,
                          1.0 - kTraceClamp);
    e = t.add(e, t.square(t.acos(y)));
    if (dyn) {
      e = t.add(e, sumsq_vs(t.slice_cols(raw, off + 9, off + 12), tgt.v_lin[k]));
      e = t.add(e, sumsq_vs(t.slice_cols(raw, off + 12, off + 15), tgt.v_ang[k]));
      e = t.add(e, sumsq_vs(t.slice_cols(raw, off + 15, off + 18), tgt.a_lin[k]));
      e = t.add(e, sumsq_vs(t.slice_cols(raw, off + 18, off + 21), tgt.a_ang[k]));
    }
    obj_col = k == 0 ? e : t.add(obj_col, e);

    if (geo) {
      if (clouds[k] == nullptr || clouds[k]->rows() != cfg.cloud_points ||
          clouds[k]->cols() != 3)
        throw ContractError("wm_loss_graph: canonical cloud " + std::to_string(k) +
                            " must be [N,3]");
      const Var placed = t.pose_cloud(b1, b2, b3, ph, *clouds[k]);  // [B*N, 3]
      const Var feat = mlp_forward(t, v.cloud_enc, placed);
      priv_parts.push_back(t.group_max(feat, cfg.cloud_points));  // [B, F]
      g_projections.fetch_add(B, std::memory_order_relaxed);
    }
    priv_parts.push_back(t.slice_cols(raw, off, off + sd));
  }

  // current frames straight out of the window layout
  const int64_t ih0 = step_index(cfg.history_steps, 0, "history");
  const int64_t if0 = step_index(cfg.future_steps, 0, "future");
  const int64_t hist_w = int64_t(cfg.history_steps.size()) * cfg.prop_dim;
  priv_parts.push_back(t.slice_cols(xin, ih0 * cfg.prop_dim, (ih0 + 1) * cfg.prop_dim));
  priv_parts.push_back(
      t.slice_cols(xin, hist_w + if0 * cfg.ref_dim, hist_w + (if0 + 1) * cfg.ref_dim));

  Var pin = priv_parts[0];
  for (size_t i = 1; i < priv_parts.size(); ++i) pin = t.concat_cols(pin, priv_parts[i]);
  const Var zh = mlp_forward(t, v.priv, pin);
  const Var priv_col = t.row_sum(t.square(t.sub(zh, t.constant(tgt.z))));

  WmLossVars out;
  out.obj = t.mean_all(obj_col);
  out.priv = t.mean_all(priv_col);
  out.total = t.add(t.scale(out.obj, lam_obj), t.scale(out.priv, lam_priv));
  return out;
}

EmaState ema_init(const WorldModelParams& online, double beta) {
  if (beta < 0.0 || beta > 1.0) throw ConfigError("ema decay must lie in [0, 1]");
  return EmaState{online, beta};
}

void ema_update(EmaState& ema, const WorldModelParams& online) {
  auto walk = [&](MlpParams& s, const MlpParams& o) {
    if (s.W.size() != o.W.size()) throw ContractError("ema_update: layer count mismatch");
    for (size_t l = 0; l < s.W.size(); ++l) {
      lerp_into(s.W[l], o.W[l], ema.beta);
      lerp_into(s.b[l], o.b[l], ema.beta);
    }
  };
  walk(ema.shadow.adapter, online.adapter);
  walk(ema.shadow.cloud_enc, online.cloud_enc);
  walk(ema.shadow.priv, online.priv);
}

}  // namespace hoi::wm
