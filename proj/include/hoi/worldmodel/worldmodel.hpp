#pragma once

// Dynamics-aware world model: an object adapter maps a proprioception history
// plus a reference-motion future to each tracked object's relative state; the
// predicted pose places the object's canonical point cloud in the root frame;
// a privilege adapter fuses the placed cloud, the raw estimate, and the
// current frames into a latent that mimics a privileged encoder. Rollouts
// read EMA-smoothed weights while gradients flow through the online ones.

#include <string>
#include <vector>

#include "hoi/numerics/mlp.hpp"
#include "hoi/numerics/rotation.hpp"
#include "hoi/numerics/serialize.hpp"
#include "hoi/numerics/tape.hpp"

namespace hoi::wm {

// ablation variants: what the object branch predicts and how it is consumed
enum class Variant { kProprioOnly, kVecPose, kVecDyn, kGeoPose, kFull };

Variant variant_from_string(const std::string& name);  // throws ConfigError
const char* variant_name(Variant v);
bool has_adapter(Variant v);       // any object branch at all
bool predicts_dynamics(Variant v); // velocities + accelerations in the estimate
bool uses_projection(Variant v);   // point cloud placed by the predicted pose

struct WorldModelConfig {
  Variant variant = Variant::kFull;
  int num_objects = 1;     // tracked object slots
  int64_t prop_dim = 0;    // per-frame proprioception width
  int64_t ref_dim = 0;     // per-frame reference width
  std::vector<int> history_steps{0, 1, 2, 3, 4, 8};  // lags into the past
  std::vector<int> future_steps{0, 1, 2, 4};         // leads into the reference
  int64_t latent_dim = 64;
  std::vector<int64_t> adapter_hidden{256, 256};
  std::vector<int64_t> priv_hidden{256, 256};
  std::vector<int64_t> cloud_hidden{64};
  int64_t cloud_points = 64;  // canonical cloud size N
  int64_t cloud_feat = 32;    // pooled per-cloud feature width
  double ema_beta = 0.99;

  // per-slot estimate width: position 3 + two rotation columns 6, plus
  // lin/ang velocity and acceleration (3+3+3+3) when dynamics are predicted
  int64_t slot_dim() const { return predicts_dynamics(variant) ? 21 : 9; }
  int64_t adapter_out() const { return slot_dim() * num_objects; }
  int64_t window_dim() const {
    return int64_t(history_steps.size()) * prop_dim + int64_t(future_steps.size()) * ref_dim;
  }
  // privilege-adapter input: per slot the pooled cloud feature (geo variants)
  // and the raw estimate, then the current proprio and reference frames
  int64_t priv_in() const {
    const int64_t per_slot = (uses_projection(variant) ? cloud_feat : 0) + slot_dim();
    return num_objects * per_slot + prop_dim + ref_dim;
  }
  void validate() const;  // throws ConfigError on nonsense
};

// time-ordered input frames: history[i] is the proprio frame at lag
// history_steps[i]; future[i] the reference frame at lead future_steps[i]
struct ObservationWindow {
  std::vector<Tensor> history;
  std::vector<Tensor> future;
};

struct ObjectStateEstimate {
  Vec3 p{};      // m, robot-root frame
  Quat R;        // unit-norm
  Vec3 v_lin{};  // m/s
  Vec3 v_ang{};  // rad/s
  Vec3 a_lin{};  // m/s^2
  Vec3 a_ang{};  // rad/s^2
};

struct WorldModelParams {
  WorldModelConfig cfg;
  MlpParams adapter;    // window -> slot_dim * num_objects
  MlpParams cloud_enc;  // per point 3 -> cloud_feat, max-pooled over the cloud
  MlpParams priv;       // fused object representations -> latent
};

WorldModelParams wm_init(const WorldModelConfig& cfg, Rng& rng);

// checkpoint flattening; EMA shadows are stored under "ema." + prefix
NamedTensors wm_named(const WorldModelParams& p, const std::string& prefix = "wm.");
WorldModelParams wm_from_named(const WorldModelConfig& cfg, const NamedTensors& named,
                               const std::string& prefix = "wm.");  // throws ContractError

// [1, window_dim] concatenation in declared frame order
Tensor window_input(const WorldModelConfig& cfg, const ObservationWindow& w);

// raw adapter output for a batch of window rows: [B, adapter_out]
Tensor adapter_forward(const WorldModelParams& p, const Tensor& x);

// unpack one slot of a raw output row; rotation re-orthonormalized, dynamics
// zero when the variant does not predict them
ObjectStateEstimate decode_estimate(const WorldModelConfig& cfg, const Tensor& raw,
                                    int64_t row, int slot);

std::vector<ObjectStateEstimate> predict_object_state(const WorldModelParams& p,
                                                      const ObservationWindow& w);

// canonical cloud [N,3] placed by the estimate: R*P + p. Bumps the projection
// instrumentation counter.
Tensor project_point_cloud(const Tensor& cloud, const ObjectStateEstimate& est);
int64_t projection_count();
void reset_projection_count();

// fused latent [1, latent_dim]; dyn_clouds must be empty unless the variant
// projects, est_raw is the adapter's raw row, prop/ref the current frames
Tensor privileged_latent(const WorldModelParams& p, const std::vector<Tensor>& dyn_clouds,
                         const Tensor& est_raw, const Tensor& prop, const Tensor& ref);

// squared error between estimate and target: position, geodesic^2 orientation,
// and (for dynamics variants) velocity/acceleration terms
double object_state_error(const WorldModelConfig& cfg, const ObjectStateEstimate& shat,
                          const ObjectStateEstimate& s);

// lam_obj * sum_slots ||shat - s||^2 + lam_priv * ||zhat - z||^2
double world_model_loss(const WorldModelConfig& cfg, const std::vector<ObjectStateEstimate>& shat,
                        const std::vector<ObjectStateEstimate>& s, const Tensor& zhat,
                        const Tensor& z, double lam_obj, double lam_priv);

// --- training graph ---------------------------------------------------------

// supervision for a batch of B window rows
struct WmBatchTargets {
  // one entry per slot; rot_cols holds the target rotation's three columns
  // concatenated as a 9-wide row
  std::vector<Tensor> p, rot_cols;                  // [B,3], [B,9]
  std::vector<Tensor> v_lin, v_ang, a_lin, a_ang;   // [B,3] each, dynamics variants
  Tensor z;  // [B, latent_dim]
};

// target-assembly helper: the three columns of R(q) as a flat 9-vector
std::array<double, 9> rot_cols_of(const Quat& q);

struct WmVars {
  MlpVars adapter, cloud_enc, priv;
};
WmVars wm_leaves(Tape& t, const WorldModelParams& p);

struct WmLossVars {
  Var total;  // lam_obj * obj + lam_priv * priv, batch mean
  Var obj;    // unweighted object term, batch mean
  Var priv;   // unweighted latent term, batch mean
};

// full differentiable loss: adapter forward, on-tape rotation decode, cloud
// placement + pooled encoding (geo variants), privilege adapter, and the
// weighted objective. `clouds` are borrowed canonical clouds, one per slot,
// and must outlive the tape.
WmLossVars wm_loss_graph(Tape& t, const WmVars& v, const WorldModelConfig& cfg,
                         const std::vector<const Tensor*>& clouds, const Tensor& x,
                         const WmBatchTargets& tgt, double lam_obj, double lam_priv);

// --- EMA --------------------------------------------------------------------

struct EmaState {
  WorldModelParams shadow;
  double beta = 0.99;
};

EmaState ema_init(const WorldModelParams& online, double beta);
// shadow <- beta * shadow + (1 - beta) * online, elementwise
void ema_update(EmaState& ema, const WorldModelParams& online);  // throws ContractError

}  // namespace hoi::wm
