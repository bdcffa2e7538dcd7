#pragma once

// Diagonal-Gaussian MLP policy with a state-independent log-std vector. The
// teacher variant adds a latent head that regresses the privileged embedding;
// the student consumes its observation plus the world model's latent.

#include <cstdint>
#include <string>
#include <vector>

#include "hoi/numerics/mlp.hpp"
#include "hoi/numerics/serialize.hpp"
#include "hoi/numerics/tape.hpp"
#include "hoi/numerics/tensor.hpp"
#include "hoi/rng.hpp"

namespace hoi::agent {

struct PolicyConfig {
  int64_t obs_dim = 0;
  int64_t act_dim = 16;
  std::vector<int64_t> hidden{512, 256, 256};
  double init_std = 1.0;
  int64_t z_dim = 0;  // >0 adds a latent head on the trunk (teacher)
  void validate() const;
};

// teacher: privileged observation in, latent head of the embedding width
PolicyConfig teacher_config(int64_t critic_obs_dim, int64_t z_dim = 64);
// student: actor observation concatenated with the world-model latent
PolicyConfig student_config(int64_t actor_obs_dim, int64_t latent_dim);

struct PolicyParams {
  PolicyConfig cfg;
  MlpParams trunk;     // obs -> hidden.back(), output passes through ELU
  MlpParams act_head;  // hidden.back() -> act_dim
  MlpParams z_head;    // hidden.back() -> z_dim, teacher only
  Tensor log_std;      // [1, act_dim]
};

PolicyParams policy_init(const PolicyConfig& cfg, Rng& rng);
void policy_named(NamedTensors& out, const std::string& prefix, const PolicyParams& p);
PolicyParams policy_from_named(const NamedTensors& named, const std::string& prefix,
                               const PolicyConfig& cfg);

struct ActionDistribution {
  Tensor mean;     // [B, act_dim]
  Tensor log_std;  // [1, act_dim]
};

// trunk features after the output ELU, [B, hidden.back()]
Tensor policy_features(const PolicyParams& p, const Tensor& obs);
ActionDistribution policy_forward(const PolicyParams& p, const Tensor& obs);
// latent head output; requires cfg.z_dim > 0
Tensor policy_z(const PolicyParams& p, const Tensor& obs);

enum class ActMode { kSample, kMean };

struct ActResult {
  Tensor action;    // [B, act_dim]
  Tensor log_prob;  // [B, 1]
};

// draw (or take the mean of) the action distribution; non-finite network
// output raises RuntimeFault
ActResult act(const PolicyParams& p, const Tensor& obs, ActMode mode, Rng& rng);

// log density of the given actions under the distribution, [B, 1]
Tensor log_prob(const ActionDistribution& d, const Tensor& actions);
// differential entropy per row (state-independent for a diagonal Gaussian)
double entropy(const ActionDistribution& d);
// mean over rows of KL(from || to); distributions must share shapes
double kl_divergence(const ActionDistribution& from, const ActionDistribution& to);

// taped mirror for gradient-based updates
struct PolicyVars {
  MlpVars trunk, act_head, z_head;
  Var log_std;
};

// flat leaf list in checkpoint order: trunk, act head, z head, log_std
std::vector<Tensor*> policy_leaves(PolicyParams& p);
PolicyVars policy_vars(Tape& t, PolicyParams& p);
Var policy_mean_graph(Tape& t, const PolicyVars& v, const Tensor& obs);
Var policy_z_graph(Tape& t, const PolicyVars& v, const Tensor& obs);
// log density of fixed actions under (mean, log_std), [B, 1]
Var log_prob_graph(Tape& t, const Var& mean, const Var& log_std, const Tensor& actions);
Var entropy_graph(Tape& t, const Var& log_std, int64_t act_dim);
// mean KL( N(mean, log_std) || N(ref) ) with the reference held constant
Var kl_graph(Tape& t, const Var& mean, const Var& log_std, const Tensor& ref_mean,
             const Tensor& ref_log_std);

}  // namespace hoi::agent
