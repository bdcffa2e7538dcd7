#include "hoi/agent/policy.hpp"

#include <cmath>

#include "hoi/error.hpp"

namespace hoi::agent {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

// trunk hidden widths: every configured layer except the last, which is the
// feature width the heads read
std::vector<int64_t> trunk_hidden(const PolicyConfig& cfg) {
  return {cfg.hidden.begin(), cfg.hidden.end() - 1};
}

double elu1(double v) { return v > 0.0 ? v : std::expm1(v); }

void check_finite(const Tensor& t, const char* what) {
  for (double v : t.data)
    if (!std::isfinite(v)) throw RuntimeFault(std::string("policy produced non-finite ") + what);
}

void check_dist(const ActionDistribution& d) {
  if (d.log_std.rows() != 1 || d.log_std.cols() != d.mean.cols())
    throw ContractError("action distribution shape mismatch: mean " + d.mean.shape_str() +
                        " log_std " + d.log_std.shape_str());
}

}  // namespace

void PolicyConfig::validate() const {
  if (obs_dim <= 0 || act_dim <= 0) throw ConfigError("policy dims must be positive");
  if (hidden.empty()) throw ConfigError("policy needs at least one hidden layer");
  for (int64_t h : hidden)
    if (h <= 0) throw ConfigError("policy hidden widths must be positive");
  if (!(init_std > 0.0)) throw ConfigError("policy init_std must be positive");
  if (z_dim < 0) throw ConfigError("policy z_dim must be non-negative");
}

PolicyConfig teacher_config(int64_t critic_obs_dim, int64_t z_dim) {
  PolicyConfig cfg;
  cfg.obs_dim = critic_obs_dim;
  cfg.z_dim = z_dim;
  return cfg;
}

PolicyConfig student_config(int64_t actor_obs_dim, int64_t latent_dim) {
  PolicyConfig cfg;
  cfg.obs_dim = actor_obs_dim + latent_dim;
  return cfg;
}

PolicyParams policy_init(const PolicyConfig& cfg, Rng& rng) {
  cfg.validate();
  PolicyParams p;
  p.cfg = cfg;
  p.trunk = mlp_init(cfg.obs_dim, trunk_hidden(cfg), cfg.hidden.back(), rng);
  p.act_head = mlp_init(cfg.hidden.back(), {}, cfg.act_dim, rng, 0.1);
  if (cfg.z_dim > 0) p.z_head = mlp_init(cfg.hidden.back(), {}, cfg.z_dim, rng);
  p.log_std = Tensor::zeros(1, cfg.act_dim);
  for (double& v : p.log_std.data) v = std::log(cfg.init_std);
  return p;
}

void policy_named(NamedTensors& out, const std::string& prefix, const PolicyParams& p) {
  mlp_append_named(out, prefix + "trunk", p.trunk);
  mlp_append_named(out, prefix + "act", p.act_head);
  if (p.cfg.z_dim > 0) mlp_append_named(out, prefix + "z", p.z_head);
  out.emplace_back(prefix + "log_std", p.log_std);
}

PolicyParams policy_from_named(const NamedTensors& named, const std::string& prefix,
                               const PolicyConfig& cfg) {
  cfg.validate();
  PolicyParams p;
  p.cfg = cfg;
  p.trunk = mlp_from_named(named, prefix + "trunk", cfg.obs_dim, trunk_hidden(cfg),
                           cfg.hidden.back());
  p.act_head = mlp_from_named(named, prefix + "act", cfg.hidden.back(), {}, cfg.act_dim);
  if (cfg.z_dim > 0) p.z_head = mlp_from_named(named, prefix + "z", cfg.hidden.back(), {}, cfg.z_dim);
  const Tensor* ls = find_param(named, prefix + "log_std");
  if (ls == nullptr) throw ContractError("checkpoint missing " + prefix + "log_std");
  if (ls->rows() != 1 || ls->cols() != cfg.act_dim)
    throw ContractError("checkpoint shape mismatch at " + prefix + "log_std");
  p.log_std = *ls;
  return p;
}

Tensor policy_features(const PolicyParams& p, const Tensor& obs) {
  Tensor h = mlp_forward(p.trunk, obs);
  for (double& v : h.data) v = elu1(v);
  return h;
}

ActionDistribution policy_forward(const PolicyParams& p, const Tensor& obs) {
  ActionDistribution d;
  d.mean = mlp_forward(p.act_head, policy_features(p, obs));
  d.log_std = p.log_std;
  return d;
}

Tensor policy_z(const PolicyParams& p, const Tensor& obs) {
  if (p.cfg.z_dim <= 0) throw ContractError("policy has no latent head");
  return mlp_forward(p.z_head, policy_features(p, obs));
}

ActResult act(const PolicyParams& p, const Tensor& obs, ActMode mode, Rng& rng) {
  ActionDistribution d = policy_forward(p, obs);
  check_finite(d.mean, "action mean");
  check_finite(d.log_std, "log_std");
  ActResult r;
  r.action = d.mean;
  if (mode == ActMode::kSample)
    for (int64_t i = 0; i < r.action.rows(); ++i)
      for (int64_t j = 0; j < r.action.cols(); ++j)
        r.action.at(i, j) += std::exp(d.log_std[j]) * rng.normal();
  r.log_prob = log_prob(d, r.action);
  return r;
}

Tensor log_prob(const ActionDistribution& d, const Tensor& actions) {
  check_dist(d);
  if (!actions.same_shape(d.mean))
    throw ContractError("log_prob: actions shape " + actions.shape_str() + " vs mean " +
                        d.mean.shape_str());
  const int64_t J = d.mean.cols();
  double sum_ls = 0.0;
  for (int64_t j = 0; j < J; ++j) sum_ls += d.log_std[j];
  Tensor lp = Tensor::zeros(actions.rows(), 1);
  for (int64_t i = 0; i < actions.rows(); ++i) {
    double q = 0.0;
    for (int64_t j = 0; j < J; ++j) {
      const double z = (actions.at(i, j) - d.mean.at(i, j)) * std::exp(-d.log_std[j]);
      q += z * z;
    }
    lp.at(i, 0) = -0.5 * q - sum_ls - 0.5 * double(J) * kLog2Pi;
  }
  return lp;
}

double entropy(const ActionDistribution& d) {
  check_dist(d);
  double h = 0.5 * double(d.log_std.cols()) * (1.0 + kLog2Pi);
  for (double v : d.log_std.data) h += v;
  return h;
}

double kl_divergence(const ActionDistribution& from, const ActionDistribution& to) {
  check_dist(from);
  check_dist(to);
  if (!from.mean.same_shape(to.mean))
    throw ContractError("kl_divergence: mean shapes " + from.mean.shape_str() + " vs " +
                        to.mean.shape_str());
  const int64_t B = from.mean.rows(), J = from.mean.cols();
  double acc = 0.0;
  for (int64_t i = 0; i < B; ++i)
    for (int64_t j = 0; j < J; ++j) {
      const double ls_f = from.log_std[j], ls_t = to.log_std[j];
      const double var_f = std::exp(2.0 * ls_f);
      const double dm = from.mean.at(i, j) - to.mean.at(i, j);
      acc += ls_t - ls_f + (var_f + dm * dm) * 0.5 * std::exp(-2.0 * ls_t) - 0.5;
    }
  return acc / double(B);
}

std::vector<Tensor*> policy_leaves(PolicyParams& p) {
  std::vector<Tensor*> out;
  for (MlpParams* m : {&p.trunk, &p.act_head, &p.z_head})
    for (size_t l = 0; l < m->W.size(); ++l) {
      out.push_back(&m->W[l]);
      out.push_back(&m->b[l]);
    }
  out.push_back(&p.log_std);
  return out;
}

PolicyVars policy_vars(Tape& t, PolicyParams& p) {
  PolicyVars v;
  v.trunk = mlp_leaves(t, p.trunk);
  v.act_head = mlp_leaves(t, p.act_head);
  if (p.cfg.z_dim > 0) v.z_head = mlp_leaves(t, p.z_head);
  v.log_std = t.leaf(p.log_std);
  return v;
}

Var policy_mean_graph(Tape& t, const PolicyVars& v, const Tensor& obs) {
  Var h = t.elu(mlp_forward(t, v.trunk, t.constant(obs)));
  return mlp_forward(t, v.act_head, h);
}

Var policy_z_graph(Tape& t, const PolicyVars& v, const Tensor& obs) {
  if (v.z_head.W.empty()) throw ContractError("policy has no latent head");
  Var h = t.elu(mlp_forward(t, v.trunk, t.constant(obs)));
  return mlp_forward(t, v.z_head, h);
}

Var log_prob_graph(Tape& t, const Var& mean, const Var& log_std, const Tensor& actions) {
  const int64_t J = actions.cols();
  Var z = t.mul_row(t.sub(t.constant(actions), mean), t.exp(t.neg(log_std)));
  Var q = t.scale(t.row_sum(t.square(z)), -0.5);
  Var lp = t.add_scalar_var(q, t.neg(t.sum_all(log_std)));
  return t.add_scalar(lp, -0.5 * double(J) * kLog2Pi);
}

Var entropy_graph(Tape& t, const Var& log_std, int64_t act_dim) {
  return t.add_scalar(t.sum_all(log_std), 0.5 * double(act_dim) * (1.0 + kLog2Pi));
}

Var kl_graph(Tape& t, const Var& mean, const Var& log_std, const Tensor& ref_mean,
             const Tensor& ref_log_std) {
  if (ref_log_std.rows() != 1 || ref_log_std.cols() != ref_mean.cols())
    throw ContractError("kl_graph: reference shapes " + ref_mean.shape_str() + " / " +
                        ref_log_std.shape_str());
  const int64_t J = ref_mean.cols();
  // column constants: 1/(2*sigma_ref^2) and (log sigma_ref - 1/2)
  Tensor inv2var = Tensor::zeros(1, J), offs = Tensor::zeros(1, J);
  for (int64_t j = 0; j < J; ++j) {
    inv2var[j] = 0.5 * std::exp(-2.0 * ref_log_std[j]);
    offs[j] = ref_log_std[j] - 0.5;
  }
  Var d2 = t.square(t.sub(mean, t.constant(ref_mean)));
  Var var_f = t.exp(t.scale(log_std, 2.0));
  Var quad = t.mul_row(t.add_row(d2, var_f), t.constant(inv2var));
  Var per = t.add_row(t.add_row(quad, t.neg(log_std)), t.constant(offs));
  return t.mean_all(t.row_sum(per));
}

}  // namespace hoi::agent
