#include "amod/ppo/update.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace amod::ppo {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(k) = m.col(idx[k]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = v[idx[k]];
  return out;
}

// Mean KL(old || new) over the columns of the batch.
double batch_kl(const Eigen::MatrixXd& mean_old, const Eigen::VectorXd& ls_old,
                const Eigen::MatrixXd& mean_new, const Eigen::VectorXd& ls_new,
                const Eigen::VectorXd& active) {
  const Eigen::ArrayXd var_old = (2.0 * ls_old.array()).exp();
  const Eigen::ArrayXd inv_var_new = (-2.0 * ls_new.array()).exp();
  const Eigen::ArrayXd diff = (mean_old - mean_new).array().square().rowwise().sum() /
                              static_cast<double>(mean_old.cols());
  const Eigen::ArrayXd per =
      ls_new.array() - ls_old.array() + (var_old + diff) * 0.5 * inv_var_new - 0.5;
  return (per * active.array()).sum();
}

}  // namespace

MinibatchLoss minibatch_loss(const ActorCritic& agent, const RolloutBatch& batch,
                             const AdvantageResult& adv, const std::vector<int>& idx,
                             const PpoConfig& cfg, double kl_beta) {
  const auto B = static_cast<Eigen::Index>(idx.size());
  const double inv_b = 1.0 / static_cast<double>(B);
  const Eigen::MatrixXd obs = gather(batch.obs, idx);
  const Eigen::MatrixXd act = gather(batch.actions, idx);
  const Eigen::VectorXd old_lp = gather(batch.log_probs, idx);
  const Eigen::VectorXd A = gather(adv.advantages, idx);
  const Eigen::VectorXd R = gather(adv.returns, idx);
  const Eigen::VectorXd& ls = agent.head.log_std;
  const Eigen::ArrayXd active = agent.active.array();
  const Eigen::ArrayXd inv_std = (-ls.array()).exp();

  nn::MlpCache acache, ccache;
  const Eigen::MatrixXd mean = agent.actor.forward_batch(obs, &acache);
  const Eigen::MatrixXd value = agent.critic.forward_batch(obs, &ccache);

  // z = (a - mu) / sigma on live coordinates, zero elsewhere.
  Eigen::MatrixXd z = ((act - mean).array().colwise() * (inv_std * active)).matrix();
  const double lp_const = ((ls.array() + kHalfLog2Pi) * active).sum();
  const Eigen::VectorXd logp = -0.5 * z.colwise().squaredNorm().transpose().array() - lp_const;
  const Eigen::VectorXd ratio = (logp - old_lp).array().exp();

  MinibatchLoss out;
  const double lo = 1.0 - cfg.clip_eps, hi = 1.0 + cfg.clip_eps;
  Eigen::VectorXd g_lp(B);  // d total / d logp_i
  double surrogate = 0.0;
  for (Eigen::Index k = 0; k < B; ++k) {
    const double r = ratio[k];
    const double s1 = r * A[k];
    const double s2 = std::clamp(r, lo, hi) * A[k];
    const double s = std::min(s1, s2);
    if (s > s1 + 1e-12 * (1.0 + std::abs(s1)))
      throw std::logic_error("clipped surrogate exceeds the unclipped one");
    out.unclipped_surrogate += s1 * inv_b;
    out.clipped_surrogate += s * inv_b;
    out.mean_ratio += r * inv_b;
    out.max_ratio_deviation = std::max(out.max_ratio_deviation, std::abs(r - 1.0));
    if (r < lo || r > hi) out.clip_fraction += inv_b;
    if (cfg.objective == Objective::kClip) {
      surrogate += s * inv_b;
      g_lp[k] = s1 <= s2 ? -s1 * inv_b : 0.0;
    } else {
      surrogate += s1 * inv_b;
      g_lp[k] = -s1 * inv_b;
    }
  }

  // d logp / d mu = z / sigma; d logp / d log_std = z^2 - 1.
  Eigen::MatrixXd d_mean = (z.array().colwise() * inv_std).matrix() * g_lp.asDiagonal();
  Eigen::VectorXd d_ls = ((z.array().square().matrix() * g_lp).array() -
                          g_lp.sum() * active)
                             .matrix();

  const Eigen::MatrixXd old_mean = gather(batch.means, idx);
  out.kl = batch_kl(old_mean, batch.log_std, mean, ls, agent.active);
  out.policy = -surrogate;
  if (cfg.objective == Objective::kKlPen) {
    out.policy += kl_beta * out.kl;
    const Eigen::ArrayXd inv_var = inv_std.square();
    const Eigen::ArrayXd var_old = (2.0 * batch.log_std.array()).exp();
    const Eigen::MatrixXd diff = mean - old_mean;
    d_mean += (kl_beta * inv_b) * (diff.array().colwise() * (inv_var * active)).matrix();
    const Eigen::ArrayXd msq = diff.array().square().rowwise().sum() * inv_b;
    d_ls += (kl_beta * (1.0 - (var_old + msq) * inv_var) * active).matrix();
  }

  out.entropy = ((ls.array() + 0.5 + kHalfLog2Pi) * active).sum();
  d_ls -= cfg.ent_coef * agent.active;

  const Eigen::VectorXd v = value.row(0).transpose();
  out.value = (v - R).squaredNorm() * inv_b;
  Eigen::MatrixXd d_value = (2.0 * cfg.vf_coef * inv_b) * (v - R).transpose();

  out.total = out.policy + cfg.vf_coef * out.value - cfg.ent_coef * out.entropy;
  if (!std::isfinite(out.total)) {
    std::ostringstream msg;
    msg << "non-finite loss: policy " << out.policy << ", value " << out.value << ", entropy "
        << out.entropy << ", mean ratio " << out.mean_ratio << ", kl " << out.kl;
    throw NonFiniteLossError(msg.str());
  }

  const Eigen::VectorXd ga = agent.actor.backward(acache, d_mean).flat();
  const Eigen::VectorXd gc = agent.critic.backward(ccache, d_value).flat();
  out.grad.resize(ga.size() + d_ls.size() + gc.size());
  out.grad << ga, d_ls, gc;
  return out;
}

UpdateState make_update_state(const ActorCritic& agent, const PpoConfig& cfg) {
  UpdateState s;
  s.adam = nn::Adam(agent.param_count(), cfg.lr);
  s.kl_beta = cfg.kl_beta;
  s.shuffle_rng.seed(cfg.seed * 0x2545f4914f6cdd1dULL + 11);
  return s;
}

double adapt_kl_beta(double beta, double d, double d_targ) {
  if (d < d_targ / 1.5) return beta / 2.0;
  if (d > d_targ * 1.5) return beta * 2.0;
  return beta;
}

UpdateDiagnostics ppo_update(ActorCritic& agent, const RolloutBatch& batch,
                             const AdvantageResult& adv, const PpoConfig& cfg,
                             UpdateState& state) {
  const int n = batch.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  UpdateDiagnostics d;
  Eigen::VectorXd params = agent.params();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), state.shuffle_rng);
    for (int start = 0; start < n; start += cfg.minibatch) {
      const int stop = std::min(n, start + cfg.minibatch);
      std::vector<int> idx(order.begin() + start, order.begin() + stop);
      MinibatchLoss loss = minibatch_loss(agent, batch, adv, idx, cfg, state.kl_beta);
      if (d.minibatches == 0) d.first_ratio_deviation = loss.max_ratio_deviation;
      d.policy_loss += loss.policy;
      d.value_loss += loss.value;
      d.entropy += loss.entropy;
      d.mean_ratio += loss.mean_ratio;
      d.clip_fraction += loss.clip_fraction;
      d.grad_norm += nn::clip_grad_norm(loss.grad, cfg.max_grad_norm);
      ++d.minibatches;
      state.adam.lr = cfg.lr;
      state.adam.step(params, loss.grad);
      agent.set_params(params);
      ++state.updates;
    }
  }
  const double k = static_cast<double>(std::max(1, d.minibatches));
  d.policy_loss /= k;
  d.value_loss /= k;
  d.entropy /= k;
  d.mean_ratio /= k;
  d.clip_fraction /= k;
  d.grad_norm /= k;

  const Eigen::MatrixXd mean = agent.actor.forward_batch(batch.obs);
  d.approx_kl = batch_kl(batch.means, batch.log_std, mean, agent.head.log_std, agent.active);
  if (!std::isfinite(d.approx_kl)) throw NonFiniteLossError("non-finite KL after update");
  if (cfg.objective == Objective::kKlPen)
    state.kl_beta = adapt_kl_beta(state.kl_beta, d.approx_kl, cfg.d_targ);
  d.kl_beta = state.kl_beta;
  return d;
}

}  // namespace amod::ppo
