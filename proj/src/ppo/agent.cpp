#include "amod/ppo/agent.hpp"

#include <cmath>

namespace amod::ppo {

ActorCritic::ActorCritic(const model::Scenario& scn, const std::vector<int>& hidden,
                         double init_log_std, Rng& rng)
    : num_prices_(scn.m * scn.m - scn.m), ell_max_(scn.ell_max) {
  const int obs = env::state_dim(scn);
  const int act = env::action_dim(scn);
  std::vector<int> a_sizes{obs}, c_sizes{obs};
  for (int h : hidden) {
    a_sizes.push_back(h);
    c_sizes.push_back(h);
  }
  a_sizes.push_back(act);
  c_sizes.push_back(1);
  actor = nn::Mlp(a_sizes);
  critic = nn::Mlp(c_sizes);
  actor.init_orthogonal(rng, std::sqrt(2.0), 0.01);
  critic.init_orthogonal(rng, std::sqrt(2.0), 1.0);
  head = nn::DiagGaussianHead(act, init_log_std);
  const std::vector<bool> mask = env::action_mask(scn);
  active.resize(act);
  for (int k = 0; k < act; ++k) active[k] = mask[k] ? 1.0 : 0.0;
  obs_stats = nn::RunningStats(obs);
}

Eigen::VectorXd ActorCritic::observe(const env::EnvState& state) const {
  Eigen::VectorXd x = env::flatten(state);
  return normalize_obs ? obs_stats.normalize(x) : x;
}

Eigen::MatrixXd ActorCritic::observe_raw_batch(const Eigen::MatrixXd& raw) const {
  return normalize_obs ? obs_stats.normalize_batch(raw) : raw;
}

std::vector<double> ActorCritic::to_raw_action(const Eigen::VectorXd& u) const {
  std::vector<double> raw(u.data(), u.data() + u.size());
  for (int k = 0; k < num_prices_; ++k) raw[k] = 0.5 * ell_max_ * (1.0 + u[k]);
  return raw;
}

env::ActionVector ActorCritic::to_action(const model::Scenario& scn,
                                         const Eigen::VectorXd& u) const {
  const std::vector<double> raw = to_raw_action(u);
  return env::sanitize_action(scn, raw);
}

Eigen::Index ActorCritic::param_count() const {
  return actor.param_count() + head.dim() + critic.param_count();
}

Eigen::VectorXd ActorCritic::params() const {
  Eigen::VectorXd out(param_count());
  out << actor.params(), head.log_std, critic.params();
  return out;
}

void ActorCritic::set_params(const Eigen::VectorXd& flat) {
  if (flat.size() != param_count()) throw DimensionError("agent parameter length mismatch");
  const Eigen::Index na = actor.param_count(), nh = head.dim();
  actor.set_params(flat.head(na));
  head.log_std = flat.segment(na, nh);
  critic.set_params(flat.tail(critic.param_count()));
}

NeuralPolicy::NeuralPolicy(std::shared_ptr<const ActorCritic> agent,
                           std::shared_ptr<const model::Scenario> scn, bool deterministic)
    : agent_(std::move(agent)), scn_(std::move(scn)), deterministic_(deterministic) {
  if (agent_->obs_dim() != env::state_dim(*scn_) || agent_->act_dim() != env::action_dim(*scn_))
    throw DimensionError("checkpoint dimensions (state " + std::to_string(agent_->obs_dim()) +
                         ", action " + std::to_string(agent_->act_dim()) +
                         ") do not match the scenario (state " +
                         std::to_string(env::state_dim(*scn_)) + ", action " +
                         std::to_string(env::action_dim(*scn_)) + ")");
}

env::ActionVector NeuralPolicy::act(const env::EnvState& state, Rng& rng) const {
  Eigen::VectorXd mean = agent_->actor.forward(agent_->observe(state));
  if (!deterministic_) {
    Eigen::VectorXd u = agent_->head.sample(mean, rng);
    for (Eigen::Index k = 0; k < u.size(); ++k)
      if (agent_->active[k] == 0.0) u[k] = mean[k];
    mean = u;
  }
  return agent_->to_action(*scn_, mean);
}

}  // namespace amod::ppo
