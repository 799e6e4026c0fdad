#ifndef AMOD_PPO_AGENT_HPP_
#define AMOD_PPO_AGENT_HPP_

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

#include "amod/env/env.hpp"
#include "amod/nn/gaussian.hpp"
#include "amod/nn/mlp.hpp"
#include "amod/nn/running_stats.hpp"
#include "amod/policy/policies.hpp"

namespace amod::ppo {

// Separate actor and critic networks over the normalized flat state.
//
// The actor's output u lives in a unit-scaled space: price coordinates map
// to raw prices ell_max/2 * (1 + u) before clamping, routing coordinates are
// the logits of the masked softmax. Exploration is a diagonal Gaussian on u;
// masked routing coordinates are inactive.
class ActorCritic {
 public:
  ActorCritic() = default;
  ActorCritic(const model::Scenario& scn, const std::vector<int>& hidden, double init_log_std,
              Rng& rng);

  int obs_dim() const { return actor.input_dim(); }
  int act_dim() const { return actor.output_dim(); }
  int num_prices() const { return num_prices_; }
  double ell_max() const { return ell_max_; }
  void set_action_map(int num_prices, double ell_max) {
    num_prices_ = num_prices;
    ell_max_ = ell_max;
  }

  // Network input for a state under the current normalizer.
  Eigen::VectorXd observe(const env::EnvState& state) const;
  Eigen::MatrixXd observe_raw_batch(const Eigen::MatrixXd& raw) const;

  // u -> raw env action -> sanitized ActionVector.
  std::vector<double> to_raw_action(const Eigen::VectorXd& u) const;
  env::ActionVector to_action(const model::Scenario& scn, const Eigen::VectorXd& u) const;

  // Flat parameters: actor | log_std | critic.
  Eigen::VectorXd params() const;
  void set_params(const Eigen::VectorXd& flat);
  Eigen::Index param_count() const;

  nn::Mlp actor;
  nn::Mlp critic;
  nn::DiagGaussianHead head;
  Eigen::VectorXd active;  // 1 for live action coordinates
  nn::RunningStats obs_stats;
  bool normalize_obs = true;

 private:
  int num_prices_ = 0;
  double ell_max_ = 1.0;
};

// Wraps a trained agent as an evaluation policy. Deterministic mode acts
// with the Gaussian mean.
class NeuralPolicy : public policy::Policy {
 public:
  NeuralPolicy(std::shared_ptr<const ActorCritic> agent,
               std::shared_ptr<const model::Scenario> scn, bool deterministic = true);

  env::ActionVector act(const env::EnvState& state, Rng& rng) const override;
  std::string name() const override { return "rl"; }

 private:
  std::shared_ptr<const ActorCritic> agent_;
  std::shared_ptr<const model::Scenario> scn_;
  bool deterministic_;
};

}  // namespace amod::ppo

#endif  // AMOD_PPO_AGENT_HPP_
