#ifndef AMOD_PPO_ROLLOUT_HPP_
#define AMOD_PPO_ROLLOUT_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "amod/env/env.hpp"
#include "amod/nn/running_stats.hpp"
#include "amod/ppo/agent.hpp"

namespace amod::ppo {

// N actors x T steps; column n*T + t holds env n at step t.
struct RolloutBatch {
  int num_envs = 0;
  int horizon = 0;
  Eigen::MatrixXd obs;        // network inputs (normalized)
  Eigen::MatrixXd raw_obs;    // flattened states before normalization
  Eigen::MatrixXd actions;    // u, before the price map and sanitizing
  Eigen::MatrixXd means;      // actor means at collection time
  Eigen::VectorXd log_std;    // exploration scales at collection time
  Eigen::VectorXd rewards;    // learning signal (scaled when enabled)
  Eigen::VectorXd raw_rewards;
  Eigen::VectorXd values;
  Eigen::VectorXd next_values;  // V(s_{t+1}), before any reset
  Eigen::VectorXd log_probs;
  std::vector<std::uint8_t> dones;  // episode boundary after this step
  Eigen::VectorXd total_queue;      // sum q(t) per step
  Eigen::VectorXd charge_units;
  Eigen::VectorXd electricity_spend;

  int size() const { return num_envs * horizon; }
  int col(int n, int t) const { return n * horizon + t; }
};

// The persistent actors: one env and one action stream each.
struct ActorSet {
  std::vector<env::AmodEnv> envs;
  std::vector<Rng> action_rngs;
  nn::RewardScaler reward_scaler;
  std::uint64_t resets = 0;  // episode restarts so far, feeds reset seeds
};

ActorSet make_actors(std::shared_ptr<const model::Scenario> scn, int num_envs,
                     int episode_length, double gamma, std::uint64_t seed);

struct RolloutOptions {
  bool scale_reward = true;
  int threads = 1;
  std::uint64_t seed = 1;
};

// Runs the agent's stochastic policy for T steps in every env. Observation
// statistics are frozen during collection; the caller updates them from
// batch.raw_obs afterwards.
RolloutBatch collect_rollouts(const ActorCritic& agent, ActorSet& actors, int horizon,
                              const RolloutOptions& opts);

}  // namespace amod::ppo

#endif  // AMOD_PPO_ROLLOUT_HPP_
