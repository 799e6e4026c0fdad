#ifndef AMOD_PPO_ADVANTAGES_HPP_
#define AMOD_PPO_ADVANTAGES_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "amod/ppo/rollout.hpp"

namespace amod::ppo {

struct AdvantageResult {
  Eigen::VectorXd raw;         // GAE before normalization
  Eigen::VectorXd advantages;  // normalized to mean 0, std 1
  Eigen::VectorXd returns;     // raw + values
};

// Generalized advantage estimation over N sequences of length T laid out as
// column n*T + t. Every step bootstraps from next_values; dones only stop
// the lambda-accumulation across an episode boundary.
AdvantageResult compute_advantages(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                                   const Eigen::VectorXd& next_values,
                                   const std::vector<std::uint8_t>& dones, int num_envs,
                                   int horizon, double gamma, double lambda_gae);

AdvantageResult compute_advantages(const RolloutBatch& batch, double gamma, double lambda_gae);

}  // namespace amod::ppo

#endif  // AMOD_PPO_ADVANTAGES_HPP_
