#include "amod/ppo/advantages.hpp"

#include <cmath>

namespace amod::ppo {

AdvantageResult compute_advantages(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                                   const Eigen::VectorXd& next_values,
                                   const std::vector<std::uint8_t>& dones, int num_envs,
                                   int horizon, double gamma, double lambda_gae) {
  const Eigen::Index n = static_cast<Eigen::Index>(num_envs) * horizon;
  if (rewards.size() != n || values.size() != n || next_values.size() != n ||
      static_cast<Eigen::Index>(dones.size()) != n)
    throw DimensionError("advantage inputs must all have length N*T");
  AdvantageResult out;
  out.raw.resize(n);
  for (int e = 0; e < num_envs; ++e) {
    double running = 0.0;
    for (int t = horizon - 1; t >= 0; --t) {
      const Eigen::Index c = static_cast<Eigen::Index>(e) * horizon + t;
      const double delta = rewards[c] + gamma * next_values[c] - values[c];
      const bool cut = dones[c] != 0 || t + 1 == horizon;
      running = delta + (cut ? 0.0 : gamma * lambda_gae * running);
      out.raw[c] = running;
    }
  }
  out.returns = out.raw + values;
  const double mean = out.raw.mean();
  const double var = n > 1 ? (out.raw.array() - mean).square().sum() / static_cast<double>(n) : 0.0;
  out.advantages = (out.raw.array() - mean) / (std::sqrt(var) + 1e-8);
  return out;
}

AdvantageResult compute_advantages(const RolloutBatch& batch, double gamma, double lambda_gae) {
  return compute_advantages(batch.rewards, batch.values, batch.next_values, batch.dones,
                            batch.num_envs, batch.horizon, gamma, lambda_gae);
}

}  // namespace amod::ppo
