#ifndef AMOD_NN_RUNNING_STATS_HPP_
#define AMOD_NN_RUNNING_STATS_HPP_

#include <Eigen/Dense>

namespace amod::nn {

// Per-coordinate running mean and variance (batched Welford merge).
class RunningStats {
 public:
  RunningStats() = default;
  explicit RunningStats(Eigen::Index dim);

  // Columns of X are observations.
  void update(const Eigen::MatrixXd& X);
  void update(const Eigen::VectorXd& x) { update(Eigen::MatrixXd(x)); }

  // (x - mean) / sqrt(var + eps), clipped to [-clip, clip].
  Eigen::VectorXd normalize(const Eigen::VectorXd& x, double clip = 10.0) const;
  Eigen::MatrixXd normalize_batch(const Eigen::MatrixXd& X, double clip = 10.0) const;

  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  double count = 1e-4;
  double eps = 1e-8;
};

// Divides rewards by the running standard deviation of the discounted
// return, one return accumulator per parallel environment.
class RewardScaler {
 public:
  RewardScaler() = default;
  RewardScaler(int num_envs, double gamma);

  // Updates the statistics with env k's reward and returns the scaled value.
  double scale(int k, double reward);
  double scale_only(double reward) const;

  RunningStats stats{1};
  Eigen::VectorXd returns;
  double gamma = 0.99;
};

}  // namespace amod::nn

#endif  // AMOD_NN_RUNNING_STATS_HPP_
