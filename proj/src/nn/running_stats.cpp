#include "amod/nn/running_stats.hpp"

#include <cmath>

namespace amod::nn {

RunningStats::RunningStats(Eigen::Index dim)
    : mean(Eigen::VectorXd::Zero(dim)), var(Eigen::VectorXd::Ones(dim)) {}

void RunningStats::update(const Eigen::MatrixXd& X) {
  const double n = static_cast<double>(X.cols());
  if (n == 0) return;
  const Eigen::VectorXd batch_mean = X.rowwise().mean();
  const Eigen::VectorXd batch_var =
      (X.colwise() - batch_mean).array().square().rowwise().sum().matrix() / n;
  const double total = count + n;
  const Eigen::VectorXd delta = batch_mean - mean;
  mean += delta * (n / total);
  const Eigen::VectorXd m2 =
      var * count + batch_var * n + delta.cwiseProduct(delta) * (count * n / total);
  var = m2 / total;
  count = total;
}

Eigen::VectorXd RunningStats::normalize(const Eigen::VectorXd& x, double clip) const {
  Eigen::VectorXd z = (x - mean).array() / (var.array() + eps).sqrt();
  return z.cwiseMax(-clip).cwiseMin(clip);
}

Eigen::MatrixXd RunningStats::normalize_batch(const Eigen::MatrixXd& X, double clip) const {
  Eigen::MatrixXd z = (X.colwise() - mean).array().colwise() / (var.array() + eps).sqrt();
  return z.cwiseMax(-clip).cwiseMin(clip);
}

RewardScaler::RewardScaler(int num_envs, double gamma_)
    : returns(Eigen::VectorXd::Zero(num_envs)), gamma(gamma_) {}

double RewardScaler::scale(int k, double reward) {
  returns[k] = returns[k] * gamma + reward;
  Eigen::VectorXd one(1);
  one[0] = returns[k];
  stats.update(one);
  return scale_only(reward);
}

double RewardScaler::scale_only(double reward) const {
  return reward / std::sqrt(stats.var[0] + stats.eps);
}

}  // namespace amod::nn
