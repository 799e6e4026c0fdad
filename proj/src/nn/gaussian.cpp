#include "amod/nn/gaussian.hpp"

#include <cmath>
#include <numbers>

namespace amod::nn {
namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

DiagGaussianHead::DiagGaussianHead(int dim, double init_log_std)
    : log_std(Eigen::VectorXd::Constant(dim, init_log_std)) {}

Eigen::VectorXd DiagGaussianHead::sample(const Eigen::VectorXd& mean, Rng& rng) const {
  if (mean.size() != log_std.size()) throw DimensionError("mean and log_std lengths differ");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out(mean.size());
  for (Eigen::Index k = 0; k < mean.size(); ++k)
    out[k] = mean[k] + std::exp(log_std[k]) * normal(rng);
  return out;
}

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& active) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < mean.size(); ++k) {
    if (active[k] == 0.0) continue;
    const double z = (x[k] - mean[k]) * std::exp(-log_std[k]);
    total += -0.5 * z * z - log_std[k] - kHalfLog2Pi;
  }
  return total;
}

double gaussian_entropy(const Eigen::VectorXd& log_std, const Eigen::VectorXd& active) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < log_std.size(); ++k)
    if (active[k] != 0.0) total += log_std[k] + 0.5 + kHalfLog2Pi;
  return total;
}

double gaussian_kl(const Eigen::VectorXd& mean_p, const Eigen::VectorXd& log_std_p,
                   const Eigen::VectorXd& mean_q, const Eigen::VectorXd& log_std_q,
                   const Eigen::VectorXd& active) {
  double total = 0.0;
  for (Eigen::Index k = 0; k < mean_p.size(); ++k) {
    if (active[k] == 0.0) continue;
    const double var_p = std::exp(2.0 * log_std_p[k]);
    const double var_q = std::exp(2.0 * log_std_q[k]);
    const double d = mean_p[k] - mean_q[k];
    total += log_std_q[k] - log_std_p[k] + (var_p + d * d) / (2.0 * var_q) - 0.5;
  }
  return total;
}

}  // namespace amod::nn
