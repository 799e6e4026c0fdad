#ifndef AMOD_NN_GAUSSIAN_HPP_
#define AMOD_NN_GAUSSIAN_HPP_

#include <Eigen/Dense>

#include "amod/common.hpp"

namespace amod::nn {

// Diagonal Gaussian with a state-independent log standard deviation per
// coordinate. `active` is a 0/1 weight vector; inactive coordinates are
// left out of densities, entropies and divergences.
class DiagGaussianHead {
 public:
  DiagGaussianHead() = default;
  DiagGaussianHead(int dim, double init_log_std);

  int dim() const { return static_cast<int>(log_std.size()); }

  Eigen::VectorXd sample(const Eigen::VectorXd& mean, Rng& rng) const;

  Eigen::VectorXd log_std;
};

double gaussian_log_prob(const Eigen::VectorXd& mean, const Eigen::VectorXd& log_std,
                         const Eigen::VectorXd& x, const Eigen::VectorXd& active);

double gaussian_entropy(const Eigen::VectorXd& log_std, const Eigen::VectorXd& active);

// KL(p || q).
double gaussian_kl(const Eigen::VectorXd& mean_p, const Eigen::VectorXd& log_std_p,
                   const Eigen::VectorXd& mean_q, const Eigen::VectorXd& log_std_q,
                   const Eigen::VectorXd& active);

}  // namespace amod::nn

#endif  // AMOD_NN_GAUSSIAN_HPP_
