#ifndef AMOD_NN_ADAM_HPP_
#define AMOD_NN_ADAM_HPP_

#include <Eigen/Dense>

#include <cstdint>

namespace amod::nn {

// Adam over one flat parameter vector. step() descends: params -= update.
class Adam {
 public:
  Adam() = default;
  Adam(Eigen::Index n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t t = 0;
};

// Scales grad in place so its Euclidean norm is at most max_norm; returns
// the norm before clipping.
double clip_grad_norm(Eigen::VectorXd& grad, double max_norm);

}  // namespace amod::nn

#endif  // AMOD_NN_ADAM_HPP_
