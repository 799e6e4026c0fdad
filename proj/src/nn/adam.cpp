#include "amod/nn/adam.hpp"

#include <cmath>

#include "amod/common.hpp"

namespace amod::nn {

Adam::Adam(Eigen::Index n, double lr_, double beta1_, double beta2_, double eps_)
    : lr(lr_),
      beta1(beta1_),
      beta2(beta2_),
      eps(eps_),
      m(Eigen::VectorXd::Zero(n)),
      v(Eigen::VectorXd::Zero(n)) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (params.size() != m.size() || grad.size() != m.size())
    throw DimensionError("optimizer state does not match the parameter vector");
  ++t;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  if (lr == 0.0) return;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  params.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

double clip_grad_norm(Eigen::VectorXd& grad, double max_norm) {
  const double norm = grad.norm();
  if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / norm;
  return norm;
}

}  // namespace amod::nn
