#include "amod/nn/mlp.hpp"

#include <stdexcept>
#include <string>

namespace amod::nn {

Eigen::VectorXd Gradients::flat() const {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l < dW.size(); ++l) n += dW[l].size() + db[l].size();
  Eigen::VectorXd out(n);
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < dW.size(); ++l) {
    out.segment(at, dW[l].size()) = dW[l].reshaped();
    at += dW[l].size();
    out.segment(at, db[l].size()) = db[l];
    at += db[l].size();
  }
  return out;
}

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw ValidationError("network needs at least input and output sizes");
  for (int s : sizes_)
    if (s < 1) throw ValidationError("layer sizes must be positive");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    W_.push_back(Eigen::MatrixXd::Zero(sizes_[l + 1], sizes_[l]));
    b_.push_back(Eigen::VectorXd::Zero(sizes_[l + 1]));
  }
}

int Mlp::param_count() const {
  int n = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) n += (sizes_[l] + 1) * sizes_[l + 1];
  return n;
}

void Mlp::init_orthogonal(Rng& rng, double hidden_gain, double out_gain) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int l = 0; l < num_layers(); ++l) {
    const Eigen::Index rows = W_[l].rows(), cols = W_[l].cols();
    const bool tall = rows >= cols;
    Eigen::MatrixXd g(tall ? rows : cols, tall ? cols : rows);
    for (Eigen::Index c = 0; c < g.cols(); ++c)
      for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
    // Sign fix so the distribution is uniform over orthogonal matrices.
    const Eigen::MatrixXd r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
    for (Eigen::Index c = 0; c < q.cols(); ++c)
      if (r(c, c) < 0) q.col(c) *= -1.0;
    const double gain = l + 1 == num_layers() ? out_gain : hidden_gain;
    W_[l] = gain * (tall ? q : Eigen::MatrixXd(q.transpose()));
    b_[l].setZero();
  }
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim())
    throw DimensionError("network input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(input_dim()));
  Eigen::VectorXd h = x;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::VectorXd z = W_[l] * h + b_[l];
    h = l + 1 == num_layers() ? z : Eigen::VectorXd(z.array().tanh());
  }
  return h;
}

Eigen::MatrixXd Mlp::forward_batch(const Eigen::MatrixXd& X, MlpCache* cache) const {
  if (X.rows() != input_dim())
    throw DimensionError("network input has " + std::to_string(X.rows()) + " rows, expected " +
                         std::to_string(input_dim()));
  if (cache) {
    cache->inputs.clear();
    cache->recorded = true;
  }
  Eigen::MatrixXd h = X;
  for (int l = 0; l < num_layers(); ++l) {
    if (cache) cache->inputs.push_back(h);
    Eigen::MatrixXd z = W_[l] * h;
    z.colwise() += b_[l];
    if (l + 1 < num_layers()) z = z.array().tanh().matrix();
    h = std::move(z);
  }
  return h;
}

Gradients Mlp::backward(const MlpCache& cache, const Eigen::MatrixXd& grad_out) const {
  if (!cache.recorded || static_cast<int>(cache.inputs.size()) != num_layers())
    throw std::logic_error("backward called without a recorded forward pass");
  Gradients g;
  g.dW.resize(num_layers());
  g.db.resize(num_layers());
  Eigen::MatrixXd delta = grad_out;  // dL/dz of the current layer
  for (int l = num_layers() - 1; l >= 0; --l) {
    const Eigen::MatrixXd& in = cache.inputs[l];
    g.dW[l] = delta * in.transpose();
    g.db[l] = delta.rowwise().sum();
    if (l > 0) {
      // in = tanh(z_{l-1}), so dtanh = 1 - in^2.
      Eigen::MatrixXd up = W_[l].transpose() * delta;
      delta = up.array() * (1.0 - in.array().square());
    }
  }
  return g;
}

Eigen::VectorXd Mlp::params() const {
  Eigen::VectorXd out(param_count());
  Eigen::Index at = 0;
  for (int l = 0; l < num_layers(); ++l) {
    out.segment(at, W_[l].size()) = W_[l].reshaped();
    at += W_[l].size();
    out.segment(at, b_[l].size()) = b_[l];
    at += b_[l].size();
  }
  return out;
}

void Mlp::set_params(const Eigen::VectorXd& flat) {
  if (flat.size() != param_count())
    throw DimensionError("parameter vector has length " + std::to_string(flat.size()) +
                         ", expected " + std::to_string(param_count()));
  Eigen::Index at = 0;
  for (int l = 0; l < num_layers(); ++l) {
    W_[l].reshaped() = flat.segment(at, W_[l].size());
    at += W_[l].size();
    b_[l] = flat.segment(at, b_[l].size());
    at += b_[l].size();
  }
}

}  // namespace amod::nn
