#ifndef AMOD_NN_MLP_HPP_
#define AMOD_NN_MLP_HPP_

#include <Eigen/Dense>

#include <vector>

#include "amod/common.hpp"

namespace amod::nn {

// Parameter-shaped gradient container.
struct Gradients {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;

  Eigen::VectorXd flat() const;
};

// Activations recorded by a batched forward pass; needed by backward.
struct MlpCache {
  std::vector<Eigen::MatrixXd> inputs;  // input of each layer, columns are samples
  bool recorded = false;
};

// Fully connected tanh network with a linear output layer. Samples are
// columns in the batched calls.
class Mlp {
 public:
  Mlp() = default;
  // sizes = {n_in, hidden..., n_out}; parameters start at zero.
  explicit Mlp(std::vector<int> sizes);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int num_layers() const { return static_cast<int>(W_.size()); }
  // sum over layers of (n_in + 1) * n_out.
  int param_count() const;

  Eigen::MatrixXd& weight(int layer) { return W_[layer]; }
  const Eigen::MatrixXd& weight(int layer) const { return W_[layer]; }
  Eigen::VectorXd& bias(int layer) { return b_[layer]; }
  const Eigen::VectorXd& bias(int layer) const { return b_[layer]; }

  // Orthogonal weights (gain on hidden layers, out_gain on the last), zero
  // biases.
  void init_orthogonal(Rng& rng, double hidden_gain, double out_gain);

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& X, MlpCache* cache = nullptr) const;

  // Gradients of a scalar loss given dL/d(output) for the recorded batch.
  // Throws std::logic_error if cache holds no forward pass.
  Gradients backward(const MlpCache& cache, const Eigen::MatrixXd& grad_out) const;

  // Flat parameter vector: for each layer W (column-major) then b.
  Eigen::VectorXd params() const;
  void set_params(const Eigen::VectorXd& flat);

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> W_;  // n_out x n_in
  std::vector<Eigen::VectorXd> b_;
};

}  // namespace amod::nn

#endif  // AMOD_NN_MLP_HPP_
