#ifndef AMOD_PPO_UPDATE_HPP_
#define AMOD_PPO_UPDATE_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "amod/common.hpp"
#include "amod/nn/adam.hpp"
#include "amod/ppo/advantages.hpp"
#include "amod/ppo/agent.hpp"
#include "amod/ppo/config.hpp"
#include "amod/ppo/rollout.hpp"

namespace amod::ppo {

class NonFiniteLossError : public SolverError {
 public:
  using SolverError::SolverError;
};

// Loss value, diagnostics and analytic gradient for one minibatch.
struct MinibatchLoss {
  double total = 0.0;   // minimized: -surrogate + vf * value - ent * entropy
  double policy = 0.0;  // -surrogate (including the KL penalty in kl_pen mode)
  double value = 0.0;   // mean squared error of V against returns
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double max_ratio_deviation = 0.0;  // max |r - 1|
  double clip_fraction = 0.0;
  double kl = 0.0;  // mean KL(old || new), exact for diagonal Gaussians
  double unclipped_surrogate = 0.0;
  double clipped_surrogate = 0.0;
  Eigen::VectorXd grad;  // d total / d agent.params()
};

MinibatchLoss minibatch_loss(const ActorCritic& agent, const RolloutBatch& batch,
                             const AdvantageResult& adv, const std::vector<int>& idx,
                             const PpoConfig& cfg, double kl_beta);

struct UpdateState {
  nn::Adam adam;
  double kl_beta = 1.0;
  Rng shuffle_rng;
  std::int64_t updates = 0;  // optimizer steps so far
};

UpdateState make_update_state(const ActorCritic& agent, const PpoConfig& cfg);

struct UpdateDiagnostics {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;  // over the full batch after the last epoch
  double kl_beta = 0.0;    // after adaptation
  double grad_norm = 0.0;
  double first_ratio_deviation = 0.0;  // max |r - 1| on the first minibatch
  int minibatches = 0;
};

// beta / 2 below d_targ / 1.5, 2 beta above 1.5 d_targ.
double adapt_kl_beta(double beta, double d, double d_targ);

// K epochs of shuffled minibatch Adam steps.
UpdateDiagnostics ppo_update(ActorCritic& agent, const RolloutBatch& batch,
                             const AdvantageResult& adv, const PpoConfig& cfg,
                             UpdateState& state);

}  // namespace amod::ppo

#endif  // AMOD_PPO_UPDATE_HPP_
