#ifndef AMOD_PPO_CONFIG_HPP_
#define AMOD_PPO_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace amod::ppo {

enum class Objective { kClip, kKlPen };

std::string to_string(Objective obj);
Objective objective_from_string(const std::string& name);

struct PpoConfig {
  double gamma = 0.99;
  double lambda_gae = 0.95;
  double clip_eps = 0.2;
  int num_envs = 8;   // N
  int horizon = 512;  // T
  int epochs = 10;    // K
  int minibatch = 512;  // M
  double vf_coef = 0.5;
  double ent_coef = 0.01;
  Objective objective = Objective::kClip;
  double d_targ = 0.01;
  double kl_beta = 1.0;  // initial penalty coefficient
  double lr = 3e-4;
  double max_grad_norm = 0.5;  // <= 0 disables clipping
  std::vector<int> hidden{128, 128, 128, 128};
  double init_log_std = -0.5;
  bool normalize_obs = true;
  bool scale_reward = true;
  int episode_length = 0;  // 0: continuing task
  int threads = 1;
  std::uint64_t seed = 1;

  // Throws ValidationError.
  void validate() const;
};

}  // namespace amod::ppo

#endif  // AMOD_PPO_CONFIG_HPP_
