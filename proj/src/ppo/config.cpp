#include "amod/ppo/config.hpp"

#include <cmath>

#include "amod/common.hpp"

namespace amod::ppo {

std::string to_string(Objective obj) { return obj == Objective::kClip ? "clip" : "kl_pen"; }

Objective objective_from_string(const std::string& name) {
  if (name == "clip") return Objective::kClip;
  if (name == "kl_pen") return Objective::kKlPen;
  throw ValidationError("unknown objective '" + name + "' (expected clip or kl_pen)");
}

void PpoConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (!(lambda_gae >= 0.0 && lambda_gae <= 1.0))
    throw ValidationError("lambda_gae must lie in [0, 1]");
  if (!(clip_eps > 0.0)) throw ValidationError("clip epsilon must be positive");
  if (num_envs < 1 || horizon < 1) throw ValidationError("N and T must be at least 1");
  if (epochs < 1) throw ValidationError("K must be at least 1");
  if (minibatch < 1 || minibatch > num_envs * horizon)
    throw ValidationError("minibatch size must lie in [1, N*T]");
  if (vf_coef < 0.0 || ent_coef < 0.0) throw ValidationError("loss coefficients must be >= 0");
  if (!(d_targ > 0.0) || !(kl_beta >= 0.0)) throw ValidationError("bad KL penalty settings");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw ValidationError("learning rate must be >= 0");
  for (int h : hidden)
    if (h < 1) throw ValidationError("hidden layer sizes must be positive");
  if (!std::isfinite(init_log_std)) throw ValidationError("initial log std must be finite");
  if (episode_length < 0) throw ValidationError("episode length must be >= 0");
  if (threads < 1) throw ValidationError("threads must be >= 1");
}

}  // namespace amod::ppo
