#ifndef AMOD_PPO_CHECKPOINT_HPP_
#define AMOD_PPO_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "amod/env/env.hpp"
#include "amod/nn/adam.hpp"
#include "amod/nn/running_stats.hpp"
#include "amod/ppo/agent.hpp"

namespace amod::ppo {

inline constexpr char kCheckpointMagic[8] = {'A', 'M', 'O', 'D', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Everything beyond the networks that a run needs to continue exactly.
struct TrainerSnapshot {
  nn::Adam adam;
  double kl_beta = 1.0;
  std::int64_t updates = 0;
  std::int64_t env_steps = 0;
  std::int64_t iterations = 0;
  std::string shuffle_rng;
  nn::RewardScaler reward_scaler;
  std::vector<std::string> action_rngs;
  std::vector<std::string> env_rngs;
  std::vector<env::EnvState> env_states;
  std::vector<std::int32_t> env_episode_steps;
  std::uint64_t resets = 0;
};

struct Checkpoint {
  ActorCritic agent;
  std::string scenario_hash;
  std::optional<TrainerSnapshot> trainer;
};

// Layout in docs/formats.md. Written to a temporary file, then renamed.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string rng_to_string(const Rng& rng);
Rng rng_from_string(const std::string& text);

}  // namespace amod::ppo

#endif  // AMOD_PPO_CHECKPOINT_HPP_
