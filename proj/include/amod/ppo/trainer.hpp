#ifndef AMOD_PPO_TRAINER_HPP_
#define AMOD_PPO_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "amod/ppo/agent.hpp"
#include "amod/ppo/checkpoint.hpp"
#include "amod/ppo/config.hpp"
#include "amod/ppo/rollout.hpp"
#include "amod/ppo/update.hpp"

namespace amod::ppo {

struct IterationMetrics {
  std::int64_t iteration = 0;
  std::int64_t env_steps = 0;
  std::int64_t updates = 0;
  double mean_reward = 0.0;  // unscaled
  double mean_queue = 0.0;   // total queue per step
  double charge_price = 0.0; // electricity spend per charged unit (0 without charging)
  UpdateDiagnostics diag;
  double seconds = 0.0;  // wall time, not written to the CSV
};

// One training run: agent, persistent actors, optimizer and counters.
class Trainer {
 public:
  Trainer(std::shared_ptr<const model::Scenario> scn, PpoConfig cfg);

  // Continues from a checkpoint. Network shapes come from the file and must
  // fit the scenario; optimizer state and counters are kept. Env states are
  // restored only when the scenario is the one the checkpoint was trained on.
  static Trainer resume(std::shared_ptr<const model::Scenario> scn, PpoConfig cfg,
                        const std::filesystem::path& checkpoint);

  // collect -> advantages -> update.
  IterationMetrics iterate();

  Checkpoint snapshot() const;
  void save(const std::filesystem::path& path) const;

  const ActorCritic& agent() const { return *agent_; }
  std::shared_ptr<const ActorCritic> agent_ptr() const { return agent_; }
  std::int64_t env_steps() const { return env_steps_; }
  std::int64_t iterations() const { return iterations_; }
  const PpoConfig& config() const { return cfg_; }

 private:
  std::shared_ptr<const model::Scenario> scn_;
  PpoConfig cfg_;
  std::shared_ptr<ActorCritic> agent_;
  ActorSet actors_;
  UpdateState update_;
  std::int64_t env_steps_ = 0;
  std::int64_t iterations_ = 0;
};

struct TrainOptions {
  std::uint64_t total_steps = 0;  // env steps for this call
  std::filesystem::path out_dir;  // checkpoints and metrics.csv
  int checkpoint_every = 10;      // iterations; 0 keeps only the final one
  std::optional<std::filesystem::path> resume;
  std::ostream* log = nullptr;
};

struct TrainResult {
  std::shared_ptr<const ActorCritic> agent;
  std::vector<IterationMetrics> history;
  std::filesystem::path final_checkpoint;
  std::filesystem::path metrics_csv;
};

// Iterates while fewer than total_steps env steps were taken, then writes
// out_dir/final.ckpt. With total_steps = 0 only the initial checkpoint is
// written.
TrainResult train(std::shared_ptr<const model::Scenario> scn, const PpoConfig& cfg,
                  const TrainOptions& opts);

// CSV header and row for one iteration (metrics.csv).
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const IterationMetrics& m, const std::string& hash,
                       std::uint64_t seed);

}  // namespace amod::ppo

#endif  // AMOD_PPO_TRAINER_HPP_
