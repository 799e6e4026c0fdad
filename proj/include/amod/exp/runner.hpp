#ifndef AMOD_EXP_RUNNER_HPP_
#define AMOD_EXP_RUNNER_HPP_

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "amod/exp/metrics.hpp"
#include "amod/exp/policy_factory.hpp"
#include "amod/policy/policies.hpp"

namespace amod::exp {

// One run: env reset with `seed`, policy draws from a stream derived from
// it. Writes a per-step trajectory CSV when `trajectory` is set.
MetricsReport simulate(std::shared_ptr<const model::Scenario> scn, const policy::Policy& pol,
                       int horizon, std::uint64_t seed, std::ostream* trajectory = nullptr,
                       const env::ResetOptions& reset = {});

// Replications over seeds, optionally on several threads. Result order
// follows `seeds`.
std::vector<MetricsReport> simulate_many(std::shared_ptr<const model::Scenario> scn,
                                         const policy::Policy& pol, int horizon,
                                         const std::vector<std::uint64_t>& seeds, int threads = 1);

struct Summary {
  double mean_reward = 0.0;
  double mean_queue = 0.0;
  double charge_price = 0.0;
};

// Averages over replications.
Summary summarize(const std::vector<MetricsReport>& reports);

struct SweepCell {
  double a = 0.0;  // multiplier or scale
  double b = 0.0;  // threshold (surge only)
  Summary summary;
};

struct SweepResult {
  std::string kind;  // "surge" or "scale"
  Summary baseline;  // unscaled static policy
  std::vector<SweepCell> cells;
};

SweepResult surge_sweep(std::shared_ptr<const model::Scenario> scn, PolicyFactory& factory,
                        const std::vector<double>& multipliers,
                        const std::vector<double>& thresholds, int horizon,
                        const std::vector<std::uint64_t>& seeds, int threads = 1);

SweepResult scale_sweep(std::shared_ptr<const model::Scenario> scn, PolicyFactory& factory,
                        const std::vector<double>& scales, int horizon,
                        const std::vector<std::uint64_t>& seeds, int threads = 1);

// Long format: one row per cell plus the baseline row.
void write_sweep(std::ostream& out, const SweepResult& sweep, const std::string& hash,
                 const std::vector<std::uint64_t>& seeds);
// Grid of "reward / queue" with the first parameter down and the second
// across.
void write_sweep_grid(std::ostream& out, const SweepResult& sweep);

// Summary rows ranked by mean reward (descending) and mean queue (ascending).
void write_ranking(std::ostream& out, const std::vector<std::string>& names,
                   const std::vector<Summary>& summaries, const std::string& hash,
                   const std::vector<std::uint64_t>& seeds);

std::string join_seeds(const std::vector<std::uint64_t>& seeds);

}  // namespace amod::exp

#endif  // AMOD_EXP_RUNNER_HPP_
