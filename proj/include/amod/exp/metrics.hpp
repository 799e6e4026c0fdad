#ifndef AMOD_EXP_METRICS_HPP_
#define AMOD_EXP_METRICS_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "amod/env/env.hpp"

namespace amod::exp {

// Per-step series and summary of one simulated run.
struct MetricsReport {
  std::string policy;
  std::uint64_t seed = 0;
  std::vector<double> reward;
  std::vector<double> running_avg;    // mean of reward[0..t]
  std::vector<double> total_queue;    // sum q(t), before the step
  std::vector<double> charging_cost;  // cumulative (beta + p) * charging vehicles
  std::vector<double> charge_units;
  std::vector<double> electricity_spend;
  std::vector<double> mean_price;     // mean OD ride price of the action

  // Summary.
  double mean_reward = 0.0;
  double mean_queue = 0.0;
  double charge_price = 0.0;   // electricity spend per charged unit, 0 without charging
  double max_queue_rate = 0.0; // max_ij q_ij(T) / T after the last step
  std::int64_t final_queue = 0;

  void record(const env::EnvState& before, const env::ActionVector& action,
              const env::StepOutcome& outcome);
  // Fills the summary fields; `final` is the state after the last step.
  void finish(const env::EnvState& final);
  std::size_t steps() const { return reward.size(); }
};

// Long-format per-step CSV, one block per report.
void write_steps_header(std::ostream& out);
void write_steps(std::ostream& out, const MetricsReport& r, const std::string& hash);

void write_summary_header(std::ostream& out);
void write_summary(std::ostream& out, const MetricsReport& r, const std::string& hash);

}  // namespace amod::exp

#endif  // AMOD_EXP_METRICS_HPP_
