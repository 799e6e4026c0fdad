#ifndef AMOD_ENV_ENV_HPP_
#define AMOD_ENV_ENV_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "amod/common.hpp"
#include "amod/model/scenario.hpp"

namespace amod::env {

using Count = std::int64_t;

// Index arithmetic for the flattened state [p | q | s_veh] and action
// [ell | alpha] vectors.
//
// Vehicle states (i, j, k, v) are ordered lexicographically: for each origin
// i and destination j, parked vehicles (j == i) have the single stage k = 0,
// travelling ones have k = 1 .. tau_ij - 1; energy v is innermost.
// Queues and OD prices skip the diagonal, row-major.
class Layout {
 public:
  explicit Layout(const model::Scenario& scn);

  int m() const { return m_; }
  int v_max() const { return v_max_; }
  int num_od() const { return m_ * m_ - m_; }
  int num_vehicle_states() const { return static_cast<int>(slots_.size()); }
  int state_dim() const { return m_ + num_od() + num_vehicle_states(); }
  int action_dim() const { return num_od() + m_ * (v_max_ + 1) * (m_ + 1); }

  // Position of (i, j), i != j, among the off-diagonal pairs.
  int od(int i, int j) const { return i * (m_ - 1) + (j < i ? j : j - 1); }
  int od_origin(int k) const { return k / (m_ - 1); }
  int od_destination(int k) const {
    int i = k / (m_ - 1), r = k % (m_ - 1);
    return r < i ? r : r + 1;
  }

  int parked(int i, int v) const { return parked_[i * (v_max_ + 1) + v]; }
  // k in [1, tau_ij - 1].
  int transit(int i, int j, int k, int v) const {
    return transit_start_[i * m_ + j] + (k - 1) * (v_max_ + 1) + v;
  }

  struct Slot {
    int i, j, k, v;
  };
  const Slot& slot(int s) const { return slots_[s]; }

  // Routing block of (i, v) inside the action vector: m + 1 entries, the
  // last one is "charge", entry i is "idle".
  int alpha_offset(int i, int v) const { return num_od() + (i * (v_max_ + 1) + v) * (m_ + 1); }
  int alpha_index(int i, int v, int entry) const { return alpha_offset(i, v) + entry; }

 private:
  int m_;
  int v_max_;
  std::vector<Slot> slots_;
  std::vector<int> parked_;
  std::vector<int> transit_start_;
};

// s_d = m^2 + (v_max + 1)(sum_{i != j} tau_ij - m^2 + 2m).
int state_dim(const model::Scenario& scn);
// a_d = m^2 - m + (v_max + 1)(m^2 + m).
int action_dim(const model::Scenario& scn);

struct EnvState {
  int t = 0;
  Eigen::VectorXd p;     // electricity prices, one per node
  std::vector<Count> q;  // queue lengths, Layout::od order
  std::vector<Count> s_veh;

  bool operator==(const EnvState& other) const;
  Count total_queue() const;
  Count fleet() const;
};

Eigen::VectorXd flatten(const EnvState& state);

struct ActionVector {
  std::vector<double> ell;    // Layout::od order
  std::vector<double> alpha;  // blocks of m + 1, (i, v) row-major

  std::vector<double> flatten() const;
};

// true for coordinates of the flat action that carry a decision: all prices
// and every routing entry that is not masked (charging at v_max, trips that
// need more energy than v).
std::vector<bool> action_mask(const model::Scenario& scn);

// Throws ValidationError on any invariant violation. tol bounds the simplex
// sum error.
void validate_action(const model::Scenario& scn, const ActionVector& action,
                     double tol = 1e-9);

// Maps an unconstrained vector of length a_d to a valid action: prices
// clamped into [0, ell_max], each routing block passed through a masked
// softmax. Throws DimensionError on a length mismatch.
ActionVector sanitize_action(const model::Scenario& scn, std::span<const double> raw);

struct RewardBreakdown {
  double revenue = 0.0;
  double queue_cost = 0.0;     // -w * sum q(t)
  double charging_cost = 0.0;  // -(beta + p_i) per charging vehicle
  double trip_cost = 0.0;      // -beta per departing vehicle
  double transit_cost = 0.0;   // -beta per vehicle at an intermediate stage

  double total() const {
    return revenue + queue_cost + charging_cost + trip_cost + transit_cost;
  }
};

struct StepOutcome {
  EnvState next;
  double reward = 0.0;
  RewardBreakdown breakdown;
  std::vector<Count> arrivals;  // A_ij(t), od order
  std::vector<Count> routed;    // x_ij(t), od order
  std::vector<Count> charging;  // x_ic^v(t), i*(v_max+1) + v
  Count charge_units = 0;
  double electricity_spend = 0.0;  // sum_i p_i(t) * charging vehicles at i
};

// Induced arrival rate for (i, j) at a price; the default is the uniform
// willingness-to-pay model of the scenario.
using PriceResponse = std::function<double(int i, int j, double price)>;

struct ResetOptions {
  // Optional parked counts per (i, v), index i*(v_max+1) + v, summing to the
  // fleet size. Empty: fleet_size / m per node at full charge, remainder to
  // the lowest-index nodes.
  std::vector<Count> parked;
};

EnvState reset(const model::Scenario& scn, Rng& rng, const ResetOptions& opts = {});

// Advances one period:
//  1. parked vehicles sample depart / idle / charge from alpha;
//  2. travelling vehicles advance one stage, the last stage lands parked;
//  3. arrivals A_ij ~ Poisson(Lambda_ij(ell_ij));
//  4. q' = max(0, q + A - x) with x the departures i -> j;
//  5. reward from revenue, pre-transition queues and costs;
//  6. electricity prices drawn for t + 1.
// Trip energy is deducted at departure. The action must already be valid.
StepOutcome step(const model::Scenario& scn, const Layout& layout, const EnvState& state,
                 const ActionVector& action, Rng& rng, const PriceResponse& response = {});

// Pr(q_next | q, x) under Poisson(Lambda) arrivals and the max(0, .) queue
// kernel.
double queue_pmf(Count q, double Lambda, Count x, Count q_next);

struct EnvOptions {
  int episode_length = 0;  // 0: continuing task, never done
  ResetOptions reset;
};

// Owns one scenario reference, one state and one random stream.
class AmodEnv {
 public:
  AmodEnv(std::shared_ptr<const model::Scenario> scn, EnvOptions opts = {});

  const EnvState& reset(std::uint64_t seed);
  StepOutcome step(const ActionVector& action);
  // Episode boundary reached (always false for continuing tasks).
  bool done() const;

  const EnvState& state() const { return state_; }
  const model::Scenario& scenario() const { return *scn_; }
  std::shared_ptr<const model::Scenario> scenario_ptr() const { return scn_; }
  const Layout& layout() const { return layout_; }
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }
  int steps_in_episode() const { return steps_in_episode_; }
  // Puts the env back into a saved configuration (checkpoint resume).
  void restore(EnvState state, const Rng& rng, int steps_in_episode);
  void set_price_response(PriceResponse response) { response_ = std::move(response); }

 private:
  std::shared_ptr<const model::Scenario> scn_;
  EnvOptions opts_;
  Layout layout_;
  EnvState state_;
  Rng rng_;
  PriceResponse response_;
  int steps_in_episode_ = 0;
};

// Per-step CSV: t, reward components, total queue, charging count, prices.
class TrajectoryWriter {
 public:
  TrajectoryWriter(std::ostream& out, int m);
  void write(const EnvState& before, const StepOutcome& outcome);

 private:
  std::ostream& out_;
  int m_;
};

}  // namespace amod::env

#endif  // AMOD_ENV_ENV_HPP_
