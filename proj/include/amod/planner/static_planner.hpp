#ifndef AMOD_PLANNER_STATIC_PLANNER_HPP_
#define AMOD_PLANNER_STATIC_PLANNER_HPP_

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "amod/model/scenario.hpp"
#include "amod/planner/qp_solver.hpp"

namespace amod::planner {

enum class PlanStatus { kOptimal, kInfeasible, kMaxIter };

std::string to_string(PlanStatus status);
PlanStatus plan_status_from_string(const std::string& name);

struct PlannerOptions {
  // Adds sum_ij,v tau_ij x_ij^v + sum_i,v x_ic^v <= fleet_size: the fleet
  // can only keep that many vehicle-periods busy per period.
  bool fleet_budget = true;
  double gap_tol = 1e-6;
  double feas_tol = 1e-8;
  int max_iter = 200;
};

// Optimal static pricing/routing/charging flows with their duals. Flows are
// per-period rates. Energy index v runs over [0, v_max].
class StaticPlan {
 public:
  StaticPlan() = default;
  StaticPlan(int m, int v_max);

  int m() const { return m_; }
  int v_max() const { return v_max_; }

  double& route(int i, int j, int v) { return x_route_[index3(i, j, v)]; }
  double route(int i, int j, int v) const { return x_route_[index3(i, j, v)]; }
  double& charge(int i, int v) { return x_charge_[index2(i, v)]; }
  double charge(int i, int v) const { return x_charge_[index2(i, v)]; }
  double& mu(int i, int v) { return mu_[index2(i, v)]; }
  double mu(int i, int v) const { return mu_[index2(i, v)]; }

  // Sum over v of route(i, j, v).
  double routed(int i, int j) const;

  Eigen::MatrixXd ell;      // ride prices, ell_max on the diagonal and where lambda = 0
  Eigen::MatrixXd nu;       // demand-satisfaction duals, >= 0
  Eigen::MatrixXd Lambda;   // induced rates lambda (1 - ell / ell_max)
  double fleet_dual = 0.0;  // shadow price of the fleet budget (0 when disabled)
  bool fleet_budget = false;
  double objective = 0.0;   // profit per period
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  PlanStatus status = PlanStatus::kMaxIter;
  std::string message;

  // Vehicle-periods consumed per period: sum tau * route + sum charge.
  double vehicle_time(const model::Scenario& scn) const;

 private:
  std::size_t index3(int i, int j, int v) const {
    return (static_cast<std::size_t>(i) * m_ + j) * (v_max_ + 1) + v;
  }
  std::size_t index2(int i, int v) const {
    return static_cast<std::size_t>(i) * (v_max_ + 1) + v;
  }

  int m_ = 0;
  int v_max_ = 0;
  std::vector<double> x_route_;
  std::vector<double> x_charge_;
  std::vector<double> mu_;
};

// Profit maximization over prices and flows with uniform willingness to
// pay. Solved in the induced rates Lambda_ij, where revenue
// ell_max * Lambda (1 - Lambda / lambda) is a concave quadratic. Electricity
// prices are fixed at the price-process means.
StaticPlan solve_static(const model::Scenario& scn, const PlannerOptions& opts = {});

// Same program with the energy dimension collapsed (v_max = 0); scn.beta
// plays the role of the non-electric operating cost.
StaticPlan solve_static_nonelectric(const model::Scenario& scn,
                                    const PlannerOptions& opts = {});

class InconsistentDualsError : public SolverError {
 public:
  using SolverError::SolverError;
};

struct MarginalPriceReport {
  Eigen::MatrixXd ell_star;  // (ell_max + nu) / 2
  Eigen::MatrixXd bound;     // upper bound on ell_star
  double max_identity_error = 0.0;  // max |plan.ell - ell_star| over served pairs
  double max_bound_violation = 0.0; // max (ell_star - bound), <= price_tol when ok
  bool bound_holds = true;
  double profit_identity = 0.0;     // sum lambda/ell_max (ell_max - ell*)^2 + fleet_dual * N
};

// Recovers optimal prices from the duals and checks them against the
// primal prices and the cost-based upper bound
//
//   ell*_ij <= (ell_max + b (tau_ij + tau_ji + v_ij + v_ji) + v_ij p_j + v_ji p_i) / 2
//
// with b = beta + fleet_dual (b = beta whenever the fleet budget is slack or
// disabled). Throws InconsistentDualsError when the primal and dual prices
// disagree by more than price_tol.
MarginalPriceReport marginal_prices(const StaticPlan& plan, const model::Scenario& scn,
                                    double price_tol = 1e-4);

// Plain-text plan export/import (see docs/formats.md).
std::string format_plan(const StaticPlan& plan);
StaticPlan parse_plan(const std::string& text);
void save_plan(const StaticPlan& plan, const std::filesystem::path& path);
StaticPlan load_plan(const std::filesystem::path& path);

}  // namespace amod::planner

#endif  // AMOD_PLANNER_STATIC_PLANNER_HPP_
