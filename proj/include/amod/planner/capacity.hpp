#ifndef AMOD_PLANNER_CAPACITY_HPP_
#define AMOD_PLANNER_CAPACITY_HPP_

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "amod/model/scenario.hpp"

namespace amod::planner {

enum class CapacityStatus { kOptimal, kInfeasible };

struct CapacityResult {
  CapacityStatus status = CapacityStatus::kInfeasible;
  double rho_star = 0.0;  // smallest achievable utilization of parked vehicles
  bool stable = false;    // rho_star <= 1 + feas_tol
  // Flows at the optimum, indexed like StaticPlan: route[(i*m + j)*(v_max+1) + v],
  // charge[i*(v_max+1) + v]; availability = parked vehicles per (i, v).
  std::vector<double> route;
  std::vector<double> charge;
  std::vector<double> availability;
  std::string message;
};

// Utilization of a fixed fleet needed to serve the induced rates Lambda.
//
// With route flows y, charging flows c and parked stocks x_i^v, the fleet
// splits into parked and in-transit vehicles,
//
//   sum_i,v x_i^v + sum_ij,v (tau_ij - 1) y_ij^v = fleet_size,
//
// and every parked vehicle takes at most rho actions per period. Minimizing
// rho gives the linear-fractional program min F(y, c) / (N - T(y)), where F
// counts departures plus charging starts and T the in-transit vehicles; it is
// solved as a single LP after the Charnes-Cooper substitution. Stable iff
// rho_star <= 1. kInfeasible means no flow pattern fits in the fleet at all.
CapacityResult capacity_check(const model::Scenario& scn, const Eigen::MatrixXd& Lambda,
                              double feas_tol = 1e-8);

}  // namespace amod::planner

#endif  // AMOD_PLANNER_CAPACITY_HPP_
