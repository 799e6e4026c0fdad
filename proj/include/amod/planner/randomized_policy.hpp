#ifndef AMOD_PLANNER_RANDOMIZED_POLICY_HPP_
#define AMOD_PLANNER_RANDOMIZED_POLICY_HPP_

#include <Eigen/Dense>

#include <vector>

#include "amod/planner/static_planner.hpp"

namespace amod::planner {

// Per-(node, energy) action probabilities obtained by normalizing the plan's
// flows: route to j, charge, or idle. Each (i, v) simplex sums to one.
struct RandomizedStaticPolicy {
  int m = 0;
  int v_max = 0;
  std::vector<double> psi_route;   // (i*m + j)*(v_max+1) + v
  std::vector<double> psi_charge;  // i*(v_max+1) + v
  std::vector<double> psi_idle;    // i*(v_max+1) + v
  Eigen::MatrixXd ell;

  double route(int i, int j, int v) const { return psi_route[(i * m + j) * (v_max + 1) + v]; }
  double charge(int i, int v) const { return psi_charge[i * (v_max + 1) + v]; }
  double idle(int i, int v) const { return psi_idle[i * (v_max + 1) + v]; }
};

// psi_ij^v = x_ij^v / (sum_k x_ik^v + x_ic^v), likewise for charging. A
// state with no outgoing flow idles with probability one.
RandomizedStaticPolicy build_randomized_policy(const StaticPlan& plan);

}  // namespace amod::planner

#endif  // AMOD_PLANNER_RANDOMIZED_POLICY_HPP_
