#include "amod/planner/randomized_policy.hpp"

#include <algorithm>

namespace amod::planner {

RandomizedStaticPolicy build_randomized_policy(const StaticPlan& plan) {
  if (plan.status != PlanStatus::kOptimal)
    throw ValidationError("randomized policy needs an optimal plan");
  const int m = plan.m();
  const int vm = plan.v_max();
  const int nv = vm + 1;
  RandomizedStaticPolicy psi;
  psi.m = m;
  psi.v_max = vm;
  psi.ell = plan.ell;
  psi.psi_route.assign(m * m * nv, 0.0);
  psi.psi_charge.assign(m * nv, 0.0);
  psi.psi_idle.assign(m * nv, 0.0);

  for (int i = 0; i < m; ++i)
    for (int v = 0; v <= vm; ++v) {
      double total = v < vm ? std::max(0.0, plan.charge(i, v)) : 0.0;
      for (int j = 0; j < m; ++j)
        if (j != i) total += std::max(0.0, plan.route(i, j, v));
      const int s = i * nv + v;
      if (total <= 1e-12) {
        psi.psi_idle[s] = 1.0;
        continue;
      }
      double assigned = 0.0;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        const double p = std::max(0.0, plan.route(i, j, v)) / total;
        psi.psi_route[(i * m + j) * nv + v] = p;
        assigned += p;
      }
      if (v < vm) {
        psi.psi_charge[s] = std::max(0.0, plan.charge(i, v)) / total;
        assigned += psi.psi_charge[s];
      }
      // Rounding slack only; the plan's flows leave nothing idle.
      psi.psi_idle[s] = std::max(0.0, 1.0 - assigned);
    }
  return psi;
}

}  // namespace amod::planner
