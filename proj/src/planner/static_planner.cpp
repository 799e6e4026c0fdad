#include "amod/planner/static_planner.hpp"

#include <algorithm>
#include <cmath>

namespace amod::planner {
namespace {

using model::Scenario;

// Column bookkeeping for the flow program.
struct FlowIndex {
  int m = 0;
  int v_max = 0;
  std::vector<int> lambda_col;  // m*m, -1 when the pair has no demand
  std::vector<int> route_col;   // m*m*(v_max+1), -1 when masked
  std::vector<int> charge_col;  // m*(v_max+1), -1 at v_max
  int n = 0;

  FlowIndex(const Scenario& scn) : m(scn.m), v_max(scn.v_max) {
    lambda_col.assign(m * m, -1);
    route_col.assign(m * m * (v_max + 1), -1);
    charge_col.assign(m * (v_max + 1), -1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j && scn.lambda(i, j) > 0.0) lambda_col[i * m + j] = n++;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        for (int v = scn.v_trip(i, j); v <= v_max; ++v) route_col[r(i, j, v)] = n++;
      }
    for (int i = 0; i < m; ++i)
      for (int v = 0; v < v_max; ++v) charge_col[i * (v_max + 1) + v] = n++;
  }

  int r(int i, int j, int v) const { return (i * m + j) * (v_max + 1) + v; }
  int route(int i, int j, int v) const {
    if (v < 0 || v > v_max) return -1;
    return route_col[r(i, j, v)];
  }
  int charge(int i, int v) const {
    if (v < 0 || v > v_max) return -1;
    return charge_col[i * (v_max + 1) + v];
  }
};

}  // namespace

std::string to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::kOptimal: return "optimal";
    case PlanStatus::kInfeasible: return "infeasible";
    case PlanStatus::kMaxIter: return "max_iter";
  }
  return "max_iter";
}

PlanStatus plan_status_from_string(const std::string& name) {
  if (name == "optimal") return PlanStatus::kOptimal;
  if (name == "infeasible") return PlanStatus::kInfeasible;
  if (name == "max_iter") return PlanStatus::kMaxIter;
  throw ParseError("unknown plan status '" + name + "'");
}

StaticPlan::StaticPlan(int m, int v_max)
    : ell(Eigen::MatrixXd::Zero(m, m)),
      nu(Eigen::MatrixXd::Zero(m, m)),
      Lambda(Eigen::MatrixXd::Zero(m, m)),
      m_(m),
      v_max_(v_max),
      x_route_(static_cast<std::size_t>(m) * m * (v_max + 1), 0.0),
      x_charge_(static_cast<std::size_t>(m) * (v_max + 1), 0.0),
      mu_(static_cast<std::size_t>(m) * (v_max + 1), 0.0) {}

double StaticPlan::routed(int i, int j) const {
  double total = 0.0;
  for (int v = 0; v <= v_max_; ++v) total += route(i, j, v);
  return total;
}

double StaticPlan::vehicle_time(const Scenario& scn) const {
  double total = 0.0;
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j)
      if (i != j) total += scn.tau(i, j) * routed(i, j);
    for (int v = 0; v <= v_max_; ++v) total += charge(i, v);
  }
  return total;
}

StaticPlan solve_static(const Scenario& scn, const PlannerOptions& opts) {
  model::validate(scn);
  const int m = scn.m;
  const int vm = scn.v_max;
  FlowIndex idx(scn);
  const int n = idx.n;

  QpProblem qp;
  qp.Q = Eigen::MatrixXd::Zero(n, n);
  qp.c = Eigen::VectorXd::Zero(n);

  // Objective (minimized): -revenue + operating and charging costs.
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int col = idx.lambda_col[i * m + j];
      if (col < 0) continue;
      qp.c[col] = -scn.ell_max;
      qp.Q(col, col) = 2.0 * scn.ell_max / scn.lambda(i, j);
    }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int v = 0; v <= vm; ++v)
        if (int col = (i != j) ? idx.route(i, j, v) : -1; col >= 0)
          qp.c[col] = scn.beta * scn.tau(i, j);
  for (int i = 0; i < m; ++i)
    for (int v = 0; v < vm; ++v) qp.c[idx.charge(i, v)] = scn.beta + scn.price.mean[i];

  // Flow balance per (i, v): departures + charging starts = charging
  // completions + arrivals.
  const int n_bal = m * (vm + 1);
  qp.A = Eigen::MatrixXd::Zero(n_bal, n);
  qp.b = Eigen::VectorXd::Zero(n_bal);
  for (int i = 0; i < m; ++i)
    for (int v = 0; v <= vm; ++v) {
      const int row = i * (vm + 1) + v;
      for (int j = 0; j < m; ++j) {
        if (j == i) continue;
        if (int col = idx.route(i, j, v); col >= 0) qp.A(row, col) += 1.0;
        if (int col = idx.route(j, i, v + scn.v_trip(j, i)); col >= 0) qp.A(row, col) -= 1.0;
      }
      if (int col = idx.charge(i, v); col >= 0) qp.A(row, col) += 1.0;
      if (int col = idx.charge(i, v - 1); col >= 0) qp.A(row, col) -= 1.0;
    }

  // Inequalities: demand satisfaction, nonnegativity, fleet budget.
  std::vector<std::pair<int, int>> demand_pairs;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (idx.lambda_col[i * m + j] >= 0) demand_pairs.emplace_back(i, j);
  const int n_flow = n - static_cast<int>(demand_pairs.size());
  const int n_ineq = static_cast<int>(demand_pairs.size()) + n_flow + (opts.fleet_budget ? 1 : 0);
  qp.G = Eigen::MatrixXd::Zero(n_ineq, n);
  qp.h = Eigen::VectorXd::Zero(n_ineq);
  int row = 0;
  for (auto [i, j] : demand_pairs) {
    qp.G(row, idx.lambda_col[i * m + j]) = 1.0;
    for (int v = 0; v <= vm; ++v)
      if (int col = idx.route(i, j, v); col >= 0) qp.G(row, col) = -1.0;
    ++row;
  }
  const int first_flow = static_cast<int>(demand_pairs.size());
  for (int col = first_flow; col < n; ++col) qp.G(row++, col) = -1.0;
  int fleet_row = -1;
  if (opts.fleet_budget) {
    fleet_row = row;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j)
        for (int v = 0; v <= vm; ++v)
          if (int col = (i != j) ? idx.route(i, j, v) : -1; col >= 0)
            qp.G(row, col) = scn.tau(i, j);
      for (int v = 0; v < vm; ++v) qp.G(row, idx.charge(i, v)) = 1.0;
    }
    qp.h[row] = scn.fleet_size;
    ++row;
  }

  QpOptions qopt;
  qopt.feas_tol = std::min(1e-9, opts.feas_tol);
  qopt.gap_tol = std::min(1e-9, opts.gap_tol);
  qopt.max_iter = opts.max_iter;
  QpResult sol = solve_qp(qp, qopt);

  StaticPlan plan(m, vm);
  plan.fleet_budget = opts.fleet_budget;
  plan.iterations = sol.iterations;
  plan.message = sol.message;
  plan.primal_residual = sol.primal_residual;
  plan.dual_residual = sol.dual_residual;
  switch (sol.status) {
    case QpStatus::kOptimal: plan.status = PlanStatus::kOptimal; break;
    case QpStatus::kInfeasible: plan.status = PlanStatus::kInfeasible; break;
    case QpStatus::kMaxIter: plan.status = PlanStatus::kMaxIter; break;
  }
  if (sol.x.size() != n) return plan;

  plan.objective = -sol.primal_objective;
  plan.dual_objective = -sol.dual_objective;
  plan.ell.setConstant(scn.ell_max);
  for (std::size_t k = 0; k < demand_pairs.size(); ++k) {
    auto [i, j] = demand_pairs[k];
    const double rate = sol.x[idx.lambda_col[i * m + j]];
    plan.Lambda(i, j) = std::clamp(rate, 0.0, scn.lambda(i, j));
    plan.ell(i, j) = std::clamp(scn.ell_max * (1.0 - rate / scn.lambda(i, j)), 0.0, scn.ell_max);
    plan.nu(i, j) = sol.z[k];
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j)
      for (int v = 0; v <= vm; ++v)
        if (int col = (i != j) ? idx.route(i, j, v) : -1; col >= 0)
          plan.route(i, j, v) = std::max(0.0, sol.x[col]);
    for (int v = 0; v < vm; ++v) plan.charge(i, v) = std::max(0.0, sol.x[idx.charge(i, v)]);
    // The balance multipliers enter the Lagrangian with the opposite sign of
    // the textbook dual mu, hence the negation.
    for (int v = 0; v <= vm; ++v) plan.mu(i, v) = -sol.y[i * (vm + 1) + v];
  }
  if (fleet_row >= 0) plan.fleet_dual = sol.z[fleet_row];
  return plan;
}

StaticPlan solve_static_nonelectric(const Scenario& scn, const PlannerOptions& opts) {
  if (scn.v_max != 0)
    throw ValidationError("non-electric planner requires v_max = 0");
  return solve_static(scn, opts);
}

MarginalPriceReport marginal_prices(const StaticPlan& plan, const Scenario& scn,
                                    double price_tol) {
  if (plan.status != PlanStatus::kOptimal)
    throw ValidationError("marginal prices need an optimal plan");
  const int m = scn.m;
  MarginalPriceReport rep;
  rep.ell_star = Eigen::MatrixXd::Constant(m, m, scn.ell_max);
  rep.bound = Eigen::MatrixXd::Constant(m, m, scn.ell_max);
  const double op_cost = scn.beta + plan.fleet_dual;
  const Eigen::VectorXd& p = scn.price.mean;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j || scn.lambda(i, j) <= 0.0) continue;
      const double star = 0.5 * (scn.ell_max + plan.nu(i, j));
      rep.ell_star(i, j) = star;
      rep.bound(i, j) =
          0.5 * (scn.ell_max +
                 op_cost * (scn.tau(i, j) + scn.tau(j, i) + scn.v_trip(i, j) + scn.v_trip(j, i)) +
                 scn.v_trip(i, j) * p[j] + scn.v_trip(j, i) * p[i]);
      rep.max_identity_error = std::max(rep.max_identity_error, std::abs(plan.ell(i, j) - star));
      rep.max_bound_violation = std::max(rep.max_bound_violation, star - rep.bound(i, j));
      const double gap = scn.ell_max - star;
      rep.profit_identity += scn.lambda(i, j) / scn.ell_max * gap * gap;
    }
  rep.profit_identity += plan.fleet_dual * scn.fleet_size;
  rep.bound_holds = rep.max_bound_violation <= price_tol;
  if (rep.max_identity_error > price_tol)
    throw InconsistentDualsError("primal prices differ from (ell_max + nu) / 2 by " +
                                 std::to_string(rep.max_identity_error));
  return rep;
}

}  // namespace amod::planner
