#include "amod/planner/capacity.hpp"

#include <algorithm>

#include "amod/planner/qp_solver.hpp"

namespace amod::planner {

CapacityResult capacity_check(const model::Scenario& scn, const Eigen::MatrixXd& Lambda,
                              double feas_tol) {
  const int m = scn.m;
  const int vm = scn.v_max;
  const int nv = vm + 1;
  if (Lambda.rows() != m || Lambda.cols() != m)
    throw DimensionError("capacity_check: Lambda must be m x m");
  for (int i = 0; i < m; ++i) {
    if (Lambda(i, i) != 0.0) throw ValidationError("capacity_check: Lambda diagonal must be 0");
    for (int j = 0; j < m; ++j)
      if (!(Lambda(i, j) >= 0.0)) throw ValidationError("capacity_check: negative rate");
  }

  // Columns: u, then scaled route flows, then scaled charging flows.
  std::vector<int> route_col(m * m * nv, -1), charge_col(m * nv, -1);
  int n = 1;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j)
        for (int v = scn.v_trip(i, j); v <= vm; ++v) route_col[(i * m + j) * nv + v] = n++;
  for (int i = 0; i < m; ++i)
    for (int v = 0; v < vm; ++v) charge_col[i * nv + v] = n++;
  auto route = [&](int i, int j, int v) {
    return (v < 0 || v > vm || i == j) ? -1 : route_col[(i * m + j) * nv + v];
  };
  auto charge = [&](int i, int v) { return (v < 0 || v > vm) ? -1 : charge_col[i * nv + v]; };

  QpProblem lp;
  lp.Q = Eigen::MatrixXd::Zero(n, n);
  lp.c = Eigen::VectorXd::Ones(n);
  lp.c[0] = 0.0;

  lp.A = Eigen::MatrixXd::Zero(m * nv + 1, n);
  lp.b = Eigen::VectorXd::Zero(m * nv + 1);
  for (int i = 0; i < m; ++i)
    for (int v = 0; v <= vm; ++v) {
      const int row = i * nv + v;
      for (int j = 0; j < m; ++j) {
        if (int col = route(i, j, v); col >= 0) lp.A(row, col) += 1.0;
        if (j != i)
          if (int col = route(j, i, v + scn.v_trip(j, i)); col >= 0) lp.A(row, col) -= 1.0;
      }
      if (int col = charge(i, v); col >= 0) lp.A(row, col) += 1.0;
      if (int col = charge(i, v - 1); col >= 0) lp.A(row, col) -= 1.0;
    }
  const int norm_row = m * nv;
  lp.A(norm_row, 0) = scn.fleet_size;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int v = 0; v <= vm; ++v)
        if (int col = route(i, j, v); col >= 0) lp.A(norm_row, col) = -(scn.tau(i, j) - 1.0);
  lp.b[norm_row] = 1.0;

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && Lambda(i, j) > 0.0) pairs.emplace_back(i, j);
  const int n_ineq = static_cast<int>(pairs.size()) + n;
  lp.G = Eigen::MatrixXd::Zero(n_ineq, n);
  lp.h = Eigen::VectorXd::Zero(n_ineq);
  int row = 0;
  for (auto [i, j] : pairs) {
    lp.G(row, 0) = Lambda(i, j);
    for (int v = 0; v <= vm; ++v)
      if (int col = route(i, j, v); col >= 0) lp.G(row, col) = -1.0;
    ++row;
  }
  for (int col = 0; col < n; ++col) lp.G(row++, col) = -1.0;

  QpOptions qopt;
  qopt.feas_tol = 1e-10;
  qopt.gap_tol = 1e-10;
  qopt.max_iter = 150;
  QpResult sol = solve_qp(lp, qopt);

  CapacityResult out;
  if (sol.status != QpStatus::kOptimal || !(sol.x[0] > 0.0)) {
    out.status = CapacityStatus::kInfeasible;
    out.stable = false;
    out.message = "demand cannot be served by the fleet under any routing";
    return out;
  }
  const double u = sol.x[0];
  out.status = CapacityStatus::kOptimal;
  out.rho_star = std::max(0.0, sol.primal_objective);
  out.stable = out.rho_star <= 1.0 + feas_tol;
  out.route.assign(m * m * nv, 0.0);
  out.charge.assign(m * nv, 0.0);
  out.availability.assign(m * nv, 0.0);
  for (int i = 0; i < m; ++i)
    for (int v = 0; v <= vm; ++v) {
      double departures = 0.0;
      for (int j = 0; j < m; ++j)
        if (int col = route(i, j, v); col >= 0) {
          const double flow = std::max(0.0, sol.x[col] / u);
          out.route[(i * m + j) * nv + v] = flow;
          departures += flow;
        }
      if (int col = charge(i, v); col >= 0) {
        out.charge[i * nv + v] = std::max(0.0, sol.x[col] / u);
        departures += out.charge[i * nv + v];
      }
      if (out.rho_star > 0.0) out.availability[i * nv + v] = departures / out.rho_star;
    }
  if (out.rho_star == 0.0)
    for (int i = 0; i < m; ++i)
      out.availability[i * nv + vm] = static_cast<double>(scn.fleet_size) / m;
  return out;
}

}  // namespace amod::planner
