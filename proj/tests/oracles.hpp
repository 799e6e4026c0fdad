// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the planner.
#ifndef AMOD_TESTS_ORACLES_HPP_
#define AMOD_TESTS_ORACLES_HPP_

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "amod/model/scenario.hpp"

namespace oracle {

// Dense two-phase tableau simplex with Bland's rule:
//   minimize c'x  s.t.  A x = b,  G x <= h,  x >= 0.
// Returns nullopt when infeasible. Unbounded problems are not expected.
inline std::optional<double> lp_min(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                    const Eigen::VectorXd& b, const Eigen::MatrixXd& G,
                                    const Eigen::VectorXd& h) {
  const int n = static_cast<int>(c.size());
  const int me = static_cast<int>(A.rows());
  const int mi = static_cast<int>(G.rows());
  const int rows = me + mi;
  // Columns: x (n), slacks (mi), artificials (rows), rhs.
  const int cols = n + mi + rows;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(rows, cols + 1);
  std::vector<int> basis(rows);
  for (int r = 0; r < rows; ++r) {
    double sign = 1.0;
    if (r < me) {
      T.block(r, 0, 1, n) = A.row(r);
      T(r, cols) = b[r];
    } else {
      T.block(r, 0, 1, n) = G.row(r - me);
      T(r, n + (r - me)) = 1.0;
      T(r, cols) = h[r - me];
    }
    if (T(r, cols) < 0) sign = -1.0;
    T.row(r) *= sign;
    T(r, n + mi + r) = 1.0;
    basis[r] = n + mi + r;
  }
  const double eps = 1e-11;
  auto run = [&](Eigen::VectorXd cost, int allowed) -> bool {
    for (int it = 0; it < 10000; ++it) {
      Eigen::RowVectorXd reduced = cost.transpose();
      for (int r = 0; r < rows; ++r) reduced -= cost[basis[r]] * T.row(r).head(cols);
      int enter = -1;
      for (int j = 0; j < allowed; ++j)
        if (reduced[j] < -eps) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows; ++r)
        if (T(r, enter) > eps) {
          const double ratio = T(r, cols) / T(r, enter);
          if (ratio < best - 1e-13 || (leave >= 0 && std::abs(ratio - best) <= 1e-13 && basis[r] < basis[leave])) {
            best = ratio;
            leave = r;
          }
        }
      if (leave < 0) return false;
      T.row(leave) /= T(leave, enter);
      for (int r = 0; r < rows; ++r)
        if (r != leave && T(r, enter) != 0.0) T.row(r) -= T(r, enter) * T.row(leave);
      basis[leave] = enter;
    }
    return false;
  };
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
  phase1.tail(rows).setOnes();
  run(phase1, cols);
  double infeas = 0.0;
  for (int r = 0; r < rows; ++r)
    if (basis[r] >= n + mi) infeas += T(r, cols);
  if (infeas > 1e-8) return std::nullopt;
  // Drive remaining (zero-level) artificials out where possible.
  for (int r = 0; r < rows; ++r) {
    if (basis[r] < n + mi) continue;
    for (int j = 0; j < n + mi; ++j)
      if (std::abs(T(r, j)) > 1e-9) {
        T.row(r) /= T(r, j);
        for (int q = 0; q < rows; ++q)
          if (q != r && T(q, j) != 0.0) T.row(q) -= T(q, j) * T.row(r);
        basis[r] = j;
        break;
      }
  }
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
  phase2.head(n) = c;
  if (!run(phase2, n + mi)) return std::nullopt;
  double obj = 0.0;
  for (int r = 0; r < rows; ++r)
    if (basis[r] < n) obj += c[basis[r]] * T(r, cols);
  return obj;
}

// Cheapest operating cost of serving induced rates L (m x m) with the
// scenario's routing/charging flows, electricity at the price means, and an
// optional vehicle-time budget. Written from the model description, not the
// planner's column layout.
inline std::optional<double> serve_cost(const amod::model::Scenario& s, const Eigen::MatrixXd& L,
                                        bool fleet_budget) {
  const int m = s.m, V = s.v_max + 1;
  std::vector<std::array<int, 3>> routes;  // i, j, v
  std::vector<std::array<int, 2>> charges;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j)
        for (int v = s.v_trip(i, j); v < V; ++v) routes.push_back({i, j, v});
  for (int i = 0; i < m; ++i)
    for (int v = 0; v + 1 < V; ++v) charges.push_back({i, v});
  const int nr = routes.size(), n = nr + charges.size();
  Eigen::VectorXd c(n);
  for (int k = 0; k < nr; ++k) c[k] = s.beta * s.tau(routes[k][0], routes[k][1]);
  for (int k = 0; k < (int)charges.size(); ++k) c[nr + k] = s.beta + s.price.mean[charges[k][0]];
  // Balance at every (node, level): what leaves equals what arrives.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m * V, n);
  for (int k = 0; k < nr; ++k) {
    auto [i, j, v] = routes[k];
    A(i * V + v, k) += 1.0;
    A(j * V + (v - s.v_trip(i, j)), k) -= 1.0;
  }
  for (int k = 0; k < (int)charges.size(); ++k) {
    auto [i, v] = charges[k];
    A(i * V + v, nr + k) += 1.0;
    A(i * V + v + 1, nr + k) -= 1.0;
  }
  std::vector<Eigen::RowVectorXd> g;
  std::vector<double> hv;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && L(i, j) > 0) {
        Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
        for (int k = 0; k < nr; ++k)
          if (routes[k][0] == i && routes[k][1] == j) row[k] = -1.0;
        g.push_back(row);
        hv.push_back(-L(i, j));
      }
  if (fleet_budget) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
    for (int k = 0; k < nr; ++k) row[k] = s.tau(routes[k][0], routes[k][1]);
    for (int k = nr; k < n; ++k) row[k] = 1.0;
    g.push_back(row);
    hv.push_back(s.fleet_size);
  }
  Eigen::MatrixXd G(g.size(), n);
  Eigen::VectorXd h(g.size());
  for (std::size_t r = 0; r < g.size(); ++r) {
    G.row(r) = g[r];
    h[r] = hv[r];
  }
  return lp_min(c, A, Eigen::VectorXd::Zero(m * V), G, h);
}

// Profit of serving induced rates L at the matching uniform-WTP prices.
inline double profit_at(const amod::model::Scenario& s, const Eigen::MatrixXd& L, bool budget) {
  auto cost = serve_cost(s, L, budget);
  if (!cost) return -std::numeric_limits<double>::infinity();
  double revenue = 0.0;
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.m; ++j)
      if (i != j && s.lambda(i, j) > 0) {
        const double price = s.ell_max * (1.0 - L(i, j) / s.lambda(i, j));
        revenue += price * L(i, j);
      }
  return revenue - *cost;
}

struct GridOptimum {
  double profit = -std::numeric_limits<double>::infinity();
  double ell01 = 0.0, ell10 = 0.0;
};

// Two-node search over the two ride prices with an inner LP for the flows.
// A coarse grid brackets the optimum; nested golden-section search then
// pins it down. Profit is jointly concave in the prices and maximizing out
// one price leaves a concave function of the other, so the nested search
// cannot be misled by ridges the way a zooming grid can. Infeasible prices
// (fleet budget) form a set closed under raising prices, so a -inf probe
// always means "go up".
inline GridOptimum grid_search_2node(const amod::model::Scenario& s, bool budget,
                                     int points = 41) {
  auto profit = [&](double e0, double e1) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2, 2);
    L(0, 1) = s.lambda(0, 1) * (1.0 - e0 / s.ell_max);
    L(1, 0) = s.lambda(1, 0) * (1.0 - e1 / s.ell_max);
    return profit_at(s, L, budget);
  };
  GridOptimum best;
  const double step = s.ell_max / (points - 1);
  for (int a = 0; a < points; ++a)
    for (int b = 0; b < points; ++b) {
      const double p = profit(a * step, b * step);
      if (p > best.profit) best = {p, a * step, b * step};
    }
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto golden = [&](auto&& f, double lo, double hi, double& arg) {
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-9) {
      if (f1 < f2 || (std::isinf(f1) && std::isinf(f2))) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = f(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = f(x1);
      }
    }
    arg = 0.5 * (lo + hi);
    return f(arg);
  };
  double e1_at = 0.0;
  auto inner = [&](double e0) {
    double arg = 0.0;
    const double v = golden([&](double e1) { return profit(e0, e1); }, 0.0, s.ell_max, arg);
    e1_at = arg;
    return v;
  };
  double e0 = 0.0;
  const double p = golden(inner, 0.0, s.ell_max, e0);
  inner(e0);
  if (p > best.profit) best = {p, e0, e1_at};
  return best;
}

// Random two-node instance: v_max in {0, 1, 2}, trips 1-3 periods, costs
// well below the price ceiling.
inline amod::model::Scenario random_two_node(int v_max, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> tau(1, 3);
  amod::model::Scenario s;
  s.m = 2;
  s.v_max = v_max;
  s.ell_max = 30.0;
  s.beta = 0.1 + 2.4 * U(rng);
  s.w = 2.0;
  s.lambda = Eigen::MatrixXd::Zero(2, 2);
  s.lambda(0, 1) = 1.0 + 5.0 * U(rng);
  s.lambda(1, 0) = 1.0 + 5.0 * U(rng);
  s.tau = Eigen::MatrixXi::Zero(2, 2);
  s.tau(0, 1) = tau(rng);
  s.tau(1, 0) = tau(rng);
  s.v_trip = Eigen::MatrixXi::Zero(2, 2);
  if (v_max > 0) {
    std::uniform_int_distribution<int> vt(1, v_max);
    s.v_trip(0, 1) = vt(rng);
    s.v_trip(1, 0) = vt(rng);
  }
  s.fleet_size = 2 + static_cast<int>(18 * U(rng));
  s.price.mode = amod::model::PriceMode::kConstant;
  s.price.mean = Eigen::VectorXd(2);
  s.price.mean << 5.0 * U(rng), 5.0 * U(rng);
  s.price.stddev = Eigen::VectorXd::Zero(2);
  return s;
}

// Total-variation distance between two pmfs given on a common support.
inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0.0;
  for (std::size_t k = 0; k < std::max(p.size(), q.size()); ++k)
    tv += std::abs((k < p.size() ? p[k] : 0.0) - (k < q.size() ? q[k] : 0.0));
  return 0.5 * tv;
}

}  // namespace oracle

#endif  // AMOD_TESTS_ORACLES_HPP_
