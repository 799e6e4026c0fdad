#include "amod/planner/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace amod::planner {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

// Largest step in (0, 1] keeping v + step * dv >= 0.
double max_step(const VectorXd& v, const VectorXd& dv) {
  double step = 1.0;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (dv[k] < 0.0) step = std::min(step, -v[k] / dv[k]);
  return step;
}

struct ReducedEqualities {
  MatrixXd A;
  VectorXd b;
  std::vector<Eigen::Index> rows;  // original row index of each kept row
  bool consistent = true;
};

ReducedEqualities reduce_equalities(const MatrixXd& A, const VectorXd& b) {
  ReducedEqualities out;
  if (A.rows() == 0) {
    out.A = MatrixXd(0, A.cols());
    out.b = VectorXd(0);
    return out;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(A.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  auto perm = qr.colsPermutation().indices();
  out.rows.assign(perm.data(), perm.data() + rank);
  std::sort(out.rows.begin(), out.rows.end());
  out.A.resize(rank, A.cols());
  out.b.resize(rank);
  for (Eigen::Index r = 0; r < rank; ++r) {
    out.A.row(r) = A.row(out.rows[r]);
    out.b[r] = b[out.rows[r]];
  }
  if (rank < A.rows()) {
    // Dropped rows must be implied by the kept ones.
    VectorXd x = out.A.completeOrthogonalDecomposition().solve(out.b);
    out.consistent = inf_norm(A * x - b) <= 1e-8 * (1.0 + inf_norm(b));
  }
  return out;
}

}  // namespace

std::string to_string(QpStatus status) {
  switch (status) {
    case QpStatus::kOptimal: return "optimal";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kMaxIter: return "max_iter";
  }
  return "max_iter";
}

QpResult solve_qp(const QpProblem& prob, const QpOptions& opt) {
  const Eigen::Index n = prob.c.size();
  const Eigen::Index mi = prob.h.size();
  QpResult res;

  ReducedEqualities eq = reduce_equalities(prob.A, prob.b);
  const Eigen::Index p = eq.A.rows();
  if (!eq.consistent) {
    res.status = QpStatus::kInfeasible;
    res.message = "inconsistent equality constraints";
    return res;
  }
  const MatrixXd& A = eq.A;
  const VectorXd& b = eq.b;
  const MatrixXd& G = prob.G;
  const VectorXd& h = prob.h;
  const MatrixXd& Q = prob.Q;
  const VectorXd& c = prob.c;

  const double b_scale = 1.0 + std::max(inf_norm(b), inf_norm(h));
  const double c_scale = 1.0 + inf_norm(c);

  MatrixXd K(n + p, n + p);
  auto assemble = [&](const VectorXd& weights) {
    K.setZero();
    K.topLeftCorner(n, n) = Q + G.transpose() * weights.asDiagonal() * G;
    const double reg = 1e-13 * (1.0 + K.topLeftCorner(n, n).diagonal().cwiseAbs().maxCoeff());
    K.topLeftCorner(n, n).diagonal().array() += reg;
    K.topRightCorner(n, p) = A.transpose();
    K.bottomLeftCorner(p, n) = A;
  };

  // Starting point: least-squares fit of Gx + s = h with unit weights.
  VectorXd x(n), y(p), s(mi), z(mi);
  {
    assemble(VectorXd::Ones(mi));
    VectorXd rhs(n + p);
    rhs << -c + G.transpose() * h, b;
    VectorXd sol = K.partialPivLu().solve(rhs);
    x = sol.head(n);
    y = VectorXd::Zero(p);
    s = (h - G * x).cwiseMax(1.0);
    z = VectorXd::Ones(mi);
  }

  Eigen::PartialPivLU<MatrixXd> lu;
  // Solves the Newton system for the given residuals; returns (dx, dy, ds, dz).
  auto newton = [&](const VectorXd& r_d, const VectorXd& r_p, const VectorXd& r_g,
                    const VectorXd& r_sz, VectorXd& dx, VectorXd& dy, VectorXd& ds,
                    VectorXd& dz) {
    VectorXd t = (-r_sz + z.cwiseProduct(r_g)).cwiseQuotient(s);
    VectorXd rhs(n + p);
    rhs << -r_d - G.transpose() * t, -r_p;
    VectorXd sol = lu.solve(rhs);
    // One round of iterative refinement.
    sol += lu.solve(rhs - K * sol);
    dx = sol.head(n);
    dy = sol.tail(p);
    VectorXd gdx = G * dx;
    ds = -r_g - gdx;
    dz = t + z.cwiseQuotient(s).cwiseProduct(gdx);
  };

  for (int it = 0; it <= opt.max_iter; ++it) {
    const VectorXd r_d = Q * x + c + A.transpose() * y + G.transpose() * z;
    const VectorXd r_p = A * x - b;
    const VectorXd r_g = G * x + s - h;
    const double gap = s.dot(z);
    const double pobj = 0.5 * x.dot(Q * x) + c.dot(x);

    res.iterations = it;
    res.primal_residual = std::max(inf_norm(r_p), inf_norm(r_g)) / b_scale;
    res.dual_residual = inf_norm(r_d) / c_scale;
    if (res.primal_residual <= opt.feas_tol && res.dual_residual <= opt.feas_tol &&
        gap <= opt.gap_tol * (1.0 + std::abs(pobj))) {
      res.status = QpStatus::kOptimal;
      break;
    }
    if (it == opt.max_iter || !x.allFinite() || inf_norm(x) > 1e14 || inf_norm(z) > 1e14) {
      res.status = QpStatus::kMaxIter;
      res.message = "interior point iteration did not converge";
      break;
    }
    const double mu = mi > 0 ? gap / static_cast<double>(mi) : 0.0;

    assemble(z.cwiseQuotient(s));
    lu.compute(K);

    VectorXd dx, dy, ds, dz;
    newton(r_d, r_p, r_g, s.cwiseProduct(z), dx, dy, ds, dz);
    const double alpha_aff = std::min(max_step(s, ds), max_step(z, dz));
    const double mu_aff =
        mi > 0 ? (s + alpha_aff * ds).dot(z + alpha_aff * dz) / static_cast<double>(mi) : 0.0;
    const double sigma = mu > 0.0 ? std::pow(mu_aff / mu, 3.0) : 0.0;

    VectorXd r_sz = s.cwiseProduct(z) + ds.cwiseProduct(dz) -
                    VectorXd::Constant(mi, sigma * mu);
    newton(r_d, r_p, r_g, r_sz, dx, dy, ds, dz);
    const double alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));

    x += alpha * dx;
    y += alpha * dy;
    s += alpha * ds;
    z += alpha * dz;
  }

  res.x = x;
  res.s = h - G * x;
  res.z = z;
  res.y = VectorXd::Zero(prob.A.rows());
  for (std::size_t r = 0; r < eq.rows.size(); ++r) res.y[eq.rows[r]] = y[r];
  res.primal_objective = 0.5 * x.dot(Q * x) + c.dot(x);
  res.dual_objective = -0.5 * x.dot(Q * x) - b.dot(y) - h.dot(z);
  return res;
}

}  // namespace amod::planner
