#ifndef AMOD_PLANNER_QP_SOLVER_HPP_
#define AMOD_PLANNER_QP_SOLVER_HPP_

#include <Eigen/Dense>

#include <string>

namespace amod::planner {

// Convex quadratic program in inequality form
//
//   minimize    0.5 x'Qx + c'x
//   subject to  A x  = b        (duals y, free)
//               G x <= h        (duals z >= 0)
//
// Q must be symmetric positive semidefinite and every variable must carry
// curvature or appear in at least one inequality row.
struct QpProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
};

struct QpOptions {
  double feas_tol = 1e-9;  // scaled primal/dual residuals
  double gap_tol = 1e-9;   // s'z relative to 1 + |primal objective|
  int max_iter = 200;
};

enum class QpStatus { kOptimal, kInfeasible, kMaxIter };

std::string to_string(QpStatus status);

struct QpResult {
  QpStatus status = QpStatus::kMaxIter;
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // one per row of A (zero for rows found redundant)
  Eigen::VectorXd z;
  Eigen::VectorXd s;  // h - Gx
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;  // max(|Ax-b|, |Gx+s-h|), scaled
  double dual_residual = 0.0;    // |Qx+c+A'y+G'z|, scaled
  int iterations = 0;
  std::string message;
};

// Mehrotra predictor-corrector primal-dual interior point method on the
// nonnegative orthant. Linearly dependent equality rows are detected up
// front; inconsistent ones yield kInfeasible.
QpResult solve_qp(const QpProblem& problem, const QpOptions& options = {});

}  // namespace amod::planner

#endif  // AMOD_PLANNER_QP_SOLVER_HPP_
