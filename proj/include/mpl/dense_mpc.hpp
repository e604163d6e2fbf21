#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mpl/lti.hpp"

namespace mpl {

/// Condensed finite-horizon problem
///   min_z 1/2 z'Hz + x0'Fz   s.t.  G z <= W + O x0,
/// where z stacks u_0..u_{N-1}. Built from a discrete system plus cost and
/// box constraints:
///   H = 2 (I_N (x) R) + 2 S'QS,  F = 2 T'QS,  Y = Q + T'QT,
/// with S the block-Toeplitz prediction map of A^i B, T the stack of A^i
/// (i = 1..N), and Q the block diagonal of N-1 state weights plus the
/// terminal weight. Constraint rows are ordered: input upper bounds, input
/// lower bounds, output upper bounds, output lower bounds; the output blocks
/// use Gm = (I_N (x) C) S and Om the stack of C A^i.
///
/// Named block accessors follow the halved convention: h_block/f_block read
/// blocks of H/2 and F/2, so e.g. h_block(N-1, N-1) = R + B'PB and
/// f_block(N-1) = (A^N)' P B.
struct DenseQp {
  Eigen::MatrixXd h;       ///< Nm x Nm, symmetric PD
  Eigen::MatrixXd f;       ///< n x Nm
  Eigen::MatrixXd y;       ///< n x n value-function offset Q + T'QT
  Eigen::MatrixXd g;       ///< 2N(m+p) x Nm
  Eigen::VectorXd w;       ///< 2N(m+p)
  Eigen::MatrixXd o;       ///< 2N(m+p) x n
  Eigen::MatrixXd gm;      ///< Np x Nm predicted-output map
  Eigen::MatrixXd om;      ///< Np x n predicted-output free response
  Eigen::Index n, m, p, horizon;

  /// Block (i, j) of H/2, 0-based, each m x m.
  Eigen::MatrixXd h_block(Eigen::Index i, Eigen::Index j) const;
  /// Block j of F/2, 0-based, each n x m.
  Eigen::MatrixXd f_block(Eigen::Index j) const;
};

/// Condense (sys, cost, box) into the dense form. The system must be
/// discrete and dimensionally consistent with cost and box.
DenseQp build_dense(const LtiSystem& sys, const CostSpec& cost,
                    const BoxConstraints& box);

/// Strictly convex QP solution.
struct QpSolution {
  Eigen::VectorXd z;             ///< optimizer
  double objective;              ///< 1/2 z'Hz + q'z at the optimizer
  std::vector<Eigen::Index> active;  ///< indices of active rows, ascending
  Eigen::VectorXd multipliers;   ///< lambda >= 0, one per constraint row
  double kkt_residual;           ///< inf-norm of H z + q + G' lambda
};

/// Minimize 1/2 z'Hz + q'z subject to G z <= rhs, H symmetric PD.
/// Dual active-set iteration from the unconstrained minimizer; throws
/// Infeasible when the feasible set is empty. The returned point satisfies
/// G z <= rhs + tol::kQpFeas and kkt_residual <= tol::kQpStat.
QpSolution qp_solve_raw(const Eigen::MatrixXd& h, const Eigen::VectorXd& q,
                        const Eigen::MatrixXd& g, const Eigen::VectorXd& rhs);

/// Solve the condensed problem at initial state x0 (q = F'x0,
/// rhs = W + O x0). The x0'Yx0 constant is excluded from the objective.
QpSolution qp_solve(const DenseQp& qp, const Eigen::VectorXd& x0);

/// Closed-loop simulation record.
struct Trajectory {
  Eigen::MatrixXd x;  ///< n x K, states x_0..x_{K-1}
  Eigen::MatrixXd u;  ///< m x K, applied inputs
  Eigen::MatrixXd y;  ///< p x K, outputs C x_k
  Eigen::MatrixXd z;  ///< Nm x K, full optimizer per step
};

/// Receding-horizon loop: at each step solve the condensed QP at the current
/// state, apply the first input, and advance x+ = A x + B (u + d_k) with the
/// optional additive input-channel disturbance d_k. Infeasible QPs propagate
/// with the step index in the message.
Trajectory closed_loop(const LtiSystem& sys, const CostSpec& cost,
                       const BoxConstraints& box, const Eigen::VectorXd& x0,
                       Eigen::Index steps,
                       const std::vector<Eigen::VectorXd>& disturbance = {});

/// Relative error ||estimate - truth||_F / max(||truth||_F, eps_floor).
double error_index(const Eigen::MatrixXd& truth,
                   const Eigen::MatrixXd& estimate,
                   double eps_floor = 1e-30);

/// Root-mean-square of a stacked signal: ||signal||_F / sqrt(columns).
double rms_index(const Eigen::MatrixXd& signal);

}  // namespace mpl
