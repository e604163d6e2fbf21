#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mpl/numerics.hpp"

namespace mpl {

/// Linear time-invariant system x+ = A x + B u, y = C x (discrete flag set)
/// or dx/dt = A x + B u, y = C x. Dimensions are validated on construction.
struct LtiSystem {
  Eigen::MatrixXd a;  ///< n x n
  Eigen::MatrixXd b;  ///< n x m
  Eigen::MatrixXd c;  ///< p x n
  bool discrete = true;

  LtiSystem(Eigen::MatrixXd a_in, Eigen::MatrixXd b_in, Eigen::MatrixXd c_in,
            bool discrete_in);

  Eigen::Index n() const { return a.rows(); }
  Eigen::Index m() const { return b.cols(); }
  Eigen::Index p() const { return c.rows(); }
};

/// Quadratic stage/terminal cost x'Qx + u'Ru, terminal x'Px, over a horizon.
/// Q, P must be symmetric PSD and R symmetric PD (minimum-eigenvalue checks
/// with slack tol::kPsd); horizon >= 1.
struct CostSpec {
  Eigen::MatrixXd q;
  Eigen::MatrixXd r;
  Eigen::MatrixXd p;
  Eigen::Index horizon;

  CostSpec(Eigen::MatrixXd q_in, Eigen::MatrixXd r_in, Eigen::MatrixXd p_in,
           Eigen::Index horizon_in);
};

/// Elementwise box bounds on inputs and outputs; lower < upper per entry.
struct BoxConstraints {
  Eigen::VectorXd u_min;
  Eigen::VectorXd u_max;
  Eigen::VectorXd y_min;
  Eigen::VectorXd y_max;

  BoxConstraints(Eigen::VectorXd u_min_in, Eigen::VectorXd u_max_in,
                 Eigen::VectorXd y_min_in, Eigen::VectorXd y_max_in);
};

/// Exact zero-order-hold discretization of a continuous-time system at
/// sampling interval ts, via the matrix exponential of the augmented block
/// [[A, B], [0, 0]] * ts. C is unchanged.
LtiSystem zoh_discretize(const LtiSystem& sys, double ts);

/// (rank of controllability matrix, rank of observability matrix).
std::pair<Eigen::Index, Eigen::Index> structural_ranks(const LtiSystem& sys);

/// Markov parameters h(k) = C A^{k-1} B for k = 1..count.
std::vector<Eigen::MatrixXd> markov_parameters(const LtiSystem& sys,
                                               Eigen::Index count);

/// Finite transmission zeros of a square (m == p) system: generalized
/// eigenvalues of the system pencil [[A, B], [C, 0]] - z [[I, 0], [0, 0]].
/// Pairs with |beta| < tol::kPencilInf are infinite and dropped.
std::vector<std::complex<double>> transmission_zeros(const LtiSystem& sys);

/// One discrete step: (A x + B u, C x).
std::pair<Eigen::VectorXd, Eigen::VectorXd> step(const LtiSystem& sys,
                                                 const Eigen::VectorXd& x,
                                                 const Eigen::VectorXd& u);

}  // namespace mpl
