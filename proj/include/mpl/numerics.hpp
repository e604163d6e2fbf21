#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mpl/rng.hpp"
#include "mpl/tolerances.hpp"

namespace mpl {

/// Moore-Penrose pseudo-inverse via SVD; singular values below
/// `rel_tol * sigma_max` are treated as zero.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rel_tol = tol::kPinv);

/// Numerical rank: count of singular values above `rel_tol * sigma_max`.
/// A zero matrix has rank 0.
Eigen::Index numerical_rank(const Eigen::MatrixXd& m,
                            double rel_tol = tol::kRank);

/// Unique solution Y of A^T Y A - Y = -Q for Schur-stable A and symmetric Q.
///
/// Solved directly through the Kronecker-vectorized linear system; the result
/// is symmetrized and its residual checked against tol::kDlyap * ||Q||_F.
/// Throws Unstable if the spectral radius of A reaches one.
Eigen::MatrixXd dlyap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// Minimal state-space realization from Markov parameters h(1), h(2), ...
/// (each p x m). Builds the block Hankel matrix of depth `order_hint + 1`,
/// takes its SVD, and splits the balanced factors, so the returned basis is
/// the balanced one. Requires at least 2 * order_hint + 1 parameters and a
/// Hankel numerical rank equal to order_hint (else RankMismatch). The
/// realization reproduces the given parameters to tol::kRealize relative.
struct Realization {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
};
Realization hankel_realize(const std::vector<Eigen::MatrixXd>& markov,
                           Eigen::Index order_hint);

/// Rank-r full-rank factorization m = left * right with left (rows x r) of
/// full column rank and right (r x cols) of full row rank, from the truncated
/// SVD (left = U_r S_r^{1/2}, right = S_r^{1/2} V_r^T). Throws RankMismatch
/// if the numerical rank of m differs from r.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> full_rank_factorize(
    const Eigen::MatrixXd& m, Eigen::Index r);

/// Minimizer of ||z_mat * theta||_F over theta with e0 * theta = I.
///
/// e0 (n x k) must have full row rank n (else RankMismatch). Nullspace
/// method: theta = pinv(e0) + N w with N an orthonormal kernel basis of e0,
/// and w the least-squares minimizer of ||z_mat * (pinv(e0) + N w)||_F.
/// Returns (theta, achieved ||z_mat * theta||_F).
std::pair<Eigen::MatrixXd, double> eq_constrained_lsq(
    const Eigen::MatrixXd& z_mat, const Eigen::MatrixXd& e0);

/// Minimum eigenvalue of the symmetric part of m.
double psd_min_eig(const Eigen::MatrixXd& m);

/// Orthonormal basis of the kernel of m (columns); empty (cols x 0) if trivial.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m,
                             double rel_tol = tol::kRank);

/// Requirement tags for rand_matrix.
enum class MatrixShape { kNone, kInvertible, kFullColumnRank };

/// Random matrix with i.i.d. uniform entries in [lo, hi], resampled (at most
/// 100 draws, else GenerationFailed) until the requirement holds with margin:
/// condition number <= 1e6 for kInvertible, sigma_min >= 1e-6 * sigma_max for
/// kFullColumnRank.
Eigen::MatrixXd rand_matrix(SeededRng& rng, Eigen::Index rows,
                            Eigen::Index cols, double lo, double hi,
                            MatrixShape req = MatrixShape::kNone);

/// Eigenvalues of a real square matrix.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m);

/// Spectral radius of a real square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

/// Nonzero part of an eigenvalue multiset: drops entries with |z| <= abs_tol.
std::vector<std::complex<double>> nonzero_spectrum(
    const std::vector<std::complex<double>>& eigs,
    double abs_tol = tol::kEigZero);

/// Greatest pairing distance between two eigenvalue multisets of equal size
/// under the best bijection (exact assignment for n <= 8, greedy beyond).
/// Returns +inf for size mismatch.
double spectrum_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b);

}  // namespace mpl
