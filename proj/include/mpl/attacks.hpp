#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "mpl/dense_mpc.hpp"
#include "mpl/numerics.hpp"
#include "mpl/transforms.hpp"

namespace mpl {

/// A direction in which the recovered cost pair is provably non-unique:
/// replacing (Q, P) by (Q + epsilon (X - A'XA), P + epsilon X) reproduces the
/// same transmitted data for any small epsilon, because X B = 0 wipes the
/// direction from every block that depends on B.
struct UncertaintyWitness {
  Eigen::MatrixXd x_dir;  ///< symmetric, nonzero, x_dir * B = 0
  double epsilon = 0.0;   ///< certified step keeping both matrices PSD
  double q_min_eig = 0.0; ///< min eig of Q + epsilon (X - A'XA)
  double p_min_eig = 0.0; ///< min eig of P + epsilon X
};

enum class WitnessKind {
  kWitness,    ///< a valid perturbation direction was certified
  kSingleton,  ///< B has full row rank: the direction set is {0}
  kBoundary    ///< directions exist but none could be certified PSD-safe
};

struct WitnessResult {
  WitnessKind kind = WitnessKind::kSingleton;
  std::optional<UncertaintyWitness> witness;
  std::string note;
};

/// Search for an uncertainty direction for estimates (A, B, Q, P). The
/// construction takes X = Z Z' with Z an orthonormal basis of the orthogonal
/// complement of im(B) (so X is PSD and P + epsilon X stays PSD for free) and
/// epsilon = 0.5 * min_eig(Q) / ||X - A'XA||_F.
WitnessResult uncertainty_witness(const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b,
                                  const Eigen::MatrixXd& q_hat,
                                  const Eigen::MatrixXd& p_hat);

/// What an attack inferred. Matrix fields are set only when the attack
/// recovers them; provenance records which operation produced each field.
struct AttackReport {
  std::optional<Eigen::MatrixXd> a_hat, b_hat, c_hat;
  std::optional<Eigen::MatrixXd> q_hat, p_hat, r_hat;
  std::vector<std::complex<double>> eigenvalues;
  std::vector<std::complex<double>> zeros;
  std::optional<WitnessResult> witness;
  std::optional<double> eps_relax;
  std::map<std::string, std::string> provenance;

  nlohmann::json to_json() const;
};

/// Observations collected across problem instances (columns = instances).
/// x0 is the plant's secret, logged for test-side comparison only; attack
/// routines never read it.
struct DataLog {
  Eigen::MatrixXd x0;       ///< n x I (hidden)
  Eigen::MatrixXd f_tilde;  ///< Nm x I transmitted linear terms
  Eigen::MatrixXd zeta;     ///< Nm x I transmitted optimizers
  Eigen::MatrixXd e_tilde;  ///< constraint right-hand sides, may be empty
};

// --- separate-form attacks -------------------------------------------------

/// Read (R, Q, A) back from a plain or affine masked problem: the u-u cost
/// block is G^{-T} R G^{-1} as-is, the cross block divides out the masked
/// feedback, and adding B~ times that feedback to A~ cancels the masking, so
/// the recovered state matrix is similar to A.
AttackReport attack_separate(const TransformedProblem& tp);

/// Same recipe through pseudo-inverses when the mask inflates dimensions;
/// recovers congruence classes of (Q, R) and the nonzero spectrum of A.
AttackReport attack_highdim(const TransformedProblem& tp);

/// Same recipe on the quadratic blocks of a polynomially masked problem;
/// requires the nonlinear residual to be tagged (AttackFailed otherwise).
AttackReport attack_poly(const TransformedProblem& tp);

/// What the noise channel leaks.
struct StructuredNoiseFinding {
  Eigen::Index kernel_dim = 0;      ///< dim ker(B_t) = added input dims
  Eigen::Index m_estimate = 0;      ///< recovered true input count
  Eigen::MatrixXd row_space_basis;  ///< m x m_t, rows span rowspace(Gl)
  Eigen::MatrixXd q_times_u;        ///< m x K, basis * u_tilde_k = Q u_k
};

/// Identify the noise-carrying kernel of the masked input matrix and project
/// it away: the projected inputs equal an invertible mix of the true inputs,
/// so input-sequence privacy reduces to a linear mask.
StructuredNoiseFinding attack_structured_noise(
    const LtiSystem& sys_t, const std::vector<Eigen::VectorXd>& u_tilde);

// --- dense-form attacks ----------------------------------------------------

/// Minimal realization from the constraint matrix: the predicted-output block
/// holds the Markov parameters h(1..N) in its first block column; requires
/// N >= 2 n_hint + 1.
Realization realize_from_G(const Eigen::MatrixXd& g_full, Eigen::Index n_hint,
                           Eigen::Index m, Eigen::Index p);

/// Full recovery from an unmasked dense problem (H, F, G, W, O public,
/// N > n): A from the shift structure of the free-response block of O, C and
/// B by back-substitution, R from the corner blocks, then a least-squares
/// (Q, P) consistent with (H, F) and its uniqueness witness.
AttackReport attack_dense_full(const DenseQp& qp);

/// Recovery up to similarity from per-instance data (H, x0'F, G, W + O x0):
/// realization from G, initial states from the centered output-bound rows,
/// then F in the realization basis gives the terminal product and R.
/// Requires at least n_hint + 1 instances with initial states of full rank.
AttackReport attack_dense_multi(const DataLog& log, const Eigen::MatrixXd& h,
                                const Eigen::MatrixXd& g, Eigen::Index n_hint,
                                Eigen::Index m, Eigen::Index p);

/// Recovery of (A, B, R) from (H, F) alone for Schur-stable dynamics and a
/// long horizon, via the shift structure of the leading F blocks against the
/// infinite-horizon cost-to-go.
AttackReport attack_hf(const Eigen::MatrixXd& h, const Eigen::MatrixXd& f,
                       Eigen::Index n_hint, Eigen::Index m);

/// Same data but only x0'F per instance: a full-rank factorization splits the
/// unknown basis from the shared blocks; recovers the spectrum of A and R.
AttackReport attack_hx0f(const Eigen::MatrixXd& h,
                         const Eigen::MatrixXd& x0tf_rows,
                         Eigen::Index n_hint, Eigen::Index m);

/// Exact key readback when the dense mask has no row permutation: the
/// identity block of G pins R, and centering the input-bound rows of the
/// right-hand side pins r up to its blockwise mean.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> recover_dense_key(
    const Eigen::MatrixXd& g_tilde, const Eigen::VectorXd& e_tilde,
    Eigen::Index nm, Eigen::Index m);

/// Spectrum recovery under a full (R, r, P) mask from consecutive-instance
/// differences of transmitted linear terms and optimizers. The annihilator
/// of the optimizer differences is found by constrained least squares; the
/// achieved ||dZ * Theta||_F is reported as eps_relax.
AttackReport attack_rrp(const DataLog& log, Eigen::Index n_hint);

/// Stronger variant that also isolates the input mixing block; needs the
/// stacked data matrix to have full row rank (n + Nm columns of excitation),
/// AttackFailed otherwise.
struct RrpExtended {
  Eigen::MatrixXd a_hat;    ///< similar to A
  Eigen::MatrixXd tbr_hat;  ///< T B_bar R in the data basis
  double residual = 0.0;
};
RrpExtended attack_rrp_extended(const DataLog& log, Eigen::Index n_hint);

// --- shared helpers --------------------------------------------------------

/// Least-squares (Q, P) consistent with the halved blocks of (H, F) for the
/// given (A, B, R), i.e. minimizing the residual of S'Q S = H/2 - R-diag and
/// T'Q S = F/2 over block-diagonal stage/terminal weights; the result is
/// projected onto the PSD cone by clipping negative eigenvalues at zero.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> recover_cost_pair(
    const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
    const Eigen::MatrixXd& r_hat, const Eigen::MatrixXd& h,
    const Eigen::MatrixXd& f, Eigen::Index horizon);

}  // namespace mpl
