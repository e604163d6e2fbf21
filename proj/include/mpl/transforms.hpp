#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mpl/dense_mpc.hpp"
#include "mpl/lti.hpp"
#include "mpl/rng.hpp"

namespace mpl {

/// Which masking recipe a separate-form key encodes.
enum class SeparateVariant { kPlain, kAffine, kHighDim, kPoly };

/// Vector-valued polynomial in the fixed monomial basis of degrees 2..degree
/// (degrees ascending; within a degree, exponent vectors in decreasing
/// lexicographic order), plus a constant term. Linear terms are excluded by
/// construction, which is what lets quadratic cost blocks be read off
/// unambiguously in the transmitted form.
struct PolyMap {
  Eigen::MatrixXd coeff;                   ///< dim x z, one column per monomial
  Eigen::VectorXd constant;                ///< dim
  std::vector<Eigen::VectorXi> exponents;  ///< z exponent vectors over vars
  Eigen::Index degree = 0;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
};

/// Monomial exponent vectors over `vars` variables of total degrees
/// 2..degree, in the basis order documented on PolyMap.
std::vector<Eigen::VectorXi> monomial_exponents(Eigen::Index vars,
                                                Eigen::Index degree);

/// Secret separate-form key. Shapes by variant (n, m, p from the system):
///   plain:    t n x n, g m x m, s p x p invertible; f m x n.
///   affine:   plain plus offsets r1 (n), r2 (m), r3 (p).
///   high-dim: t n_t x n, g m_t x m, s p_t x p of full column rank; f m_t x n.
///   poly:     plain plus r2 and a coefficient block f1 (m x z) on the
///             degree >= 2 monomials of the state.
struct SeparateKey {
  SeparateVariant variant = SeparateVariant::kPlain;
  Eigen::MatrixXd t, g, s, f;
  Eigen::VectorXd r1, r2, r3;
  Eigen::MatrixXd f1;
  Eigen::Index poly_degree = 0;

  /// Identity key (t, g, s identity, f = 0): transformation is a no-op.
  static SeparateKey identity(Eigen::Index n, Eigen::Index m, Eigen::Index p);
};

/// Options for key generation.
struct KeyGenOptions {
  double range = 1e3;        ///< entries drawn uniformly from [-range, range]
  Eigen::Index n_extra = 0;  ///< added state dims (high-dim variant)
  Eigen::Index m_extra = 0;  ///< added input dims (high-dim variant)
  Eigen::Index p_extra = 0;  ///< added output dims (high-dim variant)
  Eigen::Index poly_degree = 3;
};

/// Draw a random valid key for `variant`. Square factors are conditioned
/// invertible, tall ones full column rank. For square-t variants the feedback
/// part is resampled (at most 100 times, else GenerationFailed) until the
/// masked pair keeps the observability needed by later estimation, i.e.
/// (A - B g^{-1} f, C) stays observable.
SeparateKey gen_separate_key(SeededRng& rng, const LtiSystem& sys,
                             SeparateVariant variant,
                             const KeyGenOptions& opts = {});

/// Whether the pair (A - B g^{-1} f, C) is observable; the masked system
/// inherits exactly this pair up to similarity.
bool feedback_preserves_observability(const LtiSystem& sys,
                                      const Eigen::MatrixXd& f,
                                      const Eigen::MatrixXd& g);

/// What the curious solver receives in the separate form: masked system
/// matrices, the stage cost as blocks of the (x, u) quadratic form, the
/// terminal weight, and the variant-specific residual terms. Residuals are
/// carried explicitly (tagged), never folded into the quadratic blocks.
struct TransformedProblem {
  SeparateVariant variant = SeparateVariant::kPlain;

  Eigen::MatrixXd a_t, b_t, c_t;
  Eigen::MatrixXd m11, m21, m22;  ///< stage blocks: x-x, u-x, u-u
  Eigen::MatrixXd p_t;            ///< terminal weight

  // Affine residuals (zero-sized unless variant == kAffine).
  Eigen::VectorXd state_offset;      ///< constant in the state recursion
  Eigen::VectorXd output_offset;     ///< constant in the output map
  Eigen::VectorXd stage_linear;      ///< coefficient of 2 [x; u] per stage
  double stage_constant = 0.0;
  Eigen::VectorXd terminal_linear;   ///< coefficient of 2 x_N
  double terminal_constant = 0.0;

  // Poly residual: the masked input enters every formula as u + psi(x).
  std::optional<PolyMap> input_poly;

  Eigen::Index n() const { return a_t.rows(); }
  Eigen::Index m() const { return b_t.cols(); }

  /// Transmitted stage cost value at (x, u), residual terms included.
  double stage_cost(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  /// Transmitted terminal cost value.
  double terminal_cost(const Eigen::VectorXd& x) const;
  /// Transmitted dynamics step (x+, y), residual terms included.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> step(
      const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

/// Apply a separate-form key to (sys, cost). The system must be discrete.
/// Dimensions of key and system must agree (InvalidArgument otherwise).
TransformedProblem apply_separate(const SeparateKey& key, const LtiSystem& sys,
                                  const CostSpec& cost);

/// Secret dense-form key: z = r_mat * zeta + r_vec plus a row permutation of
/// the constraints. With time_varying set, instance k uses a fresh
/// (r_mat, r_vec, perm) derived from base_rng.fork(k).
struct DenseKey {
  Eigen::MatrixXd r_mat;           ///< Nm x Nm invertible
  Eigen::VectorXd r_vec;           ///< Nm
  std::vector<Eigen::Index> perm;  ///< row permutation; perm[i] = source row
  bool time_varying = false;
  bool perm_random = true;         ///< whether instances draw fresh perms
  std::uint64_t base_seed = 0;
  double range = 1e3;

  /// Key effective at `instance` (the key itself unless time-varying).
  DenseKey at_instance(Eigen::Index instance) const;
};

/// Draw a dense key for a problem with `nm` decision variables and
/// `rows` constraint rows. `use_perm` false leaves the permutation identity.
DenseKey gen_dense_key(SeededRng& rng, Eigen::Index nm, Eigen::Index rows,
                       double range = 1e3, bool use_perm = true,
                       bool time_varying = false);

/// Dense problem as transmitted for one initial state.
struct TransformedDenseQp {
  Eigen::MatrixXd h_t;  ///< R'HR
  Eigen::VectorXd f_t;  ///< R'(F'x0 + H r)
  Eigen::MatrixXd g_t;  ///< P G R
  Eigen::VectorXd e_t;  ///< P (W + O x0 - G r)
};

/// Mask the condensed problem at x0 with `key` (resolved at `instance` when
/// time-varying). The minimizers satisfy z* = R zeta* + r exactly.
TransformedDenseQp apply_dense(const DenseKey& key, const DenseQp& qp,
                               const Eigen::VectorXd& x0,
                               Eigen::Index instance = 0);

/// Secret key for the input-noise channel: a tall input mixer g_bar plus
/// state/output inflation maps; left inverses are Moore-Penrose.
struct StructuredNoiseKey {
  Eigen::MatrixXd t_bar;  ///< n_t x n, full column rank
  Eigen::MatrixXd g_bar;  ///< m_t x m, full column rank, m_t > m
  Eigen::MatrixXd s_bar;  ///< p_t x p, full column rank
};

StructuredNoiseKey gen_structured_noise_key(SeededRng& rng,
                                            const LtiSystem& sys,
                                            Eigen::Index n_extra,
                                            Eigen::Index m_extra,
                                            Eigen::Index p_extra,
                                            double range = 1e3);

/// Result of masking an input sequence with additive kernel noise.
struct StructuredNoiseEncoding {
  LtiSystem sys_t;                        ///< (T A Tl, T B Gl, S C Tl)
  std::vector<Eigen::VectorXd> u_tilde;   ///< g_bar u_k + b_k
  std::vector<Eigen::VectorXd> noise;     ///< the b_k actually drawn (secret)
};

/// Mask system and inputs; each b_k is drawn uniformly in the kernel of
/// pinv(g_bar) with norm at most noise_scale, so decoding by the left inverse
/// cancels it exactly.
StructuredNoiseEncoding encode_structured_noise(
    const StructuredNoiseKey& key, const LtiSystem& sys,
    const std::vector<Eigen::VectorXd>& u_seq, SeededRng& rng,
    double noise_scale = 1.0);

}  // namespace mpl
