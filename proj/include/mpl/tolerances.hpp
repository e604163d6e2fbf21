#pragma once

namespace mpl::tol {

// Central numeric tolerances. Every module reads from here so that a tolerance
// change is a one-line diff; tests pin these values on purpose.

/// Relative singular-value cutoff for pseudo-inverses.
inline constexpr double kPinv = 1e-12;

/// Relative singular-value cutoff for numerical rank decisions.
inline constexpr double kRank = 1e-10;

/// Positive-(semi)definiteness slack on minimum eigenvalues.
inline constexpr double kPsd = 1e-10;

/// Relative residual bound for the discrete Lyapunov solver.
inline constexpr double kDlyap = 1e-10;

/// Primal feasibility slack accepted from the QP solver.
inline constexpr double kQpFeas = 1e-8;

/// Stationarity residual bound for a returned QP solution.
inline constexpr double kQpStat = 1e-6;

/// |beta| below this in a generalized eigenproblem counts as an infinite zero.
inline constexpr double kPencilInf = 1e-12;

/// Absolute threshold separating "zero" from "nonzero" reported eigenvalues.
inline constexpr double kEigZero = 1e-6;

/// Relative Markov-parameter reconstruction bound for realizations.
inline constexpr double kRealize = 1e-8;

/// Spectral-radius margin below one that counts as Schur stable.
inline constexpr double kSchur = 1e-9;

}  // namespace mpl::tol
