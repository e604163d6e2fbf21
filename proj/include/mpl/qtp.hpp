#pragma once

#include "mpl/dense_mpc.hpp"
#include "mpl/lti.hpp"

namespace mpl::qtp {

/// Quadruple-tank process, linearized around the operating point and scaled
/// so outputs are the measured lower-tank levels. States are the four level
/// deviations, inputs the two pump voltages.
///
/// Tank areas (28, 32, 28, 32) cm^2, time constants (63, 91, 39, 56) s, pump
/// gains (3.14, 3.29), valve splits (0.43, 0.34), level sensor gain 0.5.
LtiSystem continuous_model();

/// Sampling interval used throughout: 2 s.
inline constexpr double kSampleTime = 2.0;

/// Zero-order-hold discretization of continuous_model() at kSampleTime.
LtiSystem discrete_model();

/// Stage weights Q = 2 I4, R = I2, terminal weight zero.
CostSpec cost(Eigen::Index horizon);

/// Level bounds +-2, pump bounds +-1.
BoxConstraints box();

/// Decaying input-channel disturbance hitting at step `start`:
/// d_k = amplitude * decay^(k - start) for k >= start, zero before.
std::vector<Eigen::VectorXd> disturbance(Eigen::Index steps,
                                         Eigen::Index start = 200,
                                         double decay = 0.99);

/// Number of closed-loop steps in the reference experiment.
inline constexpr Eigen::Index kSteps = 500;

}  // namespace mpl::qtp
