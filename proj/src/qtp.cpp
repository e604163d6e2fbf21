#include "mpl/qtp.hpp"

#include <cmath>

namespace mpl::qtp {

namespace {
// Tank cross sections (cm^2), time constants (s), pump gains and valve
// splits of the laboratory four-tank process; level sensor gain 0.5 V/cm.
constexpr double kArea1 = 28.0, kArea2 = 32.0, kArea3 = 28.0, kArea4 = 32.0;
constexpr double kTc1 = 63.0, kTc2 = 91.0, kTc3 = 39.0, kTc4 = 56.0;
constexpr double kPump1 = 3.14, kPump2 = 3.29;
constexpr double kSplit1 = 0.43, kSplit2 = 0.34;
constexpr double kSensor = 0.5;
}  // namespace

LtiSystem continuous_model() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  a(0, 0) = -1.0 / kTc1;
  a(0, 2) = kArea3 / (kArea1 * kTc3);
  a(1, 1) = -1.0 / kTc2;
  a(1, 3) = kArea4 / (kArea2 * kTc4);
  a(2, 2) = -1.0 / kTc3;
  a(3, 3) = -1.0 / kTc4;

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 2);
  b(0, 0) = kSplit1 * kPump1 / kArea1;
  b(1, 1) = kSplit2 * kPump2 / kArea2;
  b(2, 1) = (1.0 - kSplit2) * kPump2 / kArea3;
  b(3, 0) = (1.0 - kSplit1) * kPump1 / kArea4;

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 4);
  c(0, 0) = kSensor;
  c(1, 1) = kSensor;
  return LtiSystem(a, b, c, /*discrete=*/false);
}

LtiSystem discrete_model() {
  return zoh_discretize(continuous_model(), kSampleTime);
}

CostSpec cost(Eigen::Index horizon) {
  return CostSpec(2.0 * Eigen::MatrixXd::Identity(4, 4),
                  Eigen::MatrixXd::Identity(2, 2),
                  Eigen::MatrixXd::Zero(4, 4), horizon);
}

BoxConstraints box() {
  Eigen::VectorXd u_max = Eigen::VectorXd::Constant(2, 1.0);
  Eigen::VectorXd y_max = Eigen::VectorXd::Constant(2, 2.0);
  return BoxConstraints(-u_max, u_max, -y_max, y_max);
}

std::vector<Eigen::VectorXd> disturbance(Eigen::Index steps,
                                         Eigen::Index start, double decay) {
  std::vector<Eigen::VectorXd> d(static_cast<std::size_t>(steps),
                                 Eigen::VectorXd::Zero(2));
  for (Eigen::Index k = start; k < steps; ++k) {
    const double scale = std::pow(decay, static_cast<double>(k - start));
    d[static_cast<std::size_t>(k)] << 3.0 * scale, -3.0 * scale;
  }
  return d;
}

}  // namespace mpl::qtp
