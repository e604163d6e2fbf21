#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mpl/errors.hpp"
#include "mpl/lti.hpp"
#include "mpl/qtp.hpp"

using namespace mpl;

TEST_CASE("model validation rejects inconsistent dimensions") {
  Eigen::MatrixXd a2 = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd b2 = Eigen::MatrixXd::Ones(2, 1);
  Eigen::MatrixXd c2 = Eigen::MatrixXd::Ones(1, 2);
  CHECK_NOTHROW(LtiSystem(a2, b2, c2, true));
  CHECK_THROWS_AS(LtiSystem(Eigen::MatrixXd::Ones(2, 3), b2, c2, true),
                  InvalidModel);
  CHECK_THROWS_AS(LtiSystem(a2, Eigen::MatrixXd::Ones(3, 1), c2, true),
                  InvalidModel);
  CHECK_THROWS_AS(LtiSystem(a2, b2, Eigen::MatrixXd::Ones(1, 3), true),
                  InvalidModel);
}

TEST_CASE("cost validation enforces symmetry and definiteness") {
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2, 2);
  CHECK_NOTHROW(CostSpec(q, r, p, 5));
  CHECK_THROWS_AS(CostSpec(q, Eigen::MatrixXd::Zero(1, 1), p, 5), InvalidModel);
  CHECK_THROWS_AS(CostSpec(-q, r, p, 5), InvalidModel);
  CHECK_THROWS_AS(CostSpec(q, r, p, 0), InvalidModel);
  Eigen::MatrixXd skew(2, 2);
  skew << 1, 1, -1, 1;
  CHECK_THROWS_AS(CostSpec(skew, r, p, 5), InvalidModel);
}

TEST_CASE("box validation requires lower < upper") {
  Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  CHECK_NOTHROW(BoxConstraints(-one, one, -2 * one, 2 * one));
  CHECK_THROWS_AS(BoxConstraints(one, -one, -2 * one, 2 * one), InvalidModel);
}

TEST_CASE("zero-order hold on the scalar lag dx = -x + u") {
  Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1);
  a << -1;
  b << 1;
  c << 1;
  LtiSystem sysc(a, b, c, false);
  LtiSystem sysd = zoh_discretize(sysc, std::log(2.0));
  // A_d = e^{-ts} = 1/2, B_d = 1 - e^{-ts} = 1/2.
  CHECK(sysd.a(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sysd.b(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sysd.c(0, 0) == 1.0);
  CHECK(sysd.discrete);
  CHECK_THROWS_AS(zoh_discretize(sysd, 1.0), Unsupported);
}

TEST_CASE("zero-order hold on the double integrator is exact") {
  Eigen::MatrixXd a(2, 2), b(2, 1), c(1, 2);
  a << 0, 1, 0, 0;
  b << 0, 1;
  c << 1, 0;
  const double h = 0.7;
  LtiSystem sysd = zoh_discretize(LtiSystem(a, b, c, false), h);
  Eigen::MatrixXd ad(2, 2), bd(2, 1);
  ad << 1, h, 0, 1;
  bd << h * h / 2, h;
  CHECK((sysd.a - ad).norm() <= 1e-12);
  CHECK((sysd.b - bd).norm() <= 1e-12);
}

TEST_CASE("structural ranks flag uncontrollable and unobservable pairs") {
  Eigen::MatrixXd a(2, 2), b(2, 1), c(1, 2);
  a << 0.5, 0, 0, 0.4;
  b << 1, 0;  // second state unreachable
  c << 0, 1;  // first state unseen
  auto [ctrb, obsv] = structural_ranks(LtiSystem(a, b, c, true));
  CHECK(ctrb == 1);
  CHECK(obsv == 1);

  b << 1, 1;
  c << 1, 1;
  auto [ctrb2, obsv2] = structural_ranks(LtiSystem(a, b, c, true));
  CHECK(ctrb2 == 2);
  CHECK(obsv2 == 2);
}

TEST_CASE("markov parameters match direct powers") {
  Eigen::MatrixXd a(2, 2), b(2, 1), c(1, 2);
  a << 0.5, 0.1, 0.2, 0.4;
  b << 1, -1;
  c << 2, 1;
  LtiSystem sys(a, b, c, true);
  auto h = markov_parameters(sys, 4);
  REQUIRE(h.size() == 4);
  CHECK(h[0](0, 0) == doctest::Approx((c * b)(0, 0)));
  CHECK(h[1](0, 0) == doctest::Approx((c * a * b)(0, 0)));
  CHECK(h[2](0, 0) == doctest::Approx((c * a * a * b)(0, 0)));
  CHECK(h[3](0, 0) == doctest::Approx((c * a * a * a * b)(0, 0)));
}

TEST_CASE("transmission zeros of a factored scalar transfer function") {
  // (z - 0.5) / ((z - 0.2)(z - 0.3)) in controllable canonical form.
  Eigen::MatrixXd a(2, 2), b(2, 1), c(1, 2);
  a << 0.5, -0.06, 1, 0;
  b << 1, 0;
  c << 1, -0.5;
  auto zeros = transmission_zeros(LtiSystem(a, b, c, true));
  REQUIRE(zeros.size() == 1);
  CHECK(zeros[0].real() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(zeros[0].imag() == doctest::Approx(0.0).scale(1).epsilon(1e-9));

  // A static-gain-like system with no finite zeros.
  Eigen::MatrixXd a1(1, 1), b1(1, 1), c1(1, 1);
  a1 << 0.0;
  b1 << 1.0;
  c1 << 1.0;
  CHECK(transmission_zeros(LtiSystem(a1, b1, c1, true)).empty());

  CHECK_THROWS_AS(transmission_zeros(LtiSystem(a, b, Eigen::MatrixXd::Ones(2, 2), true)),
                  Unsupported);
}

TEST_CASE("step advances the state and reads the output") {
  Eigen::MatrixXd a(1, 1), b(1, 1), c(1, 1);
  a << 0.5;
  b << 2.0;
  c << 3.0;
  LtiSystem sys(a, b, c, true);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1.0);
  Eigen::VectorXd u = Eigen::VectorXd::Constant(1, 0.25);
  auto [xn, y] = step(sys, x, u);
  CHECK(xn(0) == doctest::Approx(1.0));
  CHECK(y(0) == doctest::Approx(3.0));
}

TEST_CASE("four-tank model discretizes to the closed-form spectrum") {
  LtiSystem sysc = qtp::continuous_model();
  CHECK(sysc.n() == 4);
  CHECK(sysc.m() == 2);
  CHECK(sysc.p() == 2);
  CHECK_FALSE(sysc.discrete);

  // The continuous A is upper triangular with diagonal -1/T_i, so the
  // discrete eigenvalues are exactly exp(-ts / T_i).
  LtiSystem sysd = qtp::discrete_model();
  std::vector<double> expect = {
      std::exp(-2.0 / 63.0), std::exp(-2.0 / 91.0), std::exp(-2.0 / 39.0),
      std::exp(-2.0 / 56.0)};
  std::sort(expect.begin(), expect.end());
  auto eigs = eigenvalues(sysd.a);
  std::vector<double> got;
  for (const auto& z : eigs) {
    CHECK(std::abs(z.imag()) <= 1e-12);
    got.push_back(z.real());
  }
  std::sort(got.begin(), got.end());
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-10));

  auto [ctrb, obsv] = structural_ranks(sysd);
  CHECK(ctrb == 4);
  CHECK(obsv == 4);
}

TEST_CASE("four-tank model has two real nonminimum-phase-adjacent zeros") {
  auto zeros = transmission_zeros(qtp::discrete_model());
  REQUIRE(zeros.size() == 2);
  std::vector<double> re;
  for (const auto& z : zeros) {
    CHECK(std::abs(z.imag()) <= 1e-9);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  // One zero inside and one outside the unit circle.
  CHECK(re[0] < 1.0);
  CHECK(re[1] > 1.0);
}

TEST_CASE("disturbance sequence decays geometrically after onset") {
  auto d = qtp::disturbance(210, 200, 0.99);
  REQUIRE(d.size() == 210);
  CHECK(d[199].norm() == 0.0);
  CHECK(d[200](0) == doctest::Approx(3.0));
  CHECK(d[200](1) == doctest::Approx(-3.0));
  CHECK(d[205](0) == doctest::Approx(3.0 * std::pow(0.99, 5)));
  CHECK(d[205](1) == doctest::Approx(-3.0 * std::pow(0.99, 5)));
}
