#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "mpl/errors.hpp"
#include "mpl/numerics.hpp"
#include "mpl/rng.hpp"

using namespace mpl;

namespace {

Eigen::MatrixXd stable_matrix(SeededRng& rng, Eigen::Index n, double radius) {
  Eigen::MatrixXd a = rng.matrix(n, n, -1.0, 1.0);
  const double rho = spectral_radius(a);
  if (rho > 0) a *= radius / rho;
  return a;
}

}  // namespace

TEST_CASE("rng is deterministic and forks decorrelate") {
  SeededRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  SeededRng c(42);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.1);
  CHECK(hi > 0.9);

  SeededRng root(7);
  SeededRng f0 = root.fork(0), f1 = root.fork(1);
  CHECK(f0.next_u64() != f1.next_u64());
  // Forking does not disturb the parent stream.
  SeededRng root2(7);
  (void)root2.fork(0);
  SeededRng root3(7);
  CHECK(root2.next_u64() == root3.next_u64());
}

TEST_CASE("pinv inverts invertible matrices and satisfies Penrose identities") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 3, 4;
  Eigen::MatrixXd expect(2, 2);
  expect << -2, 1, 1.5, -0.5;
  CHECK((pinv(m) - expect).norm() <= 1e-12);

  // Column vector: pinv(v) = v' / ||v||^2.
  Eigen::MatrixXd v(2, 1);
  v << 1, 2;
  Eigen::MatrixXd vp = pinv(v);
  CHECK(vp(0, 0) == doctest::Approx(0.2));
  CHECK(vp(0, 1) == doctest::Approx(0.4));

  SeededRng rng(5);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd r = rng.matrix(5, 3, -2.0, 2.0);
    Eigen::MatrixXd rp = pinv(r);
    CHECK((r * rp * r - r).norm() <= 1e-10 * r.norm());
    CHECK((rp * r * rp - rp).norm() <= 1e-10 * rp.norm());
    CHECK((r * rp - (r * rp).transpose()).norm() <= 1e-10);
    CHECK((rp * r - (rp * r).transpose()).norm() <= 1e-10);
  }
}

TEST_CASE("numerical_rank counts directions above the relative cutoff") {
  Eigen::MatrixXd d = Eigen::Vector3d(1.0, 1e-5, 0.0).asDiagonal();
  CHECK(numerical_rank(d) == 2);
  CHECK(numerical_rank(Eigen::MatrixXd::Ones(3, 3)) == 1);
  CHECK(numerical_rank(Eigen::MatrixXd::Zero(2, 4)) == 0);
  CHECK(numerical_rank(Eigen::MatrixXd::Identity(4, 4)) == 4);
}

TEST_CASE("dlyap scalar closed form") {
  Eigen::MatrixXd a(1, 1), q(1, 1);
  a << 0.5;
  q << 1.0;
  // x = a^2 x + q  =>  x = 1 / (1 - 0.25) = 4/3.
  CHECK(dlyap(a, q)(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("dlyap matches the truncated series and rejects unstable inputs") {
  SeededRng rng(11);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd a = stable_matrix(rng, 4, 0.9);
    Eigen::MatrixXd qf = rng.matrix(4, 4, -1.0, 1.0);
    Eigen::MatrixXd q = qf * qf.transpose();
    Eigen::MatrixXd y = dlyap(a, q);
    CHECK((a.transpose() * y * a - y + q).norm() <= 1e-10 * q.norm());

    Eigen::MatrixXd series = Eigen::MatrixXd::Zero(4, 4);
    Eigen::MatrixXd ak = Eigen::MatrixXd::Identity(4, 4);
    for (int k = 0; k < 160; ++k) {
      series += ak.transpose() * q * ak;
      ak = (a * ak).eval();
    }
    CHECK((y - series).norm() <= 1e-8 * std::max(1.0, series.norm()));
  }

  Eigen::MatrixXd a1(1, 1), q1(1, 1);
  a1 << 1.0;
  q1 << 1.0;
  CHECK_THROWS_AS(dlyap(a1, q1), Unstable);
}

TEST_CASE("hankel_realize reproduces Markov parameters and spectrum") {
  Eigen::MatrixXd a(2, 2), b(2, 1), c(1, 2);
  a << 0.5, 0.1, 0.0, 0.4;
  b << 1.0, 0.5;
  c << 1.0, 0.0;
  std::vector<Eigen::MatrixXd> markov;
  Eigen::MatrixXd ak = Eigen::MatrixXd::Identity(2, 2);
  for (int k = 0; k < 7; ++k) {
    markov.push_back(c * ak * b);
    ak = (a * ak).eval();
  }
  Realization real = hankel_realize(markov, 2);
  Eigen::MatrixXd rk = Eigen::MatrixXd::Identity(2, 2);
  for (int k = 0; k < 7; ++k) {
    CHECK((real.c * rk * real.b - markov[static_cast<std::size_t>(k)]).norm()
          <= 1e-8);
    rk = (real.a * rk).eval();
  }
  CHECK(spectrum_distance(eigenvalues(a), eigenvalues(real.a)) <= 1e-6);

  // Asking for a higher order than the data supports is a rank mismatch.
  CHECK_THROWS_AS(hankel_realize(markov, 3), RankMismatch);
}

TEST_CASE("full_rank_factorize splits at the requested rank") {
  SeededRng rng(3);
  Eigen::MatrixXd left = rng.matrix(6, 3, -1.0, 1.0);
  Eigen::MatrixXd right = rng.matrix(3, 5, -1.0, 1.0);
  Eigen::MatrixXd m = left * right;
  auto [l, r] = full_rank_factorize(m, 3);
  CHECK(l.rows() == 6);
  CHECK(l.cols() == 3);
  CHECK(r.rows() == 3);
  CHECK(r.cols() == 5);
  CHECK((l * r - m).norm() <= 1e-10 * m.norm());
  CHECK(numerical_rank(l) == 3);
  CHECK(numerical_rank(r) == 3);
  CHECK_THROWS_AS(full_rank_factorize(m, 2), RankMismatch);
  CHECK_THROWS_AS(full_rank_factorize(m, 4), RankMismatch);
}

TEST_CASE("eq_constrained_lsq frozen cases") {
  // No freedom: e0 square invertible, theta = e0^{-1}.
  Eigen::MatrixXd e0 = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd z(1, 2);
  z << 1, 1;
  auto [theta, eps] = eq_constrained_lsq(z, e0);
  CHECK((theta - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  CHECK(eps == doctest::Approx(std::sqrt(2.0)));

  // One spare column lets the objective reach zero exactly.
  Eigen::MatrixXd e0b(2, 3);
  e0b << 1, 0, 0, 0, 1, 0;
  Eigen::MatrixXd zb(1, 3);
  zb << 0, 0, 1;
  auto [theta_b, eps_b] = eq_constrained_lsq(zb, e0b);
  CHECK((e0b * theta_b - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  CHECK(eps_b <= 1e-12);

  Eigen::MatrixXd rank_def = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(eq_constrained_lsq(zb, rank_def), RankMismatch);
}

TEST_CASE("eq_constrained_lsq minimizes over the constraint set") {
  SeededRng rng(17);
  Eigen::MatrixXd e0 = rng.matrix(3, 10, -1.0, 1.0);
  Eigen::MatrixXd z = rng.matrix(6, 10, -1.0, 1.0);
  auto [theta, eps] = eq_constrained_lsq(z, e0);
  CHECK((e0 * theta - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-10);
  CHECK(eps == doctest::Approx((z * theta).norm()).epsilon(1e-10));
  // Random feasible perturbations never do better.
  Eigen::MatrixXd kb = kernel_basis(e0);
  for (int t = 0; t < 10; ++t) {
    Eigen::MatrixXd other = theta + kb * rng.matrix(kb.cols(), 3, -0.5, 0.5);
    CHECK((z * other).norm() >= eps - 1e-9);
  }
}

TEST_CASE("kernel_basis is orthonormal and annihilated") {
  Eigen::MatrixXd m(1, 3);
  m << 1, 0, 0;
  Eigen::MatrixXd kb = kernel_basis(m);
  CHECK(kb.cols() == 2);
  CHECK((m * kb).norm() <= 1e-12);
  CHECK((kb.transpose() * kb - Eigen::MatrixXd::Identity(2, 2)).norm()
        <= 1e-12);
  CHECK(kernel_basis(Eigen::MatrixXd::Identity(3, 3)).cols() == 0);
}

TEST_CASE("psd_min_eig reads the symmetric part") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 5, -5, 2;  // skew part must not contribute
  CHECK(psd_min_eig(m) == doctest::Approx(1.0));
  CHECK(psd_min_eig(-Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(-1));
}

TEST_CASE("rand_matrix honors shape requirements deterministically") {
  SeededRng rng(23);
  Eigen::MatrixXd inv =
      rand_matrix(rng, 5, 5, -1.0, 1.0, MatrixShape::kInvertible);
  CHECK(numerical_rank(inv) == 5);
  Eigen::MatrixXd tall =
      rand_matrix(rng, 7, 4, -1.0, 1.0, MatrixShape::kFullColumnRank);
  CHECK(numerical_rank(tall) == 4);

  SeededRng r1(9), r2(9);
  CHECK((rand_matrix(r1, 3, 3, -1.0, 1.0, MatrixShape::kInvertible) -
         rand_matrix(r2, 3, 3, -1.0, 1.0, MatrixShape::kInvertible))
            .norm() == 0.0);
}

TEST_CASE("spectrum utilities") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, -1, 0;  // eigenvalues +-i
  auto eigs = eigenvalues(a);
  REQUIRE(eigs.size() == 2);
  CHECK(spectral_radius(a) == doctest::Approx(1.0));

  std::vector<std::complex<double>> s1 = {{1, 0}, {2, 0}};
  std::vector<std::complex<double>> s2 = {{2.1, 0}, {0.9, 0}};
  CHECK(spectrum_distance(s1, s2) == doctest::Approx(0.1));
  std::vector<std::complex<double>> s3 = {{2, 0}, {1, 0}};
  CHECK(spectrum_distance(s1, s3) == doctest::Approx(0.0));
  std::vector<std::complex<double>> s4 = {{1, 0}};
  CHECK(std::isinf(spectrum_distance(s1, s4)));

  std::vector<std::complex<double>> mixed = {{0.5, 0}, {1e-9, 0}, {0, 0}};
  CHECK(nonzero_spectrum(mixed).size() == 1);
}
