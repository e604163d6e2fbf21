#include "mpl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "mpl/errors.hpp"

namespace mpl {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXd> svd_of(const Eigen::MatrixXd& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

Eigen::Index rank_from_svd(const Eigen::JacobiSVD<Eigen::MatrixXd>& svd,
                           double rel_tol) {
  if (svd.singularValues().size() == 0) return 0;
  const double cut = rel_tol * svd.singularValues()(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cut) ++r;
  return r;
}

}  // namespace

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return Eigen::MatrixXd(m.cols(), m.rows());
  auto svd = svd_of(m);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * (sv.size() ? sv(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  return rank_from_svd(svd_of(m), rel_tol);
}

Eigen::MatrixXd dlyap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw InvalidArgument("dlyap: A and Q must be square of equal size");
  if (!q.isApprox(q.transpose(), 1e-10))
    throw InvalidArgument("dlyap: Q must be symmetric");
  if (spectral_radius(a) >= 1.0 - tol::kSchur)
    throw Unstable("dlyap: spectral radius of A is not below one");

  // vec(A'YA) = (A' (x) A') vec(Y); solve (I - A' (x) A') vec(Y) = vec(Q).
  const Eigen::MatrixXd at = a.transpose();
  Eigen::MatrixXd k(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      k.block(i * n, j * n, n, n) = at(i, j) * at;
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n * n, n * n) - k;
  Eigen::VectorXd rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = q.col(j);
  Eigen::VectorXd v = lhs.colPivHouseholderQr().solve(rhs);
  Eigen::MatrixXd y(n, n);
  for (Eigen::Index j = 0; j < n; ++j) y.col(j) = v.segment(j * n, n);
  y = 0.5 * (y + y.transpose()).eval();

  const double res = (at * y * a - y + q).norm();
  if (res > tol::kDlyap * std::max(1.0, q.norm()))
    throw Error("dlyap: residual " + std::to_string(res) +
                " exceeds tolerance");
  return y;
}

Realization hankel_realize(const std::vector<Eigen::MatrixXd>& markov,
                           Eigen::Index order_hint) {
  if (order_hint < 1) throw InvalidArgument("hankel_realize: order_hint < 1");
  const Eigen::Index need = 2 * order_hint + 1;
  if (static_cast<Eigen::Index>(markov.size()) < need)
    throw InvalidArgument("hankel_realize: need at least " +
                          std::to_string(need) + " Markov parameters");
  const Eigen::Index p = markov[0].rows();
  const Eigen::Index m = markov[0].cols();
  for (const auto& h : markov)
    if (h.rows() != p || h.cols() != m)
      throw InvalidArgument("hankel_realize: inconsistent parameter shapes");

  const Eigen::Index blocks = order_hint + 1;
  Eigen::MatrixXd hankel(blocks * p, blocks * m);
  for (Eigen::Index i = 0; i < blocks; ++i)
    for (Eigen::Index j = 0; j < blocks; ++j)
      hankel.block(i * p, j * m, p, m) = markov[i + j];

  auto svd = svd_of(hankel);
  const Eigen::Index r = rank_from_svd(svd, tol::kRank);
  if (r != order_hint)
    throw RankMismatch("hankel_realize: Hankel rank " + std::to_string(r) +
                       " != order hint " + std::to_string(order_hint));

  const Eigen::VectorXd sq =
      svd.singularValues().head(r).array().sqrt().matrix();
  Eigen::MatrixXd obs = svd.matrixU().leftCols(r) * sq.asDiagonal();
  Eigen::MatrixXd ctr = sq.asDiagonal() * svd.matrixV().leftCols(r).transpose();

  Realization out;
  out.c = obs.topRows(p);
  out.b = ctr.leftCols(m);
  // Shift-invariance of the balanced observability factor pins A.
  Eigen::MatrixXd upper = obs.topRows((blocks - 1) * p);
  Eigen::MatrixXd lower = obs.bottomRows((blocks - 1) * p);
  out.a = pinv(upper) * lower;

  // Reconstruction check by iterated products.
  Eigen::MatrixXd ak = Eigen::MatrixXd::Identity(r, r);
  double scale = 0.0, err = 0.0;
  for (Eigen::Index k = 0; k < need; ++k) {
    err = std::max(err, (out.c * ak * out.b - markov[k]).norm());
    scale = std::max(scale, markov[k].norm());
    ak = (ak * out.a).eval();
  }
  if (err > tol::kRealize * std::max(1.0, scale))
    throw Error("hankel_realize: reconstruction error " +
                std::to_string(err) + " too large");
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> full_rank_factorize(
    const Eigen::MatrixXd& m, Eigen::Index r) {
  auto svd = svd_of(m);
  const Eigen::Index nr = rank_from_svd(svd, tol::kRank);
  if (nr != r)
    throw RankMismatch("full_rank_factorize: numerical rank " +
                       std::to_string(nr) + " != requested " +
                       std::to_string(r));
  const Eigen::VectorXd sq =
      svd.singularValues().head(r).array().sqrt().matrix();
  Eigen::MatrixXd left = svd.matrixU().leftCols(r) * sq.asDiagonal();
  Eigen::MatrixXd right =
      sq.asDiagonal() * svd.matrixV().leftCols(r).transpose();
  return {left, right};
}

std::pair<Eigen::MatrixXd, double> eq_constrained_lsq(
    const Eigen::MatrixXd& z_mat, const Eigen::MatrixXd& e0) {
  const Eigen::Index n = e0.rows();
  const Eigen::Index k = e0.cols();
  if (z_mat.cols() != k)
    throw InvalidArgument("eq_constrained_lsq: column counts differ");
  if (numerical_rank(e0) != n)
    throw RankMismatch("eq_constrained_lsq: constraint matrix is row "
                       "rank-deficient");

  Eigen::MatrixXd theta = pinv(e0);  // min-norm right inverse
  Eigen::MatrixXd nullb = kernel_basis(e0);
  if (nullb.cols() > 0) {
    Eigen::MatrixXd zn = z_mat * nullb;
    Eigen::MatrixXd w = -pinv(zn) * (z_mat * theta);
    theta += nullb * w;
  }
  return {theta, (z_mat * theta).norm()};
}

double psd_min_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  Eigen::Index r = 0;
  const auto& sv = svd.singularValues();
  if (sv.size() > 0) {
    const double cut = rel_tol * sv(0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut) ++r;
  }
  return svd.matrixV().rightCols(m.cols() - r);
}

Eigen::MatrixXd rand_matrix(SeededRng& rng, Eigen::Index rows,
                            Eigen::Index cols, double lo, double hi,
                            MatrixShape req) {
  constexpr int kMaxDraws = 100;
  for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
    Eigen::MatrixXd m = rng.matrix(rows, cols, lo, hi);
    if (req == MatrixShape::kNone) return m;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1), smax = sv(0);
    if (req == MatrixShape::kInvertible) {
      if (rows != cols)
        throw InvalidArgument("rand_matrix: invertible requires square");
      if (smin > 0 && smax / smin <= 1e6) return m;
    } else {  // kFullColumnRank
      if (rows < cols)
        throw InvalidArgument("rand_matrix: full column rank requires "
                              "rows >= cols");
      if (smin >= 1e-6 * smax && smin > 0) return m;
    }
  }
  throw GenerationFailed("rand_matrix: resampling budget exhausted");
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw InvalidArgument("eigenvalues: matrix must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = es.eigenvalues()(i);
  return out;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  double r = 0.0;
  for (const auto& ev : eigenvalues(m)) r = std::max(r, std::abs(ev));
  return r;
}

std::vector<std::complex<double>> nonzero_spectrum(
    const std::vector<std::complex<double>>& eigs, double abs_tol) {
  std::vector<std::complex<double>> out;
  for (const auto& ev : eigs)
    if (std::abs(ev) > abs_tol) out.push_back(ev);
  return out;
}

double spectrum_distance(std::vector<std::complex<double>> a,
                         std::vector<std::complex<double>> b) {
  if (a.size() != b.size())
    return std::numeric_limits<double>::infinity();
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (n <= 8) {
    // Exact bottleneck assignment over all bijections.
    double best = std::numeric_limits<double>::infinity();
    std::sort(idx.begin(), idx.end());
    do {
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(a[i] - b[idx[i]]));
      best = std::min(best, worst);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
  }
  // Greedy fallback: repeatedly match the closest remaining pair.
  std::vector<bool> used(n, false);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double bestd = std::numeric_limits<double>::infinity();
    std::size_t bestj = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(a[i] - b[j]);
      if (d < bestd) {
        bestd = d;
        bestj = j;
      }
    }
    used[bestj] = true;
    worst = std::max(worst, bestd);
  }
  return worst;
}

}  // namespace mpl
