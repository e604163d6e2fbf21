#include "mpl/lti.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "mpl/errors.hpp"
#include "mpl/tolerances.hpp"

namespace mpl {

namespace {

void require_finite(const Eigen::MatrixXd& m, const std::string& name) {
  if (!m.allFinite())
    throw InvalidModel("LtiSystem: " + name + " has non-finite entries");
}

}  // namespace

LtiSystem::LtiSystem(Eigen::MatrixXd a_in, Eigen::MatrixXd b_in,
                     Eigen::MatrixXd c_in, bool discrete_in)
    : a(std::move(a_in)),
      b(std::move(b_in)),
      c(std::move(c_in)),
      discrete(discrete_in) {
  if (a.rows() == 0 || a.rows() != a.cols())
    throw InvalidModel("LtiSystem: A must be square and nonempty");
  if (b.rows() != a.rows() || b.cols() == 0)
    throw InvalidModel("LtiSystem: B must have as many rows as A");
  if (c.cols() != a.rows() || c.rows() == 0)
    throw InvalidModel("LtiSystem: C must have as many columns as A");
  require_finite(a, "A");
  require_finite(b, "B");
  require_finite(c, "C");
}

CostSpec::CostSpec(Eigen::MatrixXd q_in, Eigen::MatrixXd r_in,
                   Eigen::MatrixXd p_in, Eigen::Index horizon_in)
    : q(std::move(q_in)),
      r(std::move(r_in)),
      p(std::move(p_in)),
      horizon(horizon_in) {
  auto check_sym = [](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != m.cols())
      throw InvalidModel(std::string("CostSpec: ") + name + " must be square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() >
        1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw InvalidModel(std::string("CostSpec: ") + name +
                         " must be symmetric");
  };
  check_sym(q, "Q");
  check_sym(r, "R");
  check_sym(p, "P");
  if (p.rows() != q.rows())
    throw InvalidModel("CostSpec: P and Q sizes differ");
  if (psd_min_eig(q) < -tol::kPsd)
    throw InvalidModel("CostSpec: Q must be positive semidefinite");
  if (psd_min_eig(p) < -tol::kPsd)
    throw InvalidModel("CostSpec: P must be positive semidefinite");
  if (psd_min_eig(r) <= tol::kPsd)
    throw InvalidModel("CostSpec: R must be positive definite");
  if (horizon < 1) throw InvalidModel("CostSpec: horizon must be >= 1");
}

BoxConstraints::BoxConstraints(Eigen::VectorXd u_min_in,
                               Eigen::VectorXd u_max_in,
                               Eigen::VectorXd y_min_in,
                               Eigen::VectorXd y_max_in)
    : u_min(std::move(u_min_in)),
      u_max(std::move(u_max_in)),
      y_min(std::move(y_min_in)),
      y_max(std::move(y_max_in)) {
  if (u_min.size() != u_max.size() || y_min.size() != y_max.size())
    throw InvalidModel("BoxConstraints: bound sizes differ");
  if (((u_max - u_min).array() <= 0).any() ||
      ((y_max - y_min).array() <= 0).any())
    throw InvalidModel("BoxConstraints: lower bound must be below upper");
}

LtiSystem zoh_discretize(const LtiSystem& sys, double ts) {
  if (sys.discrete)
    throw Unsupported("zoh_discretize: system is already discrete");
  if (!(ts > 0)) throw InvalidArgument("zoh_discretize: ts must be positive");
  const Eigen::Index n = sys.n(), m = sys.m();
  // exp([[A, B], [0, 0]] ts) = [[Ad, Bd], [0, I]].
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = sys.a * ts;
  aug.topRightCorner(n, m) = sys.b * ts;
  Eigen::MatrixXd e = aug.exp();
  return LtiSystem(e.topLeftCorner(n, n), e.topRightCorner(n, m), sys.c,
                   /*discrete=*/true);
}

std::pair<Eigen::Index, Eigen::Index> structural_ranks(const LtiSystem& sys) {
  const Eigen::Index n = sys.n();
  Eigen::MatrixXd ctrb(n, n * sys.m());
  Eigen::MatrixXd obsv(n * sys.p(), n);
  Eigen::MatrixXd akb = sys.b;
  Eigen::MatrixXd cak = sys.c;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * sys.m(), sys.m()) = akb;
    obsv.middleRows(k * sys.p(), sys.p()) = cak;
    akb = (sys.a * akb).eval();
    cak = (cak * sys.a).eval();
  }
  return {numerical_rank(ctrb), numerical_rank(obsv)};
}

std::vector<Eigen::MatrixXd> markov_parameters(const LtiSystem& sys,
                                               Eigen::Index count) {
  if (count < 0) throw InvalidArgument("markov_parameters: negative count");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(count);
  Eigen::MatrixXd akb = sys.b;
  for (Eigen::Index k = 0; k < count; ++k) {
    out.push_back(sys.c * akb);
    akb = (sys.a * akb).eval();
  }
  return out;
}

std::vector<std::complex<double>> transmission_zeros(const LtiSystem& sys) {
  if (sys.m() != sys.p())
    throw Unsupported("transmission_zeros: system must be square (m == p)");
  const Eigen::Index n = sys.n(), m = sys.m();
  Eigen::MatrixXd pa = Eigen::MatrixXd::Zero(n + m, n + m);
  pa.topLeftCorner(n, n) = sys.a;
  pa.topRightCorner(n, m) = sys.b;
  pa.bottomLeftCorner(m, n) = sys.c;
  Eigen::MatrixXd pb = Eigen::MatrixXd::Zero(n + m, n + m);
  pb.topLeftCorner(n, n).setIdentity();

  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
  ges.compute(pa, pb, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> zeros;
  for (Eigen::Index i = 0; i < ges.betas().size(); ++i) {
    const double beta = ges.betas()(i);
    const std::complex<double> alpha = ges.alphas()(i);
    if (std::abs(beta) < tol::kPencilInf) continue;  // zero at infinity
    const std::complex<double> z = alpha / beta;
    if (std::isfinite(z.real()) && std::isfinite(z.imag())) zeros.push_back(z);
  }
  return zeros;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> step(const LtiSystem& sys,
                                                 const Eigen::VectorXd& x,
                                                 const Eigen::VectorXd& u) {
  if (!sys.discrete) throw Unsupported("step: system must be discrete");
  if (x.size() != sys.n() || u.size() != sys.m())
    throw InvalidArgument("step: state or input size mismatch");
  return {sys.a * x + sys.b * u, sys.c * x};
}

}  // namespace mpl
