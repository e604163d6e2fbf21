#include "mpl/dense_mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpl/errors.hpp"
#include "mpl/tolerances.hpp"

namespace mpl {

Eigen::MatrixXd DenseQp::h_block(Eigen::Index i, Eigen::Index j) const {
  return 0.5 * h.block(i * m, j * m, m, m);
}

Eigen::MatrixXd DenseQp::f_block(Eigen::Index j) const {
  return 0.5 * f.block(0, j * m, n, m);
}

DenseQp build_dense(const LtiSystem& sys, const CostSpec& cost,
                    const BoxConstraints& box) {
  if (!sys.discrete)
    throw InvalidArgument("build_dense: system must be discrete");
  const Eigen::Index n = sys.n(), m = sys.m(), p = sys.p();
  const Eigen::Index N = cost.horizon;
  if (cost.q.rows() != n)
    throw InvalidArgument("build_dense: Q size does not match the state");
  if (cost.r.rows() != m)
    throw InvalidArgument("build_dense: R size does not match the input");
  if (box.u_min.size() != m || box.y_min.size() != p)
    throw InvalidArgument("build_dense: constraint sizes do not match");

  // Prediction maps over x_1..x_N: x = S z + T x0.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(N * n, N * m);
  Eigen::MatrixXd t(N * n, n);
  std::vector<Eigen::MatrixXd> apow(N + 1);
  apow[0] = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= N; ++k) apow[k] = sys.a * apow[k - 1];
  for (Eigen::Index i = 0; i < N; ++i) {
    t.middleRows(i * n, n) = apow[i + 1];
    for (Eigen::Index j = 0; j <= i; ++j)
      s.block(i * n, j * m, n, m) = apow[i - j] * sys.b;
  }

  Eigen::MatrixXd qbar = Eigen::MatrixXd::Zero(N * n, N * n);
  for (Eigen::Index i = 0; i + 1 < N; ++i)
    qbar.block(i * n, i * n, n, n) = cost.q;
  qbar.bottomRightCorner(n, n) = cost.p;

  DenseQp qp;
  qp.n = n;
  qp.m = m;
  qp.p = p;
  qp.horizon = N;

  Eigen::MatrixXd qs = qbar * s;
  qp.h = 2.0 * s.transpose() * qs;
  for (Eigen::Index i = 0; i < N; ++i)
    qp.h.block(i * m, i * m, m, m) += 2.0 * cost.r;
  qp.h = (0.5 * (qp.h + qp.h.transpose())).eval();
  qp.f = 2.0 * t.transpose() * qs;
  qp.y = cost.q + t.transpose() * qbar * t;

  qp.gm.resize(N * p, N * m);
  for (Eigen::Index i = 0; i < N; ++i)
    qp.gm.middleRows(i * p, p) = sys.c * s.middleRows(i * n, n);
  qp.om.resize(N * p, n);
  for (Eigen::Index i = 0; i < N; ++i)
    qp.om.middleRows(i * p, p) = sys.c * apow[i + 1];

  const Eigen::Index rows = 2 * N * (m + p);
  qp.g = Eigen::MatrixXd::Zero(rows, N * m);
  qp.g.topRows(N * m).setIdentity();
  qp.g.middleRows(N * m, N * m) = -Eigen::MatrixXd::Identity(N * m, N * m);
  qp.g.middleRows(2 * N * m, N * p) = qp.gm;
  qp.g.bottomRows(N * p) = -qp.gm;

  qp.w.resize(rows);
  qp.o = Eigen::MatrixXd::Zero(rows, n);
  for (Eigen::Index i = 0; i < N; ++i) {
    qp.w.segment(i * m, m) = box.u_max;
    qp.w.segment(N * m + i * m, m) = -box.u_min;
    qp.w.segment(2 * N * m + i * p, p) = box.y_max;
    qp.w.segment(2 * N * m + N * p + i * p, p) = -box.y_min;
  }
  qp.o.middleRows(2 * N * m, N * p) = -qp.om;
  qp.o.bottomRows(N * p) = qp.om;
  return qp;
}

namespace {

struct WorkingSet {
  std::vector<Eigen::Index> idx;  // constraint rows, insertion order
  Eigen::MatrixXd normals;        // n x k, column j = -g_row(idx[j])
};

// KKT re-solve on the final working set with one round of iterative
// refinement; keeps the result only if it does not regress feasibility or
// stationarity.
void polish(const Eigen::MatrixXd& h, const Eigen::VectorXd& q,
            const Eigen::MatrixXd& g, const Eigen::VectorXd& rhs,
            const std::vector<Eigen::Index>& act, Eigen::VectorXd& z,
            Eigen::VectorXd& lambda) {
  const Eigen::Index n = h.rows();
  const Eigen::Index k = static_cast<Eigen::Index>(act.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
  kkt.topLeftCorner(n, n) = h;
  for (Eigen::Index j = 0; j < k; ++j) {
    kkt.block(0, n + j, n, 1) = g.row(act[j]).transpose();
    kkt.block(n + j, 0, 1, n) = g.row(act[j]);
  }
  Eigen::VectorXd b(n + k);
  b.head(n) = -q;
  for (Eigen::Index j = 0; j < k; ++j) b(n + j) = rhs(act[j]);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(kkt);
  Eigen::VectorXd sol = qr.solve(b);
  sol += qr.solve(b - kkt * sol);

  Eigen::VectorXd z_new = sol.head(n);
  Eigen::VectorXd lam_new = Eigen::VectorXd::Zero(g.rows());
  for (Eigen::Index j = 0; j < k; ++j)
    lam_new(act[j]) = std::max(0.0, sol(n + j));

  auto score = [&](const Eigen::VectorXd& zz, const Eigen::VectorXd& ll) {
    const double stat =
        (h * zz + q + g.transpose() * ll).lpNorm<Eigen::Infinity>();
    const double feas =
        g.rows() ? (g * zz - rhs).maxCoeff() : 0.0;
    return std::max(stat, feas);
  };
  if (score(z_new, lam_new) < score(z, lambda)) {
    z = z_new;
    lambda = lam_new;
  }
}

}  // namespace

QpSolution qp_solve_raw(const Eigen::MatrixXd& h, const Eigen::VectorXd& q,
                        const Eigen::MatrixXd& g, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n || q.size() != n)
    throw InvalidArgument("qp_solve: H/q dimension mismatch");
  if (g.rows() != rhs.size() || (g.rows() > 0 && g.cols() != n))
    throw InvalidArgument("qp_solve: G/rhs dimension mismatch");

  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (h + h.transpose()));
  if (llt.info() != Eigen::Success)
    throw InvalidArgument("qp_solve: H is not positive definite");

  // Dual active-set iteration: start at the unconstrained minimizer, add the
  // most violated constraint, take mixed primal/dual steps, drop constraints
  // whose multiplier hits zero (smallest-index tie break).
  Eigen::VectorXd z = llt.solve(-q);
  const Eigen::Index rows = g.rows();
  WorkingSet ws;
  ws.normals.resize(n, 0);
  std::vector<double> u;  // multipliers for ws.idx

  const double zscale = std::max(1.0, z.lpNorm<Eigen::Infinity>());
  auto violation = [&](Eigen::Index i) {
    return g.row(i).dot(z) - rhs(i);
  };
  auto viol_tol = [&](Eigen::Index i) {
    return 1e-10 * (1.0 + std::abs(rhs(i)) +
                    g.row(i).lpNorm<Eigen::Infinity>() * zscale);
  };

  const int max_iter = 200 + 12 * static_cast<int>(rows);
  int iter = 0;
  while (true) {
    if (++iter > max_iter)
      throw Error("qp_solve: iteration limit reached");

    // Most violated constraint outside the working set.
    Eigen::Index p = -1;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (std::find(ws.idx.begin(), ws.idx.end(), i) != ws.idx.end())
        continue;
      const double v = violation(i);
      if (v > viol_tol(i) && v > worst) {
        worst = v;
        p = i;
      }
    }
    if (p < 0) break;  // primal feasible: done

    Eigen::VectorXd cp = -g.row(p).transpose();
    double up = 0.0;  // multiplier accumulating for p
    double sp = -worst;  // signed slack of p, negative while violated

    while (true) {
      if (++iter > max_iter)
        throw Error("qp_solve: iteration limit reached");
      const Eigen::Index k = static_cast<Eigen::Index>(ws.idx.size());
      Eigen::VectorXd hic = llt.solve(cp);
      Eigen::VectorXd r(k);
      Eigen::VectorXd zdir;
      if (k > 0) {
        Eigen::MatrixXd hin = llt.solve(ws.normals);
        Eigen::MatrixXd mred = ws.normals.transpose() * hin;
        r = mred.ldlt().solve(ws.normals.transpose() * hic);
        zdir = hic - hin * r;
      } else {
        zdir = hic;
      }

      // Dual blocking step over active multipliers.
      double t1 = std::numeric_limits<double>::infinity();
      Eigen::Index drop = -1;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (r(j) > 1e-12) {
          const double cand = u[j] / r(j);
          if (cand < t1 - 1e-14 ||
              (cand < t1 + 1e-14 && (drop < 0 || ws.idx[j] < ws.idx[drop]))) {
            t1 = cand;
            drop = j;
          }
        }
      }
      // Full primal step length to make p feasible.
      const double denom = zdir.dot(cp);
      const bool primal_possible = denom > 1e-14 * cp.squaredNorm();
      const double t2 = primal_possible
                            ? -sp / denom
                            : std::numeric_limits<double>::infinity();

      if (!primal_possible && !std::isfinite(t1))
        throw Infeasible("qp_solve: constraints are inconsistent (row " +
                         std::to_string(p) + ")");

      const double tstep = std::min(t1, t2);
      if (primal_possible) {
        z += tstep * zdir;
        sp += tstep * denom;
      }
      for (Eigen::Index j = 0; j < k; ++j) u[j] -= tstep * r(j);
      up += tstep;

      if (tstep == t2 && primal_possible) {
        // p becomes active.
        ws.idx.push_back(p);
        ws.normals.conservativeResize(n, k + 1);
        ws.normals.col(k) = cp;
        u.push_back(up);
        break;
      }
      // Dual step exhausted a blocking constraint: drop it and continue.
      ws.idx.erase(ws.idx.begin() + drop);
      u.erase(u.begin() + drop);
      Eigen::MatrixXd nn(n, k - 1);
      Eigen::Index c = 0;
      for (Eigen::Index j = 0; j < k; ++j)
        if (j != drop) nn.col(c++) = ws.normals.col(j);
      ws.normals = nn;
    }
  }

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(rows);
  for (std::size_t j = 0; j < ws.idx.size(); ++j)
    lambda(ws.idx[j]) = std::max(0.0, u[j]);
  if (rows > 0) polish(h, q, g, rhs, ws.idx, z, lambda);

  QpSolution sol;
  sol.z = z;
  sol.multipliers = lambda;
  for (Eigen::Index i = 0; i < rows; ++i)
    if (lambda(i) > 0.0) sol.active.push_back(i);
  sol.objective = 0.5 * z.dot(h * z) + q.dot(z);
  sol.kkt_residual =
      (h * z + q + (rows ? Eigen::VectorXd(g.transpose() * lambda)
                         : Eigen::VectorXd::Zero(n)))
          .lpNorm<Eigen::Infinity>();
  return sol;
}

QpSolution qp_solve(const DenseQp& qp, const Eigen::VectorXd& x0) {
  if (x0.size() != qp.n)
    throw InvalidArgument("qp_solve: x0 size mismatch");
  return qp_solve_raw(qp.h, qp.f.transpose() * x0, qp.g, qp.w + qp.o * x0);
}

Trajectory closed_loop(const LtiSystem& sys, const CostSpec& cost,
                       const BoxConstraints& box, const Eigen::VectorXd& x0,
                       Eigen::Index steps,
                       const std::vector<Eigen::VectorXd>& disturbance) {
  if (steps < 1) throw InvalidArgument("closed_loop: steps must be >= 1");
  if (x0.size() != sys.n())
    throw InvalidArgument("closed_loop: x0 size mismatch");
  const DenseQp qp = build_dense(sys, cost, box);

  Trajectory traj;
  traj.x.resize(sys.n(), steps);
  traj.u.resize(sys.m(), steps);
  traj.y.resize(sys.p(), steps);
  traj.z.resize(qp.h.rows(), steps);

  Eigen::VectorXd x = x0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    QpSolution sol;
    try {
      sol = qp_solve(qp, x);
    } catch (const Infeasible& e) {
      throw Infeasible("closed_loop: step " + std::to_string(k) + ": " +
                       e.what());
    }
    const Eigen::VectorXd u = sol.z.head(sys.m());
    traj.x.col(k) = x;
    traj.u.col(k) = u;
    traj.y.col(k) = sys.c * x;
    traj.z.col(k) = sol.z;
    Eigen::VectorXd total = u;
    if (k < static_cast<Eigen::Index>(disturbance.size()) &&
        disturbance[k].size() > 0)
      total += disturbance[k];
    x = sys.a * x + sys.b * total;
  }
  return traj;
}

double error_index(const Eigen::MatrixXd& truth,
                   const Eigen::MatrixXd& estimate, double eps_floor) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
    throw InvalidArgument("error_index: shape mismatch");
  return (estimate - truth).norm() / std::max(truth.norm(), eps_floor);
}

double rms_index(const Eigen::MatrixXd& signal) {
  if (signal.cols() == 0) throw InvalidArgument("rms_index: empty signal");
  return signal.norm() / std::sqrt(static_cast<double>(signal.cols()));
}

}  // namespace mpl
