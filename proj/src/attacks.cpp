#include "mpl/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "mpl/errors.hpp"
#include "mpl/problem_io.hpp"
#include "mpl/tolerances.hpp"

namespace mpl {

namespace {

void sort_spectrum(std::vector<std::complex<double>>& v) {
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

nlohmann::json complex_list_to_json(
    const std::vector<std::complex<double>>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& a, Eigen::Index k) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < k; ++i) out = (out * a).eval();
  return out;
}

// Quadratic-block readback shared by the separate-form attacks: the u-u
// block is a congruence of R, the cross block carries the masked feedback,
// and removing that feedback from the masked A undoes the mixing.
AttackReport quadratic_block_attack(const TransformedProblem& tp,
                                    bool pseudo, const std::string& op) {
  AttackReport rep;
  const Eigen::Index mm = tp.m22.rows();
  Eigen::MatrixXd r_hat = 0.5 * (tp.m22 + tp.m22.transpose());
  Eigen::MatrixXd ftl;  // masked feedback F T^{-1} (or a particular solution)
  if (pseudo) {
    ftl = -pinv(r_hat) * tp.m21;
  } else {
    if (numerical_rank(r_hat) < mm)
      throw AttackFailed(op + ": input-input cost block is singular");
    ftl = -r_hat.fullPivLu().solve(tp.m21);
  }
  Eigen::MatrixXd q_hat = tp.m11 - ftl.transpose() * r_hat * ftl;
  q_hat = 0.5 * (q_hat + q_hat.transpose()).eval();
  Eigen::MatrixXd a_hat = tp.a_t + tp.b_t * ftl;

  rep.a_hat = a_hat;
  rep.b_hat = tp.b_t;
  rep.c_hat = tp.c_t;
  rep.q_hat = q_hat;
  rep.r_hat = r_hat;
  rep.eigenvalues =
      pseudo ? nonzero_spectrum(eigenvalues(a_hat)) : eigenvalues(a_hat);
  sort_spectrum(rep.eigenvalues);
  rep.provenance = {{"a_hat", op},   {"q_hat", op},      {"r_hat", op},
                    {"b_hat", "received"}, {"c_hat", "received"},
                    {"eigenvalues", op}};
  return rep;
}

}  // namespace

WitnessResult uncertainty_witness(const Eigen::MatrixXd& a,
                                  const Eigen::MatrixXd& b,
                                  const Eigen::MatrixXd& q_hat,
                                  const Eigen::MatrixXd& p_hat) {
  WitnessResult res;
  Eigen::MatrixXd z = kernel_basis(b.transpose());
  if (z.cols() == 0) {
    res.kind = WitnessKind::kSingleton;
    res.note = "input matrix has full row rank; no masked direction exists";
    return res;
  }
  Eigen::MatrixXd x = z * z.transpose();
  Eigen::MatrixXd dq = x - a.transpose() * x * a;
  const double qmin = psd_min_eig(q_hat);
  if (qmin <= tol::kPsd) {
    res.kind = WitnessKind::kBoundary;
    res.note = "stage weight estimate is on the cone boundary; "
               "no certified step from this construction";
    return res;
  }
  const double eps = 0.5 * qmin / std::max(dq.norm(), 1e-300);
  UncertaintyWitness w;
  w.x_dir = x;
  w.epsilon = eps;
  w.q_min_eig = psd_min_eig(q_hat + eps * dq);
  w.p_min_eig = psd_min_eig(p_hat + eps * x);
  if (w.q_min_eig < -tol::kPsd || w.p_min_eig < -tol::kPsd) {
    res.kind = WitnessKind::kBoundary;
    res.note = "certified step failed the definiteness re-check";
    return res;
  }
  res.kind = WitnessKind::kWitness;
  res.witness = w;
  return res;
}

nlohmann::json AttackReport::to_json() const {
  nlohmann::json j;
  auto put = [&j](const char* name,
                  const std::optional<Eigen::MatrixXd>& m) {
    if (m) j[name] = matrix_to_json(*m);
  };
  put("a_hat", a_hat);
  put("b_hat", b_hat);
  put("c_hat", c_hat);
  put("q_hat", q_hat);
  put("p_hat", p_hat);
  put("r_hat", r_hat);
  j["eigenvalues"] = complex_list_to_json(eigenvalues);
  j["zeros"] = complex_list_to_json(zeros);
  if (witness) {
    nlohmann::json wj;
    switch (witness->kind) {
      case WitnessKind::kWitness: wj["kind"] = "witness"; break;
      case WitnessKind::kSingleton: wj["kind"] = "singleton"; break;
      case WitnessKind::kBoundary: wj["kind"] = "boundary"; break;
    }
    if (!witness->note.empty()) wj["note"] = witness->note;
    if (witness->witness) {
      wj["x_dir"] = matrix_to_json(witness->witness->x_dir);
      wj["epsilon"] = witness->witness->epsilon;
      wj["q_min_eig"] = witness->witness->q_min_eig;
      wj["p_min_eig"] = witness->witness->p_min_eig;
    }
    j["witness"] = wj;
  }
  if (eps_relax) j["eps_relax"] = *eps_relax;
  if (!provenance.empty()) {
    nlohmann::json pj;
    for (const auto& [k, v] : provenance) pj[k] = v;
    j["provenance"] = pj;
  }
  return j;
}

AttackReport attack_separate(const TransformedProblem& tp) {
  if (tp.variant != SeparateVariant::kPlain &&
      tp.variant != SeparateVariant::kAffine)
    throw InvalidArgument("attack_separate: expects a plain or affine "
                          "masked problem");
  return quadratic_block_attack(tp, /*pseudo=*/false, "attack_separate");
}

AttackReport attack_highdim(const TransformedProblem& tp) {
  if (tp.variant != SeparateVariant::kHighDim &&
      tp.variant != SeparateVariant::kPlain)
    throw InvalidArgument("attack_highdim: expects a dimension-inflated "
                          "masked problem");
  return quadratic_block_attack(tp, /*pseudo=*/true, "attack_highdim");
}

AttackReport attack_poly(const TransformedProblem& tp) {
  if (tp.variant != SeparateVariant::kPoly)
    throw InvalidArgument("attack_poly: expects a polynomially masked "
                          "problem");
  if (!tp.input_poly)
    throw AttackFailed("attack_poly: nonlinear residual is not tagged; "
                       "quadratic blocks cannot be isolated");
  for (const auto& e : tp.input_poly->exponents)
    if (e.sum() < 2)
      throw AttackFailed("attack_poly: residual contains monomials of "
                         "degree below two");
  return quadratic_block_attack(tp, /*pseudo=*/false, "attack_poly");
}

StructuredNoiseFinding attack_structured_noise(
    const LtiSystem& sys_t, const std::vector<Eigen::VectorXd>& u_tilde) {
  StructuredNoiseFinding out;
  const Eigen::MatrixXd& bh = sys_t.b;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      bh, Eigen::ComputeThinU | Eigen::ComputeFullV);
  Eigen::Index rank = 0;
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol::kRank * sv(0)) ++rank;
  out.kernel_dim = bh.cols() - rank;
  out.m_estimate = rank;
  out.row_space_basis = svd.matrixV().leftCols(rank).transpose();
  out.q_times_u.resize(rank, static_cast<Eigen::Index>(u_tilde.size()));
  for (std::size_t k = 0; k < u_tilde.size(); ++k) {
    if (u_tilde[k].size() != bh.cols())
      throw InvalidArgument("attack_structured_noise: input size mismatch");
    out.q_times_u.col(static_cast<Eigen::Index>(k)) =
        out.row_space_basis * u_tilde[k];
  }
  return out;
}

Realization realize_from_G(const Eigen::MatrixXd& g_full, Eigen::Index n_hint,
                           Eigen::Index m, Eigen::Index p) {
  if (n_hint < 1 || m < 1 || p < 1)
    throw InvalidArgument("realize_from_G: dimensions must be positive");
  if (g_full.cols() % m != 0)
    throw InvalidArgument("realize_from_G: column count is not a multiple "
                          "of the input size");
  const Eigen::Index nsteps = g_full.cols() / m;
  Eigen::MatrixXd gm;
  if (g_full.rows() == 2 * nsteps * (m + p)) {
    gm = g_full.middleRows(2 * nsteps * m, nsteps * p);
  } else if (g_full.rows() == nsteps * p) {
    gm = g_full;
  } else {
    throw InvalidArgument("realize_from_G: unrecognized row layout");
  }
  if (nsteps < 2 * n_hint + 1)
    throw AttackFailed("realize_from_G: horizon " + std::to_string(nsteps) +
                       " is too short; need at least " +
                       std::to_string(2 * n_hint + 1));
  std::vector<Eigen::MatrixXd> markov;
  for (Eigen::Index k = 0; k < 2 * n_hint + 1; ++k)
    markov.push_back(gm.block(k * p, 0, p, m));
  return hankel_realize(markov, n_hint);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> recover_cost_pair(
    const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
    const Eigen::MatrixXd& r_hat, const Eigen::MatrixXd& h,
    const Eigen::MatrixXd& f, Eigen::Index horizon) {
  const Eigen::Index n = a.rows(), m = b.cols(), N = horizon;
  // Prediction maps of the estimated pair.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(N * n, N * m);
  Eigen::MatrixXd t(N * n, n);
  std::vector<Eigen::MatrixXd> apow(N + 1);
  apow[0] = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= N; ++k) apow[k] = a * apow[k - 1];
  for (Eigen::Index i = 0; i < N; ++i) {
    t.middleRows(i * n, n) = apow[i + 1];
    for (Eigen::Index j = 0; j <= i; ++j)
      s.block(i * n, j * m, n, m) = apow[i - j] * b;
  }

  Eigen::MatrixXd lhs_h = 0.5 * h;
  for (Eigen::Index i = 0; i < N; ++i)
    lhs_h.block(i * m, i * m, m, m) -= r_hat;
  Eigen::MatrixXd lhs_f = 0.5 * f;

  // Symmetric parameterizations of the stage and terminal weights.
  struct Basis {
    Eigen::Index i, j;
    bool terminal;
  };
  std::vector<Basis> params;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) params.push_back({i, j, false});
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) params.push_back({i, j, true});

  const Eigen::Index rows_h = (N * m) * (N * m);
  const Eigen::Index rows_f = n * (N * m);
  Eigen::MatrixXd sys(rows_h + rows_f,
                      static_cast<Eigen::Index>(params.size()));
  for (std::size_t c = 0; c < params.size(); ++c) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
    e(params[c].i, params[c].j) = 1.0;
    e(params[c].j, params[c].i) = 1.0;
    Eigen::MatrixXd qbar = Eigen::MatrixXd::Zero(N * n, N * n);
    if (params[c].terminal) {
      qbar.bottomRightCorner(n, n) = e;
    } else {
      for (Eigen::Index i = 0; i + 1 < N; ++i)
        qbar.block(i * n, i * n, n, n) = e;
    }
    Eigen::MatrixXd qs = qbar * s;
    Eigen::MatrixXd ch = s.transpose() * qs;
    Eigen::MatrixXd cf = t.transpose() * qs;
    sys.block(0, static_cast<Eigen::Index>(c), rows_h, 1) =
        Eigen::Map<Eigen::VectorXd>(ch.data(), rows_h);
    sys.block(rows_h, static_cast<Eigen::Index>(c), rows_f, 1) =
        Eigen::Map<Eigen::VectorXd>(cf.data(), rows_f);
  }
  Eigen::VectorXd rhs(rows_h + rows_f);
  rhs.head(rows_h) = Eigen::Map<Eigen::VectorXd>(lhs_h.data(), rows_h);
  rhs.tail(rows_f) = Eigen::Map<Eigen::VectorXd>(lhs_f.data(), rows_f);

  Eigen::VectorXd sol = sys.colPivHouseholderQr().solve(rhs);

  auto unpack = [&](bool terminal) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t c = 0; c < params.size(); ++c) {
      if (params[c].terminal != terminal) continue;
      out(params[c].i, params[c].j) = sol(static_cast<Eigen::Index>(c));
      out(params[c].j, params[c].i) = sol(static_cast<Eigen::Index>(c));
    }
    // Project onto the PSD cone (clip negative eigenvalues).
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return Eigen::MatrixXd(es.eigenvectors() * ev.asDiagonal() *
                           es.eigenvectors().transpose());
  };
  return {unpack(false), unpack(true)};
}

AttackReport attack_dense_full(const DenseQp& qp) {
  const Eigen::Index n = qp.n, m = qp.m, p = qp.p, N = qp.horizon;
  if (N <= n)
    throw AttackFailed("attack_dense_full: horizon must exceed the state "
                       "dimension");
  AttackReport rep;
  const Eigen::MatrixXd om = qp.o.bottomRows(N * p);  // stack of C A^k
  Eigen::MatrixXd obs_low = om.topRows(n * p);
  Eigen::MatrixXd obs_shift = om.middleRows(p, n * p);
  if (numerical_rank(obs_low) < n)
    throw AttackFailed("attack_dense_full: free-response block is rank "
                       "deficient; dynamics unobservable");
  Eigen::MatrixXd a_hat = pinv(obs_low) * obs_shift;
  Eigen::MatrixXd ca = om.topRows(p);
  Eigen::MatrixXd c_hat = ca * a_hat.fullPivLu().inverse();

  Eigen::MatrixXd gcol = qp.g.middleRows(2 * N * m, N * p).leftCols(m);
  Eigen::MatrixXd obs_hat(N * p, n);
  Eigen::MatrixXd cak = c_hat;
  for (Eigen::Index k = 0; k < N; ++k) {
    obs_hat.middleRows(k * p, p) = cak;
    cak = (cak * a_hat).eval();
  }
  Eigen::MatrixXd b_hat = pinv(obs_hat) * gcol;

  Eigen::MatrixXd an = matrix_power(a_hat, N);
  Eigen::MatrixXd pb = an.transpose().fullPivLu().solve(qp.f_block(N - 1));
  Eigen::MatrixXd r_hat = qp.h_block(N - 1, N - 1) - b_hat.transpose() * pb;
  r_hat = 0.5 * (r_hat + r_hat.transpose()).eval();

  auto [q_hat, p_hat] = recover_cost_pair(a_hat, b_hat, r_hat, qp.h, qp.f, N);

  rep.a_hat = a_hat;
  rep.b_hat = b_hat;
  rep.c_hat = c_hat;
  rep.q_hat = q_hat;
  rep.p_hat = p_hat;
  rep.r_hat = r_hat;
  rep.eigenvalues = eigenvalues(a_hat);
  sort_spectrum(rep.eigenvalues);
  if (m == p) {
    rep.zeros = transmission_zeros(LtiSystem(a_hat, b_hat, c_hat, true));
    sort_spectrum(rep.zeros);
  }
  rep.witness = uncertainty_witness(a_hat, b_hat, q_hat, p_hat);
  for (const char* k : {"a_hat", "b_hat", "c_hat", "q_hat", "p_hat", "r_hat",
                        "eigenvalues", "zeros", "witness"})
    rep.provenance[k] = "attack_dense_full";
  return rep;
}

AttackReport attack_dense_multi(const DataLog& log, const Eigen::MatrixXd& h,
                                const Eigen::MatrixXd& g, Eigen::Index n_hint,
                                Eigen::Index m, Eigen::Index p) {
  const Eigen::Index inst = log.f_tilde.cols();
  const Eigen::Index N = g.cols() / m;
  if (inst < n_hint + 1)
    throw AttackFailed("attack_dense_multi: need at least n + 1 instances");
  if (log.e_tilde.rows() != 2 * N * (m + p) || log.e_tilde.cols() != inst)
    throw InvalidArgument("attack_dense_multi: right-hand-side log has "
                          "wrong shape");

  Realization real = realize_from_G(g, n_hint, m, p);
  // Free-response stack of the realization: block k is C A^{k+1}.
  Eigen::MatrixXd obs(N * p, n_hint);
  Eigen::MatrixXd cak = real.c;
  for (Eigen::Index k = 0; k < N; ++k) {
    cak = (cak * real.a).eval();
    obs.middleRows(k * p, p) = cak;
  }

  // Output-lower-bound rows carry the free response per instance.
  Eigen::MatrixXd e0 =
      log.e_tilde.middleRows(2 * N * m + N * p, N * p);
  Eigen::MatrixXd e0c = e0.colwise() - e0.rowwise().mean();
  Eigen::MatrixXd x_c = pinv(obs) * e0c;  // states in realization basis
  if (numerical_rank(x_c) < n_hint)
    throw AttackFailed("attack_dense_multi: initial states do not excite "
                       "all state directions");

  Eigen::MatrixXd fc = log.f_tilde.colwise() - log.f_tilde.rowwise().mean();
  Eigen::MatrixXd f_t = (fc * pinv(x_c)).transpose();  // n x Nm

  Eigen::MatrixXd an = matrix_power(real.a, N);
  Eigen::MatrixXd pb =
      an.transpose().fullPivLu().solve(0.5 * f_t.block(0, (N - 1) * m,
                                                       n_hint, m));
  Eigen::MatrixXd r_hat =
      0.5 * h.block((N - 1) * m, (N - 1) * m, m, m) -
      real.b.transpose() * pb;
  r_hat = 0.5 * (r_hat + r_hat.transpose()).eval();

  auto [q_hat, p_hat] =
      recover_cost_pair(real.a, real.b, r_hat, h, f_t, N);

  AttackReport rep;
  rep.a_hat = real.a;
  rep.b_hat = real.b;
  rep.c_hat = real.c;
  rep.q_hat = q_hat;
  rep.p_hat = p_hat;
  rep.r_hat = r_hat;
  rep.eigenvalues = eigenvalues(real.a);
  sort_spectrum(rep.eigenvalues);
  if (m == p) {
    rep.zeros = transmission_zeros(LtiSystem(real.a, real.b, real.c, true));
    sort_spectrum(rep.zeros);
  }
  rep.witness = uncertainty_witness(real.a, real.b, q_hat, p_hat);
  for (const char* k : {"a_hat", "b_hat", "c_hat", "q_hat", "p_hat", "r_hat",
                        "eigenvalues", "zeros", "witness"})
    rep.provenance[k] = "attack_dense_multi";
  return rep;
}

AttackReport attack_hf(const Eigen::MatrixXd& h, const Eigen::MatrixXd& f,
                       Eigen::Index n_hint, Eigen::Index m) {
  const Eigen::Index n = n_hint;
  const Eigen::Index N = h.rows() / m;
  if (f.rows() != n && f.rows() < 1)
    throw InvalidArgument("attack_hf: F row count mismatch");
  if (N < n + 1)
    throw AttackFailed("attack_hf: horizon too short for the shift "
                       "structure");

  auto fblk = [&](Eigen::Index j) {
    return Eigen::MatrixXd(0.5 * f.block(0, j * m, f.rows(), m));
  };
  auto hblk = [&](Eigen::Index i, Eigen::Index j) {
    return Eigen::MatrixXd(0.5 * h.block(i * m, j * m, m, m));
  };

  Eigen::MatrixXd ctrl(f.rows(), n * m);
  Eigen::MatrixXd ctrl_shift(f.rows(), n * m);
  for (Eigen::Index j = 0; j < n; ++j) {
    ctrl.middleCols(j * m, m) = fblk(j);
    ctrl_shift.middleCols(j * m, m) = fblk(j + 1);
  }
  if (numerical_rank(ctrl) < n)
    throw AttackFailed("attack_hf: leading linear-term blocks do not have "
                       "full rank");
  Eigen::MatrixXd a_hat = (ctrl_shift * pinv(ctrl)).transpose();

  Eigen::MatrixXd hrow(m, n * m);
  for (Eigen::Index j = 0; j < n; ++j)
    hrow.middleCols(j * m, m) = hblk(j + 1, 0).transpose();
  Eigen::MatrixXd b_hat = (hrow * pinv(ctrl)).transpose();

  // Infinite-horizon cost-to-go times B from the stacked leading blocks.
  Eigen::MatrixXd stack_lhs(n * (n + 1), n);
  Eigen::MatrixXd stack_rhs(n * (n + 1), m);
  Eigen::MatrixXd atk = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 0; k < n + 1; ++k) {
    atk = (atk * a_hat.transpose()).eval();
    stack_lhs.middleRows(k * n, n) = atk;
    stack_rhs.middleRows(k * n, n) = fblk(k);
  }
  Eigen::MatrixXd yb = pinv(stack_lhs) * stack_rhs;
  Eigen::MatrixXd r_hat = hblk(0, 0) - b_hat.transpose() * yb;
  r_hat = 0.5 * (r_hat + r_hat.transpose()).eval();

  AttackReport rep;
  rep.a_hat = a_hat;
  rep.b_hat = b_hat;
  rep.r_hat = r_hat;
  rep.eigenvalues = eigenvalues(a_hat);
  sort_spectrum(rep.eigenvalues);
  for (const char* k : {"a_hat", "b_hat", "r_hat", "eigenvalues"})
    rep.provenance[k] = "attack_hf";
  return rep;
}

AttackReport attack_hx0f(const Eigen::MatrixXd& h,
                         const Eigen::MatrixXd& x0tf_rows,
                         Eigen::Index n_hint, Eigen::Index m) {
  const Eigen::Index n = n_hint;
  const Eigen::Index N = h.rows() / m;
  if (x0tf_rows.cols() != h.rows())
    throw InvalidArgument("attack_hx0f: row width must match H");
  if (N < n + 1)
    throw AttackFailed("attack_hx0f: horizon too short");

  Eigen::MatrixXd d = 0.5 * x0tf_rows;
  Eigen::MatrixXd dc = d.leftCols(n * m);
  Eigen::MatrixXd ds = d.middleCols(m, n * m);

  Eigen::MatrixXd xb, cb;
  try {
    std::tie(xb, cb) = full_rank_factorize(dc, n);
  } catch (const RankMismatch& e) {
    throw AttackFailed(std::string("attack_hx0f: ") + e.what());
  }
  Eigen::MatrixXd at_sim = pinv(xb) * ds * pinv(cb);  // T^{-1} A' T
  Eigen::MatrixXd a_hat = at_sim.transpose();

  auto hblk = [&](Eigen::Index i, Eigen::Index j) {
    return Eigen::MatrixXd(0.5 * h.block(i * m, j * m, m, m));
  };
  Eigen::MatrixXd hrow_t(m, n * m);   // [H21' H31' ... H_{n+1,1}']
  Eigen::MatrixXd hrow(m, n * m);     // [H21  H31  ... H_{n+1,1} ]
  for (Eigen::Index j = 0; j < n; ++j) {
    hrow_t.middleCols(j * m, m) = hblk(j + 1, 0).transpose();
    hrow.middleCols(j * m, m) = hblk(j + 1, 0);
  }
  Eigen::MatrixXd b_hat = (hrow_t * pinv(cb)).transpose();  // T' B

  Eigen::MatrixXd k(n, n * m);
  Eigen::MatrixXd akb = b_hat;
  for (Eigen::Index j = 0; j < n; ++j) {
    akb = (a_hat * akb).eval();
    k.middleCols(j * m, m) = akb;
  }
  Eigen::MatrixXd w = hrow * pinv(k);  // B' Ybar T^{-'}
  Eigen::MatrixXd r_hat = hblk(0, 0) - w * b_hat;
  r_hat = 0.5 * (r_hat + r_hat.transpose()).eval();

  AttackReport rep;
  rep.a_hat = a_hat;
  rep.b_hat = b_hat;
  rep.r_hat = r_hat;
  rep.eigenvalues = eigenvalues(a_hat);
  sort_spectrum(rep.eigenvalues);
  for (const char* k2 : {"a_hat", "b_hat", "r_hat", "eigenvalues"})
    rep.provenance[k2] = "attack_hx0f";
  return rep;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> recover_dense_key(
    const Eigen::MatrixXd& g_tilde, const Eigen::VectorXd& e_tilde,
    Eigen::Index nm, Eigen::Index m) {
  if (g_tilde.rows() < nm || g_tilde.cols() != nm || e_tilde.size() < nm)
    throw InvalidArgument("recover_dense_key: data too small");
  Eigen::MatrixXd r_hat = g_tilde.topRows(nm);
  const Eigen::Index N = nm / m;
  Eigen::VectorXd e1 = e_tilde.head(nm);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  for (Eigen::Index k = 0; k < N; ++k) mean += e1.segment(k * m, m);
  mean /= static_cast<double>(N);
  Eigen::VectorXd r_vec(nm);
  for (Eigen::Index k = 0; k < N; ++k)
    r_vec.segment(k * m, m) = -(e1.segment(k * m, m) - mean);
  return {r_hat, r_vec};
}

namespace {

struct DiffData {
  Eigen::MatrixXd df0, df1, dz;
};

DiffData instance_differences(const DataLog& log) {
  const Eigen::Index inst = log.f_tilde.cols();
  if (inst < 4)
    throw AttackFailed("instance differences: need at least 4 instances");
  if (log.zeta.cols() != inst)
    throw InvalidArgument("instance differences: optimizer log has wrong "
                          "instance count");
  const Eigen::Index k = inst - 2;
  DiffData d;
  d.df0 = log.f_tilde.rightCols(inst - 1).leftCols(k) -
          log.f_tilde.leftCols(k);
  d.df1 = log.f_tilde.rightCols(inst - 1).rightCols(k) -
          log.f_tilde.middleCols(1, k);
  d.dz = log.zeta.rightCols(inst - 1).leftCols(k) - log.zeta.leftCols(k);
  return d;
}

}  // namespace

AttackReport attack_rrp(const DataLog& log, Eigen::Index n_hint) {
  DiffData d = instance_differences(log);
  Eigen::MatrixXd fb, e0;
  try {
    std::tie(fb, e0) = full_rank_factorize(d.df0, n_hint);
  } catch (const RankMismatch& e) {
    throw AttackFailed(std::string("attack_rrp: linear-term differences do "
                                   "not have the expected rank: ") +
                       e.what());
  }
  Eigen::MatrixXd e1 = pinv(fb) * d.df1;
  Eigen::MatrixXd theta;
  double eps = 0.0;
  try {
    std::tie(theta, eps) = eq_constrained_lsq(d.dz, e0);
  } catch (const RankMismatch& e) {
    throw AttackFailed(std::string("attack_rrp: ") + e.what());
  }
  Eigen::MatrixXd a_hat = e1 * theta;

  AttackReport rep;
  rep.a_hat = a_hat;
  rep.eigenvalues = eigenvalues(a_hat);
  sort_spectrum(rep.eigenvalues);
  rep.eps_relax = eps;
  rep.provenance = {{"a_hat", "attack_rrp"}, {"eigenvalues", "attack_rrp"}};
  return rep;
}

RrpExtended attack_rrp_extended(const DataLog& log, Eigen::Index n_hint) {
  DiffData d = instance_differences(log);
  Eigen::MatrixXd fb, e0;
  try {
    std::tie(fb, e0) = full_rank_factorize(d.df0, n_hint);
  } catch (const RankMismatch& e) {
    throw AttackFailed(std::string("attack_rrp_extended: ") + e.what());
  }
  Eigen::MatrixXd e1 = pinv(fb) * d.df1;
  Eigen::MatrixXd stacked(e0.rows() + d.dz.rows(), e0.cols());
  stacked << e0, d.dz;
  if (numerical_rank(stacked) < stacked.rows())
    throw AttackFailed("attack_rrp_extended: stacked data lacks full row "
                       "rank; not enough excitation");
  Eigen::MatrixXd sol = e1 * pinv(stacked);
  RrpExtended out;
  out.a_hat = sol.leftCols(n_hint);
  out.tbr_hat = sol.rightCols(sol.cols() - n_hint);
  out.residual = (e1 - sol * stacked).norm();
  return out;
}

}  // namespace mpl
