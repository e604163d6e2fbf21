#include "mpl/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "mpl/errors.hpp"
#include "mpl/numerics.hpp"

namespace mpl {

namespace {

void append_exponents(Eigen::Index vars, Eigen::Index degree,
                      Eigen::Index pos, Eigen::VectorXi& current,
                      Eigen::Index remaining,
                      std::vector<Eigen::VectorXi>& out) {
  if (pos == vars - 1) {
    current(pos) = static_cast<int>(remaining);
    out.push_back(current);
    return;
  }
  for (Eigen::Index e = remaining; e >= 0; --e) {
    current(pos) = static_cast<int>(e);
    append_exponents(vars, degree, pos + 1, current, remaining - e, out);
  }
}

using PolyDict = std::map<std::vector<int>, double>;

std::vector<int> to_key(const Eigen::VectorXi& e) {
  return std::vector<int>(e.data(), e.data() + e.size());
}

// Expand prod_i (sum_j L(i, j) x_j)^{alpha_i} into a monomial dictionary.
PolyDict expand_monomial(const Eigen::VectorXi& alpha,
                         const Eigen::MatrixXd& l) {
  const Eigen::Index vars = l.cols();
  PolyDict poly;
  poly[std::vector<int>(vars, 0)] = 1.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    for (int rep = 0; rep < alpha(i); ++rep) {
      PolyDict next;
      for (const auto& [key, cv] : poly) {
        for (Eigen::Index j = 0; j < vars; ++j) {
          if (l(i, j) == 0.0) continue;
          std::vector<int> nk = key;
          nk[j] += 1;
          next[nk] += cv * l(i, j);
        }
      }
      poly = std::move(next);
    }
  }
  return poly;
}

}  // namespace

std::vector<Eigen::VectorXi> monomial_exponents(Eigen::Index vars,
                                                Eigen::Index degree) {
  if (vars < 1 || degree < 2)
    throw InvalidArgument("monomial_exponents: need vars >= 1, degree >= 2");
  std::vector<Eigen::VectorXi> out;
  for (Eigen::Index d = 2; d <= degree; ++d) {
    Eigen::VectorXi current(vars);
    append_exponents(vars, d, 0, current, d, out);
  }
  return out;
}

Eigen::VectorXd PolyMap::operator()(const Eigen::VectorXd& x) const {
  Eigen::VectorXd mono(static_cast<Eigen::Index>(exponents.size()));
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    double v = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      for (int rep = 0; rep < exponents[j](i); ++rep) v *= x(i);
    mono(static_cast<Eigen::Index>(j)) = v;
  }
  Eigen::VectorXd out = constant;
  if (coeff.size() > 0) out += coeff * mono;
  return out;
}

SeparateKey SeparateKey::identity(Eigen::Index n, Eigen::Index m,
                                  Eigen::Index p) {
  SeparateKey key;
  key.variant = SeparateVariant::kPlain;
  key.t = Eigen::MatrixXd::Identity(n, n);
  key.g = Eigen::MatrixXd::Identity(m, m);
  key.s = Eigen::MatrixXd::Identity(p, p);
  key.f = Eigen::MatrixXd::Zero(m, n);
  return key;
}

bool feedback_preserves_observability(const LtiSystem& sys,
                                      const Eigen::MatrixXd& f,
                                      const Eigen::MatrixXd& g) {
  Eigen::MatrixXd a_cl = sys.a - sys.b * g.inverse() * f;
  LtiSystem masked(a_cl, sys.b, sys.c, sys.discrete);
  return structural_ranks(masked).second == sys.n();
}

SeparateKey gen_separate_key(SeededRng& rng, const LtiSystem& sys,
                             SeparateVariant variant,
                             const KeyGenOptions& opts) {
  const Eigen::Index n = sys.n(), m = sys.m(), p = sys.p();
  const double r = opts.range;
  SeparateKey key;
  key.variant = variant;

  if (variant == SeparateVariant::kHighDim) {
    key.t = rand_matrix(rng, n + opts.n_extra, n, -r, r,
                        MatrixShape::kFullColumnRank);
    key.g = rand_matrix(rng, m + opts.m_extra, m, -r, r,
                        MatrixShape::kFullColumnRank);
    key.s = rand_matrix(rng, p + opts.p_extra, p, -r, r,
                        MatrixShape::kFullColumnRank);
    key.f = rng.matrix(m + opts.m_extra, n, -r, r);
    return key;
  }

  key.t = rand_matrix(rng, n, n, -r, r, MatrixShape::kInvertible);
  key.g = rand_matrix(rng, m, m, -r, r, MatrixShape::kInvertible);
  key.s = rand_matrix(rng, p, p, -r, r, MatrixShape::kInvertible);

  bool found = false;
  for (int attempt = 0; attempt < 100; ++attempt) {
    key.f = rng.matrix(m, n, -r, r);
    if (feedback_preserves_observability(sys, key.f, key.g)) {
      found = true;
      break;
    }
  }
  if (!found)
    throw GenerationFailed(
        "gen_separate_key: could not draw an observability-preserving "
        "feedback block");

  if (variant == SeparateVariant::kAffine) {
    key.r1 = rng.vector(n, -r, r);
    key.r2 = rng.vector(m, -r, r);
    key.r3 = rng.vector(p, -r, r);
  } else if (variant == SeparateVariant::kPoly) {
    key.poly_degree = opts.poly_degree;
    const auto exps = monomial_exponents(n, key.poly_degree);
    key.f1 = rng.matrix(m, static_cast<Eigen::Index>(exps.size()), -r, r);
    key.r2 = rng.vector(m, -r, r);
  }
  return key;
}

double TransformedProblem::stage_cost(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& u) const {
  Eigen::VectorXd ueff = u;
  if (input_poly) ueff += (*input_poly)(x);
  double v = x.dot(m11 * x) + 2.0 * ueff.dot(m21 * x) + ueff.dot(m22 * ueff);
  if (stage_linear.size() > 0) {
    Eigen::VectorXd xu(x.size() + ueff.size());
    xu << x, ueff;
    v += 2.0 * xu.dot(stage_linear) + stage_constant;
  }
  return v;
}

double TransformedProblem::terminal_cost(const Eigen::VectorXd& x) const {
  double v = x.dot(p_t * x);
  if (terminal_linear.size() > 0)
    v += 2.0 * x.dot(terminal_linear) + terminal_constant;
  return v;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> TransformedProblem::step(
    const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  Eigen::VectorXd ueff = u;
  if (input_poly) ueff += (*input_poly)(x);
  Eigen::VectorXd xn = a_t * x + b_t * ueff;
  Eigen::VectorXd y = c_t * x;
  if (state_offset.size() > 0) xn += state_offset;
  if (output_offset.size() > 0) y += output_offset;
  return {xn, y};
}

TransformedProblem apply_separate(const SeparateKey& key, const LtiSystem& sys,
                                  const CostSpec& cost) {
  if (!sys.discrete)
    throw InvalidArgument("apply_separate: system must be discrete");
  const Eigen::Index n = sys.n(), m = sys.m(), p = sys.p();
  if (key.t.cols() != n || key.g.cols() != m || key.s.cols() != p ||
      key.f.cols() != n || key.f.rows() != key.g.rows())
    throw InvalidArgument("apply_separate: key does not fit the system");
  if (cost.q.rows() != n || cost.r.rows() != m)
    throw InvalidArgument("apply_separate: cost does not fit the system");

  TransformedProblem tp;
  tp.variant = key.variant;

  if (key.variant == SeparateVariant::kHighDim) {
    Eigen::MatrixXd tl = pinv(key.t);
    Eigen::MatrixXd gl = pinv(key.g);
    Eigen::MatrixXd ftl = key.f * tl;
    tp.a_t = key.t * (sys.a - sys.b * gl * key.f) * tl;
    tp.b_t = key.t * sys.b * gl;
    tp.c_t = key.s * sys.c * tl;
    tp.m22 = gl.transpose() * cost.r * gl;
    tp.m21 = -tp.m22 * ftl;
    tp.m11 = tl.transpose() * cost.q * tl + ftl.transpose() * tp.m22 * ftl;
    tp.p_t = tl.transpose() * cost.p * tl;
    return tp;
  }

  Eigen::MatrixXd ti = key.t.inverse();
  Eigen::MatrixXd gi = key.g.inverse();
  Eigen::MatrixXd gift = gi * key.f * ti;
  tp.a_t = key.t * (sys.a - sys.b * gi * key.f) * ti;
  tp.b_t = key.t * sys.b * gi;
  tp.c_t = key.s * sys.c * ti;

  // Stage blocks of L' blkdiag(Q, R) L with L = [[Ti, 0], [-Gi F Ti, Gi]].
  tp.m11 = ti.transpose() * cost.q * ti +
           gift.transpose() * cost.r * gift;
  tp.m21 = -gi.transpose() * cost.r * gift;
  tp.m22 = gi.transpose() * cost.r * gi;
  tp.p_t = ti.transpose() * cost.p * ti;

  if (key.variant == SeparateVariant::kAffine) {
    if (key.r1.size() != n || key.r2.size() != m || key.r3.size() != p)
      throw InvalidArgument("apply_separate: affine offsets missing");
    Eigen::VectorXd rx = -ti * key.r1;
    Eigen::VectorXd ru = gi * key.f * ti * key.r1 - gi * key.r2;
    tp.state_offset = key.t * (sys.a * rx + sys.b * ru) + key.r1;
    tp.output_offset = key.s * sys.c * rx + key.r3;
    Eigen::VectorXd mrx = cost.q * rx;
    Eigen::VectorXd mru = cost.r * ru;
    // L' M [rx; ru] split into the x and u coefficient pieces.
    tp.stage_linear.resize(n + m);
    tp.stage_linear.head(n) =
        ti.transpose() * mrx - gift.transpose() * mru;
    tp.stage_linear.tail(m) = gi.transpose() * mru;
    tp.stage_constant = rx.dot(mrx) + ru.dot(mru);
    tp.terminal_linear = ti.transpose() * (cost.p * rx);
    tp.terminal_constant = rx.dot(cost.p * rx);
  } else if (key.variant == SeparateVariant::kPoly) {
    if (key.f1.rows() != m || key.r2.size() != m || key.poly_degree < 2)
      throw InvalidArgument("apply_separate: poly block missing");
    const auto exps = monomial_exponents(n, key.poly_degree);
    if (key.f1.cols() != static_cast<Eigen::Index>(exps.size()))
      throw InvalidArgument("apply_separate: poly coefficient width "
                            "does not match the monomial basis");
    // The transmitted form uses u + psi(x) everywhere, with
    // psi(x) = -r2 - F1 Z(Ti x): compose the basis with Ti and negate.
    std::map<std::vector<int>, Eigen::Index> index_of;
    for (std::size_t j = 0; j < exps.size(); ++j)
      index_of[to_key(exps[j])] = static_cast<Eigen::Index>(j);
    Eigen::MatrixXd coeff = Eigen::MatrixXd::Zero(
        m, static_cast<Eigen::Index>(exps.size()));
    for (std::size_t j = 0; j < exps.size(); ++j) {
      PolyDict expanded = expand_monomial(exps[j], ti);
      for (const auto& [mono, cv] : expanded) {
        auto it = index_of.find(mono);
        if (it == index_of.end())
          throw Error("apply_separate: composed monomial left the basis");
        coeff.col(it->second) -= cv * key.f1.col(static_cast<Eigen::Index>(j));
      }
    }
    PolyMap psi;
    psi.coeff = coeff;
    psi.constant = -key.r2;
    psi.exponents = exps;
    psi.degree = key.poly_degree;
    tp.input_poly = std::move(psi);
  }
  return tp;
}

DenseKey DenseKey::at_instance(Eigen::Index instance) const {
  if (!time_varying) return *this;
  SeededRng child = SeededRng(base_seed).fork(static_cast<std::uint64_t>(instance));
  DenseKey fresh = gen_dense_key(child, r_mat.rows(),
                                 static_cast<Eigen::Index>(perm.size()),
                                 range, perm_random,
                                 /*time_varying=*/false);
  fresh.time_varying = true;
  fresh.base_seed = base_seed;
  return fresh;
}

DenseKey gen_dense_key(SeededRng& rng, Eigen::Index nm, Eigen::Index rows,
                       double range, bool use_perm, bool time_varying) {
  if (time_varying) {
    const std::uint64_t base = rng.next_u64();
    SeededRng child = SeededRng(base).fork(0);
    DenseKey first =
        gen_dense_key(child, nm, rows, range, use_perm, /*time_varying=*/false);
    first.time_varying = true;
    first.base_seed = base;
    return first;
  }
  DenseKey key;
  key.range = range;
  key.perm_random = use_perm;
  key.r_mat = rand_matrix(rng, nm, nm, -range, range, MatrixShape::kInvertible);
  key.r_vec = rng.vector(nm, -range, range);
  key.perm.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) key.perm[i] = i;
  if (use_perm) {
    for (Eigen::Index i = rows - 1; i > 0; --i) {
      const Eigen::Index j =
          static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
      std::swap(key.perm[i], key.perm[j]);
    }
  }
  return key;
}

TransformedDenseQp apply_dense(const DenseKey& key, const DenseQp& qp,
                               const Eigen::VectorXd& x0,
                               Eigen::Index instance) {
  const DenseKey k = key.at_instance(instance);
  if (k.r_mat.rows() != qp.h.rows() ||
      static_cast<Eigen::Index>(k.perm.size()) != qp.g.rows())
    throw InvalidArgument("apply_dense: key does not fit the problem");
  if (x0.size() != qp.n) throw InvalidArgument("apply_dense: x0 size");

  TransformedDenseQp out;
  out.h_t = k.r_mat.transpose() * qp.h * k.r_mat;
  out.h_t = (0.5 * (out.h_t + out.h_t.transpose())).eval();
  out.f_t = k.r_mat.transpose() * (qp.f.transpose() * x0 + qp.h * k.r_vec);
  Eigen::MatrixXd gr = qp.g * k.r_mat;
  Eigen::VectorXd e = qp.w + qp.o * x0 - qp.g * k.r_vec;
  out.g_t.resize(gr.rows(), gr.cols());
  out.e_t.resize(e.size());
  for (Eigen::Index i = 0; i < gr.rows(); ++i) {
    out.g_t.row(i) = gr.row(k.perm[i]);
    out.e_t(i) = e(k.perm[i]);
  }
  return out;
}

StructuredNoiseKey gen_structured_noise_key(SeededRng& rng,
                                            const LtiSystem& sys,
                                            Eigen::Index n_extra,
                                            Eigen::Index m_extra,
                                            Eigen::Index p_extra,
                                            double range) {
  StructuredNoiseKey key;
  key.t_bar = rand_matrix(rng, sys.n() + n_extra, sys.n(), -range, range,
                          MatrixShape::kFullColumnRank);
  key.g_bar = rand_matrix(rng, sys.m() + m_extra, sys.m(), -range, range,
                          MatrixShape::kFullColumnRank);
  key.s_bar = rand_matrix(rng, sys.p() + p_extra, sys.p(), -range, range,
                          MatrixShape::kFullColumnRank);
  return key;
}

StructuredNoiseEncoding encode_structured_noise(
    const StructuredNoiseKey& key, const LtiSystem& sys,
    const std::vector<Eigen::VectorXd>& u_seq, SeededRng& rng,
    double noise_scale) {
  if (key.t_bar.cols() != sys.n() || key.g_bar.cols() != sys.m() ||
      key.s_bar.cols() != sys.p())
    throw InvalidArgument("encode_structured_noise: key does not fit");
  Eigen::MatrixXd tl = pinv(key.t_bar);
  Eigen::MatrixXd gl = pinv(key.g_bar);
  StructuredNoiseEncoding enc{
      LtiSystem(key.t_bar * sys.a * tl, key.t_bar * sys.b * gl,
                key.s_bar * sys.c * tl, sys.discrete),
      {},
      {}};

  // ker(pinv(g_bar)) is the orthogonal complement of im(g_bar).
  Eigen::MatrixXd kb = kernel_basis(gl);
  const Eigen::Index kd = kb.cols();
  for (const auto& u : u_seq) {
    if (u.size() != sys.m())
      throw InvalidArgument("encode_structured_noise: input size mismatch");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(key.g_bar.rows());
    if (kd > 0 && noise_scale > 0) {
      Eigen::VectorXd w(kd);
      for (int attempt = 0; attempt < 100; ++attempt) {
        w = rng.vector(kd, -1.0, 1.0);
        if (w.norm() <= 1.0) break;
      }
      b = kb * (noise_scale * w);
    }
    enc.u_tilde.push_back(key.g_bar * u + b);
    enc.noise.push_back(b);
  }
  return enc;
}

}  // namespace mpl
