#pragma once

#include "pencil/canonical.hpp"

#include <algorithm>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

namespace pencil {

/// Canonical parameters of a pair: U is a unitary in the commutant of B
/// (present when the generic block is nonempty), E is the free projection on
/// the eigenvalue-1 kernel (lambda = 1 only).
struct PairParams {
  std::optional<Mat> u;
  std::optional<Mat> e;
};

struct ProjectionPair {
  double lambda = 0.0;
  HermMatrix p, q;
  PairParams params;
};

namespace detail {

struct GenericCoefficients {
  RVec p11, p22, q11, q22, p12, q12;
};

// Diagonal coefficients of the generic blocks as functions of b. Valid on the
// whole open band, including lambda = 1, where b stays invertible.
inline GenericCoefficients generic_coefficients(double lambda, double c, const RVec& b) {
  const double half = 0.5 * (1.0 - lambda);
  const int k = static_cast<int>(b.size());
  GenericCoefficients f;
  f.p11 = f.p22 = f.q11 = f.q22 = f.p12 = f.q12 = RVec(k);
  for (int i = 0; i < k; ++i) {
    const double bi = b[i];
    f.p11[i] = (bi + c) * (bi - half) / (2.0 * lambda * bi);
    f.p22[i] = -(bi - c) * (bi + half) / (2.0 * lambda * bi);
    f.q11[i] = (bi + c) * (bi + half) / (2.0 * bi);
    f.q22[i] = -(bi - c) * (bi - half) / (2.0 * bi);
    const double rad = std::max(-(bi * bi - c * c) * (bi * bi - half * half), 0.0);
    f.p12[i] = std::sqrt(rad) / (2.0 * lambda * bi);
    f.q12[i] = -lambda * f.p12[i];
  }
  return f;
}

inline Mat assemble_two_by_two(const RVec& d11, const RVec& d22, const RVec& d12, const Mat& u) {
  const int k = static_cast<int>(d11.size());
  Mat off = d12.cast<cplx>().asDiagonal() * u;
  Mat out(2 * k, 2 * k);
  out.topLeftCorner(k, k) = d11.cast<cplx>().asDiagonal();
  out.topRightCorner(k, k) = off;
  out.bottomLeftCorner(k, k) = off.adjoint();
  out.bottomRightCorner(k, k) = d22.cast<cplx>().asDiagonal();
  return out;
}

inline bool empty_opt(const std::optional<Mat>& m) { return !m || m->size() == 0; }

}  // namespace detail

/// Assembles the pair (P, Q) with T = lambda P + Q from the canonical data:
/// forced kernel blocks plus the U-parametrized generic blocks, conjugated
/// back through the pairing isometry and the split bases. U defaults to the
/// identity; E defaults to 0 when that leaves both projections nonzero.
inline ProjectionPair build_pair(const std::optional<GenericForm>& gform, const CanonicalSplit& split,
                                 const std::optional<Mat>& u = std::nullopt,
                                 const std::optional<Mat>& e = std::nullopt, const Tolerances& tol = {}) {
  const double lambda = split.lambda;
  if (std::abs(lambda) <= split.absorb_tol || std::abs(lambda + 1.0) <= split.absorb_tol)
    throw Error(ErrorCode::LambdaExcluded, "no pair construction at lambda in {-1, 0}");

  const int n = split.total_dim();
  const int m = split.generic_dim();
  const int k = m / 2;
  if (m > 0 && (!gform || 2 * gform->k() != m))
    throw Error(ErrorCode::InvalidInput, "generic form missing or inconsistent with the split");

  Mat p_gen, q_gen;
  Mat u_used;
  if (k > 0) {
    u_used = detail::empty_opt(u) ? Mat::Identity(k, k) : *u;
    if (u_used.rows() != k || u_used.cols() != k)
      throw Error(ErrorCode::InvalidInput, "U has wrong dimensions for the generic block");
    const Mat bmat = gform->b_matrix();
    const double unorm = (u_used.adjoint() * u_used - Mat::Identity(k, k)).norm();
    if (unorm > 1e3 * tol.ortho_tol * std::max(1.0, static_cast<double>(k)))
      throw Error(ErrorCode::CommutationViolation, "U is not unitary (residual " + std::to_string(unorm) + ")");
    const double cnorm = (u_used * bmat - bmat * u_used).norm();
    if (cnorm > tol.residual_tol * std::max(1.0, bmat.norm()))
      throw Error(ErrorCode::CommutationViolation,
                  "U does not commute with B (residual " + std::to_string(cnorm) + ")");
    const auto f = detail::generic_coefficients(lambda, gform->center, gform->b);
    const Mat p_frame = detail::assemble_two_by_two(f.p11, f.p22, f.p12, u_used);
    const Mat q_frame = detail::assemble_two_by_two(f.q11, f.q22, f.q12, u_used);
    p_gen = gform->pairing * p_frame * gform->pairing.adjoint();
    q_gen = gform->pairing * q_frame * gform->pairing.adjoint();
  } else if (!detail::empty_opt(u)) {
    throw Error(ErrorCode::InvalidInput, "U given but the generic block is empty");
  }

  const bool is_one = split.lambda_is_one;
  const int d1 = split.d1();
  Mat e_used;
  if (is_one && d1 > 0) {
    if (!detail::empty_opt(e)) {
      if (e->rows() != d1 || e->cols() != d1)
        throw Error(ErrorCode::InvalidInput, "E has wrong dimensions for the eigenvalue-1 kernel");
      e_used = 0.5 * (*e + e->adjoint());
      if ((e_used * e_used - e_used).norm() > tol.residual_tol * std::max(1.0, e_used.norm()))
        throw Error(ErrorCode::InvalidInput, "E is not a projection");
    } else if (split.d_one_plus_lambda() + k > 0) {
      e_used = Mat::Zero(d1, d1);
    } else {
      throw Error(ErrorCode::MissingE,
                  "lambda = 1 with kernel-only content: a projection E with 0 < rank(E) < dim must be supplied");
    }
  } else if (!detail::empty_opt(e)) {
    throw Error(ErrorCode::InvalidInput, "E is only meaningful at lambda = 1 with a nonempty eigenvalue-1 kernel");
  }

  const auto& B = split.bases;
  Mat p = Mat::Zero(n, n);
  Mat q = Mat::Zero(n, n);
  if (is_one) {
    if (d1 > 0) {
      p += B[1] * e_used * B[1].adjoint();
      q += B[1] * (Mat::Identity(d1, d1) - e_used) * B[1].adjoint();
    }
    p += B[3] * B[3].adjoint();
    q += B[3] * B[3].adjoint();
  } else {
    p += B[2] * B[2].adjoint() + B[3] * B[3].adjoint();
    q += B[1] * B[1].adjoint() + B[3] * B[3].adjoint();
  }
  if (k > 0) {
    p += B[4] * p_gen * B[4].adjoint();
    q += B[4] * q_gen * B[4].adjoint();
  }

  ProjectionPair pair;
  pair.lambda = lambda;
  pair.p = HermMatrix::symmetrized(p);
  pair.q = HermMatrix::symmetrized(q);
  if (pair.p.m.norm() <= tol.residual_tol) throw Error(ErrorCode::ZeroProjection, "assembled P vanishes");
  if (pair.q.m.norm() <= tol.residual_tol) throw Error(ErrorCode::ZeroProjection, "assembled Q vanishes");
  const double pi = (pair.p.m * pair.p.m - pair.p.m).norm();
  const double qi = (pair.q.m * pair.q.m - pair.q.m).norm();
  if (pi > tol.residual_tol || qi > tol.residual_tol)
    throw Error(ErrorCode::InternalContradiction,
                "assembled blocks are not idempotent: " + std::to_string(pi) + ", " + std::to_string(qi));
  if (k > 0) pair.params.u = u_used;
  if (is_one && d1 > 0) pair.params.e = e_used;
  return pair;
}

struct VerifyReport {
  double p_idempotency = 0.0;
  double q_idempotency = 0.0;
  double pencil = 0.0;
  double anticommutation = 0.0;
  bool pass = false;
};

/// Residuals of the defining identities. pass covers the idempotency of P, Q
/// and the pencil identity; the anticommutation residual of
/// (T - c I)(PQ - QP) is reported alongside.
inline VerifyReport verify_pair(const HermMatrix& T, const ProjectionPair& pair, const Tolerances& tol = {}) {
  if (T.dim() != pair.p.dim() || T.dim() != pair.q.dim())
    throw Error(ErrorCode::DimensionMismatch, "pair and T have different dimensions");
  const Mat& p = pair.p.m;
  const Mat& q = pair.q.m;
  VerifyReport r;
  r.p_idempotency = (p * p - p).norm();
  r.q_idempotency = (q * q - q).norm();
  r.pencil = (pair.lambda * p + q - T.m).norm();
  const double c = 0.5 * (1.0 + pair.lambda);
  const Mat s = p * q - q * p;
  const Mat shifted = T.m - c * Mat::Identity(T.dim(), T.dim());
  r.anticommutation = (shifted * s + s * shifted).norm();
  r.pass = r.p_idempotency <= tol.residual_tol && r.q_idempotency <= tol.residual_tol &&
           r.pencil <= tol.residual_tol * std::max(1.0, T.m.norm());
  return r;
}

/// Reads the canonical parameters of a pair in the given frames. U comes from
/// the polar factor of the upper-right generic block (sign-adjusted for
/// negative lambda); E is the compression of P to the eigenvalue-1 kernel.
inline PairParams recover_params(const CanonicalSplit& split, const std::optional<GenericForm>& gform,
                                 const ProjectionPair& pair) {
  PairParams out;
  const int k = gform ? gform->k() : 0;
  if (k > 0) {
    const Mat p_gen = split.bases[4].adjoint() * pair.p.m * split.bases[4];
    const Mat frame = gform->pairing.adjoint() * p_gen * gform->pairing;
    const Mat x = frame.topRightCorner(k, k);
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat u = svd.matrixU() * svd.matrixV().adjoint();
    if (split.lambda < 0) u = -u;
    out.u = std::move(u);
  }
  if (split.lambda_is_one && split.d1() > 0) {
    const Mat e = split.bases[1].adjoint() * pair.p.m * split.bases[1];
    out.e = 0.5 * (e + e.adjoint());
  }
  return out;
}

/// Verifies the pair against T, then recovers {U, E}. Rebuilding through
/// build_pair with the same split and generic form reproduces the pair.
inline PairParams canonicalize_pair(const HermMatrix& T, const ProjectionPair& pair, const Tolerances& tol = {}) {
  const VerifyReport v = verify_pair(T, pair, tol);
  if (!v.pass) {
    std::ostringstream os;
    os << "pair fails verification: idempotency " << v.p_idempotency << ", " << v.q_idempotency
       << ", pencil residual " << v.pencil;
    throw Error(ErrorCode::NotAPencilPair, os.str());
  }
  const CanonicalSplit split = canonical_split(T, pair.lambda, tol);
  const GenericFormResult g = generic_form(split, tol);
  if (!g.ok())
    throw Error(ErrorCode::NotAPencilPair, std::string("generic block has no balanced form: ") + to_string(g.reason));
  return recover_params(split, g.form, pair);
}

/// Hermitian H with W = exp(iH), eigenangles on the principal branch (-pi, pi]
/// with the boundary resolved toward +pi.
inline Mat unitary_log_hermitian(const Mat& w) {
  const int n = static_cast<int>(w.rows());
  if (n == 0) return w;
  Eigen::ComplexSchur<Mat> schur(w);
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::EigSolverFailure, "Schur decomposition failed");
  RVec theta(n);
  for (int i = 0; i < n; ++i) {
    double t = std::arg(schur.matrixT()(i, i));
    if (t <= -std::numbers::pi + 1e-12) t += 2.0 * std::numbers::pi;
    theta[i] = t;
  }
  const Mat h = schur.matrixU() * theta.cast<cplx>().asDiagonal() * schur.matrixU().adjoint();
  return 0.5 * (h + h.adjoint());
}

/// exp(i t H) for Hermitian H; exactly unitary by construction.
inline Mat unitary_exp(const Mat& h, double t) {
  const int n = static_cast<int>(h.rows());
  if (n == 0) return h;
  const SpectralData sd = eig_hermitian(HermMatrix::symmetrized(h));
  Mat phases = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) phases(i, i) = std::polar(1.0, t * sd.eigenvalues[i]);
  return sd.vectors * phases * sd.vectors.adjoint();
}

namespace detail {

// Geodesic factor exp(t log(W)) computed blockwise over the eigenvalue
// clusters of diag(b), so the result commutes with diag(b) exactly.
inline Mat commutant_geodesic(const RVec& b, const Mat& w, double t, const Tolerances& tol) {
  const int k = static_cast<int>(b.size());
  Mat out = Mat::Zero(k, k);
  const double gap = scaled_cluster_tol(tol, spectral_scale(b));
  for (const auto& [lo, hi] : cluster_ranges(b, gap)) {
    const int width = hi - lo;
    const Mat h = unitary_log_hermitian(w.block(lo, lo, width, width));
    out.block(lo, lo, width, width) = unitary_exp(h, t);
  }
  return out;
}

// Unitary mapping the range/kernel frame of one projection onto another of
// equal rank.
inline Mat projection_rotation(const Mat& ea, const Mat& eb) {
  const int d = static_cast<int>(ea.rows());
  auto frame = [d](const Mat& e) {
    const SpectralData sd = eig_hermitian(HermMatrix::symmetrized(e));
    Mat f(d, d);
    int pos = 0;
    for (int i = d - 1; i >= 0; --i)  // range vectors (eigenvalue 1) first
      if (sd.eigenvalues[i] > 0.5) f.col(pos++) = sd.vectors.col(i);
    for (int i = d - 1; i >= 0; --i)
      if (sd.eigenvalues[i] <= 0.5) f.col(pos++) = sd.vectors.col(i);
    return f;
  };
  return frame(eb) * frame(ea).adjoint();
}

}  // namespace detail

struct ComponentLabel {
  int rank_e = 0;
  int rank_complement = 0;
};

/// Connected-component label of a lambda = 1 pair: the rank of E and of its
/// complement on the eigenvalue-1 kernel. Pairs connect iff labels agree.
inline ComponentLabel component_label(const HermMatrix& T, const ProjectionPair& pair, const Tolerances& tol = {}) {
  const CanonicalSplit split = canonical_split(T, pair.lambda, tol);
  if (!split.lambda_is_one)
    throw Error(ErrorCode::InvalidInput, "component labels are defined for lambda = 1 pairs");
  if (split.d1() == 0) return {0, 0};
  const PairParams params = canonicalize_pair(T, pair, tol);
  const int r = static_cast<int>(std::lround(params.e->real().trace()));
  return {r, split.d1() - r};
}

struct PairPath {
  double lambda = 0.0;
  int steps = 0;
  std::vector<ProjectionPair> samples;
};

/// Joins two pairs with the same T and lambda by a path inside the solution
/// set: a commutant geodesic in U and, at lambda = 1, a rank-preserving
/// rotation of E. Every sample verifies against T at full tolerance.
inline PairPath connect_pairs(const HermMatrix& T, double lambda, const ProjectionPair& a,
                              const ProjectionPair& b, int steps, const Tolerances& tol = {}) {
  if (steps < 1) throw Error(ErrorCode::InvalidInput, "steps must be >= 1");
  if (std::abs(a.lambda - lambda) > 1e-12 * std::max(1.0, std::abs(lambda)) ||
      std::abs(b.lambda - lambda) > 1e-12 * std::max(1.0, std::abs(lambda)))
    throw Error(ErrorCode::InvalidInput, "pairs carry a different lambda");
  const CanonicalSplit split = canonical_split(T, lambda, tol);
  if (std::abs(lambda) <= split.absorb_tol || std::abs(lambda + 1.0) <= split.absorb_tol)
    throw Error(ErrorCode::LambdaExcluded, "no paths at lambda in {-1, 0}");
  if (!verify_pair(T, a, tol).pass || !verify_pair(T, b, tol).pass)
    throw Error(ErrorCode::NotAPencilPair, "endpoint fails verification against T");
  const GenericFormResult g = generic_form(split, tol);
  if (!g.ok())
    throw Error(ErrorCode::NotAPencilPair, std::string("generic block has no balanced form: ") + to_string(g.reason));
  const PairParams pa = recover_params(split, g.form, a);
  const PairParams pb = recover_params(split, g.form, b);
  const int k = g.form->k();

  Mat e_rotation_log;
  Mat e_a;
  const bool has_e = split.lambda_is_one && split.d1() > 0;
  if (has_e) {
    e_a = *pa.e;
    const int ra = static_cast<int>(std::lround(pa.e->real().trace()));
    const int rb = static_cast<int>(std::lround(pb.e->real().trace()));
    if (ra != rb) {
      std::ostringstream os;
      os << "E-ranks differ: " << ra << " vs " << rb << " (components of the lambda = 1 solution set)";
      throw Error(ErrorCode::DifferentComponents, os.str());
    }
    e_rotation_log = unitary_log_hermitian(detail::projection_rotation(*pa.e, *pb.e));
  }
  Mat w;
  if (k > 0) w = (*pb.u) * pa.u->adjoint();

  PairPath path;
  path.lambda = lambda;
  path.steps = steps;
  path.samples.reserve(steps + 1);
  for (int j = 0; j <= steps; ++j) {
    const double t = static_cast<double>(j) / steps;
    std::optional<Mat> ut;
    if (k > 0) ut = detail::commutant_geodesic(g.form->b, w, t, tol) * (*pa.u);
    std::optional<Mat> et;
    if (has_e) {
      const Mat rot = unitary_exp(e_rotation_log, t);
      et = rot * e_a * rot.adjoint();
    }
    path.samples.push_back(build_pair(g.form, split, ut, et, tol));
  }
  return path;
}

struct WitnessResult {
  std::optional<Mat> witness;
  double residual_p = 0.0;
  double residual_q = 0.0;
  std::string mismatch;
};

namespace detail {

inline std::string spectrum_string(const RVec& eigs, double gap) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [b, e] : cluster_ranges(eigs, gap)) {
    double mean = 0;
    for (int i = b; i < e; ++i) mean += eigs[i];
    mean /= (e - b);
    os << (first ? "" : ", ") << mean << " (x" << (e - b) << ")";
    first = false;
  }
  return os.str();
}

}  // namespace detail

/// Unitary conjugating one pair onto another, which exists exactly when the
/// two pencils have equal spectra with multiplicity. Restricted to
/// lambda outside {-1, 0, 1}.
inline WitnessResult equivalence_witness(double lambda, const ProjectionPair& a, const ProjectionPair& b,
                                         const Tolerances& tol = {}) {
  if (std::abs(lambda) <= tol.cluster_tol || std::abs(lambda + 1.0) <= tol.cluster_tol ||
      std::abs(lambda - 1.0) <= tol.cluster_tol)
    throw Error(ErrorCode::LambdaExcluded, "equivalence witness requires lambda outside {-1, 0, 1}");
  if (std::abs(a.lambda - lambda) > 1e-12 * std::max(1.0, std::abs(lambda)) ||
      std::abs(b.lambda - lambda) > 1e-12 * std::max(1.0, std::abs(lambda)))
    throw Error(ErrorCode::InvalidInput, "pairs carry a different lambda");

  const HermMatrix ta = HermMatrix::symmetrized(lambda * a.p.m + a.q.m);
  const HermMatrix tb = HermMatrix::symmetrized(lambda * b.p.m + b.q.m);
  if (!verify_pair(ta, a, tol).pass || !verify_pair(tb, b, tol).pass)
    throw Error(ErrorCode::NotAPencilPair, "input pair fails verification");

  const SpectralData sda = eig_hermitian(ta, tol);
  const SpectralData sdb = eig_hermitian(tb, tol);
  const double scale = std::max(spectral_scale(sda.eigenvalues), spectral_scale(sdb.eigenvalues));
  const double eff = scaled_cluster_tol(tol, scale);
  WitnessResult out;
  if (ta.dim() != tb.dim() || (sda.eigenvalues - sdb.eigenvalues).cwiseAbs().maxCoeff() > eff) {
    std::ostringstream os;
    os << "spectra differ with multiplicity: A = {" << detail::spectrum_string(sda.eigenvalues, eff) << "}, B = {"
       << detail::spectrum_string(sdb.eigenvalues, eff) << "}";
    out.mismatch = os.str();
    return out;
  }

  const CanonicalSplit sa = canonical_split(ta, sda, lambda, tol);
  const CanonicalSplit sb = canonical_split(tb, sdb, lambda, tol);
  const GenericFormResult ga = generic_form(sa, tol);
  const GenericFormResult gb = generic_form(sb, tol);
  if (!ga.ok() || !gb.ok())
    throw Error(ErrorCode::NotAPencilPair, "generic block has no balanced form");
  const PairParams pa = recover_params(sa, ga.form, a);
  const PairParams pb = recover_params(sb, gb.form, b);

  const int n = static_cast<int>(ta.dim());
  auto frame = [n](const CanonicalSplit& s, const GenericForm& g) {
    Mat f(n, n);
    int col = 0;
    for (int j = 0; j < 4; ++j) {
      f.middleCols(col, s.bases[j].cols()) = s.bases[j];
      col += static_cast<int>(s.bases[j].cols());
    }
    if (s.generic_dim() > 0) f.middleCols(col, s.generic_dim()) = s.bases[4] * g.pairing;
    return f;
  };
  const Mat fa = frame(sa, *ga.form);
  const Mat fb = frame(sb, *gb.form);

  Mat delta = Mat::Identity(n, n);
  const int k = ga.form->k();
  if (k > 0) {
    const int off = sa.d0() + sa.d1() + sa.d_lambda() + sa.d_one_plus_lambda();
    delta.block(off, off, k, k) = (*pb.u) * pa.u->adjoint();
  }
  const Mat v = fb * delta * fa.adjoint();
  out.witness = v;
  out.residual_p = (v * a.p.m * v.adjoint() - b.p.m).norm();
  out.residual_q = (v * a.q.m * v.adjoint() - b.q.m).norm();
  return out;
}

}  // namespace pencil
