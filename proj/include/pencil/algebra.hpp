#pragma once

#include "pencil/construction.hpp"
#include "pencil/feasibility.hpp"

#include <cstdint>
#include <vector>

namespace pencil {

/// Orthonormal (trace inner product) basis of a *-closed unital subspace.
struct AlgebraBasis {
  int ambient_dim = 0;
  std::vector<Mat> basis;

  int dim() const { return static_cast<int>(basis.size()); }
};

/// Basis of {X : XG = GX for every generator G and G*}. The joint kernel of
/// the maps X -> GX - XG is read from an SVD of the stacked vectorized
/// constraints; singular values below rank_threshold times the largest one
/// count as zero.
inline AlgebraBasis commutant(const std::vector<Mat>& generators, double rank_threshold = 1e-8) {
  if (generators.empty()) throw Error(ErrorCode::InvalidInput, "commutant needs at least one generator");
  const int n = static_cast<int>(generators.front().rows());
  for (const Mat& g : generators)
    if (g.rows() != n || g.cols() != n)
      throw Error(ErrorCode::DimensionMismatch, "generators must be square matrices of equal dimension");

  const int nn = n * n;
  double gen_scale = 0.0;
  std::vector<Mat> all;
  all.reserve(2 * generators.size());
  for (const Mat& g : generators) {
    gen_scale = std::max(gen_scale, g.norm());
    all.push_back(g);
    if ((g - g.adjoint()).norm() > 1e-14 * std::max(1.0, g.norm())) all.push_back(g.adjoint());
  }

  Mat stacked = Mat::Zero(static_cast<int>(all.size()) * nn, nn);
  int row0 = 0;
  for (const Mat& g : all) {
    // column-major vec: vec(GX - XG) = (I (x) G - G^T (x) I) vec(X)
    for (int bj = 0; bj < n; ++bj) {
      stacked.block(row0 + bj * n, bj * n, n, n) = g;
      for (int bi = 0; bi < n; ++bi)
        stacked.block(row0 + bj * n, bi * n, n, n).diagonal().array() -= g(bi, bj);
    }
    row0 += nn;
  }

  Eigen::JacobiSVD<Mat> svd(stacked, Eigen::ComputeThinV);
  const RVec& sv = svd.singularValues();  // descending
  // the floor at the generator scale keeps all-commuting generator sets
  // (constraint operator ~ 0) from dropping genuine null directions
  const double cutoff = rank_threshold * std::max(sv[0], gen_scale);
  AlgebraBasis out;
  out.ambient_dim = n;
  for (int i = 0; i < nn; ++i) {
    if (sv[i] > cutoff) continue;
    Mat x(n, n);
    for (int c = 0; c < n; ++c) x.col(c) = svd.matrixV().col(i).segment(c * n, n);
    out.basis.push_back(std::move(x));
  }
  return out;
}

/// Double commutant: the unital *-algebra generated by the input matrices.
inline AlgebraBasis generated_algebra(const std::vector<Mat>& generators, double rank_threshold = 1e-8) {
  return commutant(commutant(generators, rank_threshold).basis, rank_threshold);
}

struct StructureReport {
  int measured_commutant_dim = 0;
  int predicted_commutant_dim = 0;
  int measured_algebra_dim = 0;
  int predicted_algebra_dim = 0;
  int samples = 0;
  bool ok = false;
};

/// Samples pairs over the parameter family, pools the projections as
/// generators, and compares the measured commutant and generated-algebra
/// dimensions with the closed-form block predictions. A falsifier: equality
/// at a stabilized sample count is the acceptance condition.
inline StructureReport structure_check(const HermMatrix& T, double lambda, int n_samples, std::uint64_t seed,
                                       const Tolerances& tol = {}) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidInput, "n_samples must be >= 1");
  const FeasibilityReport feas = is_pencil_at(T, lambda, tol);
  if (!feas.feasible)
    throw Error(ErrorCode::InvalidInput,
                std::string("T is not a pencil at this lambda: ") + to_string(feas.reason));
  const CanonicalSplit& split = feas.split;
  const std::optional<GenericForm>& g = feas.generic;
  const int k = g ? g->k() : 0;
  const int d0 = split.d0();
  const int d1 = split.d1();
  const int d_lam = split.d_lambda();
  const int d_top = split.d_one_plus_lambda();

  Rng rng(seed);
  std::vector<Mat> pool;
  auto push = [&](const std::optional<Mat>& u, const std::optional<Mat>& e) {
    const ProjectionPair pr = build_pair(g, split, u, e, tol);
    pool.push_back(pr.p.m);
    pool.push_back(pr.q.m);
  };
  auto draw_u = [&]() -> std::optional<Mat> {
    if (k == 0) return std::nullopt;
    return random_unitary_commuting_with_diag(g->b, rng, tol);
  };

  if (split.lambda_is_one && d1 > 0) {
    // E of every rank must appear; otherwise the free factor on the
    // eigenvalue-1 kernel stays invisible to the commutant.
    const int lo = (d_top + k > 0) ? 0 : 1;
    const int hi = (d_top + k > 0) ? d1 : d1 - 1;
    const int per_rank = std::max(1, n_samples / (hi - lo + 1));
    for (int r = lo; r <= hi; ++r)
      for (int j = 0; j < per_rank; ++j) push(draw_u(), random_projection_mat(d1, r, rng));
  } else if (k > 0) {
    for (int j = 0; j < n_samples; ++j) push(draw_u(), std::nullopt);
  } else {
    push(std::nullopt, std::nullopt);  // kernel-only: the pair is forced
  }

  const AlgebraBasis comm = commutant(pool);
  const AlgebraBasis alg = commutant(comm.basis);

  int m = 0;
  int dim_b_commutant = 0;
  if (k > 0) {
    const double gap = scaled_cluster_tol(tol, spectral_scale(g->b));
    for (const auto& [b, e] : cluster_ranges(g->b, gap)) {
      ++m;
      dim_b_commutant += (e - b) * (e - b);
    }
  }
  StructureReport rep;
  rep.samples = static_cast<int>(pool.size()) / 2;
  if (split.lambda_is_one) {
    rep.predicted_commutant_dim = d0 * d0 + (d1 > 0 ? 1 : 0) + d_top * d_top + (k > 0 ? m : 0);
    rep.predicted_algebra_dim = (d0 > 0 ? 1 : 0) + d1 * d1 + (d_top > 0 ? 1 : 0) + (k > 0 ? 4 * dim_b_commutant : 0);
  } else {
    rep.predicted_commutant_dim = d0 * d0 + d1 * d1 + d_lam * d_lam + d_top * d_top + (k > 0 ? m : 0);
    rep.predicted_algebra_dim = (d0 > 0 ? 1 : 0) + (d1 > 0 ? 1 : 0) + (d_lam > 0 ? 1 : 0) + (d_top > 0 ? 1 : 0) +
                                (k > 0 ? 4 * dim_b_commutant : 0);
  }
  rep.measured_commutant_dim = comm.dim();
  rep.measured_algebra_dim = alg.dim();
  rep.ok = rep.measured_commutant_dim == rep.predicted_commutant_dim &&
           rep.measured_algebra_dim == rep.predicted_algebra_dim;
  return rep;
}

}  // namespace pencil
