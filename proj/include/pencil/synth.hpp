#pragma once

#include "pencil/construction.hpp"
#include "pencil/rng.hpp"

#include <algorithm>
#include <optional>

namespace pencil {

/// Ground-truth pencil built from explicitly chosen canonical data: the
/// frames are known, so tests can compare recovered parameters exactly.
struct SyntheticPencil {
  HermMatrix t;
  double lambda = 0.0;
  ProjectionPair pair;
  CanonicalSplit split;
  std::optional<GenericForm> gform;
};

/// Draws kernel dimensions, an in-band positive block, a commutant unitary
/// and (at lambda = 1) a free projection, then assembles T = lambda P + Q in
/// a Haar-random frame. Always produces a solvable instance.
inline SyntheticPencil random_pencil(double lambda, int max_dim, Rng& rng, const Tolerances& tol = {}) {
  if (max_dim < 1) throw Error(ErrorCode::InvalidInput, "max_dim must be >= 1");
  const bool is_one = std::abs(lambda - 1.0) <= tol.cluster_tol;

  int d0 = 0, d1 = 0, d_lam = 0, d_top = 0, k = 0, n = 0;
  for (;;) {
    k = rng.uniform_int(0, std::max(0, max_dim / 2));
    d0 = rng.uniform_int(0, 2);
    d1 = rng.uniform_int(0, 2);
    d_lam = is_one ? 0 : rng.uniform_int(0, 2);
    d_top = rng.uniform_int(0, 2);
    n = d0 + d1 + d_lam + d_top + 2 * k;
    if (n < 1 || n > max_dim) continue;
    const bool solvable = is_one ? (d_top + k > 0 || d1 >= 2) : (d_lam + d_top + k > 0 && d1 + d_top + k > 0);
    if (solvable) break;
  }

  const double c = 0.5 * (1.0 + lambda);
  const double lo = band_low(lambda);
  const double hi = band_high(lambda);
  const double margin = 0.1 * (hi - lo);
  RVec b(k);
  for (int i = 0; i < k; ++i) b[i] = lo + margin + (hi - lo - 2 * margin) * rng.uniform();
  std::sort(b.data(), b.data() + k, std::greater<double>());
  if (k >= 2 && rng.uniform() < 0.3) b[1] = b[0];  // exercise repeated eigenvalues of B

  const Mat frame = haar_unitary(n, rng);
  SyntheticPencil out;
  out.lambda = lambda;
  out.split.lambda = lambda;
  out.split.lambda_is_one = is_one;
  out.split.absorb_tol = scaled_cluster_tol(tol, std::max({1.0, std::abs(lambda), std::abs(1.0 + lambda)}));
  int col = 0;
  const int widths[5] = {d0, d1, d_lam, d_top, 2 * k};
  for (int j = 0; j < 5; ++j) {
    out.split.bases[j] = frame.middleCols(col, widths[j]);
    col += widths[j];
  }
  Mat t0 = Mat::Zero(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    t0(i, i) = c + b[i];
    t0(k + i, k + i) = c - b[i];
  }
  out.split.t0 = HermMatrix::symmetrized(t0);

  std::optional<Mat> u;
  if (k > 0) {
    GenericForm g;
    g.lambda = lambda;
    g.center = c;
    g.b = b;
    g.pairing = Mat::Identity(2 * k, 2 * k);
    out.gform = std::move(g);
    if (rng.uniform() < 0.75) u = random_unitary_commuting_with_diag(b, rng, tol);
  }
  std::optional<Mat> e;
  if (is_one && d1 > 0) {
    const int rlo = (d_top + k > 0) ? 0 : 1;
    const int rhi = (d_top + k > 0) ? d1 : d1 - 1;
    e = random_projection_mat(d1, rng.uniform_int(rlo, rhi), rng);
  }
  out.pair = build_pair(out.gform, out.split, u, e, tol);

  Mat t = Mat::Zero(n, n);
  t += out.split.bases[1] * out.split.bases[1].adjoint();
  t += lambda * out.split.bases[2] * out.split.bases[2].adjoint();
  t += (1.0 + lambda) * out.split.bases[3] * out.split.bases[3].adjoint();
  if (k > 0) t += out.split.bases[4] * t0 * out.split.bases[4].adjoint();
  out.t = HermMatrix::symmetrized(t);
  return out;
}

/// Lambda values exercised by randomized harnesses: a fixed sweep covering
/// both signs, both sides of 1, and lambda = 1 itself, plus occasional
/// uniform draws away from the excluded points.
inline double random_pencil_lambda(Rng& rng) {
  static constexpr double pool[] = {3.0, -3.0, 2.0, -2.0, 0.5, -0.5, 1.0, 0.25};
  if (rng.uniform() < 0.8) return pool[rng.uniform_int(0, 7)];
  for (;;) {
    const double l = -4.0 + 8.0 * rng.uniform();
    if (std::abs(l) > 0.05 && std::abs(l + 1.0) > 0.05 && std::abs(l - 1.0) > 0.01) return l;
  }
}

}  // namespace pencil
