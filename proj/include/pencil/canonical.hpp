#pragma once

#include "pencil/linalg.hpp"

#include <array>
#include <optional>
#include <vector>

namespace pencil {

enum class FeasibilityReason {
  OK,
  BandViolation,
  AsymmetricSpectrum,
  ForcedZeroP,
  ForcedZeroQ,
  LambdaExcluded,
  OddGenericDimension,
};

inline const char* to_string(FeasibilityReason r) {
  switch (r) {
    case FeasibilityReason::OK: return "OK";
    case FeasibilityReason::BandViolation: return "BandViolation";
    case FeasibilityReason::AsymmetricSpectrum: return "AsymmetricSpectrum";
    case FeasibilityReason::ForcedZeroP: return "ForcedZeroP";
    case FeasibilityReason::ForcedZeroQ: return "ForcedZeroQ";
    case FeasibilityReason::LambdaExcluded: return "LambdaExcluded";
    case FeasibilityReason::OddGenericDimension: return "OddGenericDimension";
  }
  return "Unknown";
}

/// Orthonormal bases of the eigenvalue kernels at 0, 1, lambda, 1+lambda and
/// of their orthogonal complement, plus the compression of T to the latter.
/// When lambda coincides with one of the earlier listed values, the matching
/// eigenvectors go to the earliest slot and the later slot stays empty.
struct CanonicalSplit {
  double lambda = 0.0;
  bool lambda_is_one = false;  // the lambda-kernel is merged into the 1-kernel
  double absorb_tol = 0.0;     // effective tolerance used for eigenvalue absorption
  std::array<Mat, 5> bases;
  HermMatrix t0;

  int d0() const { return static_cast<int>(bases[0].cols()); }
  int d1() const { return static_cast<int>(bases[1].cols()); }
  int d_lambda() const { return static_cast<int>(bases[2].cols()); }
  int d_one_plus_lambda() const { return static_cast<int>(bases[3].cols()); }
  int generic_dim() const { return static_cast<int>(bases[4].cols()); }
  int total_dim() const { return static_cast<int>(bases[0].rows()); }
};

inline CanonicalSplit canonical_split(const HermMatrix& T, const SpectralData& sd, double lambda,
                                      const Tolerances& tol = {}) {
  const int n = static_cast<int>(T.dim());
  const double scale = std::max({spectral_scale(sd.eigenvalues), std::abs(lambda), std::abs(1.0 + lambda)});
  const double eff = scaled_cluster_tol(tol, scale);
  const bool is_one = std::abs(lambda - 1.0) <= eff;
  const double targets[4] = {0.0, 1.0, lambda, 1.0 + lambda};

  std::array<std::vector<int>, 5> buckets;
  for (int i = 0; i < n; ++i) {
    int slot = 4;
    for (int j = 0; j < 4; ++j) {
      if (j == 2 && is_one) continue;
      if (std::abs(sd.eigenvalues[i] - targets[j]) <= eff) {
        slot = j;
        break;
      }
    }
    buckets[slot].push_back(i);
  }

  CanonicalSplit out;
  out.lambda = lambda;
  out.lambda_is_one = is_one;
  out.absorb_tol = eff;
  for (int j = 0; j < 5; ++j) {
    Mat b(n, static_cast<int>(buckets[j].size()));
    for (int c = 0; c < static_cast<int>(buckets[j].size()); ++c) b.col(c) = sd.vectors.col(buckets[j][c]);
    out.bases[j] = std::move(b);
  }
  const Mat& gen = out.bases[4];
  out.t0 = HermMatrix::symmetrized(gen.adjoint() * T.m * gen);
  return out;
}

inline CanonicalSplit canonical_split(const HermMatrix& T, double lambda, const Tolerances& tol = {}) {
  return canonical_split(T, eig_hermitian(T, tol), lambda, tol);
}

inline double band_low(double lambda) { return 0.5 * std::abs(1.0 - std::abs(lambda)); }
inline double band_high(double lambda) { return 0.5 * (1.0 + std::abs(lambda)); }

/// Balanced form of the generic block: a unitary W with
/// W* (T0 - c I) W = diag(b) (+) -diag(b), b positive and strictly inside the
/// open band (band_low, band_high). b is stored descending.
struct GenericForm {
  double lambda = 0.0;
  double center = 0.0;
  RVec b;
  Mat pairing;

  int k() const { return static_cast<int>(b.size()); }
  Mat b_matrix() const {
    Mat out = Mat::Zero(k(), k());
    out.diagonal() = b.cast<cplx>();
    return out;
  }
};

struct GenericFormResult {
  std::optional<GenericForm> form;
  FeasibilityReason reason = FeasibilityReason::OK;

  bool ok() const { return reason == FeasibilityReason::OK; }
};

/// Computes the balanced form of the generic block, or reports why none
/// exists. An empty generic block succeeds trivially with k = 0.
inline GenericFormResult generic_form(const CanonicalSplit& split, const Tolerances& tol = {}) {
  const double lambda = split.lambda;
  if (std::abs(lambda) <= split.absorb_tol || std::abs(lambda + 1.0) <= split.absorb_tol)
    return {std::nullopt, FeasibilityReason::LambdaExcluded};

  const double c = 0.5 * (1.0 + lambda);
  const int m = split.generic_dim();
  GenericForm g;
  g.lambda = lambda;
  g.center = c;
  if (m == 0) {
    g.b = RVec(0);
    g.pairing = Mat(0, 0);
    return {g, FeasibilityReason::OK};
  }

  const HermMatrix shifted = HermMatrix::symmetrized(split.t0.m - c * Mat::Identity(m, m));
  const SpectralData sd = eig_hermitian(shifted, tol);
  const double eff = scaled_cluster_tol(tol, std::max(spectral_scale(sd.eigenvalues), std::abs(lambda)));
  const double lo = band_low(lambda);
  const double hi = band_high(lambda);
  for (int i = 0; i < m; ++i) {
    const double mag = std::abs(sd.eigenvalues[i]);
    if (mag <= lo + eff || mag >= hi - eff) return {std::nullopt, FeasibilityReason::BandViolation};
  }
  if (m % 2 != 0) return {std::nullopt, FeasibilityReason::OddGenericDimension};

  const int k = m / 2;
  std::vector<int> pos, neg;  // eigenvalues are nonzero: the band excludes 0
  for (int i = 0; i < m; ++i) (sd.eigenvalues[i] > 0 ? pos : neg).push_back(i);
  if (static_cast<int>(pos.size()) != k) return {std::nullopt, FeasibilityReason::AsymmetricSpectrum};
  std::reverse(pos.begin(), pos.end());  // descending values; negatives stay ascending
  for (int j = 0; j < k; ++j) {
    if (std::abs(sd.eigenvalues[pos[j]] + sd.eigenvalues[neg[j]]) > 2.0 * eff)
      return {std::nullopt, FeasibilityReason::AsymmetricSpectrum};
  }

  g.b = RVec(k);
  Mat w = Mat::Zero(m, m);
  for (int j = 0; j < k; ++j) {
    g.b[j] = sd.eigenvalues[pos[j]];
    w.col(j) = sd.vectors.col(pos[j]);
    w.col(k + j) = sd.vectors.col(neg[j]);
  }
  g.pairing = std::move(w);
  return {g, FeasibilityReason::OK};
}

}  // namespace pencil
