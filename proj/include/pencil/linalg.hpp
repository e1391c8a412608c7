#pragma once

#include "pencil/rng.hpp"
#include "pencil/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <utility>
#include <vector>

namespace pencil {

inline double spectral_scale(const RVec& values) {
  if (values.size() == 0) return 1.0;
  return std::max(1.0, values.cwiseAbs().maxCoeff());
}

inline double scaled_cluster_tol(const Tolerances& tol, double scale) {
  return tol.cluster_tol * std::max(1.0, scale);
}

/// Single-linkage grouping of a monotone sequence: a new group starts where
/// consecutive values differ by more than gap. Returns [begin, end) ranges.
inline std::vector<std::pair<int, int>> cluster_ranges(const RVec& sorted_values, double gap) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(sorted_values.size());
  if (n == 0) return out;
  int begin = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || std::abs(sorted_values[i] - sorted_values[i - 1]) > gap) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

/// Hermitian eigendecomposition with deterministic per-column phases: the
/// entry of largest modulus in each eigenvector is made real positive.
inline SpectralData eig_hermitian(const HermMatrix& M, const Tolerances& tol = {}) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(M.m);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver did not converge: dim=" << M.dim() << " fro_norm=" << M.m.norm()
       << " max_abs_entry=" << M.m.cwiseAbs().maxCoeff();
    throw Error(ErrorCode::EigSolverFailure, os.str());
  }
  SpectralData sd{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < sd.vectors.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = std::abs(sd.vectors(0, j));
    for (Eigen::Index i = 1; i < sd.vectors.rows(); ++i) {
      const double a = std::abs(sd.vectors(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best_abs > 0) sd.vectors.col(j) *= std::conj(sd.vectors(best, j)) / best_abs;
  }
  const double mnorm = M.m.norm();
  const double eig_residual = (M.m * sd.vectors - sd.vectors * sd.eigenvalues.asDiagonal().toDenseMatrix().cast<cplx>()).norm();
  const double ortho_residual = (sd.vectors.adjoint() * sd.vectors - Mat::Identity(M.dim(), M.dim())).norm();
  if (eig_residual > tol.eig_tol * std::max(1.0, mnorm) || ortho_residual > tol.ortho_tol * std::max(1.0, static_cast<double>(M.dim()))) {
    std::ostringstream os;
    os << "eigendecomposition residuals out of tolerance: |MV-VD|=" << eig_residual
       << " |V*V-I|=" << ortho_residual << " dim=" << M.dim();
    throw Error(ErrorCode::EigSolverFailure, os.str());
  }
  return sd;
}

struct ProjectionCheck {
  bool ok = false;
  double residual = 0.0;
};

/// Idempotency test: ||M^2 - M||_F <= residual_tol * max(1, ||M||_F).
inline ProjectionCheck is_projection(const HermMatrix& M, const Tolerances& tol = {}) {
  const double residual = (M.m * M.m - M.m).norm();
  return {residual <= tol.residual_tol * std::max(1.0, M.m.norm()), residual};
}

/// Haar factor on each eigenvalue cluster of the diagonal vector, assembled
/// block-diagonally. diag must be monotone.
inline Mat random_unitary_commuting_with_diag(const RVec& diag, Rng& rng, const Tolerances& tol = {}) {
  const int k = static_cast<int>(diag.size());
  Mat u = Mat::Zero(k, k);
  const double gap = scaled_cluster_tol(tol, spectral_scale(diag));
  for (const auto& [b, e] : cluster_ranges(diag, gap)) u.block(b, b, e - b, e - b) = haar_unitary(e - b, rng);
  return u;
}

/// Random unitary in the commutant of B: independent Haar factors on the
/// eigenvalue clusters of B, conjugated back. Deterministic per seed.
inline Mat random_unitary_in_commutant(const HermMatrix& B, std::uint64_t seed, const Tolerances& tol = {}) {
  const SpectralData sd = eig_hermitian(B, tol);
  Rng rng(seed);
  const Mat core = random_unitary_commuting_with_diag(sd.eigenvalues, rng, tol);
  return sd.vectors * core * sd.vectors.adjoint();
}

}  // namespace pencil
