#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace pencil {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

/// Numerical policy shared across the toolkit. cluster_tol is a relative
/// grouping tolerance: call sites scale it by max(1, spectral norm) of the
/// data being grouped.
struct Tolerances {
  double herm_tol = 1e-10;
  double eig_tol = 1e-10;
  double ortho_tol = 1e-10;
  double cluster_tol = 1e-8;
  double residual_tol = 1e-9;
};

enum class ErrorCode {
  InvalidInput,
  DimensionMismatch,
  EigSolverFailure,
  CommutationViolation,
  MissingE,
  ZeroProjection,
  NotAPencilPair,
  DifferentComponents,
  LambdaExcluded,
  InternalContradiction,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EigSolverFailure: return "EigSolverFailure";
    case ErrorCode::CommutationViolation: return "CommutationViolation";
    case ErrorCode::MissingE: return "MissingE";
    case ErrorCode::ZeroProjection: return "ZeroProjection";
    case ErrorCode::NotAPencilPair: return "NotAPencilPair";
    case ErrorCode::DifferentComponents: return "DifferentComponents";
    case ErrorCode::LambdaExcluded: return "LambdaExcluded";
    case ErrorCode::InternalContradiction: return "InternalContradiction";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Complex square matrix kept Hermitian; the stored value is (M + M*)/2.
struct HermMatrix {
  Mat m;

  HermMatrix() = default;

  Eigen::Index dim() const { return m.rows(); }

  /// Validating constructor: rejects non-square input and input whose
  /// deviation from self-adjointness exceeds herm_tol * max(1, ||M||_F).
  static HermMatrix from(const Mat& raw, const Tolerances& tol = {}) {
    if (raw.rows() != raw.cols() || raw.rows() < 1)
      throw Error(ErrorCode::InvalidInput, "matrix must be square with dim >= 1");
    const double dev = (raw - raw.adjoint()).norm();
    if (dev > tol.herm_tol * std::max(1.0, raw.norm()))
      throw Error(ErrorCode::InvalidInput,
                  "matrix is not Hermitian within tolerance (deviation " + std::to_string(dev) + ")");
    return symmetrized(raw);
  }

  /// For matrices Hermitian by construction; still symmetrizes.
  static HermMatrix symmetrized(const Mat& raw) {
    HermMatrix h;
    h.m = 0.5 * (raw + raw.adjoint());
    return h;
  }
};

/// Eigendecomposition of a Hermitian matrix: M V = V diag(eigenvalues).
struct SpectralData {
  RVec eigenvalues;  // ascending
  Mat vectors;       // columns orthonormal
};

}  // namespace pencil
