#pragma once

#include "pencil/types.hpp"

#include <cstdint>
#include <numbers>
#include <random>

namespace pencil {

/// Deterministic random source. Distributions are hand-rolled from the raw
/// mt19937_64 stream so a seed yields identical values on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Standard complex normal (unit total variance).
  cplx cnormal() {
    const double s = std::numbers::sqrt2 / 2.0;
    return {normal() * s, normal() * s};
  }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline Mat ginibre(int n, Rng& rng) {
  Mat z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = rng.cnormal();
  return z;
}

/// Haar-distributed unitary: QR of a Ginibre sample with the phases of
/// diag(R) absorbed into Q.
inline Mat haar_unitary(int n, Rng& rng) {
  if (n == 0) return Mat(0, 0);
  const Mat z = ginibre(n, rng);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  const Mat r = qr.matrixQR();
  for (int i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    const double a = std::abs(d);
    if (a > 0) q.col(i) *= d / a;
  }
  return q;
}

inline Mat random_hermitian_mat(int n, Rng& rng, double scale = 1.0) {
  const Mat z = ginibre(n, rng);
  return scale * 0.5 * (z + z.adjoint());
}

/// Haar-frame projection of the given rank (rank 0 gives the zero matrix).
inline Mat random_projection_mat(int n, int rank, Rng& rng) {
  if (rank < 0 || rank > n) throw Error(ErrorCode::InvalidInput, "projection rank out of range");
  const Mat v = haar_unitary(n, rng);
  const Mat cols = v.leftCols(rank);
  Mat p = cols * cols.adjoint();
  if (rank == 0) p = Mat::Zero(n, n);
  return p;
}

}  // namespace pencil
