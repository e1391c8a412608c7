#pragma once

#include "pencil/canonical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace pencil {

struct FeasibilityReport {
  double lambda = 0.0;
  bool feasible = false;
  FeasibilityReason reason = FeasibilityReason::OK;
  CanonicalSplit split;
  std::optional<GenericForm> generic;  // present iff feasible with a nonempty generic block
};

/// Decides whether T = lambda P + Q is solvable with nonzero projections:
/// the generic block must admit a balanced form and the forced kernel blocks
/// must leave both P and Q nonzero.
inline FeasibilityReport is_pencil_at(const HermMatrix& T, const SpectralData& sd, double lambda,
                                      const Tolerances& tol = {}) {
  FeasibilityReport rep;
  rep.lambda = lambda;
  rep.split = canonical_split(T, sd, lambda, tol);
  if (std::abs(lambda) <= rep.split.absorb_tol || std::abs(lambda + 1.0) <= rep.split.absorb_tol) {
    rep.reason = FeasibilityReason::LambdaExcluded;
    return rep;
  }
  GenericFormResult g = generic_form(rep.split, tol);
  if (!g.ok()) {
    rep.reason = g.reason;
    return rep;
  }
  const int k = g.form->k();
  const int d1 = rep.split.d1();
  const int d_lam = rep.split.d_lambda();
  const int d_top = rep.split.d_one_plus_lambda();
  if (rep.split.lambda_is_one) {
    // P = 0 + E + I + P_U and Q = 0 + (I-E) + I + Q_U: with no top kernel and
    // no generic block, E must avoid both 0 and I, which needs d1 >= 2.
    if (d_top + k == 0 && d1 < 2) {
      rep.reason = d1 == 0 ? FeasibilityReason::ForcedZeroP : FeasibilityReason::ForcedZeroQ;
      return rep;
    }
  } else {
    if (d_lam + d_top + k == 0) {
      rep.reason = FeasibilityReason::ForcedZeroP;
      return rep;
    }
    if (d1 + d_top + k == 0) {
      rep.reason = FeasibilityReason::ForcedZeroQ;
      return rep;
    }
  }
  rep.feasible = true;
  rep.reason = FeasibilityReason::OK;
  if (k > 0) rep.generic = std::move(g.form);
  return rep;
}

inline FeasibilityReport is_pencil_at(const HermMatrix& T, double lambda, const Tolerances& tol = {}) {
  return is_pencil_at(T, eig_hermitian(T, tol), lambda, tol);
}

enum class SpectrumClass { Empty, Unique, Prop31, Prop32, Prop33, Prop34 };

inline const char* to_string(SpectrumClass c) {
  switch (c) {
    case SpectrumClass::Empty: return "Empty";
    case SpectrumClass::Unique: return "Unique";
    case SpectrumClass::Prop31: return "Prop31";
    case SpectrumClass::Prop32: return "Prop32";
    case SpectrumClass::Prop33: return "Prop33";
    case SpectrumClass::Prop34: return "Prop34";
  }
  return "Unknown";
}

struct Classification {
  SpectrumClass cls = SpectrumClass::Empty;
  std::optional<double> z;
};

namespace detail {

struct SpectrumSummary {
  std::vector<double> values;  // distinct, ascending
  std::vector<int> mult;
};

inline SpectrumSummary distinct_spectrum(const RVec& eigs, double gap) {
  SpectrumSummary s;
  for (const auto& [b, e] : cluster_ranges(eigs, gap)) {
    double mean = 0;
    for (int i = b; i < e; ++i) mean += eigs[i];
    s.values.push_back(mean / (e - b));
    s.mult.push_back(e - b);
  }
  return s;
}

}  // namespace detail

/// Matches the spectrum of T against the two-point spectral templates. A
/// nonzero projection classifies as Prop31; a two-element admissible set must
/// match one of Prop32/Prop33/Prop34 (anything else is a hard contradiction).
inline Classification classify_spectrum(const HermMatrix& T, const std::vector<double>& admissible,
                                        const Tolerances& tol = {}) {
  const SpectralData sd = eig_hermitian(T, tol);
  const double eff = scaled_cluster_tol(tol, spectral_scale(sd.eigenvalues));
  const auto summary = detail::distinct_spectrum(sd.eigenvalues, eff);
  const bool projection_flag = is_projection(T, tol).ok && T.m.norm() > tol.residual_tol;
  if (projection_flag) return {SpectrumClass::Prop31, std::nullopt};

  if (admissible.size() == 2) {
    const auto near = [eff](double x, double y) { return std::abs(x - y) <= 2.0 * eff; };
    std::vector<double> extras;
    std::vector<int> extra_mult;
    bool has_one = false;
    for (size_t i = 0; i < summary.values.size(); ++i) {
      const double v = summary.values[i];
      if (near(v, 1.0)) has_one = true;
      if (!near(v, 0.0) && !near(v, 1.0)) {
        extras.push_back(v);
        extra_mult.push_back(summary.mult[i]);
      }
    }
    if (extras.size() == 1 && has_one) return {SpectrumClass::Prop32, extras[0]};
    if (extras.size() == 2 && near(extras[1] - extras[0], 1.0) && extra_mult[0] == extra_mult[1]) {
      const double z = extras[0];
      if ((z > eff && z < 1.0 - eff) || (z > -1.0 + eff && z < -eff)) return {SpectrumClass::Prop33, z};
    }
    if (extras.size() == 3 && extra_mult[0] == extra_mult[1] && extra_mult[1] == extra_mult[2]) {
      if (near(extras[0], 0.5) && near(extras[2] - extras[1], 0.5) && extras[1] > 1.0 + eff)
        return {SpectrumClass::Prop34, extras[1] - 0.5};
      if (near(extras[2], 0.5) && near(extras[1] - extras[0], 0.5) && extras[1] < -eff)
        return {SpectrumClass::Prop34, extras[0]};
    }
    std::ostringstream os;
    os << "two admissible values but the spectrum {";
    for (size_t i = 0; i < summary.values.size(); ++i)
      os << (i ? ", " : "") << summary.values[i] << " (x" << summary.mult[i] << ")";
    os << "} matches no two-point template";
    throw Error(ErrorCode::InternalContradiction, os.str());
  }
  return {admissible.empty() ? SpectrumClass::Empty : SpectrumClass::Unique, std::nullopt};
}

/// Per-candidate evidence row: the verdict plus the analytic summary of the
/// split (kernel dimensions and the eigenvalues of B). The frames behind a
/// row are recomputed deterministically from T via is_pencil_at when needed.
struct LambdaEvidence {
  double lambda = 0.0;
  bool feasible = false;
  FeasibilityReason reason = FeasibilityReason::OK;
  std::array<int, 5> dims{};  // d0, d1, d_lambda, d_{1+lambda}, generic
  std::vector<double> b;      // present iff feasible with a nonempty generic block

  static LambdaEvidence from(const FeasibilityReport& rep) {
    LambdaEvidence e;
    e.lambda = rep.lambda;
    e.feasible = rep.feasible;
    e.reason = rep.reason;
    e.dims = {rep.split.d0(), rep.split.d1(), rep.split.d_lambda(), rep.split.d_one_plus_lambda(),
              rep.split.generic_dim()};
    if (rep.generic)
      for (int i = 0; i < rep.generic->k(); ++i) e.b.push_back(rep.generic->b[i]);
    return e;
  }
};

struct LambdaReport {
  std::vector<double> admissible;  // sorted ascending, excludes {-1, 0}
  bool zero_flag = false;          // T is itself a nonzero projection
  SpectrumClass classification = SpectrumClass::Empty;
  std::optional<double> z;
  std::vector<LambdaEvidence> evidence;  // one row per candidate, sorted by lambda
  std::vector<std::string> notes;
};

/// Enumerates every lambda at which T is a pencil of nonzero projections.
/// Candidates: a + b - 1 over spectral pairs (the generic block forces the
/// spectrum to be symmetric about (1+lambda)/2) plus s and s - 1 over
/// spectral points (kernel-only solutions put lambda or 1+lambda in the
/// spectrum). At most two candidates can survive.
inline LambdaReport admissible_lambdas(const HermMatrix& T, const Tolerances& tol = {}) {
  const SpectralData sd = eig_hermitian(T, tol);
  const double eff = scaled_cluster_tol(tol, spectral_scale(sd.eigenvalues));
  const auto summary = detail::distinct_spectrum(sd.eigenvalues, eff);

  std::vector<double> cand;
  const size_t nv = summary.values.size();
  for (size_t i = 0; i < nv; ++i) {
    for (size_t j = i; j < nv; ++j) cand.push_back(summary.values[i] + summary.values[j] - 1.0);
    cand.push_back(summary.values[i]);
    cand.push_back(summary.values[i] - 1.0);
  }
  std::sort(cand.begin(), cand.end());
  std::vector<double> merged;
  {
    RVec cv = Eigen::Map<const RVec>(cand.data(), static_cast<Eigen::Index>(cand.size()));
    for (const auto& [b, e] : cluster_ranges(cv, eff)) {
      double mean = 0;
      for (int i = b; i < e; ++i) mean += cv[i];
      merged.push_back(mean / (e - b));
    }
  }

  LambdaReport rep;
  rep.zero_flag = is_projection(T, tol).ok && T.m.norm() > tol.residual_tol;
  for (double c : merged) {
    const FeasibilityReport f = is_pencil_at(T, sd, c, tol);
    if (f.reason == FeasibilityReason::LambdaExcluded && std::abs(c + 1.0) <= f.split.absorb_tol)
      rep.notes.push_back("candidate lambda = -1 (difference of two projections) is outside the supported range");
    if (f.feasible) rep.admissible.push_back(c);
    rep.evidence.push_back(LambdaEvidence::from(f));
  }
  if (rep.admissible.size() > 2) {
    std::ostringstream os;
    os << "more than two admissible values found:";
    for (double a : rep.admissible) os << ' ' << a;
    throw Error(ErrorCode::InternalContradiction, os.str());
  }
  const Classification cl = classify_spectrum(T, rep.admissible, tol);
  rep.classification = cl.cls;
  rep.z = cl.z;
  if (rep.zero_flag) rep.notes.push_back("T is itself a nonzero projection (pencil with P free at lambda = 0)");
  return rep;
}

}  // namespace pencil
