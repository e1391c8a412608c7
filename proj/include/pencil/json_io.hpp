#pragma once

#include "pencil/algebra.hpp"
#include "pencil/construction.hpp"
#include "pencil/feasibility.hpp"

#include <json.hpp>

#include <cmath>
#include <string>

namespace pencil {

using json = nlohmann::json;

// Square-matrix schema used repo-wide:
//   {"dim": n, "entries": [[re, im], ...]}  row-major, length n*n.

inline json matrix_to_json(const Mat& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::InternalContradiction, "square schema requested for a non-square matrix");
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
  return json{{"dim", m.rows()}, {"entries", std::move(entries)}};
}

namespace detail {

inline void parse_entries(const json& j, Mat& out, Eigen::Index rows, Eigen::Index cols) {
  const auto& entries = j.at("entries");
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != rows * cols)
    throw Error(ErrorCode::InvalidInput, "entries must be an array of length rows*cols");
  out.resize(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++idx) {
      const auto& cell = entries[static_cast<size_t>(idx)];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number())
        throw Error(ErrorCode::InvalidInput, "each entry must be a [re, im] pair of numbers");
      const double re = cell[0].get<double>();
      const double im = cell[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im))
        throw Error(ErrorCode::InvalidInput, "matrix entries must be finite");
      out(i, j2) = cplx(re, im);
    }
  }
}

}  // namespace detail

inline Mat matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
    throw Error(ErrorCode::InvalidInput, "matrix JSON must be an object with dim and entries");
  if (!j.at("dim").is_number_integer() || j.at("dim").get<long long>() < 1)
    throw Error(ErrorCode::InvalidInput, "dim must be a positive integer");
  const auto n = static_cast<Eigen::Index>(j.at("dim").get<long long>());
  Mat out;
  detail::parse_entries(j, out, n, n);
  return out;
}

// Rectangular variant used for basis blocks (column counts may be zero):
//   {"rows": r, "cols": c, "entries": [[re, im], ...]}

inline json rect_to_json(const Mat& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline Mat rect_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
    throw Error(ErrorCode::InvalidInput, "rectangular matrix JSON must carry rows, cols, entries");
  const auto r = j.at("rows").get<long long>();
  const auto c = j.at("cols").get<long long>();
  if (r < 0 || c < 0) throw Error(ErrorCode::InvalidInput, "rows and cols must be nonnegative");
  Mat out;
  detail::parse_entries(j, out, static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return out;
}

inline void to_json(json& j, const HermMatrix& h) { j = matrix_to_json(h.m); }
inline void from_json(const json& j, HermMatrix& h) { h = HermMatrix::from(matrix_from_json(j)); }

inline void to_json(json& j, const FeasibilityReason& r) { j = to_string(r); }
inline void from_json(const json& j, FeasibilityReason& r) {
  const std::string s = j.get<std::string>();
  for (FeasibilityReason cand :
       {FeasibilityReason::OK, FeasibilityReason::BandViolation, FeasibilityReason::AsymmetricSpectrum,
        FeasibilityReason::ForcedZeroP, FeasibilityReason::ForcedZeroQ, FeasibilityReason::LambdaExcluded,
        FeasibilityReason::OddGenericDimension}) {
    if (s == to_string(cand)) {
      r = cand;
      return;
    }
  }
  throw Error(ErrorCode::InvalidInput, "unknown feasibility reason: " + s);
}

inline void to_json(json& j, const SpectrumClass& c) { j = to_string(c); }
inline void from_json(const json& j, SpectrumClass& c) {
  const std::string s = j.get<std::string>();
  for (SpectrumClass cand : {SpectrumClass::Empty, SpectrumClass::Unique, SpectrumClass::Prop31,
                             SpectrumClass::Prop32, SpectrumClass::Prop33, SpectrumClass::Prop34}) {
    if (s == to_string(cand)) {
      c = cand;
      return;
    }
  }
  throw Error(ErrorCode::InvalidInput, "unknown spectrum classification: " + s);
}

inline void to_json(json& j, const CanonicalSplit& s) {
  json bases = json::array();
  for (const Mat& b : s.bases) bases.push_back(rect_to_json(b));
  j = json{{"lambda", s.lambda},
           {"lambda_is_one", s.lambda_is_one},
           {"absorb_tol", s.absorb_tol},
           {"dims", json::array({s.d0(), s.d1(), s.d_lambda(), s.d_one_plus_lambda(), s.generic_dim()})},
           {"bases", std::move(bases)},
           {"t0", rect_to_json(s.t0.m)}};
}

inline void from_json(const json& j, CanonicalSplit& s) {
  s.lambda = j.at("lambda").get<double>();
  s.lambda_is_one = j.at("lambda_is_one").get<bool>();
  s.absorb_tol = j.at("absorb_tol").get<double>();
  const auto& bases = j.at("bases");
  if (!bases.is_array() || bases.size() != 5)
    throw Error(ErrorCode::InvalidInput, "split JSON must carry five bases");
  for (int i = 0; i < 5; ++i) s.bases[i] = rect_from_json(bases[i]);
  s.t0 = HermMatrix::symmetrized(rect_from_json(j.at("t0")));
}

inline void to_json(json& j, const GenericForm& g) {
  json b = json::array();
  for (int i = 0; i < g.k(); ++i) b.push_back(g.b[i]);
  j = json{{"lambda", g.lambda}, {"center", g.center}, {"b", std::move(b)}, {"pairing", rect_to_json(g.pairing)}};
}

inline void from_json(const json& j, GenericForm& g) {
  g.lambda = j.at("lambda").get<double>();
  g.center = j.at("center").get<double>();
  const auto& b = j.at("b");
  g.b = RVec(static_cast<Eigen::Index>(b.size()));
  for (size_t i = 0; i < b.size(); ++i) g.b[static_cast<Eigen::Index>(i)] = b[i].get<double>();
  g.pairing = rect_from_json(j.at("pairing"));
}

inline void to_json(json& j, const FeasibilityReport& r) {
  j = json{{"lambda", r.lambda}, {"feasible", r.feasible}, {"reason", r.reason}, {"split", r.split}};
  j["generic"] = r.generic ? json(*r.generic) : json(nullptr);
}

inline void from_json(const json& j, FeasibilityReport& r) {
  r.lambda = j.at("lambda").get<double>();
  r.feasible = j.at("feasible").get<bool>();
  r.reason = j.at("reason").get<FeasibilityReason>();
  r.split = j.at("split").get<CanonicalSplit>();
  r.generic.reset();
  if (!j.at("generic").is_null()) r.generic = j.at("generic").get<GenericForm>();
}

inline void to_json(json& j, const LambdaEvidence& e) {
  j = json{{"lambda", e.lambda}, {"feasible", e.feasible}, {"reason", e.reason},
           {"dims", e.dims},     {"b", e.b}};
}

inline void from_json(const json& j, LambdaEvidence& e) {
  e.lambda = j.at("lambda").get<double>();
  e.feasible = j.at("feasible").get<bool>();
  e.reason = j.at("reason").get<FeasibilityReason>();
  e.dims = j.at("dims").get<std::array<int, 5>>();
  e.b = j.at("b").get<std::vector<double>>();
}

inline void to_json(json& j, const LambdaReport& r) {
  j = json{{"admissible", r.admissible}, {"zero_flag", r.zero_flag},     {"classification", r.classification},
           {"evidence", r.evidence},     {"notes", r.notes}};
  j["z"] = r.z ? json(*r.z) : json(nullptr);
}

inline void from_json(const json& j, LambdaReport& r) {
  r.admissible = j.at("admissible").get<std::vector<double>>();
  r.zero_flag = j.at("zero_flag").get<bool>();
  r.classification = j.at("classification").get<SpectrumClass>();
  r.evidence = j.at("evidence").get<std::vector<LambdaEvidence>>();
  r.notes = j.at("notes").get<std::vector<std::string>>();
  r.z.reset();
  if (!j.at("z").is_null()) r.z = j.at("z").get<double>();
}

inline void to_json(json& j, const ProjectionPair& p) {
  json params = json::object();
  if (p.params.u) params["U"] = matrix_to_json(*p.params.u);
  if (p.params.e) params["E"] = matrix_to_json(*p.params.e);
  j = json{{"lambda", p.lambda}, {"P", p.p}, {"Q", p.q}, {"params", std::move(params)}};
}

inline void from_json(const json& j, ProjectionPair& p) {
  p.lambda = j.at("lambda").get<double>();
  p.p = j.at("P").get<HermMatrix>();
  p.q = j.at("Q").get<HermMatrix>();
  p.params = {};
  if (j.contains("params")) {
    const auto& params = j.at("params");
    if (params.contains("U")) p.params.u = matrix_from_json(params.at("U"));
    if (params.contains("E")) p.params.e = matrix_from_json(params.at("E"));
  }
}

inline void to_json(json& j, const VerifyReport& r) {
  j = json{{"p_idempotency", r.p_idempotency},
           {"q_idempotency", r.q_idempotency},
           {"pencil", r.pencil},
           {"anticommutation", r.anticommutation},
           {"pass", r.pass}};
}

inline void from_json(const json& j, VerifyReport& r) {
  r.p_idempotency = j.at("p_idempotency").get<double>();
  r.q_idempotency = j.at("q_idempotency").get<double>();
  r.pencil = j.at("pencil").get<double>();
  r.anticommutation = j.at("anticommutation").get<double>();
  r.pass = j.at("pass").get<bool>();
}

inline void to_json(json& j, const PairPath& p) {
  j = json{{"lambda", p.lambda}, {"steps", p.steps}, {"samples", p.samples}};
}

inline void from_json(const json& j, PairPath& p) {
  p.lambda = j.at("lambda").get<double>();
  p.steps = j.at("steps").get<int>();
  p.samples = j.at("samples").get<std::vector<ProjectionPair>>();
}

inline void to_json(json& j, const WitnessResult& w) {
  j = json{{"residual_p", w.residual_p}, {"residual_q", w.residual_q}, {"mismatch", w.mismatch}};
  j["witness"] = w.witness ? matrix_to_json(*w.witness) : json(nullptr);
}

inline void from_json(const json& j, WitnessResult& w) {
  w.residual_p = j.at("residual_p").get<double>();
  w.residual_q = j.at("residual_q").get<double>();
  w.mismatch = j.at("mismatch").get<std::string>();
  w.witness.reset();
  if (!j.at("witness").is_null()) w.witness = matrix_from_json(j.at("witness"));
}

inline void to_json(json& j, const StructureReport& r) {
  j = json{{"measured_commutant_dim", r.measured_commutant_dim},
           {"predicted_commutant_dim", r.predicted_commutant_dim},
           {"measured_algebra_dim", r.measured_algebra_dim},
           {"predicted_algebra_dim", r.predicted_algebra_dim},
           {"samples", r.samples},
           {"ok", r.ok}};
}

inline void from_json(const json& j, StructureReport& r) {
  r.measured_commutant_dim = j.at("measured_commutant_dim").get<int>();
  r.predicted_commutant_dim = j.at("predicted_commutant_dim").get<int>();
  r.measured_algebra_dim = j.at("measured_algebra_dim").get<int>();
  r.predicted_algebra_dim = j.at("predicted_algebra_dim").get<int>();
  r.samples = j.at("samples").get<int>();
  r.ok = j.at("ok").get<bool>();
}

}  // namespace pencil
