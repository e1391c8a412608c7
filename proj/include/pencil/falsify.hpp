#pragma once

#include "pencil/feasibility.hpp"
#include "pencil/json_io.hpp"
#include "pencil/synth.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace pencil {

struct FalsifyConfig {
  int trials = 1000;
  int max_dim = 8;
  std::uint64_t seed = 0;
  Tolerances tol{};
};

struct FalsifySummary {
  int trials = 0;
  int pencil_trials = 0;
  int hermitian_trials = 0;
  int violations = 0;
  int two_value_reports = 0;
  int max_admissible_count = 0;
  double worst_pencil_residual = 0.0;   // relative, over synthetic pencils
  double worst_rebuild_residual = 0.0;  // canonicalize-then-rebuild, Frobenius
  std::vector<std::string> violation_dumps;
};

inline void to_json(json& j, const FalsifySummary& s) {
  j = json{{"trials", s.trials},
           {"pencil_trials", s.pencil_trials},
           {"hermitian_trials", s.hermitian_trials},
           {"violations", s.violations},
           {"two_value_reports", s.two_value_reports},
           {"max_admissible_count", s.max_admissible_count},
           {"worst_pencil_residual", s.worst_pencil_residual},
           {"worst_rebuild_residual", s.worst_rebuild_residual},
           {"violation_dumps", s.violation_dumps}};
}

inline void from_json(const json& j, FalsifySummary& s) {
  s.trials = j.at("trials").get<int>();
  s.pencil_trials = j.at("pencil_trials").get<int>();
  s.hermitian_trials = j.at("hermitian_trials").get<int>();
  s.violations = j.at("violations").get<int>();
  s.two_value_reports = j.at("two_value_reports").get<int>();
  s.max_admissible_count = j.at("max_admissible_count").get<int>();
  s.worst_pencil_residual = j.at("worst_pencil_residual").get<double>();
  s.worst_rebuild_residual = j.at("worst_rebuild_residual").get<double>();
  s.violation_dumps = j.at("violation_dumps").get<std::vector<std::string>>();
}

/// Randomized stress harness: alternates ground-truth pencils with
/// unconstrained Hermitian matrices, and checks per trial that
///   - the admissible set never exceeds two values,
///   - a two-value report matches a two-point spectral template,
///   - the planted lambda of a synthetic pencil is recovered,
///   - canonicalize-then-rebuild reproduces the planted pair.
/// Trials are seeded independently by index, so any order of evaluation
/// yields the same summary.
inline FalsifySummary run_falsify(const FalsifyConfig& cfg) {
  if (cfg.trials < 1) throw Error(ErrorCode::InvalidInput, "trials must be >= 1");
  if (cfg.max_dim < 1) throw Error(ErrorCode::InvalidInput, "max_dim must be >= 1");

  FalsifySummary s;
  s.trials = cfg.trials;
  auto record = [&s](const HermMatrix& t, const std::string& why) {
    ++s.violations;
    if (s.violation_dumps.size() < 5) s.violation_dumps.push_back(why + "; T = " + matrix_to_json(t.m).dump());
  };

  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(trial + 1)));
    const bool synthetic = trial % 2 == 0;
    HermMatrix t;
    double planted_lambda = 0.0;
    ProjectionPair planted_pair;
    if (synthetic) {
      ++s.pencil_trials;
      planted_lambda = random_pencil_lambda(rng);
      SyntheticPencil sp = random_pencil(planted_lambda, cfg.max_dim, rng, cfg.tol);
      t = sp.t;
      planted_pair = std::move(sp.pair);
    } else {
      ++s.hermitian_trials;
      const int n = rng.uniform_int(1, cfg.max_dim);
      t = HermMatrix::symmetrized(random_hermitian_mat(n, rng));
    }

    try {
      const LambdaReport rep = admissible_lambdas(t, cfg.tol);
      s.max_admissible_count = std::max(s.max_admissible_count, static_cast<int>(rep.admissible.size()));
      if (rep.admissible.size() > 2) {
        record(t, "more than two admissible values");
        continue;
      }
      if (rep.admissible.size() == 2) {
        ++s.two_value_reports;
        if (rep.classification != SpectrumClass::Prop32 && rep.classification != SpectrumClass::Prop33 &&
            rep.classification != SpectrumClass::Prop34)
          record(t, "two-value report without a matching template");
      }
      if (synthetic) {
        const double eff = 1e-6 * std::max(1.0, std::abs(planted_lambda));
        const bool found = std::any_of(rep.admissible.begin(), rep.admissible.end(),
                                       [&](double a) { return std::abs(a - planted_lambda) <= eff; });
        if (!found) record(t, "planted lambda missing from the admissible set");

        const VerifyReport vr = verify_pair(t, planted_pair, cfg.tol);
        s.worst_pencil_residual =
            std::max(s.worst_pencil_residual, vr.pencil / std::max(1.0, t.m.norm()));
        if (!vr.pass) record(t, "planted pair fails verification");

        const PairParams params = canonicalize_pair(t, planted_pair, cfg.tol);
        const CanonicalSplit split = canonical_split(t, planted_lambda, cfg.tol);
        const GenericFormResult g = generic_form(split, cfg.tol);
        const ProjectionPair rebuilt = build_pair(g.form, split, params.u, params.e, cfg.tol);
        const double r =
            std::max((rebuilt.p.m - planted_pair.p.m).norm(), (rebuilt.q.m - planted_pair.q.m).norm());
        s.worst_rebuild_residual = std::max(s.worst_rebuild_residual, r);
        if (r > 1e-8) record(t, "canonicalize-then-rebuild residual " + std::to_string(r));
      }
    } catch (const Error& err) {
      record(t, std::string("exception: ") + err.what());
    }
  }
  return s;
}

}  // namespace pencil
