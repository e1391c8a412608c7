// Acceptance suite: one test per acceptance criterion, each printing a
// single PASS/FAIL line with its runtime.

#include "pencil/pencil.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace pencil;

namespace {

Mat diag_real(std::initializer_list<double> values) {
  Mat m = Mat::Zero(values.size(), values.size());
  int i = 0;
  for (double v : values) m(i, i) = v, ++i;
  return m;
}

class Criterion {
 public:
  Criterion(int index, std::string name) : index_(index), name_(std::move(name)) {}

  void check(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
    EXPECT_TRUE(ok) << "criterion " << index_ << ": " << what;
  }

  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ostringstream os;
    os << "[ACCEPTANCE] criterion " << index_ << " (" << name_ << "): "
       << (failures_.empty() ? "PASS" : "FAIL") << " [" << secs << " s]";
    for (const std::string& f : failures_) os << "\n    failed: " << f;
    std::cout << os.str() << std::endl;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  int index_;
  std::string name_;
  std::vector<std::string> failures_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string run_cli_capture(const std::string& args, int& exit_code) {
  static int counter = 0;
  const std::string out_file =
      std::string(::testing::TempDir()) + "acc_cli_" + std::to_string(counter++) + ".txt";
  const std::string cmd = std::string(PENCIL_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
  const int status = std::system(cmd.c_str());
  exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_file);
  std::ostringstream os;
  os << in.rdbuf();
  std::remove(out_file.c_str());
  return os.str();
}

// Independent oracle for commutant dimensions: entrywise constraint assembly
// and a pivoted-LU rank, separate from the library's Gram-matrix route.
int oracle_commutant_dim(const std::vector<Mat>& gens) {
  const int n = static_cast<int>(gens.front().rows());
  const int nn = n * n;
  std::vector<Mat> all = gens;
  for (const Mat& g : gens) all.push_back(g.adjoint());
  Mat stacked(static_cast<int>(all.size()) * nn, nn);
  int row0 = 0;
  for (const Mat& g : all) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int row = row0 + j * n + i;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            cplx coeff(0, 0);
            if (b == j) coeff += g(i, a);
            if (a == i) coeff -= g(b, j);
            stacked(row, b * n + a) = coeff;
          }
      }
    row0 += nn;
  }
  Eigen::FullPivLU<Mat> lu(stacked);
  lu.setThreshold(1e-8);
  return nn - static_cast<int>(lu.rank());
}

constexpr double kSweep[] = {3.0, -3.0, 2.0, -2.0, 0.5, -0.5, 1.0, 0.25};

}  // namespace

TEST(Acceptance, Criterion1GoldenShiftPair) {
  Criterion c(1, "golden two-value family {2, 3} for diag(0, 1, 3)");
  int rc = 0;
  const std::string out =
      run_cli_capture("lambdas --input " + std::string(PENCIL_DATA_DIR) + "/t_prop32.json", rc);
  c.check(rc == 0, "lambdas command exits 0");
  const json j = json::parse(out, nullptr, false);
  c.check(!j.is_discarded(), "lambdas output parses as JSON");
  if (!j.is_discarded()) {
    c.check(j.at("admissible").size() == 2, "exactly two admissible values");
    c.check(std::abs(j.at("admissible")[0].get<double>() - 2.0) < 1e-12, "first value is 2");
    c.check(std::abs(j.at("admissible")[1].get<double>() - 3.0) < 1e-12, "second value is 3");
  }

  const HermMatrix t = HermMatrix::from(diag_real({0, 1, 3}));
  const CanonicalSplit split = canonical_split(t, 3.0);
  const GenericFormResult g = generic_form(split);
  const ProjectionPair pair = build_pair(g.form, split);
  c.check((pair.p.m - diag_real({0, 0, 1})).norm() < 1e-14, "P equals diag(0, 0, 1)");
  c.check((pair.q.m - diag_real({0, 1, 0})).norm() < 1e-14, "Q equals diag(0, 1, 0)");
  c.check(c.elapsed() < 1.0, "runtime under 1 s");
}

TEST(Acceptance, Criterion2GoldenHalfPair) {
  Criterion c(2, "golden pair at lambda = 1 for diag(1.5, 0.5)");
  const LambdaReport rep = admissible_lambdas(HermMatrix::from(diag_real({1.5, 0.5})));
  c.check(rep.admissible.size() == 2, "exactly two admissible values");
  if (rep.admissible.size() == 2) {
    c.check(std::abs(rep.admissible[0] - 0.5) < 1e-12, "first value is 0.5");
    c.check(std::abs(rep.admissible[1] - 1.0) < 1e-12, "second value is 1");
  }

  const HermMatrix t = HermMatrix::from(diag_real({1.5, 0.5}));
  const CanonicalSplit split = canonical_split(t, 1.0);
  const GenericFormResult g = generic_form(split);
  const ProjectionPair pair = build_pair(g.form, split);
  Mat p_expect(2, 2), q_expect(2, 2);
  p_expect << cplx(0.75, 0), cplx(0.4330127, 0), cplx(0.4330127, 0), cplx(0.25, 0);
  q_expect << cplx(0.75, 0), cplx(-0.4330127, 0), cplx(-0.4330127, 0), cplx(0.25, 0);
  c.check((pair.p.m - p_expect).cwiseAbs().maxCoeff() < 1e-7, "P matches to 1e-7");
  c.check((pair.q.m - q_expect).cwiseAbs().maxCoeff() < 1e-7, "Q matches to 1e-7");
  c.check(c.elapsed() < 1.0, "runtime under 1 s");
}

TEST(Acceptance, Criterion3RoundTripSoundness) {
  Criterion c(3, "2000-trial recovery and rebuild soundness");
  Rng rng(2024);
  int bad_contains = 0;
  int bad_rebuild = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const double lambda = kSweep[trial % 8];
    const SyntheticPencil sp = random_pencil(lambda, 12, rng);
    const LambdaReport rep = admissible_lambdas(sp.t);
    bool found = false;
    for (double a : rep.admissible)
      if (std::abs(a - lambda) <= 1e-6 * std::max(1.0, std::abs(lambda))) found = true;
    if (!found) ++bad_contains;

    const PairParams params = canonicalize_pair(sp.t, sp.pair);
    const CanonicalSplit split = canonical_split(sp.t, lambda);
    const GenericFormResult g = generic_form(split);
    const ProjectionPair rebuilt = build_pair(g.form, split, params.u, params.e);
    const double resid =
        std::max((rebuilt.p.m - sp.pair.p.m).norm(), (rebuilt.q.m - sp.pair.q.m).norm());
    if (resid > 1e-8) ++bad_rebuild;
  }
  c.check(bad_contains == 0, "planted lambda always recovered (" + std::to_string(bad_contains) + " misses)");
  c.check(bad_rebuild == 0, "canonicalize-then-rebuild within 1e-8 (" + std::to_string(bad_rebuild) + " misses)");
  c.check(c.elapsed() < 120.0, "runtime under 2 min");
}

TEST(Acceptance, Criterion4AtMostTwoLambdas) {
  Criterion c(4, "10^4-trial stress of the at-most-two-lambda law");
  FalsifyConfig cfg;
  cfg.trials = 10000;
  cfg.max_dim = 8;
  cfg.seed = 424242;
  const FalsifySummary s = run_falsify(cfg);
  c.check(s.violations == 0, "zero violations (" + std::to_string(s.violations) + " found)");
  c.check(s.max_admissible_count <= 2, "no report exceeds two values");
  c.check(s.two_value_reports > 0, "two-value reports were exercised");
  for (const std::string& d : s.violation_dumps) c.check(false, "violation: " + d);
  c.check(c.elapsed() < 300.0, "runtime under 5 min");
}

TEST(Acceptance, Criterion5Anticommutation) {
  Criterion c(5, "anticommutation residual of every constructed pair");
  Rng rng(515151);
  double worst = 0.0;
  for (double lambda : kSweep) {
    for (int rep = 0; rep < 40; ++rep) {
      const SyntheticPencil sp = random_pencil(lambda, 12, rng);
      const VerifyReport v = verify_pair(sp.t, sp.pair);
      const double rel = v.anticommutation / sp.t.m.norm();
      worst = std::max(worst, rel);
    }
  }
  std::ostringstream os;
  os << "worst relative residual " << worst << " below 1e-9";
  c.check(worst < 1e-9, os.str());
}

TEST(Acceptance, Criterion6AlgebraStructure) {
  Criterion c(6, "commutant dimensions match block predictions");
  struct Case {
    std::vector<double> b;
    int expected;
  };
  const Case cases[] = {{{1.0}, 1}, {{0.6, 1.2}, 2}, {{0.6, 0.6, 1.2}, 2}};
  for (const Case& cs : cases) {
    const int k = static_cast<int>(cs.b.size());
    Mat t0 = Mat::Zero(2 * k, 2 * k);
    for (int i = 0; i < k; ++i) {
      t0(i, i) = 1.5 + cs.b[i];
      t0(k + i, k + i) = 1.5 - cs.b[i];
    }
    const HermMatrix t = HermMatrix::symmetrized(t0);
    const StructureReport rep = structure_check(t, 2.0, 8, 99);
    std::ostringstream os;
    os << "k=" << k << ": measured " << rep.measured_commutant_dim << " predicted "
       << rep.predicted_commutant_dim << " expected " << cs.expected;
    c.check(rep.measured_commutant_dim == cs.expected, os.str());
    c.check(rep.predicted_commutant_dim == cs.expected, "closed-form prediction agrees: " + os.str());
    c.check(rep.ok, "structure report ok for k=" + std::to_string(k));

    // independent oracle on a fresh sample of pairs
    const FeasibilityReport feas = is_pencil_at(t, 2.0);
    Rng rng(7 + k);
    std::vector<Mat> pool;
    for (int j = 0; j < 8; ++j) {
      const Mat u = random_unitary_commuting_with_diag(feas.generic->b, rng);
      const ProjectionPair pr = build_pair(feas.generic, feas.split, u);
      pool.push_back(pr.p.m);
      pool.push_back(pr.q.m);
    }
    c.check(oracle_commutant_dim(pool) == cs.expected,
            "null-space oracle agrees for k=" + std::to_string(k));
  }
  c.check(c.elapsed() < 30.0, "runtime under 30 s");
}

TEST(Acceptance, Criterion7Connectivity) {
  Criterion c(7, "paths within components, refusal across them");
  {
    Mat t0 = Mat::Zero(4, 4);
    t0.diagonal() << 2.1, 2.7, 0.9, 0.3;  // 1.5 + (0.6, 1.2, -0.6, -1.2)
    const HermMatrix t = HermMatrix::symmetrized(t0);
    const FeasibilityReport feas = is_pencil_at(t, 2.0);
    c.check(feas.feasible, "lambda = 2 block instance is feasible");
    Rng rng(77);
    const Mat ua = random_unitary_commuting_with_diag(feas.generic->b, rng);
    const Mat ub = random_unitary_commuting_with_diag(feas.generic->b, rng);
    const ProjectionPair a = build_pair(feas.generic, feas.split, ua);
    const ProjectionPair b = build_pair(feas.generic, feas.split, ub);
    const PairPath path = connect_pairs(t, 2.0, a, b, 8);
    c.check(path.samples.size() == 9, "8-step path has 9 samples");
    Tolerances strict;
    strict.residual_tol = 1e-9;
    bool all_ok = true;
    for (const ProjectionPair& s : path.samples)
      if (!verify_pair(t, s, strict).pass) all_ok = false;
    c.check(all_ok, "every path sample verifies at 1e-9");
    c.check((path.samples.back().p.m - b.p.m).norm() < 1e-8, "path reaches the target pair");
  }
  {
    const HermMatrix t = HermMatrix::from(diag_real({1, 1, 1.5, 0.5}));
    const FeasibilityReport feas = is_pencil_at(t, 1.0);
    Mat e1 = Mat::Zero(2, 2);
    e1(0, 0) = 1.0;
    const ProjectionPair a = build_pair(feas.generic, feas.split, std::nullopt, Mat::Zero(2, 2).eval());
    const ProjectionPair b = build_pair(feas.generic, feas.split, std::nullopt, e1);
    bool refused = false;
    try {
      connect_pairs(t, 1.0, a, b, 8);
    } catch (const Error& e) {
      refused = e.code() == ErrorCode::DifferentComponents;
    }
    c.check(refused, "E-ranks 0 vs 1 refused with DifferentComponents");
  }
}

TEST(Acceptance, Criterion8Witness) {
  Criterion c(8, "witness for equal spectra, none for distinct spectra");
  const HermMatrix ta = HermMatrix::from(diag_real({2.5, 0.5}));
  const FeasibilityReport fa = is_pencil_at(ta, 2.0);
  Rng rng(88);
  const Mat u0 = random_unitary_commuting_with_diag(fa.generic->b, rng);
  const Mat u1 = random_unitary_commuting_with_diag(fa.generic->b, rng);
  const ProjectionPair a = build_pair(fa.generic, fa.split, u0);
  const ProjectionPair b = build_pair(fa.generic, fa.split, u1);
  const WitnessResult w = equivalence_witness(2.0, a, b);
  c.check(w.witness.has_value(), "witness exists for equal spectra");
  if (w.witness) {
    c.check(w.residual_p < 1e-8, "P-conjugation residual below 1e-8");
    c.check(w.residual_q < 1e-8, "Q-conjugation residual below 1e-8");
  }

  // spectra differ by 0.1: diag(2.6, 0.4) is still a pencil at 2
  const HermMatrix tb = HermMatrix::from(diag_real({2.6, 0.4}));
  const FeasibilityReport fb = is_pencil_at(tb, 2.0);
  c.check(fb.feasible, "shifted instance remains feasible");
  const ProjectionPair d = build_pair(fb.generic, fb.split);
  const WitnessResult none = equivalence_witness(2.0, a, d);
  c.check(!none.witness.has_value(), "no witness when spectra differ");
  c.check(!none.mismatch.empty(), "mismatch lists the differing multiplicities");
}
