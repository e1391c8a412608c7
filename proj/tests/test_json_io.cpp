#include "pencil/falsify.hpp"
#include "pencil/json_io.hpp"
#include "pencil/synth.hpp"

#include <gtest/gtest.h>

#include <cstring>

using namespace pencil;

namespace {

Mat diag_real(std::initializer_list<double> values) {
  Mat m = Mat::Zero(values.size(), values.size());
  int i = 0;
  for (double v : values) m(i, i) = v, ++i;
  return m;
}

}  // namespace

TEST(MatrixJsonTest, BitExactRoundTrip) {
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = rng.uniform_int(1, 6);
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        m(i, j) = cplx(rng.normal() * std::pow(10.0, rng.uniform_int(-12, 12)), rng.normal());
    const json j = matrix_to_json(m);
    const Mat back = matrix_from_json(json::parse(j.dump()));
    ASSERT_EQ(back.rows(), n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        EXPECT_EQ(std::memcmp(&m(i, k), &back(i, k), sizeof(cplx)), 0)
            << "entry (" << i << "," << k << ") not bit-exact";
      }
  }
}

TEST(MatrixJsonTest, MalformedInputsRejected) {
  EXPECT_THROW(matrix_from_json(json::parse("[]")), Error);
  EXPECT_THROW(matrix_from_json(json::parse(R"({"dim": 0, "entries": []})")), Error);
  EXPECT_THROW(matrix_from_json(json::parse(R"({"dim": 2, "entries": [[1, 0]]})")), Error);
  EXPECT_THROW(matrix_from_json(json::parse(R"({"dim": 1, "entries": [[1]]})")), Error);
  EXPECT_THROW(matrix_from_json(json::parse(R"({"dim": 1, "entries": [["a", 0]]})")), Error);
  EXPECT_THROW(matrix_from_json(json::parse(R"({"dim": 1.5, "entries": [[1, 0]]})")), Error);
}

TEST(MatrixJsonTest, HermitianValidatedOnLoad) {
  const json j = json::parse(R"({"dim": 2, "entries": [[0,0],[1,0],[0,0],[0,0]]})");
  EXPECT_THROW(j.get<HermMatrix>(), Error);
}

TEST(ReportJsonTest, FeasibilityRoundTrip) {
  const FeasibilityReport rep = is_pencil_at(HermMatrix::from(diag_real({2.5, 0.5})), 2.0);
  const json j = rep;
  const FeasibilityReport back = j.get<FeasibilityReport>();
  const json j2 = back;
  EXPECT_EQ(j.dump(), j2.dump());
  EXPECT_TRUE(back.feasible);
  ASSERT_TRUE(back.generic.has_value());
  EXPECT_NEAR(back.generic->b[0], 1.0, 1e-12);
}

TEST(ReportJsonTest, LambdaReportRoundTrip) {
  const LambdaReport rep = admissible_lambdas(HermMatrix::from(diag_real({0, 1, 3})));
  const json j = rep;
  const json j2 = j.get<LambdaReport>();
  EXPECT_EQ(j.dump(), j2.dump());
  EXPECT_EQ(j.at("classification").get<std::string>(), "Prop32");
  EXPECT_NEAR(j.at("z").get<double>(), 3.0, 1e-12);
}

TEST(ReportJsonTest, PairAndPathRoundTrip) {
  Rng rng(11);
  const SyntheticPencil sp = random_pencil(2.0, 8, rng);
  const json j = sp.pair;
  const ProjectionPair back = j.get<ProjectionPair>();
  EXPECT_EQ(json(back).dump(), j.dump());
  EXPECT_LT((back.p.m - sp.pair.p.m).norm(), 1e-15);

  const PairPath path = connect_pairs(sp.t, sp.lambda, sp.pair, sp.pair, 2);
  const json jp = path;
  EXPECT_EQ(json(jp.get<PairPath>()).dump(), jp.dump());
}

TEST(ReportJsonTest, VerifyWitnessStructureRoundTrip) {
  Rng rng(13);
  const SyntheticPencil sp = random_pencil(2.0, 6, rng);
  const VerifyReport v = verify_pair(sp.t, sp.pair);
  EXPECT_EQ(json(json(v).get<VerifyReport>()).dump(), json(v).dump());

  const WitnessResult w = equivalence_witness(2.0, sp.pair, sp.pair);
  EXPECT_EQ(json(json(w).get<WitnessResult>()).dump(), json(w).dump());

  const StructureReport s = structure_check(HermMatrix::from(diag_real({2.5, 0.5})), 2.0, 4, 1);
  EXPECT_EQ(json(json(s).get<StructureReport>()).dump(), json(s).dump());

  FalsifyConfig cfg;
  cfg.trials = 6;
  cfg.max_dim = 5;
  cfg.seed = 3;
  const FalsifySummary f = run_falsify(cfg);
  EXPECT_EQ(f.violations, 0);
  EXPECT_EQ(json(json(f).get<FalsifySummary>()).dump(), json(f).dump());
}

TEST(ReportJsonTest, DeterministicSerialization) {
  const LambdaReport rep = admissible_lambdas(HermMatrix::from(diag_real({1.5, 0.5})));
  const std::string a = json(rep).dump(2);
  const std::string b = json(admissible_lambdas(HermMatrix::from(diag_real({1.5, 0.5})))).dump(2);
  EXPECT_EQ(a, b);
}
