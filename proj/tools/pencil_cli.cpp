// Command-line front end: spectral analysis of Hermitian pencils of
// projection pairs, pair construction and verification, solution-set paths,
// unitary witnesses, commutant structure checks, and a randomized
// falsification harness. All I/O is JSON; see README.md for the schemas.

#include "pencil/pencil.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using pencil::json;

struct Options {
  std::vector<std::string> inputs;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int steps = 8;
  int trials = 1000;
  int max_dim = 512;
  int falsify_max_dim = 8;
  std::string output;
  double tol_cluster = -1.0;
  double tol_residual = -1.0;

  pencil::Tolerances tolerances() const {
    pencil::Tolerances t;
    if (tol_cluster >= 0) t.cluster_tol = tol_cluster;
    if (tol_residual >= 0) t.residual_tol = tol_residual;
    return t;
  }
};

void add_common(CLI::App* cmd, Options& opt, int n_inputs, bool with_lambda) {
  if (n_inputs > 0)
    cmd->add_option("--input", opt.inputs, "input JSON path (repeatable)")->expected(n_inputs)->required();
  if (with_lambda) cmd->add_option("--lambda", opt.lambda, "pencil parameter lambda")->required();
  cmd->add_option("--seed", opt.seed, "random seed");
  if (n_inputs > 0) cmd->add_option("--max-dim", opt.max_dim, "largest accepted matrix dimension");
  cmd->add_option("--tol-cluster", opt.tol_cluster, "override the eigenvalue clustering tolerance");
  cmd->add_option("--tol-residual", opt.tol_residual, "override the residual tolerance");
  cmd->add_option("--output", opt.output, "write the result here instead of stdout");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pencil::Error(pencil::ErrorCode::InvalidInput, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw pencil::Error(pencil::ErrorCode::InvalidInput, "malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

pencil::HermMatrix load_matrix(const std::string& path, int max_dim) {
  const json j = load_json(path);
  pencil::HermMatrix t = pencil::HermMatrix::from(pencil::matrix_from_json(j));
  if (t.dim() > max_dim)
    throw pencil::Error(pencil::ErrorCode::InvalidInput,
                        "matrix dimension exceeds --max-dim (" + std::to_string(max_dim) + ")");
  return t;
}

pencil::ProjectionPair load_pair(const std::string& path, int max_dim) {
  const json j = load_json(path);
  pencil::ProjectionPair p;
  try {
    p = j.get<pencil::ProjectionPair>();
  } catch (const json::exception& e) {
    throw pencil::Error(pencil::ErrorCode::InvalidInput, "malformed pair JSON in " + path + ": " + e.what());
  }
  if (p.p.dim() > max_dim)
    throw pencil::Error(pencil::ErrorCode::InvalidInput, "pair dimension exceeds --max-dim");
  return p;
}

void emit(const json& j, const Options& opt) {
  const std::string text = j.dump(2) + "\n";
  if (opt.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opt.output);
    if (!out) throw pencil::Error(pencil::ErrorCode::InvalidInput, "cannot write " + opt.output);
    out << text;
  }
}

int run_analyze(const Options& opt) {
  const auto tol = opt.tolerances();
  const pencil::HermMatrix t = load_matrix(opt.inputs[0], opt.max_dim);
  const pencil::FeasibilityReport rep = pencil::is_pencil_at(t, opt.lambda, tol);
  emit(json(rep), opt);
  return 0;
}

int run_lambdas(const Options& opt) {
  const auto tol = opt.tolerances();
  const pencil::HermMatrix t = load_matrix(opt.inputs[0], opt.max_dim);
  const pencil::LambdaReport rep = pencil::admissible_lambdas(t, tol);
  emit(json(rep), opt);
  return 0;
}

int run_construct(const Options& opt) {
  const auto tol = opt.tolerances();
  const pencil::HermMatrix t = load_matrix(opt.inputs[0], opt.max_dim);
  const pencil::FeasibilityReport feas = pencil::is_pencil_at(t, opt.lambda, tol);
  if (!feas.feasible) {
    emit(json{{"error", "Infeasible"}, {"reason", pencil::to_string(feas.reason)}, {"feasibility", feas}}, opt);
    return 1;
  }
  const auto& split = feas.split;
  std::optional<pencil::Mat> u;
  if (feas.generic) {
    pencil::Rng rng(opt.seed);
    u = pencil::random_unitary_commuting_with_diag(feas.generic->b, rng, tol);
  }
  std::optional<pencil::Mat> e;
  const int k = feas.generic ? feas.generic->k() : 0;
  if (split.lambda_is_one && split.d1() > 0) {
    const int d1 = split.d1();
    if (split.d_one_plus_lambda() + k > 0) {
      e = pencil::Mat::Zero(d1, d1);
    } else {
      pencil::Rng rng(opt.seed + 1);
      const int rank = std::max(1, std::min(d1 - 1, d1 / 2));
      e = pencil::random_projection_mat(d1, rank, rng);
    }
  }
  const pencil::ProjectionPair pair = pencil::build_pair(feas.generic, split, u, e, tol);
  emit(json(pair), opt);
  return 0;
}

int run_verify(const Options& opt) {
  const auto tol = opt.tolerances();
  const pencil::HermMatrix t = load_matrix(opt.inputs[0], opt.max_dim);
  const pencil::ProjectionPair pair = load_pair(opt.inputs[1], opt.max_dim);
  const pencil::VerifyReport rep = pencil::verify_pair(t, pair, tol);
  emit(json(rep), opt);
  return rep.pass ? 0 : 1;
}

int run_connect(const Options& opt) {
  const auto tol = opt.tolerances();
  const pencil::HermMatrix t = load_matrix(opt.inputs[0], opt.max_dim);
  const pencil::ProjectionPair a = load_pair(opt.inputs[1], opt.max_dim);
  const pencil::ProjectionPair b = load_pair(opt.inputs[2], opt.max_dim);
  const pencil::PairPath path = pencil::connect_pairs(t, a.lambda, a, b, opt.steps, tol);
  emit(json(path), opt);
  return 0;
}

int run_witness(const Options& opt) {
  const auto tol = opt.tolerances();
  const pencil::ProjectionPair a = load_pair(opt.inputs[0], opt.max_dim);
  const pencil::ProjectionPair b = load_pair(opt.inputs[1], opt.max_dim);
  if (std::abs(a.lambda - b.lambda) > 1e-12 * std::max(1.0, std::abs(a.lambda)))
    throw pencil::Error(pencil::ErrorCode::InvalidInput, "pairs carry different lambda values");
  const pencil::WitnessResult w = pencil::equivalence_witness(a.lambda, a, b, tol);
  emit(json(w), opt);
  return 0;
}

int run_algebra(const Options& opt) {
  const auto tol = opt.tolerances();
  const pencil::HermMatrix t = load_matrix(opt.inputs[0], opt.max_dim);
  const pencil::StructureReport rep = pencil::structure_check(t, opt.lambda, 8, opt.seed, tol);
  emit(json(rep), opt);
  return rep.ok ? 0 : 1;
}

int run_falsify(const Options& opt) {
  pencil::FalsifyConfig cfg;
  cfg.trials = opt.trials;
  cfg.max_dim = opt.falsify_max_dim;
  cfg.seed = opt.seed;
  cfg.tol = opt.tolerances();
  const pencil::FalsifySummary s = pencil::run_falsify(cfg);
  emit(json(s), opt);
  return s.violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pencil: when is a Hermitian matrix lambda*P + Q for projections P, Q"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* analyze = app.add_subcommand("analyze", "canonical split and feasibility of T at one lambda");
  add_common(analyze, opt, 1, true);
  CLI::App* lambdas = app.add_subcommand("lambdas", "all lambda at which T is a pencil, with classification");
  add_common(lambdas, opt, 1, false);
  CLI::App* construct = app.add_subcommand("construct", "build one pair (P, Q) with T = lambda*P + Q");
  add_common(construct, opt, 1, true);
  CLI::App* verify = app.add_subcommand("verify", "residual report for a pair against T (inputs: T, pair)");
  add_common(verify, opt, 2, false);
  CLI::App* connect = app.add_subcommand("connect", "path between two pairs (inputs: T, pairA, pairB)");
  add_common(connect, opt, 3, false);
  connect->add_option("--steps", opt.steps, "number of path steps")->check(CLI::PositiveNumber);
  CLI::App* witness = app.add_subcommand("witness", "conjugating unitary between pairs (inputs: pairA, pairB)");
  add_common(witness, opt, 2, false);
  CLI::App* falsify = app.add_subcommand("falsify", "randomized stress of the at-most-two-lambda law");
  add_common(falsify, opt, 0, false);
  falsify->add_option("--trials", opt.trials, "number of random trials")->check(CLI::PositiveNumber);
  falsify->add_option("--max-dim", opt.falsify_max_dim, "largest random matrix dimension")
      ->check(CLI::PositiveNumber);
  CLI::App* algebra = app.add_subcommand("algebra", "commutant structure check for T at lambda");
  add_common(algebra, opt, 1, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) return run_analyze(opt);
    if (lambdas->parsed()) return run_lambdas(opt);
    if (construct->parsed()) return run_construct(opt);
    if (verify->parsed()) return run_verify(opt);
    if (connect->parsed()) return run_connect(opt);
    if (witness->parsed()) return run_witness(opt);
    if (algebra->parsed()) return run_algebra(opt);
    if (falsify->parsed()) return run_falsify(opt);
  } catch (const pencil::Error& e) {
    const json err{{"error", pencil::to_string(e.code())}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    switch (e.code()) {
      case pencil::ErrorCode::InvalidInput:
      case pencil::ErrorCode::DimensionMismatch:
        return 2;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cout << json{{"error", "Unexpected"}, {"message", e.what()}}.dump(2) << "\n";
    return 1;
  }
  return 2;
}
