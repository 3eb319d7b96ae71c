// cstar: command-line front end for witnesses, commutator decompositions and
// distance estimates. Every command prints one JSON report.
//
// Exit status: 0 ok, 2 validation failure (report still printed), 1 I/O, parse or other errors.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "cstar/decompose.hpp"
#include "cstar/json_io.hpp"
#include "cstar/star_parser.hpp"
#include "cstar/trace_distance.hpp"
#include "cstar/witness.hpp"

namespace {

using cstar::Error;
using cstar::ErrorCode;
using cstar::Operator;
using cstar::StarPolynomial;
using cstar::json::Json;

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2 };

struct Options {
  std::string out;
  double tol = 1e-10;
  double eps = 1e-10;
  std::size_t depth = 0;  // 0: not given
  std::string solver = "neumann";
  bool positive = false;
  bool literal = false;
  bool symbolic = false;
  std::size_t max_iter = 100000;
  std::size_t polish_steps = cstar::kDefaultPolishSteps;
  double agreement_tol = 1e-12;
  int n = 2;
  std::string expr;
  std::string input;
  std::string a_path;
  std::string witness_path;
  int standard = 0;
  int toeplitz = 0;
  int random = 0;
  std::size_t dim = 8;
  std::uint64_t seed = 1;
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::FormatError, path + ": " + e.what());
  }
}

std::size_t max_direct_dim() {
  if (const char* env = std::getenv("CF_MAX_DIRECT_DIM")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || value == 0)
      throw Error(ErrorCode::InvalidArgument, "CF_MAX_DIRECT_DIM must be a positive integer");
    return value;
  }
  return cstar::kDefaultMaxDirectDim;
}

void require_depth(const Options& o, const char* why) {
  if (o.depth == 0) throw Error(ErrorCode::InvalidArgument, std::string("--depth is required ") + why);
}

struct Outcome {
  Json payload = Json::object();
  Exit exit = kOk;
};

Json error_json(const Error& e) {
  Json out{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (const auto* obstruction = dynamic_cast<const cstar::TraceObstruction*>(&e)) out["t0"] = obstruction->t0();
  if (const auto* syntax = dynamic_cast<const cstar::SyntaxError*>(&e)) out["position"] = syntax->position();
  return out;
}

Outcome run_eval(const Options& o) {
  Outcome r;
  const StarPolynomial p = cstar::parse_star_poly(o.expr, o.n);
  r.payload["normal_form"] = cstar::to_string(p);
  r.payload["polynomial"] = cstar::json::to_json(p);
  if (o.depth > 0) {
    const cstar::FockTruncation fock(o.n, o.depth);
    r.payload["matrix"] = cstar::json::to_json(o.literal ? cstar::evaluate_expression(o.expr, fock) : cstar::evaluate(p, fock));
  }
  return r;
}

Json check_file_witness(const cstar::json::WitnessFile& file, const Options& o, bool& ok) {
  if (file.backend == "symbolic") {
    const std::size_t depth = o.depth > 0 ? o.depth : 8;
    const auto w = cstar::check_witness_symbolic(file.polynomials, o.tol, depth);
    ok = w.report.valid;
    return cstar::json::to_json(w);
  }
  const auto w = cstar::check_witness(file.matrices, o.tol, file.interior_mask);
  ok = w.report.valid || w.report.interior_valid;
  return cstar::json::to_json(w, int(w.elements.size()));
}

Outcome run_witness_check(const Options& o) {
  Outcome r;
  bool ok = false;
  const Json source = read_json(o.input);
  Json witness = check_file_witness(cstar::json::witness_from_json(source), o, ok);
  // keep the generator count the file declared
  if (source.contains("n")) witness["n"] = source.at("n");
  r.payload["witness"] = std::move(witness);
  r.payload["report"] = r.payload["witness"]["report"];
  if (!ok) r.exit = kInvalid;
  return r;
}

template <class E>
Outcome build_from(std::span<const E> candidates, const Options& o, std::size_t depth) {
  Outcome r;
  const auto analysis = cstar::analyze_candidates(candidates, depth);
  r.payload["t0"] = analysis.t0;
  r.payload["k"] = analysis.k;
  r.payload["norms_exact"] = analysis.norms_exact;
  const auto built = cstar::build_witness(candidates, o.tol, depth);
  r.payload["eta2_bound"] = built.eta2_bound;
  if constexpr (std::is_same_v<E, StarPolynomial>) {
    r.payload["witness"] = cstar::json::to_json(built.witness);
  } else {
    r.payload["witness"] = cstar::json::to_json(built.witness, int(built.witness.elements.size()));
  }
  r.payload["report"] = r.payload["witness"]["report"];
  if (!built.witness.report.valid) r.exit = kInvalid;
  return r;
}

Outcome run_witness_build(const Options& o) {
  const Json source = read_json(o.input);
  const std::size_t depth = o.depth > 0 ? o.depth : 8;
  if (source.contains("generators")) {
    const auto family = cstar::json::family_from_json(source);
    return build_from(std::span<const Operator>(family.family.generators), o, depth);
  }
  const auto file = cstar::json::witness_from_json(source);
  if (file.backend == "symbolic") return build_from(std::span<const StarPolynomial>(file.polynomials), o, depth);
  return build_from(std::span<const Operator>(file.matrices), o, depth);
}

Outcome run_witness_gen(const Options& o) {
  Outcome r;
  const int chosen = (o.standard > 0) + (o.toeplitz > 0) + (o.random > 0);
  if (chosen != 1) throw Error(ErrorCode::InvalidArgument, "give exactly one of --standard, --toeplitz, --random");

  if (o.standard > 0) {
    if (o.symbolic || o.depth == 0) {
      r.payload = cstar::json::to_json(cstar::standard_isometry_witness(o.standard, o.tol, o.depth > 0 ? o.depth : 1));
    } else {
      r.payload = cstar::json::to_json(cstar::standard_isometry_witness(o.standard, o.depth, o.tol), o.standard);
    }
  } else if (o.toeplitz > 0) {
    Json elements = Json::array();
    for (const auto& a : cstar::toeplitz_candidates(o.toeplitz)) elements.push_back(cstar::json::to_json(a));
    r.payload = Json{{"backend", "symbolic"}, {"n", 2}, {"elements", std::move(elements)}};
  } else {
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Json elements = Json::array();
    for (int i = 0; i < o.random; ++i) {
      Operator a(o.dim);
      for (auto& e : a.entries()) e = cstar::Complex(normal(rng), normal(rng));
      elements.push_back(cstar::json::to_json(a));
    }
    r.payload = Json{{"backend", "matrix"}, {"n", o.random}, {"elements", std::move(elements)}};
  }
  return r;
}

/// A matrix witness from the file, evaluated at --depth when symbolic.
cstar::MatrixWitness load_matrix_witness(const Options& o) {
  const auto file = cstar::json::witness_from_json(read_json(o.witness_path));
  if (file.backend == "symbolic") {
    require_depth(o, "to evaluate a symbolic witness");
    return cstar::evaluate_witness(file.polynomials, o.depth, o.tol);
  }
  return cstar::check_witness(file.matrices, o.tol, file.interior_mask);
}

Operator load_input(const Options& o, const cstar::MatrixWitness& witness) {
  auto element = cstar::json::element_from_json(read_json(o.a_path));
  if (auto* p = std::get_if<StarPolynomial>(&element)) {
    require_depth(o, "to evaluate a symbolic input");
    Operator a = cstar::evaluate(*p, cstar::FockTruncation(p->generators(), o.depth));
    a.check_same_dim(witness.elements.front());
    return a;
  }
  return std::get<Operator>(std::move(element));
}

Outcome run_decompose(const Options& o) {
  Outcome r;
  const auto witness = load_matrix_witness(o);
  r.payload["witness_report"] = cstar::json::to_json(witness.report);
  if (!witness.report.valid && !witness.report.interior_valid) {
    r.payload["error"] = Json{{"code", "InvalidWitness"}, {"message", "witness fails the check at the given tolerance"}};
    r.exit = kInvalid;
    return r;
  }
  const Operator a = load_input(o, witness);

  cstar::DecomposeOptions options;
  options.eps = o.eps;
  options.solver = o.solver == "direct" ? cstar::SolverMethod::Direct : cstar::SolverMethod::Neumann;
  options.max_iter = o.max_iter;
  options.max_direct_dim = max_direct_dim();
  const auto result = o.positive ? cstar::decompose_positive(a, witness, options)
                                 : cstar::decompose_element(a, witness, options);
  r.payload["a"] = cstar::json::to_json(a);
  if (witness.interior_mask) r.payload["interior"] = cstar::json::mask_to_json(*witness.interior_mask);
  const Json fields = cstar::json::to_json(result);
  for (const auto& [key, value] : fields.items()) r.payload[key] = value;
  return r;
}

Outcome run_verify(const Options& o) {
  Outcome r;
  const Json report = read_json(o.input);
  const Operator a = o.a_path.empty() ? cstar::json::operator_from_json(cstar::json::detail::field(report, "a"))
                                      : cstar::json::operator_from_json(read_json(o.a_path));
  const auto pairs = cstar::json::pairs_from_json(cstar::json::detail::field(report, "pairs"));
  std::optional<Operator> mask;
  if (report.contains("interior")) mask = cstar::json::mask_from_json(report.at("interior"), a.dim());

  const auto check = cstar::verify_decomposition(a, std::span<const cstar::CommutatorPair<Operator>>(pairs), mask);
  r.payload["residual_norm"] = check.residual_norm;
  r.payload["residual_interior_norm"] = check.residual_interior_norm ? Json(*check.residual_interior_norm) : Json(nullptr);
  r.payload["trace_defect"] = *check.trace_defect;
  if (report.contains("residual_norm")) {
    const double reported = cstar::json::detail::number(report.at("residual_norm"), "residual_norm");
    const double gap = std::abs(reported - check.residual_norm);
    r.payload["reported_residual_norm"] = reported;
    r.payload["agreement"] = gap <= o.agreement_tol;
    if (gap > o.agreement_tol) r.exit = kInvalid;
  }
  return r;
}

Outcome run_dist(const Options& o) {
  Outcome r;
  const auto file = cstar::json::family_from_json(read_json(o.input));
  const auto estimate = cstar::commutator_distance(file.family, o.polish_steps, file.interior_mask);
  r.payload = cstar::json::to_json(estimate);
  if (!file.interior_mask) {
    // |tau(1 - x)| = 1 for every x in the span: the certificate's lower bound
    const auto tau = cstar::trace_certificate(file.family.dim());
    Operator residual = Operator::identity(file.family.dim());
    for (std::size_t j = 0; j < file.family.size(); ++j)
      residual -= file.family.span_elements[j] * cstar::Complex(estimate.coefficients[j]);
    r.payload["trace_lower_bound"] = std::abs(tau(residual));
  }
  return r;
}

Json config_json(const std::string& command, const Options& o) {
  Json c = Json::object();
  if (command == "eval") {
    c = {{"expr", o.expr}, {"n", o.n}, {"depth", o.depth}, {"literal", o.literal}};
  } else if (command == "witness-check") {
    c = {{"input", o.input}, {"tol", o.tol}, {"depth", o.depth}};
  } else if (command == "witness-build") {
    c = {{"candidates", o.input}, {"tol", o.tol}, {"depth", o.depth > 0 ? o.depth : 8}};
  } else if (command == "witness-gen") {
    c = {{"standard", o.standard}, {"toeplitz", o.toeplitz}, {"random", o.random}, {"dim", o.dim},
         {"seed", o.seed},         {"depth", o.depth},       {"symbolic", o.symbolic}, {"tol", o.tol}};
  } else if (command == "decompose") {
    c = {{"a", o.a_path},       {"witness", o.witness_path}, {"eps", o.eps},           {"tol", o.tol},
         {"solver", o.solver},  {"positive", o.positive},    {"depth", o.depth},       {"max_iter", o.max_iter}};
    try {
      c["max_direct_dim"] = max_direct_dim();
    } catch (const Error&) {
    }
  } else if (command == "verify") {
    c = {{"report", o.input}, {"a", o.a_path}, {"agreement_tol", o.agreement_tol}};
  } else if (command == "dist") {
    c = {{"family", o.input}, {"polish_steps", o.polish_steps}};
  }
  return c;
}

int emit(const Json& report, const std::string& out) {
  const std::string text = report.dump() + "\n";
  if (out.empty()) {
    std::cout << text;
    return kOk;
  }
  std::ofstream file(out);
  if (!file || !(file << text)) {
    std::cerr << "cstar: cannot write " << out << "\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Witnesses and commutator decompositions in Cuntz-Toeplitz truncations"};
  app.set_version_flag("--version", std::string(CSTAR_VERSION));
  app.require_subcommand(1);
  Options o;

  const auto positive_real = CLI::PositiveNumber;
  auto add_out = [&](CLI::App* cmd) { cmd->add_option("-o,--out", o.out, "Write the report here instead of stdout"); };

  auto* eval = app.add_subcommand("eval", "Parse a star-polynomial and optionally evaluate it on a Fock truncation");
  eval->add_option("expr", o.expr, "Expression, e.g. \"s1 s1* + 0.5*s2\"")->required();
  eval->add_option("-n,--generators", o.n, "Number of generators")->check(CLI::Range(1, cstar::kMaxGenerators));
  eval->add_option("-L,--depth", o.depth, "Truncation depth")->check(CLI::PositiveNumber);
  eval->add_flag("--literal", o.literal, "Multiply truncated matrices factor by factor instead of using the normal form");
  add_out(eval);

  auto* check = app.add_subcommand("witness-check", "Recompute eta1, eta2 for a witness file");
  check->add_option("witness", o.input, "Witness JSON")->required();
  check->add_option("--tol", o.tol, "Validity tolerance")->check(positive_real);
  check->add_option("-L,--depth", o.depth, "Truncation depth for symbolic eta2 (default 8)")->check(CLI::PositiveNumber);
  add_out(check);

  auto* build = app.add_subcommand("witness-build", "Build a witness from candidates a_1..a_m");
  build->add_option("--candidates", o.input, "Candidates JSON (witness-shaped or family)")->required();
  build->add_option("--tol", o.tol, "Validity tolerance")->check(positive_real);
  build->add_option("-L,--depth", o.depth, "Truncation depth for symbolic norms (default 8)")->check(CLI::PositiveNumber);
  add_out(build);

  auto* gen = app.add_subcommand("witness-gen", "Generate standard witnesses or candidate families");
  gen->add_option("--standard", o.standard, "Standard isometry witness on n generators")->check(CLI::Range(2, cstar::kMaxGenerators));
  gen->add_option("--toeplitz", o.toeplitz, "Toeplitz J-family candidates")->check(CLI::PositiveNumber);
  gen->add_option("--random", o.random, "Random matrix candidates (count)")->check(CLI::PositiveNumber);
  gen->add_option("--dim", o.dim, "Dimension of random candidates")->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "Seed for random candidates");
  gen->add_option("-L,--depth", o.depth, "Fock truncation depth (matrix witness)")->check(CLI::PositiveNumber);
  gen->add_flag("--symbolic", o.symbolic, "Emit the symbolic witness");
  gen->add_option("--tol", o.tol, "Validity tolerance")->check(positive_real);
  add_out(gen);

  auto* decompose = app.add_subcommand("decompose", "Write a as a sum of n commutators");
  decompose->add_option("--a", o.a_path, "Input element (matrix or polynomial JSON)")->required();
  decompose->add_option("--witness", o.witness_path, "Witness JSON")->required();
  decompose->add_option("--eps", o.eps, "Neumann tail tolerance")->check(positive_real);
  decompose->add_option("--tol", o.tol, "Witness validity tolerance")->check(positive_real);
  decompose->add_option("--solver", o.solver, "neumann or direct")->check(CLI::IsMember({"neumann", "direct"}));
  decompose->add_option("--max-iter", o.max_iter, "Neumann iteration limit")->check(CLI::PositiveNumber);
  decompose->add_option("-L,--depth", o.depth, "Truncation depth for symbolic inputs")->check(CLI::PositiveNumber);
  decompose->add_flag("--positive", o.positive, "Self-adjoint form for positive a");
  add_out(decompose);

  auto* verify = app.add_subcommand("verify", "Recompute the residual of a decomposition report");
  verify->add_option("report", o.input, "Decomposition report JSON")->required();
  verify->add_option("--a", o.a_path, "Input element, overriding the one stored in the report");
  verify->add_option("--agreement-tol", o.agreement_tol, "Allowed gap to the reported residual_norm")->check(positive_real);
  add_out(verify);

  auto* dist = app.add_subcommand("dist", "Estimate the distance from 1 to the span of a_i^* a_i - a_i a_i^*");
  dist->add_option("family", o.input, "Family JSON")->required();
  dist->add_option("--polish-steps", o.polish_steps, "Subgradient steps after least squares");
  add_out(dist);

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  Json report{{"tool", "cstar"}, {"version", CSTAR_VERSION}, {"command", command}, {"config", config_json(command, o)}};
  Outcome outcome;
  try {
    if (command == "eval") outcome = run_eval(o);
    else if (command == "witness-check") outcome = run_witness_check(o);
    else if (command == "witness-build") outcome = run_witness_build(o);
    else if (command == "witness-gen") outcome = run_witness_gen(o);
    else if (command == "decompose") outcome = run_decompose(o);
    else if (command == "verify") outcome = run_verify(o);
    else outcome = run_dist(o);
  } catch (const cstar::TraceObstruction& e) {
    outcome.payload["error"] = error_json(e);
    outcome.exit = kInvalid;
  } catch (const Error& e) {
    outcome.payload["error"] = error_json(e);
    outcome.exit = e.code() == ErrorCode::NotContractive ? kInvalid : kFailure;
  } catch (const std::exception& e) {
    outcome.payload["error"] = Json{{"code", "InternalError"}, {"message", e.what()}};
    outcome.exit = kFailure;
  }

  report["status"] = outcome.exit == kOk ? "ok" : outcome.exit == kInvalid ? "invalid" : "error";
  for (auto& [key, value] : outcome.payload.items()) report[key] = value;
  const int written = emit(report, o.out);
  return outcome.exit != kOk ? outcome.exit : written;
}
