// qdlie: classification, flow analysis, enumeration and operator experiments
// from the command line. Reports are JSON ("schema": "qdlie/1"), data is CSV.
//
// Exit codes: 0 success, 1 input error, 2 experiment FAIL, 3 INCONCLUSIVE.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qdlie/io.hpp"
#include "qdlie/qdlie.hpp"

namespace {

using namespace qdlie;
using io::Json;

enum Exit : int { kOk = 0, kInputError = 1, kFail = 2, kInconclusive = 3 };

int exit_for(ops::Outcome o) {
  switch (o) {
    case ops::Outcome::pass: return kOk;
    case ops::Outcome::fail: return kFail;
    case ops::Outcome::inconclusive: return kInconclusive;
  }
  return kInputError;
}

struct Output {
  Json report;
  /// Written only when a CSV path was requested.
  std::string csv;
  int code = kOk;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

Json header(const std::string& kind, std::uint64_t seed) {
  return Json{{"schema", io::kSchema}, {"kind", kind}, {"seed", seed}};
}

ops::SymbolFunction parse_symbol(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  std::optional<double> arg;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      arg = std::stod(text.substr(colon + 1), &used);
      if (colon + 1 + used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw InvalidInput("malformed symbol parameter in '" + text + "'");
    }
  }
  if (name == "logistic") return ops::SymbolFunction::logistic(arg.value_or(0.0));
  if (name == "radial") return ops::SymbolFunction::radial(arg.value_or(1.0));
  if (name == "constant") return ops::SymbolFunction::constant(arg.value_or(1.0));
  throw InvalidInput("unknown symbol '" + text + "'; expected logistic[:shift], radial:y or constant:c");
}

ops::QuadratureRule parse_rule(const std::string& text) {
  if (text == "rectangle") return ops::QuadratureRule::rectangle;
  if (text == "trapezoid") return ops::QuadratureRule::trapezoid;
  throw InvalidInput("unknown quadrature rule '" + text + "'");
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  std::string matrix, structure, catalog_name;
  std::string type_i;
  double spectral_relative = kDefaultRelativeEpsilon;
  int ad_samples = 1000;
};

std::optional<bool> parse_type_i(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "yes" || s == "true") return true;
  if (s == "no" || s == "false") return false;
  throw InvalidInput("--type-i expects yes or no");
}

Output run_classify(const ClassifyArgs& a, std::uint64_t seed) {
  Tolerances tol;
  tol.spectral_relative = a.spectral_relative;
  tol.ad_samples = a.ad_samples;
  tol.seed = seed;
  const int given = !a.matrix.empty() + !a.structure.empty() + !a.catalog_name.empty();
  if (given != 1) throw InvalidInput("classify needs exactly one of --matrix, --structure, --catalog");
  const auto override_type_i = parse_type_i(a.type_i);
  QDReport r;
  if (!a.matrix.empty()) {
    const Json j = io::parse_json(io::read_file(a.matrix), a.matrix);
    r = classify(MatrixSpec{io::matrix_from_json(j), override_type_i ? override_type_i : io::type_i_from_json(j)}, tol);
  } else if (!a.structure.empty()) {
    const Json j = io::parse_json(io::read_file(a.structure), a.structure);
    r = classify(StructureSpec{io::structure_from_json(j), override_type_i ? override_type_i : io::type_i_from_json(j)},
                 tol);
  } else {
    r = classify(parse_catalog_name(a.catalog_name), tol);
  }
  Output out;
  out.report = io::to_json(r);
  out.report["seed"] = seed;
  return out;
}

struct FlowArgs {
  std::string matrix;
  bool oracle = false;
  double horizon = 20.0;
  double step = 0.05;
};

Output run_flow(const FlowArgs& a, std::uint64_t seed) {
  const Json j = io::parse_json(io::read_file(a.matrix), a.matrix);
  const Endomorphism d = io::matrix_from_json(j);
  if (!(a.step > 0.0) || !(a.horizon >= 0.0)) throw InvalidInput("flow: --step must be positive, --horizon nonnegative");
  Output out;
  out.report = header("flow", seed);
  const FlowClassification spectral = classify_flow(d);
  out.report["classification"] = io::to_json(spectral);
  out.report["lyapunov"] = io::to_json(lyapunov_decomposition(d));
  if (a.oracle) {
    const FlowClassification oracle = oracle_classify_flow(d, lattice_grid(d.dim()));
    out.report["oracle"] = io::to_json(oracle);
    if (oracle.kind == FlowKind::inconclusive) {
      out.code = kInconclusive;
      out.report["agreement"] = "INCONCLUSIVE";
    } else {
      const bool agree = oracle.kind == spectral.kind;
      out.report["agreement"] = agree ? "AGREE" : "DISAGREE";
      if (!agree) out.code = kFail;
    }
  }
  CounterRng rng(seed, 0xf10);
  const Vector v = rng.unit_vector(d.dim());
  out.report["trajectory"] = {{"start", io::vector_json(v)}, {"horizon", a.horizon}, {"step", a.step}};
  out.csv = io::trajectory_csv(sample_trajectory(d, v, Direction::forward, a.horizon, a.step));
  return out;
}

Output run_enumerate(int m, std::uint64_t seed) {
  if (m < 0 || m > 64) throw InvalidInput("--dim must lie in [0, 64]");
  Output out;
  out.report = header("enumeration", seed);
  const auto classes = enumerate_classes(m);
  out.report["m"] = m;
  out.report["count"] = count_classes(static_cast<std::uint64_t>(m));
  Json list = Json::array();
  std::ostringstream csv;
  csv << "n0,n_a,n_b,non_quasidiagonal\n";
  for (const auto& c : classes) {
    list.push_back(io::to_json(c));
    csv << c.invariant.n0 << "," << c.invariant.pair.first << "," << c.invariant.pair.second << ","
        << (c.non_quasidiagonal ? 1 : 0) << "\n";
  }
  out.report["classes"] = list;
  out.csv = csv.str();
  return out;
}

Output run_catalog(const std::string& name, std::uint64_t seed) {
  Output out;
  out.report = header("catalog", seed);
  Json entries = Json::array();
  if (name.empty()) {
    for (const auto& n : catalog_names()) entries.push_back(io::to_json(catalog(n)));
  } else {
    const CatalogSpec spec = parse_catalog_name(name);
    entries.push_back(io::to_json(catalog(spec.name, spec.params)));
  }
  out.report["entries"] = entries;
  return out;
}

// ---------------------------------------------------------------------------

struct OplabArgs {
  std::string experiment;
  std::string symbol = "logistic";
  std::string rule = "rectangle";
  std::string profile = "sech";
  double L = 30.0;
  int N = 1024;
  int trials = 100;
  double tol = 1e-3;
  double shift_steps = 64.0;
};

Output run_oplab(const OplabArgs& a, std::uint64_t seed) {
  const ops::Grid grid(a.L, a.N);
  const ops::QuadratureRule rule = parse_rule(a.rule);
  Output out;
  out.report = header("oplab", seed);
  out.report["experiment"] = a.experiment;
  out.report["params"] = {{"grid", io::to_json(grid)}, {"rule", ops::to_string(rule)}};
  Json& params = out.report["params"];
  Json result;
  ops::Outcome outcome = ops::Outcome::pass;

  if (a.experiment == "unitary") {
    params["trials"] = a.trials;
    params["tolerance"] = a.tol;
    const auto r = ops::check_unitary(grid, a.trials, a.tol, seed, rule);
    result = io::to_json(r);
    result["beta_identity"] = io::to_json(ops::check_beta_identity(grid));
    outcome = r.pass ? ops::Outcome::pass : ops::Outcome::fail;
    std::vector<double> idx;
    for (std::size_t k = 0; k < r.defects.size(); ++k) idx.push_back(static_cast<double>(k + 1));
    out.csv = io::two_column_csv("trial", "defect", idx, r.defects);
  } else if (a.experiment == "fourier") {
    const auto r = ops::fourier_multiplier_check(grid, rule);
    params["tolerance"] = 1e-2;
    result = io::to_json(r);
    outcome = r.max_relative_error <= 1e-2 ? ops::Outcome::pass : ops::Outcome::fail;
    std::vector<double> err;
    for (std::size_t k = 0; k < r.xi.size(); ++k) err.push_back(std::abs(r.measured[k] - r.expected[k]) / std::abs(r.expected[k]));
    out.csv = io::two_column_csv("xi", "relative_error", r.xi, err);
  } else if (a.experiment == "witness") {
    const auto c = parse_symbol(a.symbol);
    params["symbol"] = c.label();
    const auto w = ops::cokernel_witness(c, grid, rule);
    result = io::to_json(w);
    outcome = w.adjoint_residual <= 1e-6 && w.forward_residual >= 0.1 ? ops::Outcome::pass : ops::Outcome::fail;
    out.csv = io::sampled_csv(grid, "zeta", w.zeta);
  } else if (a.experiment == "index") {
    const auto c = parse_symbol(a.symbol);
    params["symbol"] = c.label();
    params["gap_tol"] = 1e-2;
    Vector witness;
    try {
      witness = ops::cokernel_witness(c, grid, rule).zeta;
    } catch (const PreconditionError& e) {
      params["witness"] = std::string("none: ") + e.what();
    }
    const auto r = ops::index_signature(ops::product_conv_operator(c, grid, rule), witness);
    result = io::to_json(r);
    outcome = r.outcome;
    out.csv = io::indexed_csv("sigma", r.singular_values);
  } else if (a.experiment == "compactness") {
    std::function<double(double)> hfun;
    if (a.profile == "sech")
      hfun = [](double t) { return 1.0 / std::cosh(t); };
    else if (a.profile == "logistic")
      hfun = [](double t) { return ops::logistic(t); };
    else if (a.profile == "zero")
      hfun = [](double) { return 0.0; };
    else
      throw InvalidInput("unknown compactness profile '" + a.profile + "'; expected sech, logistic or zero");
    params["profile"] = a.profile;
    params["kernel"] = "beta";
    const auto r = ops::compactness_ladder(a.profile, hfun, ops::beta_kernel, grid.h(), {a.N, 2 * a.N, 4 * a.N});
    result = io::to_json(r);
    bool decays = true;
    for (const auto& l : r.levels) decays = decays && l.boundary_decay;
    outcome = r.stable && decays ? ops::Outcome::pass : ops::Outcome::fail;
    out.csv = io::indexed_csv("sigma", r.levels.back().singular_values);
  } else if (a.experiment == "covariance") {
    const auto g = parse_symbol(a.symbol);
    params["symbol"] = g.label();
    params["chi"] = "exp(-t^2/2)";
    params["shift_steps"] = a.shift_steps;
    std::vector<double> steps, defects;
    bool pass = true;
    Json rows = Json::array();
    for (double s : {0.0, a.shift_steps, -a.shift_steps}) {
      const auto r = ops::covariance_check(g, [](double t) { return std::exp(-0.5 * t * t); }, s * grid.h(), grid);
      rows.push_back(io::to_json(r));
      steps.push_back(static_cast<double>(r.steps));
      defects.push_back(r.defect);
      pass = pass && r.pass;
    }
    result = Json{{"shifts", rows}};
    outcome = pass ? ops::Outcome::pass : ops::Outcome::fail;
    out.csv = io::two_column_csv("steps", "defect", steps, defects);
  } else {
    throw InvalidInput("unknown experiment '" + a.experiment + "'");
  }
  out.report["result"] = result;
  out.report["outcome"] = ops::to_string(outcome);
  out.code = exit_for(outcome);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasidiagonality and flow analysis for solvable Lie groups"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  std::string out_path, csv_path;
  app.add_option("--seed", seed, "Seed for randomized checks")->capture_default_str();
  app.add_option("--out", out_path, "Write the JSON report here instead of standard output");
  app.add_option("--csv", csv_path, "Write CSV data here");

  ClassifyArgs ca;
  auto* classify_cmd = app.add_subcommand("classify", "Regularity report for a group");
  classify_cmd->add_option("--matrix", ca.matrix, "JSON file with a matrix D");
  classify_cmd->add_option("--structure", ca.structure, "JSON file with structure constants");
  classify_cmd->add_option("--catalog", ca.catalog_name, "Catalog entry, e.g. S3(0.5)");
  classify_cmd->add_option("--type-i", ca.type_i, "Override the type-I status (yes/no)");
  classify_cmd->add_option("--eps", ca.spectral_relative, "Relative spectral tolerance")->capture_default_str();
  classify_cmd->add_option("--ad-samples", ca.ad_samples, "Random elements for the ad-spectrum test")->capture_default_str();

  FlowArgs fa;
  auto* flow_cmd = app.add_subcommand("flow", "Attractor-repeller classification of t -> exp(tD)");
  flow_cmd->add_option("--matrix", fa.matrix, "JSON file with a matrix D")->required();
  flow_cmd->add_flag("--oracle", fa.oracle, "Compare with the brute-force trajectory oracle (dim <= 3)");
  flow_cmd->add_option("--horizon", fa.horizon, "Trajectory CSV horizon")->capture_default_str();
  flow_cmd->add_option("--step", fa.step, "Trajectory CSV step")->capture_default_str();

  int dim = 0;
  auto* enumerate_cmd = app.add_subcommand("enumerate", "Isomorphism classes of generalized ax+b groups");
  enumerate_cmd->add_option("--dim", dim, "Dimension m of V")->required();

  OplabArgs oa;
  auto* oplab_cmd = app.add_subcommand("oplab", "Discretized operator experiments");
  oplab_cmd->add_option("experiment", oa.experiment, "unitary | fourier | witness | index | compactness | covariance")
      ->required();
  oplab_cmd->add_option("--symbol", oa.symbol, "logistic[:shift] | radial:y | constant:c")->capture_default_str();
  oplab_cmd->add_option("--rule", oa.rule, "rectangle | trapezoid")->capture_default_str();
  oplab_cmd->add_option("--profile", oa.profile, "Compactness profile: sech | logistic | zero")->capture_default_str();
  oplab_cmd->add_option("--L", oa.L, "Half width of the grid")->capture_default_str();
  oplab_cmd->add_option("--N", oa.N, "Grid points (power of two)")->capture_default_str();
  oplab_cmd->add_option("--trials", oa.trials, "Random vectors for the unitarity check")->capture_default_str();
  oplab_cmd->add_option("--tol", oa.tol, "Unitarity tolerance")->capture_default_str();
  oplab_cmd->add_option("--shift", oa.shift_steps, "Covariance shift in grid steps")->capture_default_str();

  std::string catalog_name;
  auto* catalog_cmd = app.add_subcommand("catalog", "Stored catalog specs and flags");
  catalog_cmd->add_option("name", catalog_name, "Entry name, e.g. mautner(1.5)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    Output out;
    if (*classify_cmd)
      out = run_classify(ca, seed);
    else if (*flow_cmd)
      out = run_flow(fa, seed);
    else if (*enumerate_cmd)
      out = run_enumerate(dim, seed);
    else if (*oplab_cmd)
      out = run_oplab(oa, seed);
    else
      out = run_catalog(catalog_name, seed);

    const std::string text = io::dump(out.report);
    if (out_path.empty())
      std::cout << text;
    else
      write_text(out_path, text);
    if (!csv_path.empty()) write_text(csv_path, out.csv);
    return out.code;
  } catch (const Error& e) {
    std::cerr << "qdlie: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "qdlie: " << e.what() << "\n";
    return kInputError;
  }
}
