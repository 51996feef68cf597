#ifndef QDLIE_IO_HPP
#define QDLIE_IO_HPP

// JSON ingestion of matrices and structure constants, JSON reports
// ("schema": "qdlie/1") and CSV exports. Doubles are printed round-trip exact
// so identical inputs give byte-identical files.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdlie/classifier.hpp"
#include "qdlie/flows.hpp"
#include "qdlie/lyapunov.hpp"
#include "qdlie/operators.hpp"

namespace qdlie::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "qdlie/1";

/// Position of a parse failure, 1-based.
struct TextPosition {
  std::size_t line = 1;
  std::size_t column = 1;
};

inline TextPosition position_of(const std::string& text, std::size_t byte) {
  TextPosition p;
  // nlohmann reports the 1-based index of the last byte read.
  const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

/// Parses JSON; malformed text raises InvalidInput naming line and column.
inline Json parse_json(const std::string& text, const std::string& origin = "input") {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto p = position_of(text, e.byte);
    std::ostringstream os;
    os << origin << ":" << p.line << ":" << p.column << ": malformed JSON (" << e.what() << ")";
    throw InvalidInput(os.str());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidInput(where + ": expected a number");
  return j.get<double>();
}

/// {"dim": n, "rows": [[...], ...]}, row-major.
inline Endomorphism matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("rows")) throw InvalidInput("matrix JSON needs a \"rows\" array");
  const Json& rows = j.at("rows");
  if (!rows.is_array() || rows.empty()) throw InvalidInput("\"rows\" must be a non-empty array");
  const auto n = rows.size();
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer() || j.at("dim").get<long>() != static_cast<long>(n))
      throw InvalidInput("\"dim\" does not match the number of rows");
  }
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) {
      std::ostringstream os;
      os << "row " << i << " must have " << n << " entries";
      throw InvalidInput(os.str());
    }
    for (std::size_t k = 0; k < n; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          number_at(rows[i][k], "rows[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  return Endomorphism(std::move(m));
}

inline std::optional<bool> type_i_from_json(const Json& j) {
  if (!j.contains("type_i")) return std::nullopt;
  if (!j.at("type_i").is_boolean()) throw InvalidInput("\"type_i\" must be a boolean");
  return j.at("type_i").get<bool>();
}

/// {"dim": n, "brackets": [{"i": 0, "j": 1, "value": [...]}, ...]} or
/// {"dim": n, "constants": [c_000, c_001, ...]} indexed (i * n + j) * n + k.
inline StructureConstants structure_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.at("dim").is_number_integer())
    throw InvalidInput("structure-constant JSON needs an integer \"dim\"");
  const int n = j.at("dim").get<int>();
  if (n <= 0 || n > 64) throw InvalidInput("\"dim\" must lie in [1, 64]");
  if (j.contains("constants")) {
    const Json& c = j.at("constants");
    if (!c.is_array()) throw InvalidInput("\"constants\" must be an array");
    std::vector<double> v;
    for (std::size_t i = 0; i < c.size(); ++i) v.push_back(number_at(c[i], "constants[" + std::to_string(i) + "]"));
    return StructureConstants(n, std::move(v));
  }
  if (!j.contains("brackets") || !j.at("brackets").is_array())
    throw InvalidInput("structure-constant JSON needs \"brackets\" or \"constants\"");
  std::vector<Bracket> brackets;
  for (const auto& b : j.at("brackets")) {
    if (!b.is_object() || !b.contains("i") || !b.contains("j") || !b.contains("value"))
      throw InvalidInput("each bracket needs \"i\", \"j\" and \"value\"");
    Bracket br{b.at("i").get<int>(), b.at("j").get<int>(), {}};
    for (const auto& x : b.at("value")) br.value.push_back(number_at(x, "bracket value"));
    brackets.push_back(std::move(br));
  }
  return StructureConstants::from_brackets(n, brackets);
}

// ---------------------------------------------------------------------------
// Reports

inline Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

inline Json complex_json(Complex z) { return Json{{"re", number(z.real())}, {"im", number(z.imag())}}; }

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(number(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

inline Json to_json(const Tolerances& t) {
  return Json{{"spectral_relative", t.spectral_relative},
              {"boundary_factor", t.boundary_factor},
              {"semisimple", t.semisimple},
              {"membership", kDefaultMembershipTolerance},
              {"ad_samples", t.ad_samples},
              {"ad_violation", t.ad_violation},
              {"commensurable_max_denominator", t.commensurable_max_denominator},
              {"commensurable_tolerance", t.commensurable_tolerance},
              {"seed", t.seed}};
}

inline Json to_json(const Spectrum& s) {
  Json ev = Json::array();
  for (const auto& e : s.eigenvalues) {
    Json item = complex_json(e.value);
    item["multiplicity"] = e.multiplicity;
    ev.push_back(std::move(item));
  }
  return Json{{"eigenvalues", ev},
              {"frobenius_norm", number(s.frobenius_norm)},
              {"epsilon", number(s.epsilon)},
              {"min_real", number(s.min_real())},
              {"max_real", number(s.max_real())}};
}

inline Json to_json(const FateCounts& f) {
  return Json{{"zero", f.zero}, {"infinity", f.infinity}, {"bounded", f.bounded}, {"unclear", f.unclear}};
}

inline Json to_json(const FlowClassification& f) {
  Json j{{"kind", to_string(f.kind)},
         {"witness", {{"min_real", number(f.witness.min_real)},
                      {"max_real", number(f.witness.max_real)},
                      {"epsilon", number(f.witness.epsilon)}}},
         {"boundary_flag", f.boundary_flag},
         {"reason", f.reason}};
  if (f.oracle) {
    j["oracle"] = {{"grid_points", f.oracle->grid_points},
                   {"skipped_zero", f.oracle->skipped_zero},
                   {"forward", to_json(f.oracle->forward)},
                   {"backward", to_json(f.oracle->backward)}};
  }
  return j;
}

inline Json to_json(const TriState& t) { return Json{{"value", to_string(t.value)}, {"justification", t.justification}}; }

inline Json to_json(const QDReport& r) {
  Json j{{"schema", kSchema}, {"kind", "qd_report"}, {"spec", r.spec_kind}};
  if (!r.name.empty()) j["name"] = r.name;
  j["nilpotent"] = to_json(r.nilpotent);
  j["exponential"] = to_json(r.exponential);
  j["type_i_assumed"] = r.type_i_assumed;
  j["type_i_note"] = r.type_i_note;
  j["strongly_quasidiagonal"] = to_json(r.strongly_quasidiagonal);
  j["quasidiagonal"] = to_json(r.quasidiagonal);
  j["af_embeddable"] = to_json(r.af_embeddable);
  j["ccr_liminal"] = to_json(r.ccr_liminal);
  j["boundary_flag"] = r.boundary_flag;
  if (r.flow) j["flow"] = to_json(*r.flow);
  if (r.spectrum) j["spectrum"] = to_json(*r.spectrum);
  j["tolerances"] = to_json(r.tolerances);
  return j;
}

inline Json to_json(const IsoInvariant& iv) {
  return Json{{"n0", iv.n0}, {"pair", Json::array({iv.pair.first, iv.pair.second})}};
}

inline Json to_json(const LyapunovDecomposition& d) {
  Json spaces = Json::array();
  for (std::size_t j = 0; j < d.size(); ++j)
    spaces.push_back(Json{{"lambda", number(d.lambdas[j])}, {"basis", matrix_json(d.spaces[j])}});
  return Json{{"lambdas", [&] {
                 Json a = Json::array();
                 for (double l : d.lambdas) a.push_back(number(l));
                 return a;
               }()},
              {"spaces", spaces},
              {"basis_condition", number(d.basis_condition)},
              {"warning", d.warning}};
}

inline Json to_json(const OmegaSetEstimate& e) {
  Json pts = Json::array();
  for (const auto& p : e.points) pts.push_back(vector_json(p));
  return Json{{"points", pts},
              {"contains_infinity", e.contains_infinity},
              {"params", {{"burn_in", e.params.burn_in}, {"horizon", e.params.horizon}, {"step", e.params.step},
                          {"infinity_radius", number(e.infinity_radius)}}},
              {"samples", e.samples},
              {"low_confidence", e.low_confidence}};
}

inline Json to_json(const ops::Grid& g) { return Json{{"L", g.L()}, {"N", g.N()}, {"h", g.h()}}; }

inline Json doubles_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline Json to_json(const SymmetryReport& r) {
  return Json{{"symmetric", r.symmetric},
              {"tolerance", number(r.tolerance)},
              {"worst_distance", number(r.worst_distance)},
              {"worst_vector", vector_json(r.worst_vector)},
              {"distances", doubles_json(r.distances)},
              {"params", {{"burn_in", r.params.burn_in}, {"horizon", r.params.horizon}, {"step", r.params.step}}}};
}

inline Json to_json(const ClassEntry& c) {
  return Json{{"invariant", to_json(c.invariant)}, {"dim", c.invariant.dim()}, {"non_quasidiagonal", c.non_quasidiagonal}};
}

inline Json to_json(const CatalogEntry& e) {
  Json j{{"name", e.name}, {"description", e.description}};
  if (e.matrix) j["matrix"] = {{"dim", e.matrix->dim()}, {"rows", matrix_json(e.matrix->matrix())}};
  if (e.structure) {
    j["structure"] = {{"dim", e.structure->dim()}, {"derived_series", e.structure->derived_series()},
                      {"lower_central_series", e.structure->lower_central_series()}};
  }
  Json stored = Json::object();
  if (e.stored.strongly_quasidiagonal) stored["strongly_quasidiagonal"] = to_json(*e.stored.strongly_quasidiagonal);
  if (e.stored.quasidiagonal) stored["quasidiagonal"] = to_json(*e.stored.quasidiagonal);
  if (e.stored.af_embeddable) stored["af_embeddable"] = to_json(*e.stored.af_embeddable);
  if (e.stored.type_i) stored["type_i"] = *e.stored.type_i;
  j["stored"] = stored;
  return j;
}

inline Json to_json(const ops::UnitaryReport& r) {
  return Json{{"grid", to_json(r.grid)},  {"rule", ops::to_string(r.rule)},    {"trials", r.trials},
              {"tolerance", r.tolerance}, {"defect", number(r.defect)},        {"defects", doubles_json(r.defects)},
              {"pass", r.pass}};
}

inline Json to_json(const ops::BetaIdentityReport& r) {
  return Json{{"points", r.points}, {"sup_error", number(r.sup_error)}, {"tolerance", r.tolerance}, {"pass", r.pass}};
}

inline Json to_json(const ops::FourierReport& r) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < r.xi.size(); ++k)
    rows.push_back(Json{{"xi", r.xi[k]}, {"measured", complex_json(r.measured[k])}, {"expected", complex_json(r.expected[k])}});
  return Json{{"max_relative_error", number(r.max_relative_error)}, {"frequencies", rows}};
}

inline Json to_json(const ops::CokernelWitness& w) {
  return Json{{"grid", to_json(w.grid)},
              {"symbol", w.symbol},
              {"adjoint_residual", number(w.adjoint_residual)},
              {"forward_residual", number(w.forward_residual)}};
}

inline Json to_json(const ops::IndexReport& r) {
  return Json{{"outcome", ops::to_string(r.outcome)},
              {"gap_tol", r.gap_tol},
              {"sigma_max", number(r.singular_values.size() ? r.singular_values(0) : 0.0)},
              {"bottom", doubles_json(r.bottom)},
              {"boundary_artifacts", r.boundary_artifacts},
              {"correlation", number(r.correlation)},
              {"right_boundary_mass", number(r.right_boundary_mass)},
              {"reason", r.reason}};
}

inline Json to_json(const ops::CompactnessReport& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels)
    levels.push_back(Json{{"grid", to_json(l.grid)},
                          {"sigma_max", number(l.singular_values.size() ? l.singular_values(0) : 0.0)},
                          {"K", l.K},
                          {"plateau", l.plateau},
                          {"boundary_decay", l.boundary_decay}});
  return Json{{"label", r.label}, {"stable", r.stable}, {"levels", levels}};
}

inline Json to_json(const ops::CovarianceReport& r) {
  return Json{{"grid", to_json(r.grid)},
              {"requested_shift", number(r.requested_shift)},
              {"shift", number(r.shift)},
              {"steps", r.steps},
              {"snap_distance", number(r.snap_distance)},
              {"defect", number(r.defect)},
              {"tolerance", r.tolerance},
              {"pass", r.pass}};
}

/// Two-space indentation and a trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

/// Round-trip exact decimal form of a double.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// (t, v_1..v_n, log_norm); entries overflow to inf where exp(log_norm) does.
inline std::string trajectory_csv(const std::vector<TrajectorySample>& samples) {
  std::ostringstream os;
  const auto n = samples.empty() ? 0 : samples.front().state.unit.size();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",v_" << (i + 1);
  os << ",log_norm\n";
  for (const auto& s : samples) {
    os << fmt(s.t);
    const Vector v = s.state.value();
    for (Eigen::Index i = 0; i < n; ++i) os << "," << fmt(v(i));
    os << "," << fmt(s.state.log_norm) << "\n";
  }
  return os.str();
}

/// (first, second) with a header row.
inline std::string two_column_csv(const std::string& first, const std::string& second, const std::vector<double>& a,
                                  const std::vector<double>& b) {
  std::ostringstream os;
  os << first << "," << second << "\n";
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) os << fmt(a[i]) << "," << fmt(b[i]) << "\n";
  return os.str();
}

inline std::string indexed_csv(const std::string& value_name, const Vector& v) {
  std::vector<double> idx, val;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    idx.push_back(static_cast<double>(i + 1));
    val.push_back(v(i));
  }
  return two_column_csv("index", value_name, idx, val);
}

inline std::string sampled_csv(const ops::Grid& g, const std::string& value_name, const Vector& v) {
  std::vector<double> t, val;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    t.push_back(g.t(i));
    val.push_back(v(i));
  }
  return two_column_csv("t", value_name, t, val);
}

}  // namespace qdlie::io

#endif  // QDLIE_IO_HPP
