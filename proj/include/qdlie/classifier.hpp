#ifndef QDLIE_CLASSIFIER_HPP
#define QDLIE_CLASSIFIER_HPP

// Regularity report for solvable Lie groups: nilpotency, exponentiality,
// strong quasidiagonality (equivalently CCR), quasidiagonality and
// AF-embeddability of the group C*-algebra, plus the isomorphism invariant and
// class count for generalized ax+b groups with semisimple D.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qdlie/flows.hpp"
#include "qdlie/lie_algebra.hpp"
#include "qdlie/random.hpp"
#include "qdlie/spectra.hpp"

namespace qdlie {

struct Tolerances {
  /// eps_spec = spectral_relative * max(1, ||D||_F).
  double spectral_relative = kDefaultRelativeEpsilon;
  /// |Re z| <= boundary_factor * eps_spec counts as Re z = 0.
  double boundary_factor = 10.0;
  /// ||N|| <= semisimple * ||D|| counts as semisimple.
  double semisimple = 1e-6;
  /// Random elements A for the ad(A) spectrum test on structure constants.
  int ad_samples = 1000;
  /// |Re| above this (relative to max(1, ||ad A||_F)) is a clear violation.
  double ad_violation = 1e-6;
  /// Denominator bound and tolerance for commensurability of frequencies.
  int commensurable_max_denominator = 64;
  double commensurable_tolerance = 1e-8;
  std::uint64_t seed = 0;
};

enum class Verdict { yes, no, unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "YES";
    case Verdict::no: return "NO";
    case Verdict::unknown: return "UNKNOWN";
  }
  return "?";
}

struct TriState {
  Verdict value = Verdict::unknown;
  std::string justification;
};

struct MatrixSpec {
  Endomorphism d;
  /// Type-I status; when absent it is inferred from the spectrum.
  std::optional<bool> type_i;
};

struct StructureSpec {
  StructureConstants constants;
  /// Type-I status; when absent it is assumed, with a caveat in the report.
  std::optional<bool> type_i;
};

struct CatalogSpec {
  std::string name;
  std::vector<double> params;
};

using GroupSpec = std::variant<MatrixSpec, StructureSpec, CatalogSpec>;

struct QDReport {
  std::string spec_kind;
  std::string name;
  TriState nilpotent;
  TriState exponential;
  bool type_i_assumed = true;
  std::string type_i_note;
  TriState strongly_quasidiagonal;
  TriState quasidiagonal;
  TriState af_embeddable;
  TriState ccr_liminal;
  std::optional<FlowClassification> flow;
  std::optional<Spectrum> spectrum;
  bool boundary_flag = false;
  Tolerances tolerances;
};

namespace detail {

/// Smallest q <= max_q with |x - p/q| <= tol for some integer p, or 0.
inline int rational_denominator(double x, int max_q, double tol) {
  for (int q = 1; q <= max_q; ++q)
    if (std::abs(x * q - std::round(x * q)) <= tol * q) return q;
  return 0;
}

/// Positive imaginary parts of eigenvalues on the imaginary axis.
inline std::vector<double> imaginary_frequencies(const Spectrum& s) {
  std::vector<double> out;
  for (const auto& e : s.eigenvalues)
    if (std::abs(e.value.real()) <= s.boundary() && e.value.imag() > s.boundary()) out.push_back(e.value.imag());
  return out;
}

struct TypeIInference {
  bool type_i = true;
  std::string note;
};

/// Two rotation speeds on the imaginary axis with an irrational ratio give
/// dense-winding orbits (the Mautner phenomenon) and the group is not type I.
inline TypeIInference infer_type_i(const Spectrum& s, const Tolerances& tol) {
  const auto f = imaginary_frequencies(s);
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = a + 1; b < f.size(); ++b) {
      const double ratio = f[b] / f[a];
      if (rational_denominator(ratio, tol.commensurable_max_denominator, tol.commensurable_tolerance) == 0) {
        std::ostringstream os;
        os << "not type I: imaginary-axis frequencies " << f[a] << " and " << f[b]
           << " have no rational ratio with denominator <= " << tol.commensurable_max_denominator
           << ", so orbits wind densely on tori";
        return {false, os.str()};
      }
    }
  return {true, "type I assumed: no pair of incommensurable imaginary-axis frequencies"};
}

/// Fills strong QD and CCR from (condition holds?, type I?) and QD.
inline void gate_strong_qd(QDReport& r, std::optional<bool> condition, const std::string& condition_text) {
  TriState sqd;
  if (r.nilpotent.value == Verdict::yes) {
    sqd = {Verdict::yes, "nilpotent groups have strongly quasidiagonal C*-algebras"};
  } else if (r.quasidiagonal.value == Verdict::no) {
    sqd = {Verdict::no, "strong quasidiagonality implies quasidiagonality, which fails"};
  } else if (!r.type_i_assumed) {
    sqd = {Verdict::unknown, "type-I hypothesis fails, so the spectral criterion (" + condition_text + ") does not decide"};
  } else if (!condition.has_value()) {
    sqd = {Verdict::unknown, "spectral criterion inconclusive: " + condition_text};
  } else if (*condition) {
    sqd = {Verdict::yes, "type I and every ad A has spectrum in iR: " + condition_text};
  } else {
    sqd = {Verdict::no, "type I and some ad A has an eigenvalue off iR: " + condition_text};
  }
  r.strongly_quasidiagonal = sqd;
  TriState ccr = sqd;
  if (sqd.value == Verdict::yes) ccr.justification = "CCR iff strongly quasidiagonal for type-I solvable groups; " + sqd.justification;
  if (sqd.value == Verdict::no) ccr.justification = "CCR iff strongly quasidiagonal for type-I solvable groups; " + sqd.justification;
  if (sqd.value == Verdict::unknown) ccr.justification = "mirrors strong quasidiagonality: " + sqd.justification;
  r.ccr_liminal = ccr;
}

/// Strong QD implies QD, and AF-embeddable implies QD.
inline void close_implications(QDReport& r) {
  if (r.strongly_quasidiagonal.value == Verdict::yes && r.quasidiagonal.value != Verdict::yes)
    r.quasidiagonal = {Verdict::yes, "implied by strong quasidiagonality"};
  if (r.quasidiagonal.value == Verdict::no && r.strongly_quasidiagonal.value != Verdict::no) {
    r.strongly_quasidiagonal = {Verdict::no, "strong quasidiagonality implies quasidiagonality, which fails"};
    r.ccr_liminal = {Verdict::no, "mirrors strong quasidiagonality: " + r.strongly_quasidiagonal.justification};
  }
  if (r.quasidiagonal.value == Verdict::no && r.af_embeddable.value != Verdict::no)
    r.af_embeddable = {Verdict::no, "AF-embeddable algebras are quasidiagonal, and quasidiagonality fails"};
}

}  // namespace detail

/// Classification of g_D = R x|_D V through the spectrum of D.
inline QDReport classify_matrix(const Endomorphism& d, std::optional<bool> type_i, const Tolerances& tol = {}) {
  QDReport r;
  r.spec_kind = "matrix";
  r.tolerances = tol;
  Spectrum s = compute_spectrum(d, tol.spectral_relative);
  const double b = tol.boundary_factor * s.epsilon;

  bool all_zero = true, imaginary_axis = true, nonzero_imaginary = false;
  for (const auto& e : s.eigenvalues) {
    if (std::abs(e.value) > b) all_zero = false;
    if (std::abs(e.value.real()) > b) imaginary_axis = false;
    if (std::abs(e.value.real()) <= b && std::abs(e.value.imag()) > b) nonzero_imaginary = true;
    if (std::abs(e.value.real()) <= b) r.boundary_flag = true;
  }
  const double min_re = s.min_real(), max_re = s.max_real();

  r.nilpotent = all_zero ? TriState{Verdict::yes, "sigma(D) = {0}, so D and g_D are nilpotent"}
                         : TriState{Verdict::no, "D has a nonzero eigenvalue, so ad of the generator is not nilpotent"};
  r.exponential = nonzero_imaginary
                      ? TriState{Verdict::no, "sigma(D) contains a nonzero purely imaginary eigenvalue"}
                      : TriState{Verdict::yes, "sigma(D) contains no nonzero purely imaginary eigenvalue"};

  std::ostringstream qd;
  if (min_re > b) {
    qd << "all eigenvalue real parts positive (min Re = " << min_re << ")";
    r.quasidiagonal = {Verdict::no, qd.str()};
  } else if (max_re < -b) {
    qd << "all eigenvalue real parts negative (max Re = " << max_re << ")";
    r.quasidiagonal = {Verdict::no, qd.str()};
  } else {
    qd << "eigenvalue real parts not of one strict sign (Re in [" << min_re << ", " << max_re << "])";
    r.quasidiagonal = {Verdict::yes, qd.str()};
  }
  r.af_embeddable = {r.quasidiagonal.value, "equivalent to quasidiagonality for generalized ax+b groups: " +
                                                 r.quasidiagonal.justification};

  if (r.nilpotent.value == Verdict::yes) {
    r.type_i_assumed = true;
    r.type_i_note = type_i.has_value() && !*type_i ? "type I: nilpotent groups are type I (override ignored)"
                                                   : "type I: nilpotent groups are type I";
  } else if (type_i.has_value()) {
    r.type_i_assumed = *type_i;
    r.type_i_note = *type_i ? "type I asserted by the caller" : "not type I, asserted by the caller";
  } else {
    const auto inferred = detail::infer_type_i(s, tol);
    r.type_i_assumed = inferred.type_i;
    r.type_i_note = inferred.note;
  }

  std::ostringstream cond;
  cond << "eigenvalues of ad(t, v) are t sigma(D) u {0}; sigma(D) "
       << (imaginary_axis ? "lies in iR" : "leaves iR") << " (max |Re| = " << std::max(std::abs(min_re), std::abs(max_re))
       << ")";
  detail::gate_strong_qd(r, imaginary_axis, cond.str());
  detail::close_implications(r);

  r.flow = classify_flow(compute_spectrum(d.adjoint(), tol.spectral_relative));
  r.boundary_flag = r.boundary_flag || r.flow->boundary_flag;
  r.spectrum = std::move(s);
  return r;
}

namespace detail {

struct RootAnalysis {
  /// nullopt when the two generic elements disagree.
  std::optional<bool> exponential;
  std::string detail;
};

/// Roots of a solvable algebra as complex linear functionals, read off the
/// generalized eigenspaces of ad(A) for a generic A: alpha_c(e_i) is the mean
/// eigenvalue of ad(e_i) compressed to the cluster c. The group is exponential
/// iff Im alpha is a real multiple of Re alpha for every root.
inline RootAnalysis analyze_roots(const StructureConstants& g, const Tolerances& tol) {
  const int n = g.dim();
  std::vector<Matrix> ads;
  for (int i = 0; i < n; ++i) ads.push_back(g.ad_basis(i));
  auto verdict = [&](const Vector& a, std::string& why) {
    const Endomorphism ad_a(g.ad(a));
    const Spectrum s = compute_spectrum(ad_a, tol.spectral_relative);
    const SpectralBasis sb = spectral_basis(ad_a, s);
    Eigen::FullPivLU<CMatrix> lu(sb.basis);
    if (!lu.isInvertible()) return std::optional<bool>{};
    const CMatrix inv = lu.inverse();
    double scale = 1.0;
    for (const auto& m : ads) scale = std::max(scale, m.norm());
    const double cut = tol.ad_violation * scale;
    for (std::size_t c = 0; c < s.eigenvalues.size(); ++c) {
      const int m = s.eigenvalues[c].multiplicity;
      const auto k = sb.basis.middleCols(sb.offset[c], m);
      const auto w = inv.middleRows(sb.offset[c], m);
      Vector beta(n), gamma(n);
      for (int i = 0; i < n; ++i) {
        const Complex alpha = (w * ads[i].cast<Complex>() * k).trace() / static_cast<double>(m);
        beta(i) = alpha.real();
        gamma(i) = alpha.imag();
      }
      if (gamma.norm() <= cut) continue;
      const double bn = beta.norm();
      const double off = bn <= cut ? gamma.norm() : (gamma - beta * (beta.dot(gamma) / (bn * bn))).norm();
      if (off > cut) {
        std::ostringstream os;
        os << "root with Re part norm " << bn << " and Im part norm " << gamma.norm()
           << " not proportional: some ad x has a nonzero purely imaginary eigenvalue";
        why = os.str();
        return std::optional<bool>{false};
      }
    }
    why = "every root has imaginary part proportional to its real part";
    return std::optional<bool>{true};
  };
  CounterRng rng(tol.seed, 0x4007);
  std::string why1, why2;
  const auto first = verdict(rng.unit_vector(n), why1);
  const auto second = verdict(rng.unit_vector(n), why2);
  if (first.has_value() && second.has_value() && *first == *second) return {first, why1};
  return {std::nullopt, "root functionals disagree between two generic elements"};
}

}  // namespace detail

/// Classification of a solvable Lie algebra given by structure constants. The
/// universal condition on ad A is sampled on the basis plus tol.ad_samples
/// seeded random unit vectors, so the strong-QD verdict is heuristic.
inline QDReport classify_structure(const StructureConstants& g, std::optional<bool> type_i, const Tolerances& tol = {}) {
  QDReport r;
  r.spec_kind = "structure_constants";
  r.tolerances = tol;
  const auto derived = g.derived_series();
  if (derived.back() != 0) {
    std::ostringstream os;
    os << "Lie algebra is not solvable (derived series stabilizes at dimension " << derived.back() << ")";
    throw UnsupportedInput(os.str());
  }
  const auto lcs = g.lower_central_series();
  std::ostringstream series;
  series << "lower central series dimensions";
  for (int x : lcs) series << " " << x;
  if (lcs.back() == 0) {
    r.nilpotent = {Verdict::yes, series.str() + " reach 0"};
  } else {
    r.nilpotent = {Verdict::no, series.str() + " stabilize above 0"};
  }

  const int n = g.dim();
  std::vector<Vector> samples;
  for (int i = 0; i < n; ++i) samples.push_back(Vector::Unit(n, i));
  CounterRng rng(tol.seed, 0xad);
  for (int k = 0; k < tol.ad_samples; ++k) samples.push_back(rng.unit_vector(n));
  double worst = 0.0;
  bool clear_violation = false, all_within = true;
  for (const auto& a : samples) {
    const Endomorphism ad_a(g.ad(a));
    const Spectrum s = compute_spectrum(ad_a, tol.spectral_relative);
    const double scale = std::max(1.0, s.frobenius_norm);
    for (const auto& e : s.eigenvalues) {
      const double re = std::abs(e.value.real());
      worst = std::max(worst, re / scale);
      if (re > tol.ad_violation * scale) clear_violation = true;
      if (re > tol.boundary_factor * s.epsilon) all_within = false;
    }
  }
  std::ostringstream cond;
  cond << "sampled " << samples.size() << " elements A, max |Re sigma(ad A)| / max(1, ||ad A||) = " << worst;
  std::optional<bool> condition;
  if (clear_violation)
    condition = false;
  else if (all_within)
    condition = true;

  if (r.nilpotent.value == Verdict::yes) {
    r.type_i_assumed = true;
    r.type_i_note = "type I: nilpotent groups are type I";
  } else if (type_i.has_value()) {
    r.type_i_assumed = *type_i;
    r.type_i_note = *type_i ? "type I asserted by the caller" : "not type I, asserted by the caller";
  } else {
    r.type_i_assumed = true;
    r.type_i_note = "type I assumed by default (not verified for general structure constants)";
  }

  if (r.nilpotent.value == Verdict::yes) {
    r.exponential = {Verdict::yes, "simply connected nilpotent groups are exponential"};
  } else {
    const auto roots = detail::analyze_roots(g, tol);
    if (!roots.exponential.has_value())
      r.exponential = {Verdict::unknown, roots.detail};
    else
      r.exponential = {*roots.exponential ? Verdict::yes : Verdict::no, roots.detail};
  }

  r.quasidiagonal = {Verdict::unknown, "no computable quasidiagonality criterion for general structure constants"};
  r.af_embeddable = {Verdict::unknown, "no computable AF-embeddability criterion for general structure constants"};
  detail::gate_strong_qd(r, condition, cond.str());
  if (condition.has_value() && *condition && r.strongly_quasidiagonal.value == Verdict::yes &&
      r.nilpotent.value != Verdict::yes)
    r.strongly_quasidiagonal.justification += " (heuristic: finite sample of A)";
  detail::close_implications(r);
  return r;
}

// ---------------------------------------------------------------------------
// Catalog

struct CatalogFlags {
  std::optional<TriState> strongly_quasidiagonal;
  std::optional<TriState> quasidiagonal;
  std::optional<TriState> af_embeddable;
  std::optional<bool> type_i;
};

struct CatalogEntry {
  std::string name;
  std::string description;
  /// Exactly one of these holds the defining data.
  std::optional<Endomorphism> matrix;
  std::optional<StructureConstants> structure;
  CatalogFlags stored;
};

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"S2", "S3", "S4", "mautner", "heisenberg", "euclid_scaled"};
  return names;
}

inline std::string catalog_usage() {
  return "valid catalog names: S2, S3(sigma), S4, mautner(theta), heisenberg, euclid_scaled(n)";
}

inline Matrix rotation_generator(double speed) {
  Matrix m(2, 2);
  m << 0.0, speed, -speed, 0.0;
  return m;
}

/// Lie algebra R + so(n) x| R^n: the real line acts by scaling, so(n) by
/// rotations, realized by (n+1) x (n+1) affine matrices.
inline StructureConstants euclid_scaled_algebra(int n) {
  if (n < 1 || n > 8) throw InvalidInput("euclid_scaled(n) requires 1 <= n <= 8");
  const int m = n + 1;
  std::vector<Matrix> basis;
  Matrix scale = Matrix::Zero(m, m);
  scale.topLeftCorner(n, n).setIdentity();
  basis.push_back(scale);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Matrix rot = Matrix::Zero(m, m);
      rot(i, j) = 1.0;
      rot(j, i) = -1.0;
      basis.push_back(rot);
    }
  for (int i = 0; i < n; ++i) {
    Matrix tr = Matrix::Zero(m, m);
    tr(i, n) = 1.0;
    basis.push_back(tr);
  }
  return StructureConstants::from_matrix_basis(basis);
}

inline CatalogEntry catalog(const std::string& name, const std::vector<double>& params = {}) {
  auto want = [&](std::size_t count) {
    if (params.size() > count) {
      std::ostringstream os;
      os << "catalog entry " << name << " takes at most " << count << " parameter(s)";
      throw InvalidInput(os.str());
    }
  };
  CatalogEntry e;
  e.name = name;
  if (name == "S2") {
    want(0);
    e.description = "connected real ax+b group, D = [1]";
    e.matrix = Endomorphism::from_rows({{1.0}});
    e.stored.quasidiagonal = TriState{Verdict::no, "real parts of sigma(D) all positive; C*(S2) is not quasidiagonal"};
    e.stored.strongly_quasidiagonal = TriState{Verdict::no, "C*(S2) is not strongly quasidiagonal"};
    e.stored.type_i = true;
  } else if (name == "S3") {
    want(1);
    const double sigma = params.empty() ? 1.0 : params[0];
    if (sigma == 0.0 || !std::isfinite(sigma)) throw InvalidInput("S3(sigma) requires finite sigma != 0");
    std::ostringstream os;
    os << "R x| R^2 with D = [[sigma, 1], [-1, sigma]], sigma = " << sigma;
    e.description = os.str();
    e.matrix = Endomorphism::from_rows({{sigma, 1.0}, {-1.0, sigma}});
    e.stored.quasidiagonal = TriState{Verdict::no, "both eigenvalue real parts equal sigma, one strict sign"};
    e.stored.strongly_quasidiagonal = TriState{Verdict::no, "C*(S3^sigma) is not strongly quasidiagonal"};
    e.stored.type_i = true;
  } else if (name == "S4") {
    want(0);
    e.description = "R^2 x| R^2 on (T, S, X, Y): [T,X]=X, [T,Y]=Y, [S,X]=-Y, [S,Y]=X";
    e.structure = StructureConstants::from_brackets(
        4, {{0, 2, {0, 0, 1, 0}}, {0, 3, {0, 0, 0, 1}}, {1, 2, {0, 0, 0, -1}}, {1, 3, {0, 0, 1, 0}}});
    e.stored.strongly_quasidiagonal = TriState{Verdict::no, "C*(S4) cannot be strongly quasidiagonal"};
    e.stored.quasidiagonal = TriState{Verdict::unknown, "open: only the failure of strong quasidiagonality is known"};
    e.stored.type_i = true;
  } else if (name == "mautner") {
    want(1);
    const double theta = params.empty() ? std::numbers::sqrt2 : params[0];
    if (!std::isfinite(theta) || theta == 0.0) throw InvalidInput("mautner(theta) requires finite theta != 0");
    if (detail::rational_denominator(std::abs(theta), 64, 1e-8) != 0)
      throw InvalidInput("mautner(theta) requires an irrational theta (got a ratio p/q with q <= 64)");
    std::ostringstream os;
    os << "Mautner group R x| R^4, D = diag(rot(1), rot(theta)), theta = " << theta;
    e.description = os.str();
    Matrix d = Matrix::Zero(4, 4);
    d.topLeftCorner(2, 2) = rotation_generator(1.0);
    d.bottomRightCorner(2, 2) = rotation_generator(theta);
    e.matrix = Endomorphism(d);
    e.stored.quasidiagonal = TriState{Verdict::yes, "the Mautner group C*-algebra is quasidiagonal"};
    e.stored.type_i = false;
  } else if (name == "heisenberg") {
    want(0);
    e.description = "3-dimensional Heisenberg algebra, [e0, e1] = e2";
    e.structure = StructureConstants::from_brackets(3, {{0, 1, {0, 0, 1}}});
    e.stored.strongly_quasidiagonal = TriState{Verdict::yes, "nilpotent Lie group: strongly quasidiagonal"};
    e.stored.type_i = true;
  } else if (name == "euclid_scaled") {
    want(1);
    const double nd = params.empty() ? 2.0 : params[0];
    if (nd != std::floor(nd)) throw InvalidInput("euclid_scaled(n) requires an integer n");
    const int n = static_cast<int>(nd);
    std::ostringstream os;
    os << "R x| E(" << n << "): scaling plus rigid motions of R^" << n;
    e.description = os.str();
    e.structure = euclid_scaled_algebra(n);
    e.stored.quasidiagonal = TriState{Verdict::no, "the crossed product R x| C*(E(n)) is not quasidiagonal"};
    e.stored.type_i = true;
  } else {
    throw InvalidInput("unknown catalog name '" + name + "'; " + catalog_usage());
  }
  return e;
}

/// Parses "S3(0.5)", "mautner(1.41421356)", "S2".
inline CatalogSpec parse_catalog_name(const std::string& text) {
  CatalogSpec spec;
  const auto open = text.find('(');
  if (open == std::string::npos) {
    spec.name = text;
    return spec;
  }
  if (text.back() != ')') throw InvalidInput("malformed catalog reference '" + text + "'");
  spec.name = text.substr(0, open);
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      spec.params.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidInput("malformed catalog parameter '" + item + "'");
    }
  }
  return spec;
}

inline QDReport classify(const GroupSpec& spec, const Tolerances& tol = {});

namespace detail {

/// Report skeleton for a non-solvable catalog algebra: only the exact series
/// facts are computed, everything else comes from the stored flags.
inline QDReport non_solvable_report(const StructureConstants& g, std::optional<bool> type_i, const Tolerances& tol) {
  QDReport r;
  r.spec_kind = "structure_constants";
  r.tolerances = tol;
  std::ostringstream series;
  series << "derived series dimensions";
  for (int x : g.derived_series()) series << " " << x;
  r.nilpotent = {Verdict::no, series.str() + " stabilize above 0, so the algebra is not even solvable"};
  r.exponential = {Verdict::no, "exponential Lie groups are solvable; " + series.str() + " stabilize above 0"};
  r.type_i_assumed = type_i.value_or(true);
  r.type_i_note = type_i.has_value() ? "type-I status stored with the catalog entry" : "type I assumed by default";
  r.strongly_quasidiagonal = {Verdict::unknown, "the ad-spectrum criterion covers solvable groups only"};
  r.ccr_liminal = {Verdict::unknown, "mirrors strong quasidiagonality: " + r.strongly_quasidiagonal.justification};
  r.quasidiagonal = {Verdict::unknown, "no computable quasidiagonality criterion for general structure constants"};
  r.af_embeddable = {Verdict::unknown, "no computable AF-embeddability criterion for general structure constants"};
  return r;
}

}  // namespace detail

inline QDReport classify_catalog(const CatalogSpec& spec, const Tolerances& tol = {}) {
  const CatalogEntry e = catalog(spec.name, spec.params);
  QDReport r = e.matrix                         ? classify_matrix(*e.matrix, e.stored.type_i, tol)
               : e.structure->is_solvable() ? classify_structure(*e.structure, e.stored.type_i, tol)
                                            : detail::non_solvable_report(*e.structure, e.stored.type_i, tol);
  r.spec_kind = "catalog";
  r.name = e.name;
  if (e.stored.strongly_quasidiagonal) {
    r.strongly_quasidiagonal = *e.stored.strongly_quasidiagonal;
    r.ccr_liminal = {e.stored.strongly_quasidiagonal->value,
                     "mirrors strong quasidiagonality: " + e.stored.strongly_quasidiagonal->justification};
  }
  if (e.stored.quasidiagonal) {
    r.quasidiagonal = *e.stored.quasidiagonal;
    if (e.matrix) r.af_embeddable = {r.quasidiagonal.value, "equivalent to quasidiagonality: " + r.quasidiagonal.justification};
  }
  if (e.stored.af_embeddable) r.af_embeddable = *e.stored.af_embeddable;
  detail::close_implications(r);
  return r;
}

inline QDReport classify(const GroupSpec& spec, const Tolerances& tol) {
  return std::visit(
      [&](const auto& s) -> QDReport {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MatrixSpec>)
          return classify_matrix(s.d, s.type_i, tol);
        else if constexpr (std::is_same_v<T, StructureSpec>)
          return classify_structure(s.constants, s.type_i, tol);
        else
          return classify_catalog(s, tol);
      },
      spec);
}

// ---------------------------------------------------------------------------
// Isomorphism invariant and class counting

struct IsoInvariant {
  int n0 = 0;
  /// The unordered pair {n_plus, n_minus}, stored with first >= second.
  std::pair<int, int> pair{0, 0};

  int dim() const { return n0 + pair.first + pair.second; }
  bool operator==(const IsoInvariant&) const = default;
  static IsoInvariant make(int n0, int a, int b) { return {n0, {std::max(a, b), std::min(a, b)}}; }
};

/// (dim Ker D, {n_+, n_-}) for D in End_0(V): semisimple with no nonzero
/// purely imaginary eigenvalue.
inline IsoInvariant iso_invariant(const Endomorphism& d, double tol = 1e-6,
                                  double relative_epsilon = kDefaultRelativeEpsilon) {
  const JordanChevalley jc = jordan_chevalley(d, tol, relative_epsilon);
  if (!jc.is_semisimple) {
    std::ostringstream os;
    os << "D is not semisimple: ||N|| = " << jc.nilpotent.norm() << " > tol * ||D|| = " << tol * d.norm();
    throw NotInEnd0(os.str());
  }
  const Spectrum s = compute_spectrum(d, relative_epsilon);
  const double b = s.boundary();
  int n0 = 0, np = 0, nm = 0;
  for (const auto& e : s.eigenvalues) {
    const double re = e.value.real(), im = e.value.imag();
    if (std::abs(re) <= b && std::abs(im) > b) {
      std::ostringstream os;
      os << "D has a nonzero purely imaginary eigenvalue " << re << (im < 0 ? "" : "+") << im << "i";
      throw NotInEnd0(os.str());
    }
    if (std::abs(re) <= b)
      n0 += e.multiplicity;
    else if (re > 0.0)
      np += e.multiplicity;
    else
      nm += e.multiplicity;
  }
  return IsoInvariant::make(n0, np, nm);
}

/// N(m) = sum_{n0=0}^{m} (1 + floor((m - n0) / 2)).
inline std::uint64_t count_classes(std::uint64_t m) {
  std::uint64_t total = 0;
  for (std::uint64_t n0 = 0; n0 <= m; ++n0) total += 1 + (m - n0) / 2;
  return total;
}

struct ClassEntry {
  IsoInvariant invariant;
  /// n0 = 0 and n_+ n_- = 0 with m > 0: the only non-quasidiagonal class.
  bool non_quasidiagonal = false;
};

/// All classes (n0, {a, b}) with n0 + a + b = m, ordered by n0 then a descending.
inline std::vector<ClassEntry> enumerate_classes(int m) {
  if (m < 0 || m > 64) throw InvalidInput("enumerate_classes: m must lie in [0, 64]");
  std::vector<ClassEntry> out;
  for (int n0 = m; n0 >= 0; --n0) {
    const int rest = m - n0;
    for (int a = rest; 2 * a >= rest; --a) {
      const int b = rest - a;
      out.push_back({IsoInvariant::make(n0, a, b), m > 0 && n0 == 0 && a * b == 0});
    }
  }
  return out;
}

}  // namespace qdlie

#endif  // QDLIE_CLASSIFIER_HPP
