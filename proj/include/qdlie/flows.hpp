#ifndef QDLIE_FLOWS_HPP
#define QDLIE_FLOWS_HPP

// The linear flow (v, t) -> exp(tD) v on the one-point compactification
// V u {inf}: exact attractor-repeller classification from the spectrum, numeric
// omega-limit estimates, and a trajectory-only oracle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qdlie/parallel.hpp"
#include "qdlie/point_index.hpp"
#include "qdlie/propagator.hpp"
#include "qdlie/random.hpp"
#include "qdlie/spectra.hpp"

namespace qdlie {

enum class FlowKind { attractor_zero, attractor_infinity, chain_recurrent, inconclusive };

inline const char* to_string(FlowKind k) {
  switch (k) {
    case FlowKind::attractor_zero: return "ATTRACTOR_ZERO";
    case FlowKind::attractor_infinity: return "ATTRACTOR_INFINITY";
    case FlowKind::chain_recurrent: return "CHAIN_RECURRENT";
    case FlowKind::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

/// Long-time behaviour of one trajectory as read off its samples.
enum class Fate { zero, infinity, bounded, unclear };

inline const char* to_string(Fate f) {
  switch (f) {
    case Fate::zero: return "zero";
    case Fate::infinity: return "infinity";
    case Fate::bounded: return "bounded";
    case Fate::unclear: return "unclear";
  }
  return "?";
}

struct FateCounts {
  int zero = 0;
  int infinity = 0;
  int bounded = 0;
  int unclear = 0;

  void add(Fate f) {
    switch (f) {
      case Fate::zero: ++zero; break;
      case Fate::infinity: ++infinity; break;
      case Fate::bounded: ++bounded; break;
      case Fate::unclear: ++unclear; break;
    }
  }
  int total() const { return zero + infinity + bounded + unclear; }
};

struct OracleStatistics {
  int grid_points = 0;
  /// Grid points equal to 0 are fixed by every flow and carry no information.
  int skipped_zero = 0;
  FateCounts forward;
  FateCounts backward;
};

struct SpectralWitness {
  double min_real = 0.0;
  double max_real = 0.0;
  double epsilon = 0.0;
};

struct FlowClassification {
  FlowKind kind = FlowKind::inconclusive;
  SpectralWitness witness;
  /// Some eigenvalue real part lies within 10 eps_spec of zero.
  bool boundary_flag = false;
  std::string reason;
  std::optional<OracleStatistics> oracle;
};

/// Attractor-repeller pair of the flow on V u {inf} from the signs of Re sigma(D):
/// ({0},{inf}) iff max Re < -10 eps, ({inf},{0}) iff min Re > 10 eps, none otherwise.
inline FlowClassification classify_flow(const Spectrum& s) {
  FlowClassification out;
  out.witness = {s.min_real(), s.max_real(), s.epsilon};
  const double b = s.boundary();
  for (const auto& e : s.eigenvalues)
    if (std::abs(e.value.real()) <= b) out.boundary_flag = true;
  std::ostringstream os;
  if (out.witness.max_real < -b) {
    out.kind = FlowKind::attractor_zero;
    os << "max Re sigma(D) = " << out.witness.max_real << " < 0: {0} attracts, {inf} repels";
  } else if (out.witness.min_real > b) {
    out.kind = FlowKind::attractor_infinity;
    os << "min Re sigma(D) = " << out.witness.min_real << " > 0: {inf} attracts, {0} repels";
  } else {
    out.kind = FlowKind::chain_recurrent;
    os << "Re sigma(D) spans [" << out.witness.min_real << ", " << out.witness.max_real
       << "] touching 0: no nontrivial attractor-repeller pair";
  }
  out.reason = os.str();
  return out;
}

inline FlowClassification classify_flow(const Endomorphism& d, double relative_epsilon = kDefaultRelativeEpsilon) {
  return classify_flow(compute_spectrum(d, relative_epsilon));
}

struct Infinity {
  bool operator==(const Infinity&) const = default;
};

/// A point of V u {inf}.
using CompactifiedPoint = std::variant<Vector, Infinity>;

struct OmegaParams {
  double burn_in = 100.0;
  double horizon = 400.0;
  double step = 0.05;
  /// Defaults to 1e6 * max(1, ||v||).
  std::optional<double> infinity_radius;
};

struct OmegaSetEstimate {
  /// Finite cluster representatives; every one has norm <= infinity_radius.
  std::vector<Vector> points;
  bool contains_infinity = false;
  OmegaParams params;
  double infinity_radius = 0.0;
  /// Samples with norm below this are identified with 0.
  double zero_radius = 0.0;
  double resolution = 0.0;
  std::size_t samples = 0;
  std::size_t infinite_samples = 0;
  std::size_t zero_samples = 0;
  /// Mean log-norm of the last quarter of samples minus that of the first quarter.
  double log_norm_drift = 0.0;
  /// The window does not show a settled limit (escape, collapse or recurrence).
  bool low_confidence = false;

  std::vector<CompactifiedPoint> compactified() const {
    std::vector<CompactifiedPoint> out(points.begin(), points.end());
    if (contains_infinity) out.emplace_back(Infinity{});
    return out;
  }
};

/// omega(v) (forward) or omega*(v) (backward) from samples of the trajectory on
/// [burn_in, horizon], merged into representatives at 1e-3 of the trajectory scale.
inline OmegaSetEstimate omega_limit(const Endomorphism& d, const Vector& v, Direction direction,
                                    const OmegaParams& params = {}) {
  if (v.size() != d.dim()) throw InvalidInput("omega_limit: dimension mismatch");
  if (!v.allFinite()) throw InvalidInput("omega_limit: v must be finite");
  if (!(params.burn_in >= 0.0) || !(params.horizon > params.burn_in))
    throw InvalidInput("omega_limit: need horizon > burn_in >= 0");
  if (!(params.step > 0.0) || !std::isfinite(params.horizon)) throw InvalidInput("omega_limit: step must be positive");
  const double nv = v.norm();
  OmegaSetEstimate out;
  out.params = params;
  out.infinity_radius = params.infinity_radius.value_or(1e6 * std::max(1.0, nv));
  if (!(out.infinity_radius > nv)) throw InvalidInput("omega_limit: infinity radius must exceed ||v||");
  out.zero_radius = 1e-6 * std::min(1.0, nv);

  if (nv == 0.0) {
    out.points.push_back(Vector::Zero(v.size()));
    out.samples = 1;
    out.zero_samples = 1;
    return out;
  }

  const Propagator prop(d, params.step, direction);
  FlowState s = FlowState::from(v);
  prop.advance_for(s, params.burn_in);
  const auto count = static_cast<std::size_t>(std::floor((params.horizon - params.burn_in) / params.step + 1e-9)) + 1;
  const double log_r = std::log(out.infinity_radius);
  const double log_zero = std::log(out.zero_radius);

  std::vector<double> log_norms(count);
  std::vector<Vector> finite;
  std::vector<std::size_t> finite_at;
  finite.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0) prop.advance(s);
    log_norms[k] = s.log_norm;
    if (s.log_norm > log_r) {
      ++out.infinite_samples;
    } else if (s.log_norm < log_zero) {
      ++out.zero_samples;
      finite.push_back(Vector::Zero(v.size()));
      finite_at.push_back(k);
    } else {
      finite.push_back(s.value());
      finite_at.push_back(k);
    }
  }
  out.samples = count;
  out.contains_infinity = out.infinite_samples > 0;

  const std::size_t quarter = std::max<std::size_t>(1, count / 4);
  auto mean = [&](std::size_t from, std::size_t to) {
    double acc = 0.0;
    for (std::size_t k = from; k < to; ++k) acc += std::max(log_norms[k], log_zero - 1.0);
    return acc / static_cast<double>(to - from);
  };
  out.log_norm_drift = mean(count - quarter, count) - mean(0, quarter);

  double scale = 0.0;
  for (const auto& p : finite) scale = std::max(scale, p.norm());
  out.resolution = 1e-3 * scale;
  if (scale == 0.0) {
    if (!finite.empty()) out.points.push_back(Vector::Zero(v.size()));
  } else {
    CellClusterer clusters(v.size(), out.resolution);
    for (const auto& p : finite) clusters.add(p);
    out.points = clusters.representatives();
  }

  if (out.infinite_samples == count || out.zero_samples == count) {
    out.low_confidence = false;
  } else if (out.infinite_samples > 0 || out.zero_samples > 0) {
    out.low_confidence = true;
  } else {
    // Bounded window: settled if the norm does not drift and the last sample
    // returns near a point of the first half.
    bool returns = false;
    const Vector& last = finite.back();
    for (std::size_t k = 0; k < finite.size() && finite_at[k] <= count / 2; ++k)
      if ((finite[k] - last).norm() <= 5e-2 * scale) {
        returns = true;
        break;
      }
    out.low_confidence = !(std::abs(out.log_norm_drift) <= std::log(2.0) && returns);
  }
  return out;
}

/// Hausdorff distance of two omega estimates in V u {inf}, with inf an
/// isolated symbolic point: +inf whenever exactly one side contains inf or has
/// finite points.
inline double hausdorff_distance(const OmegaSetEstimate& a, const OmegaSetEstimate& b) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.contains_infinity != b.contains_infinity) return kInf;
  if (a.points.empty() != b.points.empty()) return kInf;
  if (a.points.empty()) return 0.0;
  auto directed = [](const std::vector<Vector>& from, const std::vector<Vector>& to) {
    const KdTree index(to);
    double worst = 0.0;
    for (const auto& p : from) worst = std::max(worst, index.nearest(p).second);
    return worst;
  };
  return std::max(directed(a.points, b.points), directed(b.points, a.points));
}

/// Fate of one trajectory from its omega estimate.
inline Fate trajectory_fate(const OmegaSetEstimate& e) {
  if (e.infinite_samples == e.samples) return Fate::infinity;
  if (e.zero_samples == e.samples) return Fate::zero;
  if (e.infinite_samples > 0 && e.zero_samples == 0 && e.log_norm_drift > 0.0) return Fate::infinity;
  if (e.zero_samples > 0 && e.infinite_samples == 0 && e.log_norm_drift < 0.0) return Fate::zero;
  if (e.infinite_samples == 0 && e.zero_samples == 0 && !e.low_confidence) return Fate::bounded;
  return Fate::unclear;
}

/// The lattice {values}^dim as initial points.
inline std::vector<Vector> lattice_grid(Eigen::Index dim, const std::vector<double>& values = {-1.0, -0.5, 0.0, 0.5, 1.0}) {
  if (dim <= 0 || values.empty()) throw InvalidInput("lattice_grid: need positive dimension and values");
  std::vector<Vector> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  for (;;) {
    Vector p(dim);
    for (Eigen::Index i = 0; i < dim; ++i) p(i) = values[idx[static_cast<std::size_t>(i)]];
    out.push_back(p);
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == values.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  return out;
}

inline OmegaParams oracle_default_params() { return {600.0, 800.0, 0.5, std::nullopt}; }

/// Brute-force verdict from trajectories alone: every nonzero grid point goes
/// to 0 forward and to inf backward => ATTRACTOR_ZERO; the mirror image =>
/// ATTRACTOR_INFINITY; any unclear fate => INCONCLUSIVE; otherwise (bounded
/// recurrence or mixed fates) CHAIN_RECURRENT.
inline FlowClassification oracle_classify_flow(const Endomorphism& d, const std::vector<Vector>& grid,
                                               const OmegaParams& params = oracle_default_params()) {
  if (d.dim() > 3) throw InvalidInput("oracle_classify_flow: dimension must be at most 3");
  for (const auto& p : grid)
    if (p.size() != d.dim()) throw InvalidInput("oracle_classify_flow: grid point dimension mismatch");

  std::vector<Fate> fwd(grid.size(), Fate::unclear), bwd(grid.size(), Fate::unclear);
  std::vector<char> skip(grid.size(), 0);
  parallel_for(grid.size(), [&](std::size_t i) {
    if (grid[i].norm() == 0.0) {
      skip[i] = 1;
      return;
    }
    fwd[i] = trajectory_fate(omega_limit(d, grid[i], Direction::forward, params));
    bwd[i] = trajectory_fate(omega_limit(d, grid[i], Direction::backward, params));
  });

  OracleStatistics stats;
  stats.grid_points = static_cast<int>(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (skip[i]) {
      ++stats.skipped_zero;
      continue;
    }
    stats.forward.add(fwd[i]);
    stats.backward.add(bwd[i]);
  }

  FlowClassification out;
  out.witness = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0.0};
  const int n = stats.forward.total();
  std::ostringstream os;
  if (n == 0) {
    out.kind = FlowKind::inconclusive;
    os << "no nonzero grid points";
  } else if (stats.forward.unclear > 0 || stats.backward.unclear > 0) {
    out.kind = FlowKind::inconclusive;
    os << stats.forward.unclear + stats.backward.unclear << " trajectories without a settled fate";
  } else if (stats.forward.zero == n && stats.backward.infinity == n) {
    out.kind = FlowKind::attractor_zero;
    os << "all " << n << " trajectories collapse forward and escape backward";
  } else if (stats.forward.infinity == n && stats.backward.zero == n) {
    out.kind = FlowKind::attractor_infinity;
    os << "all " << n << " trajectories escape forward and collapse backward";
  } else {
    out.kind = FlowKind::chain_recurrent;
    os << "mixed or recurrent fates (forward zero/inf/bounded = " << stats.forward.zero << "/"
       << stats.forward.infinity << "/" << stats.forward.bounded << ")";
  }
  out.reason = os.str();
  out.oracle = stats;
  return out;
}

struct SymmetryReport {
  bool symmetric = false;
  double tolerance = 0.0;
  double worst_distance = 0.0;
  Vector worst_vector;
  std::vector<double> distances;
  OmegaParams params;
};

inline OmegaParams symmetry_default_params() { return {100.0, 2000.0, 0.01, std::nullopt}; }

/// For `samples` seeded random unit vectors, the Hausdorff distance between
/// the forward and backward omega estimates. Requires D semisimple with
/// purely imaginary spectrum.
inline SymmetryReport check_omega_symmetry(const Endomorphism& d, int samples, double tol, std::uint64_t seed = 0,
                                           const OmegaParams& params = symmetry_default_params(),
                                           double relative_epsilon = kDefaultRelativeEpsilon) {
  if (samples <= 0) throw InvalidInput("check_omega_symmetry: samples must be positive");
  if (!(tol >= 0.0)) throw InvalidInput("check_omega_symmetry: tol must be nonnegative");
  const JordanChevalley jc = jordan_chevalley(d, 1e-6, relative_epsilon);
  if (!jc.is_semisimple) {
    std::ostringstream os;
    os << "hypothesis failed: D is not semisimple (||N|| = " << jc.nilpotent.norm() << ")";
    throw PreconditionError(os.str());
  }
  const Spectrum s = compute_spectrum(d, relative_epsilon);
  for (const auto& e : s.eigenvalues)
    if (std::abs(e.value.real()) > s.boundary()) {
      std::ostringstream os;
      os << "hypothesis failed: spectrum is not purely imaginary (eigenvalue " << e.value.real() << "+"
         << e.value.imag() << "i)";
      throw PreconditionError(os.str());
    }

  SymmetryReport out;
  out.tolerance = tol;
  out.params = params;
  std::vector<Vector> vs;
  CounterRng rng(seed, 0x5e11);
  for (int i = 0; i < samples; ++i) vs.push_back(rng.unit_vector(d.dim()));
  out.distances.assign(vs.size(), 0.0);
  parallel_for(vs.size(), [&](std::size_t i) {
    const auto f = omega_limit(d, vs[i], Direction::forward, params);
    const auto b = omega_limit(d, vs[i], Direction::backward, params);
    out.distances[i] = hausdorff_distance(f, b);
  });
  std::size_t worst = 0;
  for (std::size_t i = 1; i < vs.size(); ++i)
    if (out.distances[i] > out.distances[worst]) worst = i;
  out.worst_distance = out.distances[worst];
  out.worst_vector = vs[worst];
  out.symmetric = out.worst_distance <= tol;
  return out;
}

}  // namespace qdlie

#endif  // QDLIE_FLOWS_HPP
