#ifndef QDLIE_LYAPUNOV_HPP
#define QDLIE_LYAPUNOV_HPP

// Lyapunov spaces V(lambda_j) (sums of real generalized eigenspaces sharing a
// real part) and the filtrations
//   slow: V_j = V(lambda_j) + ... + V(lambda_l)
//   fast: W_j = V(lambda_1) + ... + V(lambda_j)
// Indices are 0-based: lambdas[0] is the largest real part.

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdlie/propagator.hpp"
#include "qdlie/spectra.hpp"

namespace qdlie {

inline constexpr double kDefaultMembershipTolerance = 1e-8;

struct LyapunovDecomposition {
  std::vector<double> lambdas;
  /// Orthonormal columns spanning V(lambda_j).
  std::vector<Matrix> spaces;
  std::vector<Matrix> slow_filtration;
  std::vector<Matrix> fast_filtration;
  /// Projector onto V(lambda_j) along the other Lyapunov spaces.
  std::vector<Matrix> projectors;
  double basis_condition = 1.0;
  std::string warning;

  std::size_t size() const { return lambdas.size(); }
};

namespace detail {

inline Matrix orthonormal_span(const Matrix& a, double rel_tol = 1e-10) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(rel_tol);
  const auto r = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), r);
  return q;
}

inline double subspace_residual(const Matrix& q, const Vector& v) {
  if (q.cols() == 0) return v.norm();
  return (v - q * (q.transpose() * v)).norm();
}

}  // namespace detail

/// Lyapunov decomposition from the spectral clusters. Clusters whose real
/// parts agree to 100 eps_spec share a Lyapunov space. tol bounds the
/// D-invariance defect ||(I - P_j) D P_j|| / ||D||; larger defects are
/// reported in `warning`.
inline LyapunovDecomposition lyapunov_decomposition(const Endomorphism& d, double tol = 1e-6,
                                                    double relative_epsilon = kDefaultRelativeEpsilon) {
  if (!(tol > 0.0)) throw InvalidInput("lyapunov_decomposition: tol must be positive");
  const Spectrum spectrum = compute_spectrum(d, relative_epsilon);
  const SpectralBasis sb = spectral_basis(d, spectrum);
  const auto n = d.dim();
  const auto& ev = spectrum.eigenvalues;

  // Clusters arrive sorted by real part; group runs within 100 eps_spec of the group head.
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t c = 0; c < ev.size(); ++c) {
    if (groups.empty() || ev[groups.back().front()].value.real() - ev[c].value.real() > 100.0 * spectrum.epsilon)
      groups.push_back({c});
    else
      groups.back().push_back(c);
  }

  LyapunovDecomposition out;
  Matrix all(n, n);
  Eigen::Index col = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> ranges;
  for (const auto& g : groups) {
    double weighted = 0.0;
    int mult = 0;
    Matrix raw(n, 0);
    for (std::size_t c : g) {
      const Complex mu = ev[c].value;
      const int m = ev[c].multiplicity;
      weighted += m * mu.real();
      mult += m;
      if (mu.imag() < 0.0) continue;
      const CMatrix block = sb.basis.middleCols(sb.offset[c], m);
      Matrix add;
      if (mu.imag() == 0.0) {
        add = block.real();
      } else {
        add.resize(n, 2 * m);
        add << block.real(), block.imag();
      }
      Matrix grown(n, raw.cols() + add.cols());
      grown << raw, add;
      raw = std::move(grown);
    }
    Matrix q = detail::orthonormal_span(raw);
    if (q.cols() != mult) {
      std::ostringstream os;
      os << "Lyapunov space for real part " << weighted / mult << " has numerical rank " << q.cols()
         << " instead of " << mult;
      out.warning = os.str();
      q = Eigen::HouseholderQR<Matrix>(raw).householderQ() * Matrix::Identity(n, std::min<Eigen::Index>(mult, n));
    }
    out.lambdas.push_back(weighted / mult);
    const Eigen::Index width = std::min<Eigen::Index>(q.cols(), n - col);
    all.middleCols(col, width) = q.leftCols(width);
    ranges.emplace_back(col, width);
    col += width;
    out.spaces.push_back(std::move(q));
  }

  Eigen::JacobiSVD<Matrix> svd(all);
  const auto& s = svd.singularValues();
  out.basis_condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  Matrix inverse;
  Eigen::FullPivLU<Matrix> lu(all);
  if (lu.isInvertible()) {
    inverse = lu.inverse();
  } else {
    inverse = all.completeOrthogonalDecomposition().pseudoInverse();
    if (out.warning.empty()) out.warning = "Lyapunov spaces are not numerically complementary";
  }

  const double dn = d.norm();
  for (const auto& [start, width] : ranges) {
    Matrix p = all.middleCols(start, width) * inverse.middleRows(start, width);
    const double defect = ((Matrix::Identity(n, n) - p) * d.matrix() * p).norm();
    if (defect > tol * std::max(dn, 1e-300) && out.warning.empty()) {
      std::ostringstream os;
      os << "Lyapunov projector invariance defect " << defect << " exceeds tol*||D||";
      out.warning = os.str();
    }
    out.projectors.push_back(std::move(p));
  }

  const auto l = out.spaces.size();
  for (std::size_t j = 0; j < l; ++j) {
    const Eigen::Index slow_start = ranges[j].first;
    out.slow_filtration.push_back(detail::orthonormal_span(all.middleCols(slow_start, n - slow_start)));
    const Eigen::Index fast_width = ranges[j].first + ranges[j].second;
    out.fast_filtration.push_back(detail::orthonormal_span(all.leftCols(fast_width)));
  }
  return out;
}

struct VectorClass {
  /// Largest j with v in V_j, so v lies in V_j but not V_{j+1}.
  std::size_t slow_index = 0;
  /// Smallest k with v in W_k, so v lies in W_k but not W_{k-1}.
  std::size_t fast_index = 0;
};

/// Filtration indices of v. Membership means the orthogonal projection
/// residual is at most tol * ||v||.
inline VectorClass classify_vector(const LyapunovDecomposition& dec, const Vector& v,
                                   double tol = kDefaultMembershipTolerance) {
  if (!v.allFinite()) throw InvalidInput("classify_vector: v must be finite");
  const double nv = v.norm();
  if (nv == 0.0) throw InvalidInput("classify_vector: v must be nonzero");
  if (dec.size() == 0 || dec.slow_filtration.front().rows() != v.size())
    throw InvalidInput("classify_vector: dimension mismatch");
  VectorClass out;
  for (std::size_t j = 0; j < dec.size(); ++j)
    if (detail::subspace_residual(dec.slow_filtration[j], v) <= tol * nv) out.slow_index = j;
  for (std::size_t k = dec.size(); k-- > 0;)
    if (detail::subspace_residual(dec.fast_filtration[k], v) <= tol * nv) out.fast_index = k;
  return out;
}

inline VectorClass classify_vector(const Endomorphism& d, const Vector& v, double tol = kDefaultMembershipTolerance) {
  if (v.size() != d.dim()) throw InvalidInput("classify_vector: dimension mismatch");
  return classify_vector(lyapunov_decomposition(d), v, tol);
}

/// (1/T) log ||exp(+-T D) v||. Each Lyapunov component P_j v is integrated
/// inside its invariant space with per-step renormalization, so roundoff never
/// leaks into faster spaces (where it would grow like e^{gap T}). Components
/// below tol * ||v|| are below the filtration resolution and are dropped.
inline double growth_rate(const Endomorphism& d, const Vector& v, Direction direction, double horizon,
                          double tol = kDefaultMembershipTolerance) {
  if (v.size() != d.dim()) throw InvalidInput("growth_rate: dimension mismatch");
  if (!v.allFinite() || v.norm() == 0.0) throw InvalidInput("growth_rate: v must be finite and nonzero");
  if (!(horizon >= 10.0) || !std::isfinite(horizon)) throw InvalidInput("growth_rate: horizon must be at least 10");
  const LyapunovDecomposition dec = lyapunov_decomposition(d);
  const long steps = static_cast<long>(std::ceil(horizon));
  const double dt = horizon / static_cast<double>(steps);
  const double nv = v.norm();

  std::vector<FlowState> parts;
  std::vector<const Matrix*> bases;
  for (std::size_t j = 0; j < dec.size(); ++j) {
    const Vector c = dec.projectors[j] * v;
    if (c.norm() <= tol * nv) continue;
    const Matrix& q = dec.spaces[j];
    const Propagator prop(Endomorphism(Matrix(q.transpose() * d.matrix() * q)), dt, direction);
    FlowState s = FlowState::from(Vector(q.transpose() * c));
    for (long k = 0; k < steps; ++k) prop.advance(s);
    parts.push_back(std::move(s));
    bases.push_back(&q);
  }
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& s : parts) top = std::max(top, s.log_norm);
  Vector sum = Vector::Zero(v.size());
  for (std::size_t i = 0; i < parts.size(); ++i) sum += std::exp(parts[i].log_norm - top) * (*bases[i] * parts[i].unit);
  return (top + std::log(sum.norm())) / horizon;
}

}  // namespace qdlie

#endif  // QDLIE_LYAPUNOV_HPP
