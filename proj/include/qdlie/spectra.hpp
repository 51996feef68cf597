#ifndef QDLIE_SPECTRA_HPP
#define QDLIE_SPECTRA_HPP

// Real spectral toolkit: eigenvalue clusters with multiplicities, generalized
// eigenspaces, the Jordan-Chevalley splitting D = S + N and exp(tD).

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdlie/error.hpp"

namespace qdlie {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// eps_spec = kDefaultRelativeEpsilon * max(1, ||D||_F).
inline constexpr double kDefaultRelativeEpsilon = 1e-9;

/// An endomorphism of V = R^n, stored as a dense n x n matrix.
class Endomorphism {
 public:
  explicit Endomorphism(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
      std::ostringstream os;
      os << "endomorphism must be a non-empty square matrix, got " << m_.rows() << "x" << m_.cols();
      throw InvalidInput(os.str());
    }
    if (!m_.allFinite()) throw InvalidInput("endomorphism has non-finite entries");
  }

  static Endomorphism from_rows(const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != n) {
        std::ostringstream os;
        os << "row " << i << " has " << rows[i].size() << " entries, expected " << n;
        throw InvalidInput(os.str());
      }
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return Endomorphism(std::move(m));
  }

  static Endomorphism diagonal(const std::vector<double>& values) {
    return Endomorphism(Vector::Map(values.data(), static_cast<Eigen::Index>(values.size())).asDiagonal());
  }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double norm() const { return m_.norm(); }

  /// The dual map D* on V*, i.e. the transpose.
  Endomorphism adjoint() const { return Endomorphism(m_.transpose()); }
  Endomorphism scaled(double c) const { return Endomorphism(c * m_); }

 private:
  Matrix m_;
};

inline double spectral_epsilon(double frobenius_norm, double relative = kDefaultRelativeEpsilon) {
  return relative * std::max(1.0, frobenius_norm);
}

struct Eigenvalue {
  Complex value;
  int multiplicity = 1;
};

/// Eigenvalues of the complexification, clustered, conjugate-closed, ordered by
/// real part descending then imaginary part descending.
struct Spectrum {
  std::vector<Eigenvalue> eigenvalues;
  double frobenius_norm = 0.0;
  double epsilon = 0.0;

  int dim() const {
    int n = 0;
    for (const auto& e : eigenvalues) n += e.multiplicity;
    return n;
  }
  double max_real() const {
    double r = -std::numeric_limits<double>::infinity();
    for (const auto& e : eigenvalues) r = std::max(r, e.value.real());
    return r;
  }
  double min_real() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& e : eigenvalues) r = std::min(r, e.value.real());
    return r;
  }
  /// Real parts with |Re| below this are treated as zero by the dichotomy tests.
  double boundary() const { return 10.0 * epsilon; }
};

namespace detail {

/// Merge radius for a cluster of total multiplicity k. Perturbing a k-fold
/// Jordan block by a backward error u*||D|| spreads its eigenvalues over a
/// circle of radius ~ u^(1/k) ||D||, so the radius grows with k (capped at 4).
inline double cluster_radius(int multiplicity, double epsilon, double scale) {
  double r = 100.0 * epsilon;
  if (multiplicity >= 2) {
    const int k = std::min(multiplicity, 4);
    r = std::max(r, 10.0 * std::pow(DBL_EPSILON, 1.0 / k) * std::max(1.0, scale));
  }
  return r;
}

struct ClusterBuild {
  std::vector<int> members;
};

/// Complete-linkage agglomeration of the raw eigenvalues in the closed upper
/// half plane. A cluster touching the real axis absorbs the conjugates of its
/// complex members; other clusters are mirrored.
inline std::vector<Eigenvalue> cluster_eigenvalues(const std::vector<Complex>& raw, double epsilon,
                                                   double scale) {
  std::vector<Complex> items;
  for (const auto& z : raw)
    if (z.imag() >= 0.0) items.push_back(z);
  const int m = static_cast<int>(items.size());

  std::vector<std::vector<int>> clusters(m);
  for (int i = 0; i < m; ++i) clusters[i] = {i};
  std::vector<bool> alive(m, true);
  Matrix dist(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) dist(i, j) = std::abs(items[i] - items[j]);

  auto is_real = [&](const std::vector<int>& c) {
    double min_imag = std::numeric_limits<double>::infinity();
    for (int i : c) {
      if (items[i].imag() == 0.0) return true;
      min_imag = std::min(min_imag, items[i].imag());
    }
    return 2.0 * min_imag <= cluster_radius(2 * static_cast<int>(c.size()), epsilon, scale);
  };
  auto multiplicity = [&](const std::vector<int>& c) {
    if (!is_real(c)) return static_cast<int>(c.size());
    int k = 0;
    for (int i : c) k += items[i].imag() == 0.0 ? 1 : 2;
    return k;
  };

  for (;;) {
    int best_a = -1, best_b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < m; ++a) {
      if (!alive[a]) continue;
      for (int b = a + 1; b < m; ++b) {
        if (!alive[b] || dist(a, b) >= best) continue;
        std::vector<int> merged = clusters[a];
        merged.insert(merged.end(), clusters[b].begin(), clusters[b].end());
        if (dist(a, b) <= cluster_radius(multiplicity(merged), epsilon, scale)) {
          best = dist(a, b);
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a < 0) break;
    clusters[best_a].insert(clusters[best_a].end(), clusters[best_b].begin(), clusters[best_b].end());
    alive[best_b] = false;
    for (int c = 0; c < m; ++c) {
      if (!alive[c] || c == best_a) continue;
      const double d = std::max(dist(best_a, c), dist(best_b, c));
      dist(best_a, c) = dist(c, best_a) = d;
    }
  }

  std::vector<Eigenvalue> out;
  for (int a = 0; a < m; ++a) {
    if (!alive[a]) continue;
    const auto& c = clusters[a];
    if (is_real(c)) {
      double sum = 0.0;
      int k = 0;
      for (int i : c) {
        const int w = items[i].imag() == 0.0 ? 1 : 2;
        sum += w * items[i].real();
        k += w;
      }
      out.push_back({Complex(sum / k, 0.0), k});
    } else {
      Complex sum = 0.0;
      for (int i : c) sum += items[i];
      const Complex centre = sum / static_cast<double>(c.size());
      const int k = static_cast<int>(c.size());
      out.push_back({centre, k});
      out.push_back({std::conj(centre), k});
    }
  }
  std::sort(out.begin(), out.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });
  return out;
}

/// Orthonormal basis of ker (D - mu)^m, the m right singular vectors of the
/// normalized power with the smallest singular values.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> generalized_eigenspace(const Matrix& d, Scalar mu,
                                                                             int m) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = d.rows();
  M a = d.template cast<Scalar>();
  a.diagonal().array() -= mu;
  const double s = a.norm();
  if (s == 0.0) return M::Identity(n, m);
  a /= Scalar(s);
  M p = a;
  for (int k = 1; k < m; ++k) p = p * a;
  Eigen::JacobiSVD<M> svd(p, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(m);
}

inline double condition_number(const CMatrix& b) {
  Eigen::JacobiSVD<CMatrix> svd(b);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double lo = s(s.size() - 1);
  return lo == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / lo;
}

}  // namespace detail

/// Eigenvalues via real Schur reduction, clustered at resolution 100 eps_spec
/// (wider for multiple eigenvalues, see detail::cluster_radius).
inline Spectrum compute_spectrum(const Endomorphism& d, double relative_epsilon = kDefaultRelativeEpsilon) {
  Spectrum s;
  s.frobenius_norm = d.norm();
  s.epsilon = spectral_epsilon(s.frobenius_norm, relative_epsilon);
  Eigen::EigenSolver<Matrix> solver(d.matrix(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw InvalidInput("real Schur reduction did not converge");
  const auto& ev = solver.eigenvalues();
  std::vector<Complex> raw(ev.data(), ev.data() + ev.size());
  s.eigenvalues = detail::cluster_eigenvalues(raw, s.epsilon, s.frobenius_norm);
  return s;
}

/// Complex basis of V_C adapted to the spectral clusters: columns
/// [offset[c], offset[c] + multiplicity_c) span the generalized eigenspace of
/// cluster c. Conjugate clusters get exactly conjugate bases.
struct SpectralBasis {
  CMatrix basis;
  std::vector<Eigen::Index> offset;
  double condition = 1.0;
};

inline SpectralBasis spectral_basis(const Endomorphism& d, const Spectrum& spectrum) {
  const auto n = d.dim();
  SpectralBasis out;
  out.basis.resize(n, n);
  const auto& ev = spectrum.eigenvalues;
  std::vector<CMatrix> blocks(ev.size());
  Eigen::Index col = 0;
  for (std::size_t c = 0; c < ev.size(); ++c) {
    const Complex mu = ev[c].value;
    const int m = ev[c].multiplicity;
    if (mu.imag() == 0.0) {
      blocks[c] = detail::generalized_eigenspace<double>(d.matrix(), mu.real(), m).cast<Complex>();
    } else if (mu.imag() > 0.0) {
      blocks[c] = detail::generalized_eigenspace<Complex>(d.matrix(), mu, m);
    } else {
      for (std::size_t p = 0; p < c; ++p) {
        if (ev[p].value == std::conj(mu) && ev[p].multiplicity == m) {
          blocks[c] = blocks[p].conjugate();
          break;
        }
      }
      if (blocks[c].size() == 0) blocks[c] = detail::generalized_eigenspace<Complex>(d.matrix(), mu, m);
    }
    out.offset.push_back(col);
    out.basis.middleCols(col, m) = blocks[c];
    col += m;
  }
  out.condition = detail::condition_number(out.basis);
  return out;
}

struct JordanChevalley {
  Endomorphism semisimple;
  Endomorphism nilpotent;
  bool is_semisimple = false;
  double basis_condition = 1.0;
  /// Empty unless the eigenstructure was ill-conditioned.
  std::string warning;
};

/// D = S + N with S = sum_c mu_c P_c over the spectral clusters (P_c the
/// residue projectors), N = D - S.
inline JordanChevalley jordan_chevalley(const Endomorphism& d, double tol = 1e-6,
                                        double relative_epsilon = kDefaultRelativeEpsilon) {
  if (!(tol > 0.0)) throw InvalidInput("jordan_chevalley: tol must be positive");
  const Spectrum spectrum = compute_spectrum(d, relative_epsilon);
  const SpectralBasis sb = spectral_basis(d, spectrum);
  const auto n = d.dim();

  CVector lambda(n);
  for (std::size_t c = 0; c < spectrum.eigenvalues.size(); ++c)
    lambda.segment(sb.offset[c], spectrum.eigenvalues[c].multiplicity)
        .setConstant(spectrum.eigenvalues[c].value);

  std::string warning;
  CMatrix inverse;
  Eigen::FullPivLU<CMatrix> lu(sb.basis);
  if (lu.isInvertible()) {
    inverse = lu.inverse();
  } else {
    inverse = sb.basis.completeOrthogonalDecomposition().pseudoInverse();
    warning = "spectral basis is numerically singular; splitting uses a pseudo-inverse";
  }
  if (warning.empty() && sb.condition > 1e8) {
    std::ostringstream os;
    os << "ill-conditioned eigenstructure: spectral basis condition number " << sb.condition;
    warning = os.str();
  }

  const CMatrix s_complex = sb.basis * lambda.asDiagonal() * inverse;
  Matrix s = s_complex.real();
  if (!s.allFinite()) {
    s = d.matrix();
    warning = "spectral splitting produced non-finite values; reporting S = D";
  }
  const Matrix nil = d.matrix() - s;
  const double dn = d.norm();
  JordanChevalley out{Endomorphism(s), Endomorphism(nil), nil.norm() <= tol * dn, sb.condition, warning};
  return out;
}

/// exp(tD) by scaling and squaring with Pade approximants.
inline Endomorphism matrix_exp(const Endomorphism& d, double t) {
  if (!std::isfinite(t)) throw InvalidInput("matrix_exp: t must be finite");
  const Matrix a = t * d.matrix();
  Matrix e = a.exp();
  if (!e.allFinite()) {
    const double threshold = std::log(std::numeric_limits<double>::max());
    std::ostringstream os;
    os << "matrix_exp overflow: |t|*||D||_F = " << std::abs(t) * d.norm()
       << " exceeds the representable growth threshold log(DBL_MAX) = " << threshold;
    throw OverflowError(os.str(), threshold);
  }
  return Endomorphism(std::move(e));
}

}  // namespace qdlie

#endif  // QDLIE_SPECTRA_HPP
