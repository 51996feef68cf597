#ifndef QDLIE_LIE_ALGEBRA_HPP
#define QDLIE_LIE_ALGEBRA_HPP

// Real Lie algebras given by structure constants [e_i, e_j] = sum_k c(i,j,k) e_k.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdlie/spectra.hpp"

namespace qdlie {

struct Bracket {
  int i;
  int j;
  /// Coordinates of [e_i, e_j].
  std::vector<double> value;
};

class StructureConstants {
 public:
  /// c is indexed c[(i * dim + j) * dim + k]. Antisymmetry must hold exactly
  /// and the Jacobi identity to 1e-10 (relative to the largest constant squared).
  StructureConstants(int dim, std::vector<double> c) : dim_(dim), c_(std::move(c)) {
    if (dim <= 0) throw InvalidInput("structure constants: dimension must be positive");
    if (c_.size() != static_cast<std::size_t>(dim) * dim * dim)
      throw InvalidInput("structure constants: expected dim^3 entries");
    for (double x : c_)
      if (!std::isfinite(x)) throw InvalidInput("structure constants: non-finite entry");
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          if ((*this)(i, j, k) != -(*this)(j, i, k)) {
            std::ostringstream os;
            os << "structure constants are not antisymmetric at (" << i << "," << j << "," << k << ")";
            throw InvalidInput(os.str());
          }
    double cmax = 0.0;
    for (double x : c_) cmax = std::max(cmax, std::abs(x));
    const double defect = jacobi_defect();
    if (defect > 1e-10 * std::max(1.0, cmax * cmax)) {
      std::ostringstream os;
      os << "structure constants violate the Jacobi identity (defect " << defect << ")";
      throw InvalidInput(os.str());
    }
  }

  /// Zero brackets except the listed ones; [e_j, e_i] is filled in by antisymmetry.
  static StructureConstants from_brackets(int dim, const std::vector<Bracket>& brackets) {
    if (dim <= 0) throw InvalidInput("structure constants: dimension must be positive");
    std::vector<double> c(static_cast<std::size_t>(dim) * dim * dim, 0.0);
    for (const auto& b : brackets) {
      if (b.i < 0 || b.j < 0 || b.i >= dim || b.j >= dim || b.i == b.j ||
          b.value.size() != static_cast<std::size_t>(dim))
        throw InvalidInput("structure constants: malformed bracket");
      for (int k = 0; k < dim; ++k) {
        c[(static_cast<std::size_t>(b.i) * dim + b.j) * dim + k] = b.value[k];
        c[(static_cast<std::size_t>(b.j) * dim + b.i) * dim + k] = -b.value[k];
      }
    }
    return StructureConstants(dim, std::move(c));
  }

  /// Structure constants of the matrix Lie algebra spanned by `basis` under
  /// the commutator. Throws if the span is not closed or not independent.
  static StructureConstants from_matrix_basis(const std::vector<Matrix>& basis) {
    const int dim = static_cast<int>(basis.size());
    if (dim == 0) throw InvalidInput("matrix basis is empty");
    const auto n = basis.front().rows();
    Matrix flat(n * n, dim);
    for (int i = 0; i < dim; ++i) {
      if (basis[i].rows() != n || basis[i].cols() != n) throw InvalidInput("matrix basis: inconsistent shapes");
      flat.col(i) = basis[i].reshaped();
    }
    const Eigen::ColPivHouseholderQR<Matrix> qr(flat);
    if (qr.rank() != dim) throw InvalidInput("matrix basis is linearly dependent");
    std::vector<double> c(static_cast<std::size_t>(dim) * dim * dim, 0.0);
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) {
        const Matrix comm = basis[i] * basis[j] - basis[j] * basis[i];
        const Vector target = comm.reshaped();
        const Vector coef = qr.solve(target);
        if ((flat * coef - target).norm() > 1e-10 * std::max(1.0, target.norm()))
          throw InvalidInput("matrix basis does not span a Lie algebra (commutator outside the span)");
        for (int k = 0; k < dim; ++k) {
          // Exact rationals like 1 survive the solve only up to rounding; snap tiny noise.
          const double x = std::abs(coef(k)) < 1e-13 ? 0.0 : coef(k);
          c[(static_cast<std::size_t>(i) * dim + j) * dim + k] = x;
          c[(static_cast<std::size_t>(j) * dim + i) * dim + k] = -x;
        }
      }
    return StructureConstants(dim, std::move(c));
  }

  /// g_D = R x|_D V on the basis (t, e_1, ..., e_n): [t, e_j] = D e_j, V abelian.
  static StructureConstants semidirect(const Endomorphism& d) {
    const int n = static_cast<int>(d.dim());
    const int dim = n + 1;
    std::vector<Bracket> brackets;
    for (int j = 0; j < n; ++j) {
      std::vector<double> value(static_cast<std::size_t>(dim), 0.0);
      for (int k = 0; k < n; ++k) value[k + 1] = d.matrix()(k, j);
      brackets.push_back({0, j + 1, value});
    }
    return from_brackets(dim, brackets);
  }

  int dim() const noexcept { return dim_; }
  double operator()(int i, int j, int k) const { return c_[(static_cast<std::size_t>(i) * dim_ + j) * dim_ + k]; }
  const std::vector<double>& data() const noexcept { return c_; }

  Vector bracket(const Vector& x, const Vector& y) const {
    Vector out = Vector::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
      if (x(i) == 0.0) continue;
      for (int j = 0; j < dim_; ++j) {
        const double w = x(i) * y(j);
        if (w == 0.0) continue;
        for (int k = 0; k < dim_; ++k) out(k) += w * (*this)(i, j, k);
      }
    }
    return out;
  }

  /// Matrix of ad(x) = [x, .]: column j holds the coordinates of [x, e_j].
  Matrix ad(const Vector& x) const {
    Matrix m = Matrix::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      if (x(i) == 0.0) continue;
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) m(k, j) += x(i) * (*this)(i, j, k);
    }
    return m;
  }

  Matrix ad_basis(int i) const { return ad(Vector::Unit(dim_, i)); }

  /// max over basis triples of |[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]|.
  double jacobi_defect() const {
    double worst = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
          const Vector ei = Vector::Unit(dim_, i), ej = Vector::Unit(dim_, j), ek = Vector::Unit(dim_, k);
          const Vector s = bracket(ei, bracket(ej, ek)) + bracket(ej, bracket(ek, ei)) + bracket(ek, bracket(ei, ej));
          worst = std::max(worst, s.cwiseAbs().maxCoeff());
        }
    return worst;
  }

  /// Orthonormal basis of span{[x, y] : x in a, y in b} for subspaces given by columns.
  Matrix bracket_span(const Matrix& a, const Matrix& b) const {
    Matrix all(dim_, a.cols() * b.cols());
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < a.cols(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j) all.col(col++) = bracket(a.col(i), b.col(j));
    return span(all);
  }

  /// Dimensions of g, [g,g], [[g,g],[g,g]], ... until the series stabilizes.
  std::vector<int> derived_series() const {
    Matrix cur = Matrix::Identity(dim_, dim_);
    std::vector<int> dims{dim_};
    for (;;) {
      Matrix next = bracket_span(cur, cur);
      if (next.cols() == cur.cols()) break;
      dims.push_back(static_cast<int>(next.cols()));
      if (next.cols() == 0) break;
      cur = std::move(next);
    }
    return dims;
  }

  /// Dimensions of g, [g,g], [g,[g,g]], ... until the series stabilizes.
  std::vector<int> lower_central_series() const {
    const Matrix g = Matrix::Identity(dim_, dim_);
    Matrix cur = g;
    std::vector<int> dims{dim_};
    for (;;) {
      Matrix next = bracket_span(g, cur);
      if (next.cols() == cur.cols()) break;
      dims.push_back(static_cast<int>(next.cols()));
      if (next.cols() == 0) break;
      cur = std::move(next);
    }
    return dims;
  }

  bool is_solvable() const { return derived_series().back() == 0; }
  bool is_nilpotent() const { return lower_central_series().back() == 0; }

 private:
  Matrix span(const Matrix& vectors) const {
    if (vectors.cols() == 0) return Matrix(dim_, 0);
    double cmax = 0.0;
    for (double x : c_) cmax = std::max(cmax, std::abs(x));
    Eigen::JacobiSVD<Matrix> svd(vectors, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, cmax) * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return svd.matrixU().leftCols(r);
  }

  int dim_;
  std::vector<double> c_;
};

}  // namespace qdlie

#endif  // QDLIE_LIE_ALGEBRA_HPP
