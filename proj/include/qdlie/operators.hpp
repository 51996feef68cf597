#ifndef QDLIE_OPERATORS_HPP
#define QDLIE_OPERATORS_HPP

// Discretized operators on L^2(R) over the uniform grid t_j = -L + j h,
// h = 2L/N: the causal convolution T eta = beta * eta with beta(t) = e^{-t} 1_{t>=0},
// multiplication operators M_g, and the product-convolution operator I - 2 M_g T.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qdlie/error.hpp"
#include "qdlie/random.hpp"

namespace qdlie::ops {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

enum class Outcome { pass, fail, inconclusive };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::pass: return "PASS";
    case Outcome::fail: return "FAIL";
    case Outcome::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

/// Diagonal weight of T: h for the rectangle rule, h/2 for the trapezoid rule.
/// Off-diagonal weights are h in both.
enum class QuadratureRule { rectangle, trapezoid };

inline const char* to_string(QuadratureRule q) { return q == QuadratureRule::rectangle ? "rectangle" : "trapezoid"; }

class Grid {
 public:
  /// N a power of two, N >= 16, h = 2L/N <= 1.
  Grid(double half_width, int points) : L_(half_width), N_(points) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw InvalidInput("grid: L must be positive and finite");
    if (points < 16 || (points & (points - 1)) != 0) throw InvalidInput("grid: N must be a power of two >= 16");
    if (h() > 1.0) throw InvalidInput("grid: spacing h = 2L/N must not exceed 1");
  }

  double L() const noexcept { return L_; }
  int N() const noexcept { return N_; }
  double h() const noexcept { return 2.0 * L_ / N_; }
  double t(Eigen::Index j) const noexcept { return -L_ + static_cast<double>(j) * h(); }
  /// Index of t = 0.
  Eigen::Index origin() const noexcept { return N_ / 2; }

  Vector points() const {
    Vector t(N_);
    for (int j = 0; j < N_; ++j) t(j) = this->t(j);
    return t;
  }

 private:
  double L_;
  int N_;
};

inline double diagonal_weight(const Grid& g, QuadratureRule rule) {
  return rule == QuadratureRule::rectangle ? g.h() : 0.5 * g.h();
}

/// Numerically stable 1 / (1 + e^{-t}).
inline double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// A symbol g: R -> [0, 1].
class SymbolFunction {
 public:
  enum class Kind { logistic, radial, custom };

  /// g(t) = 1 / (1 + e^{-(t - shift)}).
  static SymbolFunction logistic(double shift = 0.0) {
    std::ostringstream os;
    os << "logistic";
    if (shift != 0.0) os << "(shift=" << shift << ")";
    return SymbolFunction(Kind::logistic, os.str(), [shift](double t) { return ops::logistic(t - shift); });
  }

  /// g(t) = 1 - exp(-e^t |y|), i.e. a(e^t y) for a(x) = 1 - e^{-|x|}.
  static SymbolFunction radial(double y) {
    if (y == 0.0 || !std::isfinite(y)) throw InvalidInput("radial symbol requires finite y != 0");
    std::ostringstream os;
    os << "radial:" << y;
    const double ay = std::abs(y);
    return SymbolFunction(Kind::radial, os.str(), [ay](double t) { return -std::expm1(-std::exp(t) * ay); });
  }

  static SymbolFunction custom(std::string label, std::function<double(double)> f) {
    return SymbolFunction(Kind::custom, std::move(label), std::move(f));
  }

  static SymbolFunction constant(double c) {
    std::ostringstream os;
    os << "constant:" << c;
    return custom(os.str(), [c](double) { return c; });
  }

  /// Samples on a specific grid; evaluation elsewhere is an error.
  static SymbolFunction sampled(std::string label, Vector values) {
    SymbolFunction s(Kind::custom, std::move(label), nullptr);
    s.samples_ = std::move(values);
    return s;
  }

  Kind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

  double operator()(double t) const {
    if (!f_) throw InvalidInput("symbol '" + label_ + "' is sampled and has no pointwise evaluation");
    return f_(t);
  }

  /// g(t_j); every value must lie in [0, 1].
  Vector sample(const Grid& grid) const {
    Vector v(grid.N());
    if (!f_) {
      if (samples_.size() != grid.N()) throw InvalidInput("sampled symbol does not match the grid size");
      v = samples_;
    } else {
      for (int j = 0; j < grid.N(); ++j) v(j) = f_(grid.t(j));
    }
    for (int j = 0; j < grid.N(); ++j)
      if (!(v(j) >= 0.0 && v(j) <= 1.0)) {
        std::ostringstream os;
        os << "symbol '" << label_ << "' leaves [0, 1] at t = " << grid.t(j) << " (value " << v(j) << ")";
        throw InvalidInput(os.str());
      }
    return v;
  }

 private:
  SymbolFunction(Kind kind, std::string label, std::function<double(double)> f)
      : kind_(kind), label_(std::move(label)), f_(std::move(f)) {}

  Kind kind_;
  std::string label_;
  std::function<double(double)> f_;
  Vector samples_;
};

struct DiscretizedOp {
  Grid grid;
  Matrix matrix;
  std::string label;
};

/// Dense T: (T)_{jk} = h e^{-(t_j - t_k)} for j > k, the diagonal weight on j = k, 0 above.
inline DiscretizedOp conv_operator_T(const Grid& grid, QuadratureRule rule = QuadratureRule::rectangle) {
  const int n = grid.N();
  const double h = grid.h();
  Vector band(n);
  band(0) = diagonal_weight(grid, rule);
  for (int m = 1; m < n; ++m) band(m) = h * std::exp(-m * h);
  Matrix t = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) t.col(k).tail(n - k) = band.head(n - k);
  return {grid, std::move(t), std::string("T[") + to_string(rule) + "]"};
}

/// T x in O(N): S_j = q (S_{j-1} + x_{j-1}), (Tx)_j = w0 x_j + h S_j, q = e^{-h}.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_T(const Grid& grid, const Eigen::MatrixBase<Derived>& x,
                                                                   QuadratureRule rule = QuadratureRule::rectangle) {
  using S = typename Derived::Scalar;
  const int n = grid.N();
  if (x.size() != n) throw InvalidInput("apply_T: vector size does not match the grid");
  const double h = grid.h(), q = std::exp(-h), w0 = diagonal_weight(grid, rule);
  Eigen::Matrix<S, Eigen::Dynamic, 1> y(n);
  S acc = S(0);
  for (int j = 0; j < n; ++j) {
    if (j > 0) acc = q * (acc + x(j - 1));
    y(j) = w0 * x(j) + h * acc;
  }
  return y;
}

/// T^t x in O(N), by the mirrored recursion.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_T_transpose(
    const Grid& grid, const Eigen::MatrixBase<Derived>& x, QuadratureRule rule = QuadratureRule::rectangle) {
  using S = typename Derived::Scalar;
  const int n = grid.N();
  if (x.size() != n) throw InvalidInput("apply_T_transpose: vector size does not match the grid");
  const double h = grid.h(), q = std::exp(-h), w0 = diagonal_weight(grid, rule);
  Eigen::Matrix<S, Eigen::Dynamic, 1> y(n);
  S acc = S(0);
  for (int j = n - 1; j >= 0; --j) {
    if (j < n - 1) acc = q * (acc + x(j + 1));
    y(j) = w0 * x(j) + h * acc;
  }
  return y;
}

/// I - 2 diag(g(t_j)) T.
inline DiscretizedOp product_conv_operator(const SymbolFunction& g, const Grid& grid,
                                           QuadratureRule rule = QuadratureRule::rectangle) {
  const Vector gv = g.sample(grid);
  DiscretizedOp t = conv_operator_T(grid, rule);
  Matrix a = -2.0 * (gv.asDiagonal() * t.matrix);
  a.diagonal().array() += 1.0;
  return {grid, std::move(a), "I - 2 M_g T, g = " + g.label()};
}

inline Vector apply_product_conv(const Grid& grid, const Vector& g, const Vector& x,
                                 QuadratureRule rule = QuadratureRule::rectangle) {
  return x - 2.0 * g.cwiseProduct(apply_T(grid, x, rule));
}

inline Vector apply_product_conv_transpose(const Grid& grid, const Vector& g, const Vector& x,
                                           QuadratureRule rule = QuadratureRule::rectangle) {
  return x - 2.0 * apply_T_transpose(grid, Vector(g.cwiseProduct(x)), rule);
}

/// Discrete L^2 norm: sqrt(h sum |x_j|^2).
inline double l2_norm(const Grid& grid, const Vector& x) { return std::sqrt(grid.h()) * x.norm(); }

// ---------------------------------------------------------------------------
// Unitarity of I - 2T

/// Sum of Gaussian bumps a exp(-(t - c)^2 / (2 w^2)).
struct BumpMixture {
  std::vector<std::array<double, 3>> bumps;  // center, width, amplitude

  Vector sample(const Grid& grid) const {
    Vector v = Vector::Zero(grid.N());
    for (int j = 0; j < grid.N(); ++j) {
      const double t = grid.t(j);
      for (const auto& [c, w, a] : bumps) v(j) += a * std::exp(-0.5 * (t - c) * (t - c) / (w * w));
    }
    return v;
  }
};

/// Rejects vectors with amplitude above e^{-L/2} max|phi| within L/4 of either end.
inline void require_padded(const Grid& grid, const Vector& phi) {
  const double peak = phi.cwiseAbs().maxCoeff();
  const double limit = std::exp(-grid.L() / 2.0) * peak;
  for (int j = 0; j < grid.N(); ++j)
    if (std::abs(grid.t(j)) > 0.75 * grid.L() && std::abs(phi(j)) > limit) {
      std::ostringstream os;
      os << "test vector is supported near the boundary (|phi(" << grid.t(j) << ")| = " << std::abs(phi(j))
         << " exceeds e^{-L/2} max|phi|)";
      throw InvalidInput(os.str());
    }
}

/// Seeded mixtures of 1-3 bumps with centers in [-L/2, L/2] and widths in
/// [0.5, 3], redrawn until they satisfy the padding condition.
inline std::vector<BumpMixture> random_bump_mixtures(int trials, double L, std::uint64_t seed) {
  CounterRng rng(seed, 0xb0b);
  std::vector<BumpMixture> out;
  while (static_cast<int>(out.size()) < trials) {
    BumpMixture m;
    const int count = 1 + static_cast<int>(rng.uniform() * 3.0);
    bool ok = true;
    for (int b = 0; b < count; ++b) {
      const double c = rng.uniform(-0.5 * L, 0.5 * L);
      const double w = rng.uniform(0.5, 3.0);
      const double a = rng.uniform(0.2, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
      // Each bump is below e^{-L/2} of its own peak beyond 3L/4.
      const double gap = 0.75 * L - std::abs(c);
      if (gap * gap / (2.0 * w * w) < 0.5 * L + 2.0) ok = false;
      m.bumps.push_back({c, w, a});
    }
    if (ok) out.push_back(std::move(m));
  }
  return out;
}

/// | ||(I - 2T) phi|| / ||phi|| - 1 |; 0 for phi = 0.
inline double unitary_defect(const Grid& grid, const Vector& phi, QuadratureRule rule = QuadratureRule::rectangle) {
  if (phi.size() != grid.N()) throw InvalidInput("unitary_defect: vector size does not match the grid");
  const double n = phi.norm();
  if (n == 0.0) return 0.0;
  require_padded(grid, phi);
  const Vector out = phi - 2.0 * apply_T(grid, phi, rule);
  return std::abs(out.norm() / n - 1.0);
}

struct UnitaryReport {
  Grid grid;
  QuadratureRule rule = QuadratureRule::rectangle;
  int trials = 0;
  double tolerance = 0.0;
  double defect = 0.0;
  std::vector<double> defects;
  bool pass = false;
};

inline UnitaryReport check_unitary(const Grid& grid, int trials, double tol, std::uint64_t seed = 0,
                                   QuadratureRule rule = QuadratureRule::rectangle) {
  if (grid.L() < 20.0) throw PreconditionError("check_unitary: requires L >= 20 so that e^{-L} truncation is negligible");
  if (trials <= 0) throw InvalidInput("check_unitary: trials must be positive");
  UnitaryReport r{grid, rule, trials, tol, 0.0, {}, false};
  for (const auto& m : random_bump_mixtures(trials, grid.L(), seed)) {
    r.defects.push_back(unitary_defect(grid, m.sample(grid), rule));
    r.defect = std::max(r.defect, r.defects.back());
  }
  r.pass = r.defect <= tol;
  return r;
}

struct BetaIdentityReport {
  double sup_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int points = 0;
};

/// 2 beta + 2 beta* against (2 beta) * (2 beta)* at the cell midpoints, with
/// the convolution integral of the grid-truncated kernels by composite Simpson.
inline BetaIdentityReport check_beta_identity(const Grid& grid, double tol = 1e-6) {
  BetaIdentityReport r;
  r.tolerance = tol;
  r.points = grid.N();
  const double L = grid.L();
  for (int j = 0; j < grid.N(); ++j) {
    const double t = grid.t(j) + 0.5 * grid.h();
    const double lhs = t > 0.0 ? 2.0 * std::exp(-t) : 2.0 * std::exp(t);
    // beta(s) = e^{-s} on [0, L], beta*(u) = e^{u} on [-L, 0]; integrand nonzero for s in [max(0,t), min(L, t+L)].
    const double a = std::max(0.0, t), b = std::min(L, t + L);
    double rhs = 0.0;
    if (b > a) {
      const int panels = 2 * std::max(1, static_cast<int>(std::ceil((b - a) / 0.01)));
      const double step = (b - a) / panels;
      auto f = [t](double s) { return 4.0 * std::exp(-s) * std::exp(t - s); };
      double acc = f(a) + f(b);
      for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * step);
      rhs = acc * step / 3.0;
    }
    r.sup_error = std::max(r.sup_error, std::abs(lhs - rhs));
  }
  r.pass = r.sup_error <= tol;
  return r;
}

struct FourierReport {
  std::vector<double> xi;
  std::vector<Complex> measured;
  std::vector<Complex> expected;
  double max_relative_error = 0.0;
};

/// Applies T to e^{-i xi t} for xi = pi m / L with |xi| <= N / (8L) and reads
/// the multiplier on |t| <= L/2, compared with i / (i + xi).
inline FourierReport fourier_multiplier_check(const Grid& grid, QuadratureRule rule = QuadratureRule::rectangle) {
  FourierReport r;
  const double L = grid.L();
  const int mmax = static_cast<int>(std::floor(grid.N() / (8.0 * std::numbers::pi)));
  for (int m = -mmax; m <= mmax; ++m) {
    const double xi = std::numbers::pi * m / L;
    CVector eta(grid.N());
    for (int j = 0; j < grid.N(); ++j) eta(j) = std::polar(1.0, -xi * grid.t(j));
    const CVector y = apply_T(grid, eta, rule);
    Complex acc = 0.0;
    int count = 0;
    for (int j = 0; j < grid.N(); ++j)
      if (std::abs(grid.t(j)) <= 0.5 * L) {
        acc += y(j) / eta(j);
        ++count;
      }
    const Complex measured = acc / static_cast<double>(count);
    const Complex expected = Complex(0.0, 1.0) / Complex(xi, 1.0);
    r.xi.push_back(xi);
    r.measured.push_back(measured);
    r.expected.push_back(expected);
    r.max_relative_error = std::max(r.max_relative_error, std::abs(measured - expected) / std::abs(expected));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Cokernel witness and index signature

struct CokernelWitness {
  Grid grid;
  std::string symbol;
  /// Unit Euclidean norm, positive.
  Vector zeta;
  /// ||(I - 2 M_c T)^t zeta|| / ||zeta||.
  double adjoint_residual = 0.0;
  /// ||(I - 2 M_c T) zeta|| / ||zeta||.
  double forward_residual = 0.0;
};

/// Null vector of the transposed operator, the discrete analogue of
/// zeta' = (1 - 2c) zeta with zeta(0) = 1. Rows 0..N-2 of (I - 2 M_c T)^t zeta = 0
/// hold exactly under
///   zeta_k (1 + 2(h - w0) c_k) q = zeta_{k-1} (1 - 2 w0 c_{k-1});
/// the last row leaves a residual of size zeta(L).
inline CokernelWitness cokernel_witness(const SymbolFunction& c, const Grid& grid,
                                        QuadratureRule rule = QuadratureRule::rectangle) {
  const Vector cv = c.sample(grid);
  const int n = grid.N();
  const double edge = std::exp(-grid.L() / 2.0);
  if (cv(0) > edge || 1.0 - cv(n - 1) > edge) {
    std::ostringstream os;
    os << "cokernel_witness: symbol must satisfy c(-L) ~ 0 and c(L) ~ 1 within e^{-L/2} (c(-L) = " << cv(0)
       << ", c(L) = " << cv(n - 1) << ")";
    throw PreconditionError(os.str());
  }
  const double h = grid.h(), q = std::exp(-h), w0 = diagonal_weight(grid, rule);
  for (int k = 0; k < n; ++k)
    if (!(1.0 - 2.0 * w0 * cv(k) > 0.0) || !(1.0 + 2.0 * (h - w0) * cv(k) > 0.0))
      throw PreconditionError("cokernel_witness: grid too coarse for the recursion (need 2 h c < 1)");

  // Work in log scale: zeta spans e^{+-L}.
  Vector logz(n);
  const auto j0 = grid.origin();
  logz(j0) = 0.0;
  for (Eigen::Index k = j0 + 1; k < n; ++k)
    logz(k) = logz(k - 1) + std::log(1.0 - 2.0 * w0 * cv(k - 1)) - std::log(q * (1.0 + 2.0 * (h - w0) * cv(k)));
  for (Eigen::Index k = j0; k > 0; --k)
    logz(k - 1) = logz(k) + std::log(q * (1.0 + 2.0 * (h - w0) * cv(k))) - std::log(1.0 - 2.0 * w0 * cv(k - 1));
  const double top = logz.maxCoeff();
  Vector zeta = (logz.array() - top).exp().matrix();
  zeta /= zeta.norm();

  CokernelWitness w{grid, c.label(), zeta, 0.0, 0.0};
  w.adjoint_residual = apply_product_conv_transpose(grid, cv, zeta, rule).norm();
  w.forward_residual = apply_product_conv(grid, cv, zeta, rule).norm();
  return w;
}

struct IndexReport {
  Outcome outcome = Outcome::inconclusive;
  /// Descending.
  Vector singular_values;
  /// The five smallest after deflating truncation artifacts, ascending.
  std::vector<double> bottom;
  /// Smallest singular values whose left singular vector has most of its
  /// energy within L/4 of the ends; removed before the gap test.
  int boundary_artifacts = 0;
  double gap_tol = 0.0;
  /// |<u, zeta>| for the left singular vector of the smallest retained singular value; NaN without a witness.
  double correlation = std::numeric_limits<double>::quiet_NaN();
  /// Fraction of the matching right singular vector's energy within L/4 of the ends.
  double right_boundary_mass = 0.0;
  std::string reason;
};

/// Fraction of x's energy on grid points with |t| > 3L/4.
inline double boundary_mass(const Grid& grid, const Vector& x) {
  double edge = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (std::abs(grid.t(j)) > 0.75 * grid.L()) edge += x(j) * x(j);
  return edge / x.squaredNorm();
}

/// Index signature of a discretized operator. Small singular values whose
/// left singular vector lives at the window ends (mass > 1/2 within L/4 of
/// +-L) are truncation artifacts and are deflated first. On the rest: PASS iff
/// exactly one singular value sits below gap_tol times its neighbour and its
/// left singular vector matches the witness to |<u, zeta>| >= 0.99. A gap
/// spanning several singular values is FAIL; no gap is INCONCLUSIVE.
inline IndexReport index_signature(const DiscretizedOp& op, const Vector& witness = Vector(), double gap_tol = 1e-2) {
  const auto n = op.matrix.rows();
  if (n < 8 || op.matrix.cols() != n) throw InvalidInput("index_signature: need a square operator of size >= 8");
  if (op.grid.N() != n) throw InvalidInput("index_signature: operator size does not match its grid");
  if (witness.size() != 0 && witness.size() != n) throw InvalidInput("index_signature: witness size mismatch");
  Eigen::BDCSVD<Matrix> svd(op.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  IndexReport r;
  r.gap_tol = gap_tol;
  r.singular_values = svd.singularValues();
  const auto& s = r.singular_values;

  // Deflation stops at the first interior vector and never exceeds 3 values.
  Eigen::Index last = n - 1;
  while (r.boundary_artifacts < 3 && s(last) <= gap_tol * s(0) && boundary_mass(op.grid, svd.matrixU().col(last)) > 0.5) {
    ++r.boundary_artifacts;
    --last;
  }
  for (Eigen::Index k = last; k >= std::max<Eigen::Index>(0, last - 4); --k) r.bottom.push_back(s(k));

  const Vector u = svd.matrixU().col(last);
  r.right_boundary_mass = boundary_mass(op.grid, svd.matrixV().col(last));
  if (witness.size() == n) r.correlation = std::abs(u.dot(witness)) / witness.norm();

  const bool isolated = s(last) <= gap_tol * s(last - 1) && s(last - 1) > gap_tol * s(last - 2);
  bool any_gap = false;
  for (Eigen::Index k = last; k >= std::max<Eigen::Index>(1, last - 4); --k)
    if (s(k) <= gap_tol * s(k - 1)) any_gap = true;
  std::ostringstream os;
  if (r.boundary_artifacts > 0) os << r.boundary_artifacts << " boundary-localized singular value(s) deflated; ";
  if (isolated) {
    if (witness.size() == n && !(r.correlation >= 0.99)) {
      r.outcome = Outcome::fail;
      os << "one isolated small singular value, but witness correlation " << r.correlation << " < 0.99";
    } else {
      r.outcome = Outcome::pass;
      os << "exactly one small singular value (" << s(last) << " vs next " << s(last - 1) << ")";
    }
  } else if (any_gap) {
    r.outcome = Outcome::fail;
    os << "small singular values do not form a single isolated value";
  } else {
    r.outcome = Outcome::inconclusive;
    os << "no gap below gap_tol among the bottom singular values";
  }
  r.reason = os.str();
  return r;
}

// ---------------------------------------------------------------------------
// Compactness

/// (T_f)_{jk} = h f(t_j - t_k).
inline Matrix kernel_operator(const std::function<double(double)>& f, const Grid& grid) {
  const int n = grid.N();
  const double h = grid.h();
  Vector band(2 * n - 1);
  for (int m = -(n - 1); m <= n - 1; ++m) band(m + n - 1) = h * f(m * h);
  Matrix t(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) t(j, k) = band(j - k + n - 1);
  return t;
}

inline double beta_kernel(double x) { return x >= 0.0 ? std::exp(-x) : 0.0; }

/// Singular values (descending) of diag(h(t_j)) T_f.
inline Vector compactness_profile(const std::function<double(double)>& hfun, const std::function<double(double)>& f,
                                  const Grid& grid) {
  Vector hv(grid.N());
  for (int j = 0; j < grid.N(); ++j) hv(j) = hfun(grid.t(j));
  const Matrix a = hv.asDiagonal() * kernel_operator(f, grid);
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues();
}

struct CompactnessLevel {
  Grid grid;
  Vector singular_values;
  /// #{k : sigma_k > 0.01 sigma_1}.
  int K = 0;
  /// #{k : sigma_k > 0.3 sigma_1}.
  int plateau = 0;
  /// |h(+-L)| <= e^{-L/2}.
  bool boundary_decay = false;
};

struct CompactnessReport {
  std::string label;
  std::vector<CompactnessLevel> levels;
  /// |K_{i+1} - K_i| <= 0.1 K_i + 2 along the ladder.
  bool stable = false;
};

inline int count_above(const Vector& s, double fraction) {
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int k = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > fraction * s(0)) ++k;
  return k;
}

/// Refinement ladder at fixed spacing: level i uses N_i points and
/// L_i = N_i * spacing / 2, so each level doubles the window.
inline CompactnessReport compactness_ladder(const std::string& label, const std::function<double(double)>& hfun,
                                            const std::function<double(double)>& f, double spacing,
                                            const std::vector<int>& sizes) {
  CompactnessReport r;
  r.label = label;
  for (int n : sizes) {
    const Grid grid(0.5 * n * spacing, n);
    CompactnessLevel lvl{grid, compactness_profile(hfun, f, grid), 0, 0, false};
    lvl.K = count_above(lvl.singular_values, 0.01);
    lvl.plateau = count_above(lvl.singular_values, 0.3);
    const double edge = std::exp(-grid.L() / 2.0);
    lvl.boundary_decay = std::abs(hfun(-grid.L())) <= edge && std::abs(hfun(grid.L())) <= edge;
    r.levels.push_back(std::move(lvl));
  }
  r.stable = true;
  for (std::size_t i = 1; i < r.levels.size(); ++i)
    if (std::abs(r.levels[i].K - r.levels[i - 1].K) > 0.1 * r.levels[i - 1].K + 2.0) r.stable = false;
  return r;
}

// ---------------------------------------------------------------------------
// Covariance of the regular representation

struct CovarianceReport {
  Grid grid;
  double requested_shift = 0.0;
  double shift = 0.0;
  double snap_distance = 0.0;
  long steps = 0;
  double defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Pi(f) = diag(g(t_j)) T_chi for f = chi (x) g, and Pi_r(f) with g(. - r).
/// Reports || Pi_r(f) - S Pi(f) S^{-1} || on the window |t| <= L/2, where S is
/// the grid shift by round(r/h) steps.
inline CovarianceReport covariance_check(const SymbolFunction& g, const std::function<double(double)>& chi, double r,
                                         const Grid& grid, double tol = 1e-6) {
  const double L = grid.L(), h = grid.h();
  if (!(std::abs(r) <= 0.25 * L)) throw PreconditionError("covariance_check: requires |r| <= L/4");
  double peak = 0.0;
  for (int j = 0; j < grid.N(); ++j) peak = std::max(peak, std::abs(chi(grid.t(j))));
  for (int j = 0; j < grid.N(); ++j)
    if (std::abs(grid.t(j)) > 0.25 * L && std::abs(chi(grid.t(j))) > std::exp(-L / 2.0) * peak)
      throw PreconditionError("covariance_check: chi must be supported in [-L/4, L/4]");

  CovarianceReport rep{grid, r, 0.0, 0.0, 0, 0.0, tol, false};
  rep.steps = std::lround(r / h);
  rep.shift = static_cast<double>(rep.steps) * h;
  rep.snap_distance = std::abs(r - rep.shift);

  const Matrix tchi = kernel_operator(chi, grid);
  const Vector gv = g.sample(grid);
  Vector gr(grid.N());
  for (int j = 0; j < grid.N(); ++j) gr(j) = g(grid.t(j) - rep.shift);
  for (int j = 0; j < grid.N(); ++j)
    if (!(gr(j) >= 0.0 && gr(j) <= 1.0)) throw InvalidInput("covariance_check: shifted symbol leaves [0, 1]");

  std::vector<int> window;
  for (int j = 0; j < grid.N(); ++j)
    if (std::abs(grid.t(j)) <= 0.5 * L) window.push_back(j);
  const auto w = static_cast<Eigen::Index>(window.size());
  Matrix diff(w, w);
  const long m = rep.steps;
  for (Eigen::Index a = 0; a < w; ++a)
    for (Eigen::Index b = 0; b < w; ++b) {
      const int j = window[a], k = window[b];
      const double shifted = gr(j) * tchi(j, k);
      const double conj = gv(j - m) * tchi(j - m, k - m);
      diff(a, b) = shifted - conj;
    }
  Eigen::BDCSVD<Matrix> svd(diff);
  rep.defect = svd.singularValues()(0);
  rep.pass = rep.defect <= tol;
  return rep;
}

}  // namespace qdlie::ops

#endif  // QDLIE_OPERATORS_HPP
