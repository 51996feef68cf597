#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qdlie/operators.hpp"

namespace {

using namespace qdlie::ops;
using qdlie::InvalidInput;
using qdlie::PreconditionError;

constexpr auto kRect = QuadratureRule::rectangle;
constexpr auto kTrap = QuadratureRule::trapezoid;

/// Composite Simpson on [a, b] with an even number of panels of width <= step.
double simpson(const std::function<double(double)>& f, double a, double b, double step = 1e-3) {
  if (a == b) return 0.0;
  const int panels = 2 * std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / (2.0 * step))));
  const double w = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * w);
  return acc * w / 3.0;
}

/// exp(int_0^t (1 - 2c)), normalized to unit Euclidean norm on the grid.
Vector ode_witness(const SymbolFunction& c, const Grid& g) {
  Vector logz(g.N());
  const auto j0 = g.origin();
  logz(j0) = 0.0;
  auto rate = [&c](double s) { return 1.0 - 2.0 * c(s); };
  for (Eigen::Index j = j0 + 1; j < g.N(); ++j) logz(j) = logz(j - 1) + simpson(rate, g.t(j - 1), g.t(j));
  for (Eigen::Index j = j0; j > 0; --j) logz(j - 1) = logz(j) - simpson(rate, g.t(j - 1), g.t(j));
  Vector z = (logz.array() - logz.maxCoeff()).exp().matrix();
  return z / z.norm();
}

Vector sech2_half(const Grid& g, double shift = 0.0) {
  Vector z(g.N());
  for (int j = 0; j < g.N(); ++j) {
    const double c = std::cosh(0.5 * (g.t(j) - shift));
    z(j) = 1.0 / (c * c);
  }
  return z / z.norm();
}

// ---------------------------------------------------------------------------

TEST(Grid, Validation) {
  EXPECT_NO_THROW(Grid(8.0, 16));
  EXPECT_THROW(Grid(8.0, 8), InvalidInput);
  EXPECT_THROW(Grid(8.0, 24), InvalidInput);
  EXPECT_THROW(Grid(0.0, 32), InvalidInput);
  EXPECT_THROW(Grid(20.0, 16), InvalidInput);  // h = 2.5
  const Grid g(30.0, 1024);
  EXPECT_DOUBLE_EQ(g.h(), 60.0 / 1024);
  EXPECT_DOUBLE_EQ(g.t(0), -30.0);
  EXPECT_DOUBLE_EQ(g.t(g.origin()), 0.0);
}

TEST(Symbol, ValuesAndRangeCheck) {
  EXPECT_DOUBLE_EQ(SymbolFunction::logistic()(0.0), 0.5);
  EXPECT_NEAR(SymbolFunction::logistic()(-800.0), 0.0, 1e-300);
  EXPECT_DOUBLE_EQ(SymbolFunction::logistic()(800.0), 1.0);
  EXPECT_NEAR(SymbolFunction::radial(1.0)(0.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(SymbolFunction::radial(-2.0)(std::log(0.5)), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_THROW(SymbolFunction::radial(0.0), InvalidInput);
  const Grid g(4.0, 16);
  EXPECT_THROW(SymbolFunction::constant(1.5).sample(g), InvalidInput);
  EXPECT_THROW(SymbolFunction::sampled("s", Vector::Zero(8)).sample(g), InvalidInput);
  EXPECT_NO_THROW(SymbolFunction::sampled("s", Vector::Constant(16, 0.25)).sample(g));
}

TEST(ConvolutionT, LowerTriangularToeplitz) {
  const Grid g(4.0, 32);
  const Matrix t = conv_operator_T(g).matrix;
  for (int j = 0; j < g.N(); ++j)
    for (int k = 0; k < g.N(); ++k) {
      const double expected = j >= k ? g.h() * std::exp(-(g.t(j) - g.t(k))) : 0.0;
      EXPECT_NEAR(t(j, k), expected, 1e-15);
    }
  const Matrix tt = conv_operator_T(g, kTrap).matrix;
  EXPECT_DOUBLE_EQ(tt(3, 3), 0.5 * g.h());
  EXPECT_DOUBLE_EQ(tt(4, 3), t(4, 3));
}

TEST(ConvolutionT, ImpulseResponse) {
  const Grid g(30.0, 1024);
  const auto k0 = g.origin() - 100;
  Vector eta = Vector::Zero(g.N());
  eta(k0) = 1.0 / g.h();
  const Vector y = apply_T(g, eta);
  for (Eigen::Index j = 0; j < g.N(); ++j) {
    const double expected = j >= k0 ? std::exp(-(g.t(j) - g.t(k0))) : 0.0;
    EXPECT_NEAR(y(j), expected, 1e-12);
  }
  EXPECT_EQ(apply_T(g, Vector::Zero(g.N())).norm(), 0.0);
}

TEST(ConvolutionT, FastApplicationMatchesDenseMatrix) {
  const Grid g(10.0, 256);
  qdlie::CounterRng rng(5, 0);
  const Vector x = rng.normal_vector(g.N());
  for (auto rule : {kRect, kTrap}) {
    const Matrix t = conv_operator_T(g, rule).matrix;
    EXPECT_LT((apply_T(g, x, rule) - t * x).norm(), 1e-12 * x.norm());
    EXPECT_LT((apply_T_transpose(g, x, rule) - t.transpose() * x).norm(), 1e-12 * x.norm());
    const Vector gv = SymbolFunction::logistic().sample(g);
    const Matrix a = product_conv_operator(SymbolFunction::logistic(), g, rule).matrix;
    EXPECT_LT((apply_product_conv(g, gv, x, rule) - a * x).norm(), 1e-12 * x.norm());
    EXPECT_LT((apply_product_conv_transpose(g, gv, x, rule) - a.transpose() * x).norm(), 1e-12 * x.norm());
  }
  EXPECT_THROW(apply_T(g, Vector::Zero(10)), InvalidInput);
}

// (T eta)(t) = e^{-t} int_{-inf}^t e^s eta(s) ds for eta = e^{-s^2}, in closed form.
TEST(ConvolutionT, MatchesIntegralFormula) {
  auto exact = [](double t) {
    return std::exp(-t + 0.25) * 0.5 * std::sqrt(std::numbers::pi) * (1.0 + std::erf(t - 0.5));
  };
  double previous = 0.0;
  for (int n : {512, 1024, 2048}) {
    const Grid g(12.0, n);
    Vector eta(n), ref(n);
    for (int j = 0; j < n; ++j) {
      eta(j) = std::exp(-g.t(j) * g.t(j));
      ref(j) = exact(g.t(j));
    }
    const double rect = (apply_T(g, eta, kRect) - ref).cwiseAbs().maxCoeff();
    const double trap = (apply_T(g, eta, kTrap) - ref).cwiseAbs().maxCoeff();
    EXPECT_LT(rect, g.h()) << n;
    EXPECT_LT(trap, g.h() * g.h()) << n;
    if (previous > 0.0) {
      EXPECT_NEAR(rect / previous, 0.5, 0.15) << n;
    }
    previous = rect;
  }
}

// On e^{-i xi t} the discrete T acts, away from the left edge, by the
// geometric-series symbol w0 + h q z / (1 - q z), q = e^{-h}, z = e^{i xi h};
// the truncated tail contributes at most e^{-L/2} on the window.
TEST(ConvolutionT, FourierMultiplierMatchesDiscreteSymbol) {
  const Grid g(30.0, 2048);
  for (auto rule : {kRect, kTrap}) {
    const FourierReport r = fourier_multiplier_check(g, rule);
    ASSERT_FALSE(r.xi.empty());
    const double w0 = diagonal_weight(g, rule);
    for (std::size_t k = 0; k < r.xi.size(); ++k) {
      const Complex qz = std::exp(-g.h()) * std::polar(1.0, r.xi[k] * g.h());
      const Complex symbol = w0 + g.h() * qz / (1.0 - qz);
      EXPECT_LT(std::abs(r.measured[k] - symbol), std::exp(-0.5 * g.L())) << r.xi[k];
      EXPECT_LT(std::abs(r.expected[k] - Complex(0.0, 1.0) / Complex(r.xi[k], 1.0)), 1e-15);
    }
    EXPECT_LE(std::abs(r.xi.back()), g.N() / (8.0 * g.L()));
  }
}

TEST(ConvolutionT, FourierSymbolWithinOnePercentTrapezoid) {
  for (int n : {1024, 2048, 4096}) EXPECT_LE(fourier_multiplier_check(Grid(30.0, n), kTrap).max_relative_error, 1e-2) << n;
}

// The one-percent bound for the default rule, as stated. The rectangle
// symbol differs from i/(i+xi) by about h|i+xi|/2, i.e. 1/8 at |xi| = N/(8L),
// at every grid.
TEST(ConvolutionT, FourierSymbolWithinOnePercentRectangle) {
  EXPECT_LE(fourier_multiplier_check(Grid(30.0, 2048)).max_relative_error, 1e-2);
}

TEST(Unitarity, ZeroVectorHasNoDefect) {
  const Grid g(30.0, 1024);
  EXPECT_EQ(unitary_defect(g, Vector::Zero(g.N())), 0.0);
}

TEST(Unitarity, BoundarySupportedVectorsAreRejected) {
  const Grid g(30.0, 1024);
  Vector phi = BumpMixture{{{0.0, 1.0, 1.0}}}.sample(g);
  EXPECT_NO_THROW(require_padded(g, phi));
  phi(3) = 1e-3;
  EXPECT_THROW(require_padded(g, phi), InvalidInput);
  EXPECT_THROW(unitary_defect(g, phi), InvalidInput);
  EXPECT_THROW(unitary_defect(g, BumpMixture{{{27.0, 1.0, 1.0}}}.sample(g)), InvalidInput);
}

TEST(Unitarity, Preconditions) {
  EXPECT_THROW(check_unitary(Grid(10.0, 1024), 5, 1e-3), PreconditionError);
  EXPECT_THROW(check_unitary(Grid(30.0, 1024), 0, 1e-3), InvalidInput);
}

TEST(Unitarity, RandomMixturesArePadded) {
  const Grid g(30.0, 2048);
  for (const auto& m : random_bump_mixtures(200, g.L(), 11)) {
    EXPECT_GE(m.bumps.size(), 1u);
    EXPECT_LE(m.bumps.size(), 3u);
    EXPECT_NO_THROW(require_padded(g, m.sample(g)));
  }
}

// Independent oracle: the exact L^2(R) image of a Gaussian bump has the same
// norm, so the discrete defect is the quadrature error alone.
TEST(Unitarity, RectangleDefectIsFirstOrder) {
  std::vector<double> defects;
  for (int n : {1024, 2048, 4096}) {
    const UnitaryReport r = check_unitary(Grid(30.0, n), 50, 1e-3, 3);
    EXPECT_EQ(r.defects.size(), 50u);
    EXPECT_LE(r.defect, Grid(30.0, n).h()) << n;
    defects.push_back(r.defect);
  }
  for (std::size_t k = 1; k < defects.size(); ++k) EXPECT_NEAR(defects[k] / defects[k - 1], 0.5, 0.15);
}

TEST(Unitarity, TrapezoidMeetsOneInAThousand) {
  const UnitaryReport r = check_unitary(Grid(30.0, 4096), 100, 1e-3, 0, kTrap);
  EXPECT_TRUE(r.pass) << r.defect;
}

TEST(Unitarity, BetaIdentity) {
  for (int n : {256, 1024}) {
    const BetaIdentityReport r = check_beta_identity(Grid(30.0, n));
    EXPECT_TRUE(r.pass) << r.sup_error;
    EXPECT_EQ(r.points, n);
  }
}

TEST(ProductConvolution, Examples) {
  const Grid g(8.0, 64);
  EXPECT_EQ(product_conv_operator(SymbolFunction::constant(0.0), g).matrix, Matrix::Identity(64, 64));
  const Matrix unitary_case = Matrix::Identity(64, 64) - 2.0 * conv_operator_T(g).matrix;
  EXPECT_LT((product_conv_operator(SymbolFunction::constant(1.0), g).matrix - unitary_case).norm(), 1e-14);
  const Matrix radial = product_conv_operator(SymbolFunction::radial(1.0), g).matrix;
  const Matrix t = conv_operator_T(g).matrix;
  for (int j = 0; j < g.N(); ++j) {
    const double gj = 1.0 - std::exp(-std::exp(g.t(j)));
    for (int k = 0; k < g.N(); ++k) EXPECT_NEAR(radial(j, k), (j == k ? 1.0 : 0.0) - 2.0 * gj * t(j, k), 1e-14);
  }
}

TEST(Witness, LogisticIsSechSquared) {
  double previous = 0.0;
  for (int n : {512, 1024, 2048}) {
    const Grid g(30.0, n);
    const CokernelWitness w = cokernel_witness(SymbolFunction::logistic(), g);
    EXPECT_NEAR(w.zeta.norm(), 1.0, 1e-12);
    EXPECT_GT(w.zeta.minCoeff(), 0.0);
    EXPECT_LE(w.adjoint_residual, 1e-6);
    EXPECT_GE(w.forward_residual, 0.1);
    const double err = (w.zeta - sech2_half(g)).norm();
    EXPECT_LE(err, g.h()) << n;
    if (previous > 0.0) {
      EXPECT_NEAR(err / previous, 0.5, 0.15) << n;
    }
    previous = err;
    const CokernelWitness wt = cokernel_witness(SymbolFunction::logistic(), g, kTrap);
    EXPECT_LE((wt.zeta - sech2_half(g)).norm(), g.h() * g.h()) << n;
    EXPECT_LE(wt.adjoint_residual, 1e-6);
  }
}

TEST(Witness, ShiftedLogisticIsShiftedSechSquared) {
  const Grid g(30.0, 2048);
  const CokernelWitness w = cokernel_witness(SymbolFunction::logistic(5.0), g);
  EXPECT_LE(w.adjoint_residual, 1e-6);
  EXPECT_GE(w.forward_residual, 0.1);
  EXPECT_LE((w.zeta - sech2_half(g, 5.0)).norm(), g.h());
  EXPECT_GE(w.zeta.dot(sech2_half(g, 5.0)), 0.999);
}

TEST(Witness, RadialMatchesQuadratureOracle) {
  const Grid g(30.0, 2048);
  const SymbolFunction c = SymbolFunction::radial(1.0);
  const CokernelWitness w = cokernel_witness(c, g);
  EXPECT_LE(w.adjoint_residual, 1e-6);
  EXPECT_GE(w.forward_residual, 0.1);
  const Vector oracle = ode_witness(c, g);
  EXPECT_LE((w.zeta - oracle).norm(), g.h());
  EXPECT_GE(w.zeta.dot(oracle), 0.999);
  // The oracle itself is the dense null vector of the adjoint up to quadrature.
  EXPECT_LE(apply_product_conv_transpose(g, c.sample(g), oracle, kTrap).norm(), 10.0 * g.h() * g.h());
}

TEST(Witness, Preconditions) {
  const Grid g(30.0, 512);
  EXPECT_THROW(cokernel_witness(SymbolFunction::constant(0.5), g), PreconditionError);
  EXPECT_THROW(cokernel_witness(SymbolFunction::constant(1.0), g), PreconditionError);
  EXPECT_THROW(cokernel_witness(SymbolFunction::logistic(20.0), g), PreconditionError);
}

TEST(Index, LogisticAndRadialHaveOneIsolatedValue) {
  for (int n : {256, 512, 1024}) {
    const Grid g(30.0, n);
    for (const auto& c : {SymbolFunction::logistic(), SymbolFunction::radial(1.0)}) {
      const IndexReport r = index_signature(product_conv_operator(c, g), cokernel_witness(c, g).zeta);
      EXPECT_EQ(r.outcome, Outcome::pass) << c.label() << " " << r.reason;
      EXPECT_EQ(r.boundary_artifacts, 0);
      const auto& s = r.singular_values;
      EXPECT_LE(s(n - 1), 1e-3 * s(0));
      EXPECT_GE(s(n - 2), 0.05 * s(0)) << c.label() << " N=" << n;
      EXPECT_GE(r.correlation, 0.99);
      EXPECT_EQ(r.bottom.size(), 5u);
      EXPECT_TRUE(std::is_sorted(r.bottom.begin(), r.bottom.end()));
    }
  }
}

// The constant symbol's truncation has exactly one null vector, e^{-t}
// restricted to the window, and it lives at the left edge.
TEST(Index, UnitaryCaseHasNoInteriorGap) {
  for (int n : {512, 1024}) {
    const Grid g(30.0, n);
    const IndexReport r = index_signature(product_conv_operator(SymbolFunction::constant(1.0), g));
    EXPECT_EQ(r.outcome, Outcome::inconclusive) << r.reason;
    EXPECT_EQ(r.boundary_artifacts, 1);
    const auto& s = r.singular_values;
    for (Eigen::Index k = 0; k + 1 < s.size(); ++k) EXPECT_NEAR(s(k), 1.0, 2.0 * g.h()) << k;
  }
}

TEST(Index, UnitaryCaseTrapezoidWithinOneInAThousand) {
  const Grid g(30.0, 2048);
  const IndexReport r = index_signature(product_conv_operator(SymbolFunction::constant(1.0), g, kTrap));
  EXPECT_EQ(r.outcome, Outcome::inconclusive);
  const auto& s = r.singular_values;
  for (Eigen::Index k = 0; k + r.boundary_artifacts < s.size(); ++k) EXPECT_NEAR(s(k), 1.0, 1e-3) << k;
}

TEST(Index, IdentityHasNoGap) {
  const Grid g(8.0, 64);
  const IndexReport r = index_signature(product_conv_operator(SymbolFunction::constant(0.0), g));
  EXPECT_EQ(r.outcome, Outcome::inconclusive);
  EXPECT_EQ(r.boundary_artifacts, 0);
  for (Eigen::Index k = 0; k < r.singular_values.size(); ++k) EXPECT_NEAR(r.singular_values(k), 1.0, 1e-14);
}

TEST(Index, SeveralSmallValuesFail) {
  const Grid g(8.0, 64);
  Matrix m = Matrix::Identity(64, 64);
  m(30, 30) = 1e-9;
  m(33, 33) = 1e-9;
  const IndexReport r = index_signature(DiscretizedOp{g, m, "two null directions"});
  EXPECT_EQ(r.outcome, Outcome::fail);
}

TEST(Index, WrongWitnessFails) {
  const Grid g(30.0, 256);
  const auto c = SymbolFunction::logistic();
  const IndexReport r = index_signature(product_conv_operator(c, g), sech2_half(g, 8.0));
  EXPECT_EQ(r.outcome, Outcome::fail);
  EXPECT_LT(r.correlation, 0.99);
}

TEST(Index, Validation) {
  const Grid g(8.0, 64);
  EXPECT_THROW(index_signature(DiscretizedOp{g, Matrix::Identity(4, 4), "small"}), InvalidInput);
  EXPECT_THROW(index_signature(DiscretizedOp{g, Matrix::Identity(64, 64), "w"}, Vector::Ones(3)), InvalidInput);
}

// Deflating the index direction leaves a grid-independent lower bound.
TEST(Index, KernelTrivialityUnderRefinement) {
  for (const auto& c : {SymbolFunction::logistic(), SymbolFunction::radial(1.0), SymbolFunction::logistic(-3.0)}) {
    for (int n : {256, 512, 1024}) {
      const IndexReport r = index_signature(product_conv_operator(c, Grid(30.0, n)));
      const auto& s = r.singular_values;
      EXPECT_GE(s(n - 2), 0.05) << c.label() << " N=" << n;
    }
  }
}

// y' = 2 g y forces log y(t) >= (2 - delta) t once g is within delta/2 of 1,
// so eta = 2 e^{-t} g y is not square integrable.
TEST(Injectivity, OdeOracle) {
  constexpr double delta = 0.1;
  const double L = 30.0;
  for (const auto& g : {SymbolFunction::logistic(), SymbolFunction::radial(1.0)}) {
    double start = 0.0;
    while (g(start) < 1.0 - 0.25 * delta) start += 0.5;
    std::vector<double> log_eta;
    for (double t = start + 1.0; t <= L; t += 1.0) {
      const double log_y = 2.0 * simpson([&g](double s) { return g(s); }, 0.0, t);
      EXPECT_GE(log_y, (2.0 - delta) * t - 2.0 * start) << g.label() << " t=" << t;
      log_eta.push_back(std::log(2.0 * g(t)) - t + log_y);
    }
    for (std::size_t k = 1; k < log_eta.size(); ++k) EXPECT_GE(log_eta[k] - log_eta[k - 1], 1.0 - delta);
    // Partial L^2 norms on [0, T] grow at least like e^{(1 - delta) T}.
    EXPECT_GT(log_eta.back(), (1.0 - delta) * (L - 2.0 * start) - 2.0 * start);
  }
}

TEST(Compactness, SechPassesAndLogisticControlFails) {
  auto sech = [](double t) { return 1.0 / std::cosh(t); };
  auto control = [](double t) { return logistic(t); };
  const std::vector<int> ladder{256, 512, 1024};
  const double spacing = 60.0 / 512;
  const CompactnessReport pass = compactness_ladder("sech", sech, beta_kernel, spacing, ladder);
  EXPECT_TRUE(pass.stable);
  ASSERT_EQ(pass.levels.size(), 3u);
  for (const auto& l : pass.levels) {
    EXPECT_TRUE(l.boundary_decay);
    EXPECT_LT(l.K, l.grid.N() / 4);
    EXPECT_DOUBLE_EQ(l.grid.h(), spacing);
    for (Eigen::Index k = l.K; k < l.singular_values.size(); ++k) EXPECT_LE(l.singular_values(k), 0.01 * l.singular_values(0));
  }
  const CompactnessReport fail = compactness_ladder("logistic", control, beta_kernel, spacing, ladder);
  EXPECT_FALSE(fail.stable);
  for (std::size_t i = 0; i < fail.levels.size(); ++i) {
    EXPECT_FALSE(fail.levels[i].boundary_decay);
    if (i > 0) {
      EXPECT_GE(fail.levels[i].plateau, 2 * fail.levels[i - 1].plateau - 2);
    }
  }
}

TEST(Compactness, ZeroSymbolHasZeroProfile) {
  const Vector s = compactness_profile([](double) { return 0.0; }, beta_kernel, Grid(8.0, 64));
  EXPECT_EQ(s.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(count_above(s, 0.01), 0);
}

TEST(Compactness, KernelOperatorIsToeplitz) {
  const Grid g(4.0, 32);
  const Matrix k = kernel_operator(beta_kernel, g);
  EXPECT_LT((k - conv_operator_T(g).matrix).norm(), 1e-15);
}

TEST(Covariance, GridShiftsAreExact) {
  const Grid g(30.0, 1024);
  auto chi = [](double t) { return std::exp(-0.5 * t * t); };
  for (double steps : {0.0, 32.0, -32.0, 64.0, -64.0}) {
    const CovarianceReport r = covariance_check(SymbolFunction::logistic(), chi, steps * g.h(), g);
    EXPECT_TRUE(r.pass) << steps;
    EXPECT_LE(r.defect, 1e-6);
    EXPECT_EQ(r.steps, static_cast<long>(steps));
    EXPECT_EQ(r.snap_distance, 0.0);
  }
  EXPECT_EQ(covariance_check(SymbolFunction::radial(1.0), chi, 0.0, g).defect, 0.0);
}

TEST(Covariance, OffGridShiftIsSnapped) {
  const Grid g(30.0, 1024);
  auto chi = [](double t) { return std::exp(-0.5 * t * t); };
  const CovarianceReport r = covariance_check(SymbolFunction::logistic(), chi, 10.3 * g.h(), g);
  EXPECT_EQ(r.steps, 10);
  EXPECT_NEAR(r.snap_distance, 0.3 * g.h(), 1e-12);
  EXPECT_TRUE(r.pass);
}

TEST(Covariance, Preconditions) {
  const Grid g(30.0, 1024);
  auto chi = [](double t) { return std::exp(-0.5 * t * t); };
  EXPECT_THROW(covariance_check(SymbolFunction::logistic(), chi, 8.0, g), PreconditionError);
  auto wide = [](double t) { return std::exp(-0.01 * t * t); };
  EXPECT_THROW(covariance_check(SymbolFunction::logistic(), wide, 0.0, g), PreconditionError);
}

}  // namespace
