#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <tuple>
#include <vector>

#include "qdlie/classifier.hpp"
#include "qdlie/random.hpp"

using namespace qdlie;

namespace {

Matrix block_rotation(double a, double b) {
  Matrix m = Matrix::Zero(4, 4);
  m.topLeftCorner(2, 2) = rotation_generator(a);
  m.bottomRightCorner(2, 2) = rotation_generator(b);
  return m;
}

QDReport classify_d(const Matrix& d, std::optional<bool> type_i = std::nullopt) {
  return classify(MatrixSpec{Endomorphism(d), type_i});
}

QDReport classify_name(const std::string& text) { return classify(parse_catalog_name(text)); }

void expect_report_invariants(const QDReport& r) {
  if (r.strongly_quasidiagonal.value == Verdict::yes) EXPECT_EQ(r.quasidiagonal.value, Verdict::yes) << r.name;
  if (r.nilpotent.value == Verdict::yes && r.type_i_assumed)
    EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::yes) << r.name;
  EXPECT_EQ(r.ccr_liminal.value, r.strongly_quasidiagonal.value) << r.name;
  for (const TriState* t : {&r.nilpotent, &r.exponential, &r.strongly_quasidiagonal, &r.quasidiagonal,
                            &r.af_embeddable, &r.ccr_liminal})
    EXPECT_FALSE(t->justification.empty()) << r.name;
}

std::string flags(const QDReport& r) {
  std::string s;
  for (const TriState* t : {&r.nilpotent, &r.exponential, &r.strongly_quasidiagonal, &r.quasidiagonal,
                            &r.af_embeddable, &r.ccr_liminal}) {
    s += to_string(t->value);
    s += ' ';
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// structure constants

TEST(StructureConstants, ValidatesAntisymmetryAndJacobi) {
  std::vector<double> c(8, 0.0);
  c[(0 * 2 + 1) * 2 + 1] = 1.0;  // [e0, e1] = e1 without the antisymmetric partner
  EXPECT_THROW(StructureConstants(2, c), InvalidInput);
  // [e0,e1]=e2, [e1,e2]=e0, [e0,e2]=e0 violates Jacobi.
  EXPECT_THROW(StructureConstants::from_brackets(3, {{0, 1, {0, 0, 1}}, {1, 2, {1, 0, 0}}, {0, 2, {1, 0, 0}}}),
               InvalidInput);
  EXPECT_THROW(StructureConstants::from_brackets(2, {{0, 0, {1, 0}}}), InvalidInput);
  EXPECT_NO_THROW(catalog("S4"));
}

TEST(StructureConstants, SeriesOfKnownAlgebras) {
  const StructureConstants heis = *catalog("heisenberg").structure;
  EXPECT_EQ(heis.lower_central_series(), (std::vector<int>{3, 1, 0}));
  EXPECT_EQ(heis.derived_series(), (std::vector<int>{3, 1, 0}));
  EXPECT_TRUE(heis.is_nilpotent());

  const StructureConstants s4 = *catalog("S4").structure;
  EXPECT_TRUE(s4.is_solvable());
  EXPECT_FALSE(s4.is_nilpotent());

  // sl(2): [h,e]=2e, [h,f]=-2f, [e,f]=h on (h, e, f).
  const StructureConstants sl2 =
      StructureConstants::from_brackets(3, {{0, 1, {0, 2, 0}}, {0, 2, {0, 0, -2}}, {1, 2, {1, 0, 0}}});
  EXPECT_FALSE(sl2.is_solvable());
  EXPECT_THROW(classify(StructureSpec{sl2, true}), UnsupportedInput);
}

TEST(StructureConstants, SemidirectMatchesMatrixAd) {
  CounterRng rng(71, 1);
  const Endomorphism d(rng.normal_matrix(3, 3));
  const StructureConstants g = StructureConstants::semidirect(d);
  // ad(t) restricted to V is D.
  const Matrix ad_t = g.ad(Vector::Unit(4, 0));
  EXPECT_LT((ad_t.bottomRightCorner(3, 3) - d.matrix()).norm(), 1e-15);
  EXPECT_LT(g.jacobi_defect(), 1e-12);
}

TEST(StructureConstants, FromMatrixBasisReproducesCommutators) {
  const StructureConstants e2 = euclid_scaled_algebra(2);
  EXPECT_EQ(e2.dim(), 4);
  EXPECT_TRUE(e2.is_solvable());
  EXPECT_FALSE(e2.is_nilpotent());
  EXPECT_THROW(euclid_scaled_algebra(0), InvalidInput);
}

// ---------------------------------------------------------------------------
// classify

TEST(Classify, SpecExamples) {
  QDReport r = classify_d(Matrix::Constant(1, 1, 1.0));
  EXPECT_EQ(r.quasidiagonal.value, Verdict::no);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::no);

  r = classify_d((Matrix(2, 2) << 0.5, 1.0, -1.0, 0.5).finished());
  EXPECT_EQ(r.quasidiagonal.value, Verdict::no);

  r = classify_d((Matrix(2, 2) << 1.0, 0.0, 0.0, -1.0).finished());
  EXPECT_EQ(r.quasidiagonal.value, Verdict::yes);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::no);
  EXPECT_EQ(r.exponential.value, Verdict::yes);

  r = classify_d(block_rotation(1.0, std::numbers::sqrt2));
  EXPECT_EQ(r.quasidiagonal.value, Verdict::yes);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::unknown);
  EXPECT_FALSE(r.type_i_assumed);

  r = classify_d(Matrix::Zero(3, 3));
  EXPECT_EQ(r.nilpotent.value, Verdict::yes);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::yes);
}

TEST(Classify, NilpotentAndExponentialFlags) {
  Matrix j = Matrix::Zero(3, 3);
  j(0, 1) = j(1, 2) = 1.0;
  QDReport r = classify_d(j);
  EXPECT_EQ(r.nilpotent.value, Verdict::yes);
  EXPECT_EQ(r.exponential.value, Verdict::yes);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::yes);

  r = classify_d(rotation_generator(2.0));
  EXPECT_EQ(r.nilpotent.value, Verdict::no);
  EXPECT_EQ(r.exponential.value, Verdict::no);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::yes);
  EXPECT_TRUE(r.boundary_flag);

  r = classify_d(rotation_generator(2.0), false);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::unknown);
  EXPECT_EQ(r.quasidiagonal.value, Verdict::yes);
}

TEST(Classify, CommensurableRotationsAreTypeI) {
  const QDReport r = classify_d(block_rotation(1.0, 1.5));
  EXPECT_TRUE(r.type_i_assumed);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::yes);
  EXPECT_EQ(r.exponential.value, Verdict::no);
}

TEST(Classify, CatalogVerdicts) {
  QDReport r = classify_name("S2");
  EXPECT_EQ(r.quasidiagonal.value, Verdict::no);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::no);
  r = classify_name("S3(1)");
  EXPECT_EQ(r.quasidiagonal.value, Verdict::no);
  r = classify_name("S3(-0.25)");
  EXPECT_EQ(r.quasidiagonal.value, Verdict::no);
  r = classify_name("heisenberg");
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::yes);
  EXPECT_EQ(r.nilpotent.value, Verdict::yes);
  r = classify_name("mautner");
  EXPECT_EQ(r.quasidiagonal.value, Verdict::yes);
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::unknown);
  r = classify_name("S4");
  EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::no);
  EXPECT_EQ(r.quasidiagonal.value, Verdict::unknown);
  for (int n = 1; n <= 4; ++n) {
    r = classify_name("euclid_scaled(" + std::to_string(n) + ")");
    EXPECT_EQ(r.quasidiagonal.value, Verdict::no);
    EXPECT_EQ(r.strongly_quasidiagonal.value, Verdict::no);
    expect_report_invariants(r);
  }
  for (const auto& name : {"S2", "S3", "S4", "mautner", "heisenberg"}) expect_report_invariants(classify_name(name));
}

TEST(Classify, CatalogErrors) {
  try {
    (void)catalog("S5");
    FAIL() << "expected an error";
  } catch (const InvalidInput& e) {
    for (const auto& name : catalog_names()) EXPECT_NE(std::string(e.what()).find(name), std::string::npos);
  }
  EXPECT_THROW(catalog("S3", {0.0}), InvalidInput);
  EXPECT_THROW(catalog("mautner", {1.5}), InvalidInput);
  EXPECT_THROW(catalog("S2", {1.0}), InvalidInput);
  EXPECT_THROW(parse_catalog_name("S3(1"), InvalidInput);
  EXPECT_THROW(parse_catalog_name("S3(x)"), InvalidInput);
  const CatalogSpec s = parse_catalog_name("mautner(1.7320508075688772)");
  EXPECT_EQ(s.name, "mautner");
  ASSERT_EQ(s.params.size(), 1u);
  EXPECT_DOUBLE_EQ(s.params[0], std::sqrt(3.0));
}

TEST(Classify, MatrixReportInvariantsOnRandomInput) {
  CounterRng rng(73, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 4;
    Matrix d = rng.normal_matrix(n, n);
    if (trial % 5 == 0) d = 0.5 * (d - d.transpose());  // purely imaginary spectrum
    const QDReport r = classify_d(d);
    expect_report_invariants(r);
    EXPECT_EQ(r.quasidiagonal.value, r.af_embeddable.value);
    // Cross-module: QD iff the flow of the adjoint is chain recurrent.
    const bool chain = classify_flow(Endomorphism(d).adjoint()).kind == FlowKind::chain_recurrent;
    EXPECT_EQ(r.quasidiagonal.value == Verdict::yes, chain);
    EXPECT_NE(r.quasidiagonal.value, Verdict::unknown);
  }
}

TEST(Classify, SimilarityInvariance) {
  CounterRng rng(79, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    Matrix d = rng.normal_matrix(n, n);
    if (trial % 4 == 0) d = 0.5 * (d - d.transpose());
    if (trial % 4 == 1) d = Matrix::Zero(n, n);
    const Matrix p = Matrix::Identity(n, n) + 0.2 * rng.normal_matrix(n, n);
    const QDReport a = classify_d(d);
    const QDReport b = classify_d(p * d * p.inverse());
    EXPECT_EQ(flags(a), flags(b)) << "trial " << trial;
  }
}

TEST(Classify, StructurePathAgreesWithMatrixPath) {
  CounterRng rng(83, 4);
  std::vector<Matrix> cases{Matrix::Constant(1, 1, 1.0), (Matrix(2, 2) << 1.0, 0.0, 0.0, -1.0).finished(),
                            rotation_generator(1.0), Matrix::Zero(2, 2)};
  for (int i = 0; i < 6; ++i) cases.push_back(rng.normal_matrix(2 + i % 2, 2 + i % 2));
  for (const auto& d : cases) {
    const QDReport m = classify_d(d, true);
    const QDReport s = classify(StructureSpec{StructureConstants::semidirect(Endomorphism(d)), true});
    EXPECT_EQ(m.nilpotent.value, s.nilpotent.value);
    EXPECT_EQ(m.exponential.value, s.exponential.value);
    if (s.strongly_quasidiagonal.value != Verdict::unknown)
      EXPECT_EQ(m.strongly_quasidiagonal.value, s.strongly_quasidiagonal.value);
    expect_report_invariants(s);
  }
}

TEST(Classify, TypeIInference) {
  EXPECT_EQ(detail::rational_denominator(1.5, 64, 1e-8), 2);
  EXPECT_EQ(detail::rational_denominator(std::numbers::sqrt2, 64, 1e-8), 0);
  EXPECT_EQ(detail::rational_denominator(3.0, 64, 1e-8), 1);
}

// ---------------------------------------------------------------------------
// isomorphism invariant and counting

TEST(IsoInvariant, Examples) {
  EXPECT_EQ(iso_invariant(Endomorphism::diagonal({1.0, -1.0})), IsoInvariant::make(0, 1, 1));
  EXPECT_EQ(iso_invariant(Endomorphism::diagonal({0.0, 2.0, 3.0})), IsoInvariant::make(1, 2, 0));
  EXPECT_EQ(iso_invariant(Endomorphism::from_rows({{1.0, 1.0}, {-1.0, 1.0}})), IsoInvariant::make(0, 2, 0));
  EXPECT_EQ(IsoInvariant::make(1, 0, 2), IsoInvariant::make(1, 2, 0));
}

TEST(IsoInvariant, PreconditionsNameTheHypothesis) {
  try {
    (void)iso_invariant(Endomorphism::from_rows({{1.0, 1.0}, {0.0, 1.0}}));
    FAIL();
  } catch (const NotInEnd0& e) {
    EXPECT_NE(std::string(e.what()).find("not semisimple"), std::string::npos);
  }
  try {
    (void)iso_invariant(Endomorphism(rotation_generator(1.0)));
    FAIL();
  } catch (const NotInEnd0& e) {
    EXPECT_NE(std::string(e.what()).find("purely imaginary"), std::string::npos);
  }
}

TEST(IsoInvariant, RecoversPrescribedSignature) {
  CounterRng rng(89, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n0 = static_cast<int>(rng.uniform() * 3), np = static_cast<int>(rng.uniform() * 3),
              nm = static_cast<int>(rng.uniform() * 3);
    const int n = n0 + np + nm;
    if (n == 0) continue;
    Vector lam(n);
    for (int i = 0; i < n; ++i) lam(i) = i < n0 ? 0.0 : (i < n0 + np ? rng.uniform(0.2, 3.0) : -rng.uniform(0.2, 3.0));
    const Matrix p = Matrix::Identity(n, n) + 0.2 * rng.normal_matrix(n, n);
    const IsoInvariant inv = iso_invariant(Endomorphism(p * lam.asDiagonal() * p.inverse()));
    EXPECT_EQ(inv, IsoInvariant::make(n0, np, nm));
    EXPECT_EQ(inv.dim(), n);
  }
}

TEST(Counting, Examples) {
  EXPECT_EQ(count_classes(0), 1u);
  EXPECT_EQ(count_classes(1), 2u);
  EXPECT_EQ(count_classes(2), 4u);

  const auto one = enumerate_classes(1);
  ASSERT_EQ(one.size(), 2u);
  EXPECT_EQ(one[0].invariant, IsoInvariant::make(1, 0, 0));
  EXPECT_FALSE(one[0].non_quasidiagonal);
  EXPECT_EQ(one[1].invariant, IsoInvariant::make(0, 1, 0));
  EXPECT_TRUE(one[1].non_quasidiagonal);

  const auto two = enumerate_classes(2);
  ASSERT_EQ(two.size(), 4u);
  EXPECT_EQ(two[2].invariant, IsoInvariant::make(0, 2, 0));
  EXPECT_TRUE(two[2].non_quasidiagonal);
  EXPECT_EQ(two[3].invariant, IsoInvariant::make(0, 1, 1));

  const auto zero = enumerate_classes(0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_FALSE(zero[0].non_quasidiagonal);
  EXPECT_THROW(enumerate_classes(65), InvalidInput);
}

TEST(Counting, MatchesBruteForceOracle) {
  for (int m = 0; m <= 64; ++m) {
    std::set<std::tuple<int, int, int>> seen;
    for (int n0 = 0; n0 <= m; ++n0)
      for (int a = 0; a + n0 <= m; ++a) {
        const int b = m - n0 - a;
        seen.insert({n0, std::max(a, b), std::min(a, b)});
      }
    const auto classes = enumerate_classes(m);
    EXPECT_EQ(classes.size(), seen.size());
    EXPECT_EQ(count_classes(static_cast<std::uint64_t>(m)), seen.size());
    EXPECT_GE(count_classes(static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(m) + 1);
    int flagged = 0;
    std::set<std::tuple<int, int, int>> listed;
    for (const auto& c : classes) {
      flagged += c.non_quasidiagonal ? 1 : 0;
      listed.insert({c.invariant.n0, c.invariant.pair.first, c.invariant.pair.second});
      EXPECT_EQ(c.invariant.dim(), m);
    }
    EXPECT_EQ(listed, seen);
    EXPECT_EQ(flagged, m > 0 ? 1 : 0);
  }
}

TEST(Counting, FlaggedClassIsTheNonQuasidiagonalOne) {
  // Realize each class by a diagonal D and compare with the classifier.
  for (int m = 1; m <= 6; ++m)
    for (const auto& c : enumerate_classes(m)) {
      std::vector<double> diag;
      for (int i = 0; i < c.invariant.n0; ++i) diag.push_back(0.0);
      for (int i = 0; i < c.invariant.pair.first; ++i) diag.push_back(1.0 + i);
      for (int i = 0; i < c.invariant.pair.second; ++i) diag.push_back(-1.0 - i);
      const QDReport r = classify(MatrixSpec{Endomorphism::diagonal(diag), std::nullopt});
      EXPECT_EQ(r.quasidiagonal.value == Verdict::no, c.non_quasidiagonal);
    }
}
