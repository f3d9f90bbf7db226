#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace lsg;
using namespace lsg::testing;

TEST(SymPosDef3, RejectsNonPositiveMinorAndNamesIt) {
  try {
    SymPosDef3::from_coefficients({1, 2, 0, 1, 0, 1});
    FAIL() << "expected NotPositiveDefinite";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
    EXPECT_NE(std::string(e.what()).find("minor 2"), std::string::npos);
  }
  try {
    SymPosDef3::from_coefficients({-1, 0, 0, 1, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("minor 1"), std::string::npos);
  }
  try {
    SymPosDef3::from_coefficients({1, 0, 0, 1, 2, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("minor 3"), std::string::npos);
  }
}

TEST(SymPosDef3, RejectsNonFinite) {
  try {
    SymPosDef3::from_coefficients({1, 0, 0, std::nan(""), 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
}

TEST(Geometry, MuMatchesCharacteristicPolynomialOracle) {
  for (const auto& w : pinned_witnesses()) {
    const SymPosDef3 A = SymPosDef3::from_coefficients(w.coefficients);
    EXPECT_NEAR(mu_sg(A), mu_sg_oracle(w.coefficients), 1e-12 * std::max(1.0, std::abs(mu_sg(A)))) << w.name;
  }
  for (std::uint64_t i = 0; i < 500; ++i) {
    const SymPosDef3 A = sample_spd(7, i);
    const double o = mu_sg_oracle(A.coefficients());
    EXPECT_LE(std::abs(mu_sg(A) - o), 1e-10 * std::max({1.0, std::abs(o), A.det(), A.f() * A.f()}));
  }
}

TEST(Geometry, WitnessRegimes) {
  EXPECT_DOUBLE_EQ(mu_sg(witness(0)), 8.0);
  EXPECT_EQ(classify_sg(witness(0)).regime, Regime::HyperbolicPlus);
  EXPECT_EQ(classify_sg(witness(1)).regime, Regime::HyperbolicPlus);
  EXPECT_EQ(classify_sg(witness(2)).regime, Regime::EllipticMinus);
  EXPECT_EQ(classify_sg(witness(3)).regime, Regime::EllipticMinus);
}

TEST(Geometry, LambdaForFirstWitnessIsFour) {
  const FlowMatrix fm = flow_matrix(witness(0));
  EXPECT_EQ(fm.kind, SpectrumKind::Hyperbolic);
  EXPECT_NEAR(fm.lambda(), 4.0, 1e-13);
}

TEST(Geometry, SpectrumIsZeroPlusMinusLambda) {
  std::mt19937_64 rng(3);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const SymPosDef3 A = sample_spd(11, i);
    const FlowMatrix fm = flow_matrix(A);
    if (fm.kind == SpectrumKind::Null) continue;
    auto oracle = eigenvalues_oracle(fm.S);
    auto lib = fm.eigenvalues();
    const double scale = std::max(1.0, fm.S.frobenius());
    for (const auto& z : lib) {
      double best = 1e300;
      for (const auto& o : oracle) best = std::min(best, std::abs(z - o));
      EXPECT_LT(best, 1e-6 * scale) << "sample " << i;
    }
  }
}

TEST(Geometry, TraceAndCayleyHamilton) {
  for (int w = 0; w < 4; ++w) {
    const FlowMatrix fm = flow_matrix(witness(w));
    EXPECT_NEAR(fm.S.trace(), 0.0, 1e-12);
    const Mat3 s3 = fm.S * fm.S * fm.S;
    const Mat3 rhs = fm.lambda_sq * fm.S;
    EXPECT_LT((s3 - rhs).max_abs(), 1e-10 * std::max(1.0, s3.max_abs()));
  }
}

TEST(Geometry, FlowExponentialMatchesSeries) {
  for (int w = 0; w < 4; ++w) {
    const FlowMatrix fm = flow_matrix(witness(w));
    for (double t : {-1.3, -0.2, 0.0, 0.4, 1.0, 2.0}) {
      const Mat3 e = matrix_exp(fm, t);
      const Mat3 o = exp_series(fm.S, t);
      EXPECT_LT((e - o).max_abs(), 1e-10 * std::max(1.0, o.max_abs())) << "witness " << w << " t " << t;
    }
  }
}

TEST(Geometry, ExponentialGroupLaw) {
  const FlowMatrix fm = flow_matrix(witness(2));
  for (double t : {0.3, 1.1})
    for (double s : {-0.7, 0.5}) {
      const Mat3 lhs = matrix_exp(fm, t + s);
      const Mat3 rhs = matrix_exp(fm, t) * matrix_exp(fm, s);
      EXPECT_LT((lhs - rhs).max_abs(), 1e-12 * std::max(1.0, lhs.max_abs()));
    }
}

TEST(Geometry, IdentityIsDegenerate) {
  const auto l = classify_sg(SymPosDef3::identity());
  EXPECT_EQ(l.regime, Regime::Degenerate);
  EXPECT_TRUE(l.degenerate_multiplier);
  EXPECT_EQ(flow_matrix(SymPosDef3::identity()).kind, SpectrumKind::Null);
  EXPECT_EQ(matrix_exp(flow_matrix(SymPosDef3::identity()), 3.0), Mat3::identity());
}

TEST(Geometry, ScaledIdentityIsEllipticWithZeroMultiplier) {
  for (double beta : {0.5, 2.0, 3.0}) {
    const auto l = classify_sg(SymPosDef3::scaled_identity(beta));
    EXPECT_EQ(l.regime, Regime::EllipticMinus) << beta;
    EXPECT_TRUE(l.degenerate_multiplier) << beta;
  }
}

TEST(Geometry, ClassificationIsInvariantUnderVerticalRotation) {
  // Rotations about x3 commute with J, so they preserve mu.
  const double th = 0.7;
  const Mat3 r{{std::cos(th), -std::sin(th), 0, std::sin(th), std::cos(th), 0, 0, 0, 1}};
  for (int w = 0; w < 4; ++w) {
    const Mat3 a = r * witness(w).matrix() * r.transpose();
    const SymPosDef3 B = SymPosDef3::from_coefficients({a(0, 0), a(0, 1), a(0, 2), a(1, 1), a(1, 2), a(2, 2)});
    EXPECT_NEAR(mu_sg(B), mu_sg(witness(w)), 1e-12 * std::max(1.0, std::abs(mu_sg(B))));
  }
}
