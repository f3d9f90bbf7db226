#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace lsg;
using namespace lsg::testing;

namespace {

// Shared 64^3 band-pass fields; built once because each costs a few FFTs.
struct Fixture {
  GridSpec spec = standard_grid();
  LinearisedModel sg = sg_model(gentle());
  GridField phi = random_smooth_field(spec, 11, 2.5, 4);
  GridField psi = random_smooth_field(spec, 12, 2.5, 4);
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST(Resample, PlanReproducesMap) {
  std::mt19937_64 rng(1);
  for (int w = 0; w < 4; ++w) {
    const LinearisedModel m = sg_model(witness(w));
    for (double t : {0.3, -0.8}) {
      const Mat3 target = m.exp(t);
      const ResamplePlan plan = plan_resample(target);
      Mat3 prod = plan.perm.matrix();
      for (int s = 0; s < 3; ++s) prod = prod * detail::row_map(plan.axes[s], plan.rows[s]);
      EXPECT_LT((prod - target).max_abs(), 1e-12 * target.max_abs());
      EXPECT_GE(plan.stretch, 1.0);
    }
  }
  EXPECT_THROW(plan_resample(Mat3::zero()), Error);
}

TEST(Evolve, ZeroTimeAndZeroField) {
  const auto& f = fx();
  const GridField same = apply_G(f.sg, 0.0, f.phi);
  EXPECT_EQ(same.component(0), f.phi.component(0));
  const GridField zero(f.spec, Representation::Physical);
  EXPECT_EQ(apply_G(f.sg, 0.5, zero).max_norm(), 0.0);
}

TEST(Evolve, RotationOfScaledIdentityIsLatticeExact) {
  // A = 2I: S = J/2 and m = 0, so G(pi) phi = e^{-pi S^T} phi(e^{-pi S} x) is a quarter turn.
  const GridSpec spec{32, 8.0 * std::numbers::pi};
  const LinearisedModel model = sg_model(SymPosDef3::scaled_identity(2.0));
  const GridField phi = random_smooth_field(spec, 3, 1.5, 1);
  const Mat3 w = model.exp(-std::numbers::pi);
  const Mat3 factor = model.exp_transpose(-std::numbers::pi);
  GridField expected(spec, Representation::Physical);
  const int n = spec.n;
  for (std::size_t lin = 0; lin < spec.points(); ++lin) {
    const auto [i, j, k] = spec.unravel(lin);
    const Vec3 y = w * Vec3{double(i - n / 2), double(j - n / 2), double(k - n / 2)};
    auto wrap = [n](double v) { return ((static_cast<int>(std::lround(v)) + n / 2) % n + n) % n; };
    const auto v = phi.at(spec.index(wrap(y[0]), wrap(y[1]), wrap(y[2])));
    std::array<cplx, 3> out{};
    for (int r = 0; r < 3; ++r) out[r] = factor(r, 0) * v[0] + factor(r, 1) * v[1] + factor(r, 2) * v[2];
    expected.set(lin, out);
  }
  for (Interpolation interp : {Interpolation::SpectralResample, Interpolation::Trilinear}) {
    EvolverConfig cfg;
    cfg.interpolation = interp;
    EXPECT_LT(max_rel_diff(apply_G(model, std::numbers::pi, phi, cfg), expected), 1e-10) << to_string(interp);
  }
}

TEST(Evolve, SemigroupOnBandPassField) {
  const auto& f = fx();
  const GridField whole = apply_G(f.sg, 1.0, f.phi);
  const GridField split = apply_G(f.sg, 0.5, apply_G(f.sg, 0.5, f.phi));
  EXPECT_LT(max_rel_diff(split, whole), 1e-5);
}

TEST(Evolve, AdjointPairing) {
  const auto& f = fx();
  for (double t : {0.5, 1.0}) {
    const cplx lhs = inner(apply_G(f.sg, t, f.phi), f.psi);
    const cplx rhs = inner(f.phi, apply_F(f.sg, t, f.psi));
    EXPECT_LT(std::abs(lhs - rhs), 1e-6 * std::abs(rhs)) << t;
  }
}

TEST(Evolve, GeneratorIsTimeDerivativeAtZero) {
  const auto& f = fx();
  const double h = 1e-3;
  GridField fd = apply_G(f.sg, h, f.phi);
  fd -= apply_G(f.sg, -h, f.phi);
  fd *= 1.0 / (2.0 * h);
  EXPECT_LT(max_rel_diff(fd, apply_L(f.sg, f.phi)), 1e-4);
}

TEST(Evolve, GeneratorCommutesWithEvolution) {
  const auto& f = fx();
  const double t = 0.25;
  const GridField lphi = apply_L(f.sg, f.phi);
  GridField d = apply_L(f.sg, apply_G(f.sg, t, f.phi));
  d -= apply_G(f.sg, t, lphi);
  EXPECT_LE(d.l2_norm(), 1e-3 * lphi.l2_norm());
}

TEST(Evolve, GradientStaysCurlFree) {
  const auto& f = fx();
  const GridField g = gaussian_gradient_field(f.spec, 2.5, 3);
  const GridField e = apply_G(f.sg, 1.0, g);
  EXPECT_TRUE(e.conservative());
  EXPECT_LT(curl_norm(e), 1e-6 * e.max_norm());
}

TEST(Evolve, QuasiGeostrophicSemigroup) {
  const auto& f = fx();
  const LinearisedModel qg = qg_model(gentle(), {});
  const GridField whole = apply_G(qg, 0.5, f.phi);
  const GridField split = apply_G(qg, 0.25, apply_G(qg, 0.25, f.phi));
  EXPECT_LT(max_rel_diff(split, whole), 1e-5);
}

TEST(Evolve, TrilinearIsMeasurablyLessAccurate) {
  const auto& f = fx();
  EvolverConfig tri;
  tri.interpolation = Interpolation::Trilinear;
  // Trilinear output carries broadband interpolation error, which the leakage guard would reject on the second step.
  tri.wrap_tolerance = 1.0;
  const GridField whole_s = apply_G(f.sg, 1.0, f.phi);
  const double err_s = max_rel_diff(apply_G(f.sg, 0.5, apply_G(f.sg, 0.5, f.phi)), whole_s);
  const GridField whole_t = apply_G(f.sg, 1.0, f.phi, tri);
  const double err_t = max_rel_diff(apply_G(f.sg, 0.5, apply_G(f.sg, 0.5, f.phi, tri), tri), whole_t);
  EXPECT_GT(err_t, 10.0 * err_s);
  EXPECT_LT(err_t, 1.0);
}

TEST(Evolve, PlaneWaveGenerator) {
  // L(a k e^{2 pi i k.x}) = (m(k) - 2 pi i F^T k . x) a k e - a F^T k e
  const GridSpec spec{16, 10.0};
  const LinearisedModel model = sg_model(witness(2));
  const std::array<int, 3> wn{2, -1, 3};
  const GridField pw = plane_wave_field(spec, 1.0, wn);
  const GridField lpw = apply_L(model, pw);
  const Vec3 k{wn[0] / spec.box_length, wn[1] / spec.box_length, wn[2] / spec.box_length};
  const Vec3 ftk = model.flow_transpose() * k;
  double worst = 0.0;
  for (std::size_t i = 0; i < spec.points(); ++i) {
    const Vec3 x = spec.position(i);
    const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * dot(k, x));
    const cplx scalar = model.m(k) - cplx{0.0, 2.0 * std::numbers::pi * dot(ftk, x)};
    const auto got = lpw.at(i);
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(got[c] - (scalar * k[c] - ftk[c]) * e));
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Evolve, ClampAndResolutionErrors) {
  const auto& f = fx();
  try {
    apply_G(f.sg, 11.0, f.phi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TimeClamp);
  }
  try {
    apply_G(sg_model(witness(0)), 1.0, f.phi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TimeClamp);
    EXPECT_NE(std::string(e.what()).find("Nyquist"), std::string::npos);
  }
  EXPECT_THROW(apply_G(f.sg, 0.5, f.phi.to_fourier()), Error);
  EvolverConfig bad;
  bad.wrap_tolerance = 0.0;
  EXPECT_THROW(apply_G(f.sg, 0.5, f.phi, bad), Error);
}

TEST(Oracle, Rk4TableMatchesQuadrature) {
  const GridSpec spec{16, 4.0};
  for (const LinearisedModel& m : {sg_model(witness(1)), qg_model(witness(2), {})}) {
    const SymbolEvaluator ev(m);
    const auto quad = multiplier_table(ev, spec, 0.7, Direction::Forward);
    const auto rk4 = rk4_multiplier_table(m, spec, 0.7, 1e-3);
    for (std::size_t i = 0; i < quad.size(); ++i) EXPECT_NEAR(rk4[i] / quad[i], 1.0, 1e-9);
  }
}

TEST(Oracle, Rk4ConvergesAtFourthOrder) {
  const GridSpec spec{8, 3.0};
  const LinearisedModel m = sg_model(witness(3));
  const SymbolEvaluator ev(m, {1e-14, 1e-14, 200});
  const auto exact = multiplier_table(ev, spec, 1.0, Direction::Forward);
  auto err = [&](double h) {
    const auto t = rk4_multiplier_table(m, spec, 1.0, h);
    double e = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) e = std::max(e, std::abs(t[i] - exact[i]));
    return e;
  };
  const double ratio = err(0.05) / err(0.025);
  EXPECT_NEAR(ratio, 16.0, 1.5);
}

TEST(Oracle, OracleEvolveMatchesApplyG) {
  const auto& f = fx();
  const GridField a = apply_G(f.sg, 0.5, f.phi);
  const GridField b = oracle_evolve(f.sg, 0.5, f.phi, 1e-2);
  EXPECT_LT(max_rel_diff(b, a), 1e-8);
}

TEST(Resolution, IdentityWarpHasNoLeakage) {
  const auto& f = fx();
  const ResolutionReport r = resolution_report(f.phi, f.phi.to_fourier(), Mat3::identity());
  EXPECT_EQ(r.spectral_leakage, 0.0);
  EXPECT_EQ(r.spatial_leakage, 0.0);
  const ResolutionReport big = resolution_report(f.phi, f.phi.to_fourier(), Mat3::diag(0.1, 1.0, 1.0));
  EXPECT_GT(big.spatial_leakage, 0.1);
}
