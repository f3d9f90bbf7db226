#pragma once

// Quasi-geostrophic counterpart of the steady-state algebra and the joint SG x QG regime analysis.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lsg/geometry.hpp"
#include "lsg/planewave.hpp"
#include "lsg/symbols.hpp"

namespace lsg {

struct QGParams {
  /// Brunt-Vaisala frequency.
  double N = 1.0;

  void validate() const {
    if (!(N > 0.0) || !std::isfinite(N)) throw Error(ErrorCode::InvalidArgument, "Brunt-Vaisala frequency must be > 0");
  }
  Mat3 B() const { return Mat3::diag(1.0, 1.0, N * N); }
};

/// mu_QG = b^2 - (a - 1)(d - 1); independent of N.
inline double mu_qg(const SymPosDef3& A) { return A.b() * A.b() - (A.a() - 1.0) * (A.d() - 1.0); }

inline double default_mu_qg_epsilon(const SymPosDef3& A) {
  return 1e-12 * std::max({1.0, A.b() * A.b(), std::abs((A.a() - 1.0) * (A.d() - 1.0))});
}

struct QGFlow {
  Mat3 M;
  double mu_qg = 0.0;
  Regime regime = Regime::Degenerate;
};

/// M = J(A - B), spectrum {0, +sqrt(mu_QG), -sqrt(mu_QG)}.
inline QGFlow qg_flow(const SymPosDef3& A, const QGParams& params) {
  params.validate();
  const double mu = mu_qg(A);
  return {kJ * (A.matrix() - params.B()), mu, regime_from_mu(mu, default_mu_qg_epsilon(A))};
}

/// The quasi-geostrophic pair (M, m_QG) with m_QG(xi) = 2 (xi.M B^{-1} xi)/(xi.B^{-1} xi).
inline LinearisedModel qg_model(const SymPosDef3& A, const QGParams& params) {
  const QGFlow flow = qg_flow(A, params);
  const Mat3 b_inv = params.B().inverse();
  return LinearisedModel("QG", flow.M, flow.mu_qg, flow.mu_qg, default_mu_qg_epsilon(A),
                         QuadraticSymbol(flow.M * b_inv, b_inv));
}

inline double symbol_m_qg(const SymPosDef3& A, const QGParams& params, const Vec3& xi) {
  const Mat3 b_inv = params.B().inverse();
  return QuadraticSymbol(kJ * (A.matrix() - params.B()) * b_inv, b_inv)(xi);
}

inline StabilityVerdict classify_qg_stability(const SymPosDef3& A, const QGParams& params,
                                              const QuadratureConfig& cfg = {}) {
  return classify_stability(SymbolEvaluator(qg_model(A, params), cfg));
}

/// Joint classification. The quadrant code is one character per model (SG first):
/// 'P' for mu > 0, 'M' for mu < 0, '0' for degenerate; e.g. "PM" means SG hyperbolic, QG elliptic.
struct RegimeReport {
  SymPosDef3 matrix = SymPosDef3::identity();
  double mu_sg = 0.0;
  double mu_qg = 0.0;
  Regime regime_sg = Regime::Degenerate;
  Regime regime_qg = Regime::Degenerate;
  bool degenerate_multiplier = false;

  bool degenerate_sg() const { return regime_sg == Regime::Degenerate; }
  bool degenerate_qg() const { return regime_qg == Regime::Degenerate; }

  std::string quadrant() const {
    auto code = [](Regime r) { return r == Regime::HyperbolicPlus ? 'P' : (r == Regime::EllipticMinus ? 'M' : '0'); };
    return {code(regime_sg), code(regime_qg)};
  }
};

inline RegimeReport regime_report(const SymPosDef3& A, const QGParams& params = {}) {
  params.validate();
  RegimeReport r;
  r.matrix = A;
  r.mu_sg = mu_sg(A);
  r.mu_qg = mu_qg(A);
  r.regime_sg = regime_from_mu(r.mu_sg, default_mu_epsilon(A));
  r.regime_qg = regime_from_mu(r.mu_qg, default_mu_qg_epsilon(A));
  r.degenerate_multiplier = is_multiplier_degenerate(A);
  return r;
}

struct NamedMatrix {
  std::string name;
  SymPosDef3::Coefficients coefficients;
};

/// One steady state in each of the four SG x QG intersections (PP, PM, MP, MM).
inline const std::array<NamedMatrix, 4>& pinned_witnesses() {
  static const std::array<NamedMatrix, 4> w{{
      {"A1", {0.5, -1.0, -1.0, 4.0, 1.0, 3.0}},
      {"A2", {2.0, 0.0, -1.0, 2.0, 0.0, 0.75}},
      {"A3", {0.5, -1.0, -1.0, 3.0, 3.0, 3.5}},
      {"A4", {0.5, 0.0, -1.0, 0.5, 0.0, 3.0}},
  }};
  return w;
}

/// SplitMix64 finaliser; derives independent per-sample seeds from (seed, index).
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// A = G^T G + delta I with G a standard Gaussian 3x3 matrix drawn from the sample's own stream.
inline SymPosDef3 sample_spd(std::uint64_t seed, std::uint64_t index, double delta = 1e-3) {
  std::mt19937_64 rng(mix_seed(seed, index));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat3 g;
  for (double& x : g.v) x = gauss(rng);
  const Mat3 a = g.transpose() * g + delta * Mat3::identity();
  return SymPosDef3::from_coefficients({a(0, 0), a(0, 1), a(0, 2), a(1, 1), a(1, 2), a(2, 2)});
}

inline constexpr std::uint64_t kDefaultSeed = 20240501;

struct ScanResult {
  std::vector<std::pair<std::string, RegimeReport>> pinned;
  std::vector<RegimeReport> samples;
  std::map<std::string, std::size_t> counts;
  /// First sampled matrix landing in each quadrant.
  std::map<std::string, RegimeReport> first_witness;
};

inline ScanResult scan_regimes(std::uint64_t seed, std::size_t count, const QGParams& params = {}) {
  ScanResult out;
  for (const auto& w : pinned_witnesses())
    out.pinned.emplace_back(w.name, regime_report(SymPosDef3::from_coefficients(w.coefficients), params));
  for (const char* q : {"PP", "PM", "MP", "MM"}) out.counts[q] = 0;
  out.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RegimeReport r = regime_report(sample_spd(seed, i), params);
    const std::string q = r.quadrant();
    ++out.counts[q];
    out.first_witness.try_emplace(q, r);
    out.samples.push_back(std::move(r));
  }
  return out;
}

}  // namespace lsg
