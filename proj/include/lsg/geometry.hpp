#pragma once

// Steady-state algebra for quadratic geopotentials P(x) = x.Ax/2.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "lsg/error.hpp"
#include "lsg/linalg.hpp"

namespace lsg {

/// Horizontal rotation generator: J12 = -1, J21 = 1, zero elsewhere.
inline constexpr Mat3 kJ{{0, -1, 0, 1, 0, 0, 0, 0, 0}};

/// Validated symmetric positive-definite matrix [[a,b,c],[b,d,e],[c,e,f]] with cached det and inverse.
class SymPosDef3 {
 public:
  using Coefficients = std::array<double, 6>;

  /// Throws NonFinite or NotPositiveDefinite (naming the first failing leading minor).
  static SymPosDef3 from_coefficients(const Coefficients& k) {
    for (double x : k)
      if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "matrix coefficients must be finite");
    const auto [a, b, c, d, e, f] = k;
    const Mat3 m{{a, b, c, b, d, e, c, e, f}};
    const double minors[3] = {a, a * d - b * b, m.det()};
    for (int i = 0; i < 3; ++i) {
      if (!(minors[i] > 0.0)) {
        throw Error(ErrorCode::NotPositiveDefinite,
                    "leading principal minor " + std::to_string(i + 1) + " is " + std::to_string(minors[i]) +
                        " (must be > 0)");
      }
    }
    return SymPosDef3(k, m);
  }

  static SymPosDef3 identity() { return from_coefficients({1, 0, 0, 1, 0, 1}); }
  static SymPosDef3 scaled_identity(double beta) { return from_coefficients({beta, 0, 0, beta, 0, beta}); }

  const Coefficients& coefficients() const { return k_; }
  double a() const { return k_[0]; }
  double b() const { return k_[1]; }
  double c() const { return k_[2]; }
  double d() const { return k_[3]; }
  double e() const { return k_[4]; }
  double f() const { return k_[5]; }

  const Mat3& matrix() const { return m_; }
  const Mat3& inverse() const { return inv_; }
  double det() const { return det_; }

  friend bool operator==(const SymPosDef3& x, const SymPosDef3& y) { return x.k_ == y.k_; }

 private:
  SymPosDef3(const Coefficients& k, const Mat3& m) : k_(k), m_(m), inv_(m.inverse()), det_(m.det()) {}

  Coefficients k_;
  Mat3 m_;
  Mat3 inv_;
  double det_;
};

inline SymPosDef3 validate_spd(const SymPosDef3::Coefficients& k) { return SymPosDef3::from_coefficients(k); }

/// mu_A = af - c^2 + df - e^2 - f - det A. Its sign decides hyperbolic vs elliptic steady flow.
inline double mu_sg(const SymPosDef3& A) {
  const double a = A.a(), b = A.b(), c = A.c(), d = A.d(), e = A.e(), f = A.f();
  const double det = a * d * f - a * e * e - b * b * f + 2.0 * b * c * e - c * c * d;
  return a * f - c * c + d * f - e * e - f - det;
}

/// Relative band used to call mu_A zero: 1e-12 * max(1, |af|, |df|, det A).
inline double default_mu_epsilon(const SymPosDef3& A) {
  return 1e-12 * std::max({1.0, std::abs(A.a() * A.f()), std::abs(A.d() * A.f()), A.det()});
}

enum class SpectrumKind { Hyperbolic, Elliptic, Null };

inline std::string to_string(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::Hyperbolic: return "hyperbolic";
    case SpectrumKind::Elliptic: return "elliptic";
    case SpectrumKind::Null: return "null";
  }
  return "?";
}

/// S = A^{-1} J (A - I) with spectrum {0, +lambda, -lambda}, lambda^2 = mu_A / det A.
struct FlowMatrix {
  Mat3 S;
  double lambda_sq = 0.0;
  SpectrumKind kind = SpectrumKind::Null;

  /// |lambda| (the rate, or angular frequency for elliptic flows).
  double lambda() const { return std::sqrt(std::abs(lambda_sq)); }

  /// {0, +lambda, -lambda}; imaginary pair for elliptic flows.
  std::array<std::complex<double>, 3> eigenvalues() const {
    const double l = lambda();
    if (kind == SpectrumKind::Elliptic) return {{{0.0, 0.0}, {0.0, l}, {0.0, -l}}};
    if (kind == SpectrumKind::Hyperbolic) return {{{0.0, 0.0}, {l, 0.0}, {-l, 0.0}}};
    return {};
  }
};

inline FlowMatrix flow_matrix(const SymPosDef3& A) {
  FlowMatrix fm;
  fm.S = A.inverse() * kJ * (A.matrix() - Mat3::identity());
  const double mu = mu_sg(A);
  fm.lambda_sq = mu / A.det();
  const double eps = default_mu_epsilon(A);
  fm.kind = mu > eps ? SpectrumKind::Hyperbolic : (mu < -eps ? SpectrumKind::Elliptic : SpectrumKind::Null);
  return fm;
}

/// e^{tS}.
inline Mat3 matrix_exp(const FlowMatrix& fm, double t) { return flow_exponential(fm.S, fm.lambda_sq, t); }

enum class Regime { HyperbolicPlus, EllipticMinus, Degenerate };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::HyperbolicPlus: return "hyperbolic";
    case Regime::EllipticMinus: return "elliptic";
    case Regime::Degenerate: return "degenerate";
  }
  return "?";
}

inline Regime regime_from_mu(double mu, double eps) {
  if (mu > eps) return Regime::HyperbolicPlus;
  if (mu < -eps) return Regime::EllipticMinus;
  return Regime::Degenerate;
}

struct RegimeLabelSG {
  Regime regime = Regime::Degenerate;
  double mu = 0.0;
  /// A^{-1}J has vanishing symmetric part, so the order-0 multiplier is identically zero.
  bool degenerate_multiplier = false;
};

/// Algebraic test for x.A^{-1}Jx == 0 for all x.
inline bool is_multiplier_degenerate(const SymPosDef3& A) {
  const Mat3 k = A.inverse() * kJ;
  const Mat3 sym = k + k.transpose();
  return sym.max_abs() <= 1e-12 * std::max(1.0, k.max_abs());
}

inline RegimeLabelSG classify_sg(const SymPosDef3& A, double eps) {
  const double mu = mu_sg(A);
  return {regime_from_mu(mu, eps), mu, is_multiplier_degenerate(A)};
}

inline RegimeLabelSG classify_sg(const SymPosDef3& A) { return classify_sg(A, default_mu_epsilon(A)); }

}  // namespace lsg
