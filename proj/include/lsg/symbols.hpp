#pragma once

// Order-0 Fourier multipliers m(xi) = 2 (xi.N xi)/(xi.D xi) and their flow-composed versions.
//
// A LinearisedModel is the pair (flow matrix F, symbol m) shared by the semi-geostrophic
// (F = S, N = A^{-1}J, D = A^{-1}) and quasi-geostrophic (F = M, N = M B^{-1}, D = B^{-1}) theories.
// Everything downstream (plane waves, grid evolution) is written against this pair.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "lsg/geometry.hpp"
#include "lsg/linalg.hpp"
#include "lsg/quadrature.hpp"

namespace lsg {

/// m(xi) = 2 (xi.N xi)/(xi.D xi); only the symmetric part of N is kept. m(0) := 0.
struct QuadraticSymbol {
  Mat3 numerator;
  Mat3 denominator;

  QuadraticSymbol() = default;
  QuadraticSymbol(const Mat3& n, const Mat3& d) : numerator(n.symmetric_part()), denominator(d) {}

  double operator()(const Vec3& xi) const {
    const double den = quadratic_form(denominator, xi);
    if (den == 0.0) return 0.0;
    return 2.0 * quadratic_form(numerator, xi) / den;
  }

  /// sup |m| over xi != 0: twice the largest |sigma| with det(N - sigma D) = 0.
  double sup_norm() const {
    const Mat3 k = denominator.inverse() * numerator;
    const auto c = characteristic_polynomial(k);
    const auto r = real_cubic_roots(c[0], c[1], c[2]);
    return 2.0 * std::max(std::abs(r[0]), std::abs(r[2]));
  }

  bool is_zero() const { return numerator.max_abs() <= 1e-12 * std::max(1.0, denominator.max_abs()); }
};

/// Sample-based estimate of sup |m|: 4096-point Fibonacci lattice on the unit sphere followed by
/// local pattern-search refinement from the best sample.
inline double sampled_symbol_sup(const QuadraticSymbol& m, int points = 4096) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  auto direction = [](double z, double phi) {
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3{r * std::cos(phi), r * std::sin(phi), z};
  };
  double best = 0.0;
  double best_z = 0.0, best_phi = 0.0;
  for (int i = 0; i < points; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / points;
    const double phi = golden * i;
    const double v = std::abs(m(direction(z, phi)));
    if (v > best) {
      best = v;
      best_z = z;
      best_phi = phi;
    }
  }
  double step = 2.0 / std::sqrt(static_cast<double>(points));
  while (step > 1e-12) {
    bool improved = false;
    for (const auto& [dz, dp] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
      const double z = std::clamp(best_z + dz * step, -1.0, 1.0);
      const double phi = best_phi + dp * step;
      const double v = std::abs(m(direction(z, phi)));
      if (v > best) {
        best = v;
        best_z = z;
        best_phi = phi;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

class LinearisedModel {
 public:
  LinearisedModel() = default;

  /// `mu` is the scalar discriminant whose sign labels the flow; `mu_eps` its zero band.
  LinearisedModel(std::string name, const Mat3& flow, double lambda_sq, double mu, double mu_eps,
                  const QuadraticSymbol& symbol)
      : name_(std::move(name)),
        flow_(flow),
        flow_t_(flow.transpose()),
        lambda_sq_(lambda_sq),
        mu_(mu),
        regime_(regime_from_mu(mu, mu_eps)),
        symbol_(symbol),
        exp_(flow, lambda_sq),
        sup_(symbol.sup_norm()) {}

  const std::string& name() const { return name_; }
  const Mat3& flow() const { return flow_; }
  const Mat3& flow_transpose() const { return flow_t_; }
  double lambda_sq() const { return lambda_sq_; }
  double lambda() const { return std::sqrt(std::abs(lambda_sq_)); }
  double mu() const { return mu_; }
  Regime regime() const { return regime_; }
  const QuadraticSymbol& symbol() const { return symbol_; }

  /// e^{tF}
  Mat3 exp(double t) const { return exp_(t); }
  /// e^{tF^T}
  Mat3 exp_transpose(double t) const { return exp_(t).transpose(); }

  double m(const Vec3& xi) const { return symbol_(xi); }
  double symbol_sup() const { return sup_; }
  bool multiplier_degenerate() const { return symbol_.is_zero(); }

  /// Elliptic period 2 pi / lambda (infinite otherwise).
  double period() const {
    return regime_ == Regime::EllipticMinus ? 2.0 * std::numbers::pi / lambda()
                                           : std::numeric_limits<double>::infinity();
  }

 private:
  std::string name_;
  Mat3 flow_;
  Mat3 flow_t_;
  double lambda_sq_ = 0.0;
  double mu_ = 0.0;
  Regime regime_ = Regime::Degenerate;
  QuadraticSymbol symbol_;
  FlowExponential exp_;
  double sup_ = 0.0;
};

/// The semi-geostrophic pair (S, m) for a steady state A.
inline LinearisedModel sg_model(const SymPosDef3& A) {
  const FlowMatrix fm = flow_matrix(A);
  const double mu = mu_sg(A);
  return LinearisedModel("SG", fm.S, fm.lambda_sq, mu, default_mu_epsilon(A),
                         QuadraticSymbol(A.inverse() * kJ, A.inverse()));
}

/// Evaluates m, m~(t) = m(e^{-tF^T}xi), M~(t) = exp(int_0^t m~), and the barred versions with e^{+tF^T}.
class SymbolEvaluator {
 public:
  SymbolEvaluator(LinearisedModel model, QuadratureConfig cfg = {}) : model_(std::move(model)), cfg_(cfg) {
    cfg_.validate();
  }

  const LinearisedModel& model() const { return model_; }
  const QuadratureConfig& quadrature() const { return cfg_; }

  double m(const Vec3& xi) const { return model_.m(xi); }
  double m_tilde(double t, const Vec3& xi) const { return model_.m(model_.exp_transpose(-t) * xi); }
  double m_bar(double t, const Vec3& xi) const { return model_.m(model_.exp_transpose(t) * xi); }

  /// int_0^t m~(r; xi) dr
  double log_M_tilde(double t, const Vec3& xi) const { return log_multiplier(t, xi, -1.0); }
  /// int_0^t m-bar(r; xi) dr
  double log_M_bar(double t, const Vec3& xi) const { return log_multiplier(t, xi, +1.0); }

  double M_tilde(double t, const Vec3& xi) const { return std::exp(log_M_tilde(t, xi)); }
  double M_bar(double t, const Vec3& xi) const { return std::exp(log_M_bar(t, xi)); }

  /// True when xi is a real eigenvector of F^T (eigenvalue 0 or +/-lambda for hyperbolic flows),
  /// so that the composed symbol is constant in time.
  bool is_flow_eigenvector(const Vec3& xi) const {
    const double tol = 1e-12 * norm(xi);
    const Vec3 ft = model_.flow_transpose() * xi;
    if (norm(ft) < tol) return true;
    if (model_.regime() == Regime::HyperbolicPlus) {
      const double l = model_.lambda();
      if (norm(ft - l * xi) < tol || norm(ft + l * xi) < tol) return true;
    }
    return false;
  }

 private:
  double log_multiplier(double t, const Vec3& xi, double sign) const {
    if (t == 0.0 || model_.multiplier_degenerate()) return 0.0;
    if (xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0) return 0.0;
    if (is_flow_eigenvector(xi)) return t * model_.m(xi);
    auto integrand = [&](double r) { return model_.m(model_.exp_transpose(sign * r) * xi); };
    return integrate_adaptive(integrand, 0.0, t, cfg_).value;
  }

  LinearisedModel model_;
  QuadratureConfig cfg_;
};

}  // namespace lsg
