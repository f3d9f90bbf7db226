#pragma once

// Adaptive Gauss-Legendre panel quadrature for the time integrals of the composed symbols.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "lsg/error.hpp"

namespace lsg {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 64;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw Error(ErrorCode::InvalidArgument, "quadrature tolerances must be positive");
    if (max_subdivisions < 1) throw Error(ErrorCode::InvalidArgument, "max_subdivisions must be >= 1");
  }

  friend bool operator==(const QuadratureConfig&, const QuadratureConfig&) = default;
};

template <int N>
struct GaussLegendreRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};
};

/// Nodes and weights on [-1, 1], Newton iteration on the Legendre three-term recurrence.
template <int N>
GaussLegendreRule<N> make_gauss_legendre() {
  GaussLegendreRule<N> rule;
  for (int i = 0; i < (N + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= N; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = N * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[N - 1 - i] = z;
    rule.weights[i] = rule.weights[N - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

inline const GaussLegendreRule<16>& gauss_legendre16() {
  static const GaussLegendreRule<16> rule = make_gauss_legendre<16>();
  return rule;
}

template <class F>
double gauss_legendre16_panel(F&& f, double a, double b) {
  const auto& rule = gauss_legendre16();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 16; ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return s * half;
}

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

/// Globally adaptive bisection: the panel with the largest |GL16(panel) - GL16(halves)| is split
/// until the summed estimate meets max(abs_tol, rel_tol * |value|). Works for b < a.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, const QuadratureConfig& cfg) {
  QuadratureResult out;
  if (a == b) return out;
  struct Panel {
    double lo, hi, coarse, fine, err;
  };
  auto make_panel = [&](double lo, double hi, double coarse) {
    const double mid = 0.5 * (lo + hi);
    const double fine = gauss_legendre16_panel(f, lo, mid) + gauss_legendre16_panel(f, mid, hi);
    return Panel{lo, hi, coarse, fine, std::abs(fine - coarse)};
  };
  std::vector<Panel> panels;
  panels.push_back(make_panel(a, b, gauss_legendre16_panel(f, a, b)));
  for (;;) {
    double value = 0.0, err = 0.0;
    for (const auto& p : panels) {
      value += p.fine;
      err += p.err;
    }
    out.value = value;
    out.error = err;
    if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value))) return out;
    if (out.subdivisions >= cfg.max_subdivisions) {
      throw Error(ErrorCode::QuadratureFailure, "tolerance not met after " + std::to_string(out.subdivisions) +
                                                    " subdivisions (error estimate " + std::to_string(err) + ")");
    }
    auto worst = std::max_element(panels.begin(), panels.end(),
                                  [](const Panel& x, const Panel& y) { return x.err < y.err; });
    const Panel p = *worst;
    const double mid = 0.5 * (p.lo + p.hi);
    const double left_coarse = gauss_legendre16_panel(f, p.lo, mid);
    const double right_coarse = p.fine - left_coarse;
    *worst = make_panel(p.lo, mid, left_coarse);
    panels.push_back(make_panel(mid, p.hi, right_coarse));
    ++out.subdivisions;
  }
}

}  // namespace lsg
