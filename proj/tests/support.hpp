#pragma once

// Independent oracles and fixtures shared by the unit and acceptance tests. Nothing here calls the
// library routine it is used to check.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "lsg/lsg.hpp"

namespace lsg::testing {

inline SymPosDef3 witness(int i) { return SymPosDef3::from_coefficients(pinned_witnesses()[i].coefficients); }

/// Mildly elliptic steady state (SG and QG) whose flow stretches the grid by < 1.5 for |t| <= 2.
inline SymPosDef3 gentle() { return SymPosDef3::from_coefficients({0.6, -0.2, 0.05, 0.35, 0.0, 1.0}); }

inline constexpr Mat3 kJ3{{0, -1, 0, 1, 0, 0, 0, 0, 0}};

inline Mat3 full(const SymPosDef3::Coefficients& k) {
  const auto [a, b, c, d, e, f] = k;
  return Mat3{{a, b, c, b, d, e, c, e, f}};
}

/// Inverse by cofactor expansion, written out independently of Mat3::inverse.
inline Mat3 cofactor_inverse(const Mat3& m) {
  Mat3 cof;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3, c1 = (j + 2) % 3;
      cof(j, i) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    }
  const double det = m(0, 0) * cof(0, 0) + m(0, 1) * cof(1, 0) + m(0, 2) * cof(2, 0);
  return (1.0 / det) * cof;
}

/// Sum of the principal 2x2 minors: the s^1 coefficient of det(sI - M).
inline double principal_minor_sum(const Mat3& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) -
         m(1, 2) * m(2, 1);
}

/// mu_A from the characteristic polynomial of S = A^{-1} J (A - I): det(sI - S) = s^3 - (mu/detA) s.
inline double mu_sg_oracle(const SymPosDef3::Coefficients& k) {
  const Mat3 a = full(k);
  const Mat3 s = cofactor_inverse(a) * kJ3 * (a - Mat3::identity());
  return -principal_minor_sum(s) * a.det();
}

/// mu_QG from the characteristic polynomial of M = J (A - B).
inline double mu_qg_oracle(const SymPosDef3::Coefficients& k, double n_bv = 1.0) {
  return -principal_minor_sum(kJ3 * (full(k) - Mat3::diag(1.0, 1.0, n_bv * n_bv)));
}

/// Roots of s^3 + c2 s^2 + c1 s + c0 by Durand-Kerner.
inline std::array<std::complex<double>, 3> cubic_roots(double c2, double c1, double c0) {
  using C = std::complex<double>;
  std::array<C, 3> z{C{0.4, 0.9}, C{0.4, 0.9} * C{0.4, 0.9}, C{0.4, 0.9} * C{0.4, 0.9} * C{0.4, 0.9}};
  const double scale = 1.0 + std::abs(c2) + std::abs(c1) + std::abs(c0);
  for (auto& x : z) x *= scale;
  for (int it = 0; it < 500; ++it)
    for (int i = 0; i < 3; ++i) {
      C den = 1.0;
      for (int j = 0; j < 3; ++j)
        if (j != i) den *= z[i] - z[j];
      const C p = ((z[i] + c2) * z[i] + c1) * z[i] + c0;
      z[i] -= p / den;
    }
  return z;
}

inline std::array<std::complex<double>, 3> eigenvalues_oracle(const Mat3& m) {
  const double c1 = principal_minor_sum(m);
  return cubic_roots(-m.trace(), c1, -m.det());
}

/// e^{tM} from the raw Taylor series in long double.
inline Mat3 exp_series(const Mat3& m, double t) {
  std::array<long double, 9> sum{}, term{};
  for (int i = 0; i < 3; ++i) sum[4 * i] = term[4 * i] = 1.0L;
  for (int k = 1; k < 400; ++k) {
    std::array<long double, 9> next{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int q = 0; q < 3; ++q) next[3 * i + j] += term[3 * i + q] * static_cast<long double>(m(q, j)) * t / k;
    term = next;
    long double mx = 0.0L;
    for (int i = 0; i < 9; ++i) {
      sum[i] += term[i];
      mx = std::max(mx, std::fabs(term[i]));
    }
    if (mx < 1e-40L) break;
  }
  Mat3 out;
  for (int i = 0; i < 9; ++i) out.v[i] = static_cast<double>(sum[i]);
  return out;
}

/// Direct evaluation of 2 xi.A^{-1}J xi / xi.A^{-1} xi with the cofactor inverse.
inline double sg_symbol_oracle(const SymPosDef3::Coefficients& k, const Vec3& xi) {
  const Mat3 ai = cofactor_inverse(full(k));
  const Vec3 aix = ai * xi;
  const Vec3 jx = kJ3 * xi;
  return 2.0 * dot(ai * jx, xi) / dot(aix, xi);
}

/// exp of int_0^t m(e^{sign r F^T} xi) dr by classical RK4 with `steps` equal steps.
inline double multiplier_rk4(const LinearisedModel& model, double t, const Vec3& xi, int steps, double sign = -1.0) {
  const double h = t / steps;
  auto f = [&](double r, double y) { return model.m(exp_series(model.flow_transpose(), sign * r) * xi) * y; };
  double y = 1.0;
  for (int s = 0; s < steps; ++s) {
    const double r = s * h;
    const double k1 = f(r, y);
    const double k2 = f(r + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = f(r + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = f(r + h, y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v{g(rng), g(rng), g(rng)};
  return (1.0 / norm(v)) * v;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double max_rel_diff(const GridField& a, const GridField& b) {
  GridField d = a;
  d -= b;
  return d.l2_norm() / b.l2_norm();
}

/// Standard 64^3 grid on [-8 pi, 8 pi)^3.
inline GridSpec standard_grid() { return GridSpec{64, 16.0 * std::numbers::pi}; }

}  // namespace lsg::testing
