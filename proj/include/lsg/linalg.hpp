#pragma once

// Small fixed-size linear algebra for the 3x3 steady-state algebra.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace lsg {

using Vec3 = std::array<double, 3>;

constexpr Vec3 operator+(const Vec3& u, const Vec3& v) { return {u[0] + v[0], u[1] + v[1], u[2] + v[2]}; }
constexpr Vec3 operator-(const Vec3& u, const Vec3& v) { return {u[0] - v[0], u[1] - v[1], u[2] - v[2]}; }
constexpr Vec3 operator-(const Vec3& u) { return {-u[0], -u[1], -u[2]}; }
constexpr Vec3 operator*(double s, const Vec3& u) { return {s * u[0], s * u[1], s * u[2]}; }

constexpr double dot(const Vec3& u, const Vec3& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; }
inline double norm(const Vec3& u) { return std::sqrt(dot(u, u)); }
constexpr Vec3 cross(const Vec3& u, const Vec3& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

/// Row-major 3x3 real matrix.
struct Mat3 {
  std::array<double, 9> v{};

  constexpr double& operator()(int i, int j) { return v[3 * i + j]; }
  constexpr double operator()(int i, int j) const { return v[3 * i + j]; }

  static constexpr Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static constexpr Mat3 zero() { return Mat3{}; }
  static constexpr Mat3 diag(double a, double b, double c) { return Mat3{{a, 0, 0, 0, b, 0, 0, 0, c}}; }

  constexpr Vec3 row(int i) const { return {v[3 * i], v[3 * i + 1], v[3 * i + 2]}; }

  constexpr Mat3 transpose() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }

  constexpr double trace() const { return v[0] + v[4] + v[8]; }

  constexpr double det() const {
    const Mat3& m = *this;
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  }

  /// Transposed cofactor matrix, so that adjugate() * M = det(M) * I.
  constexpr Mat3 adjugate() const {
    const Mat3& m = *this;
    Mat3 c;
    c(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    c(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    c(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    c(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    c(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    c(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    c(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    c(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    c(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return c;
  }

  /// Cofactor inverse; the caller guarantees det != 0.
  constexpr Mat3 inverse() const {
    Mat3 c = adjugate();
    const double inv_det = 1.0 / det();
    for (double& x : c.v) x *= inv_det;
    return c;
  }

  constexpr Mat3 symmetric_part() const {
    Mat3 s;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    return s;
  }

  double frobenius() const {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }

  double max_abs() const {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
  }

  /// Induced infinity norm (max absolute row sum).
  double norm_inf() const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      s = std::max(s, std::abs((*this)(i, 0)) + std::abs((*this)(i, 1)) + std::abs((*this)(i, 2)));
    return s;
  }

  friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

constexpr Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int k = 0; k < 9; ++k) c.v[k] = a.v[k] + b.v[k];
  return c;
}
constexpr Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int k = 0; k < 9; ++k) c.v[k] = a.v[k] - b.v[k];
  return c;
}
constexpr Mat3 operator*(double s, const Mat3& a) {
  Mat3 c;
  for (int k = 0; k < 9; ++k) c.v[k] = s * a.v[k];
  return c;
}
constexpr Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return c;
}
constexpr Vec3 operator*(const Mat3& a, const Vec3& x) {
  return {a(0, 0) * x[0] + a(0, 1) * x[1] + a(0, 2) * x[2], a(1, 0) * x[0] + a(1, 1) * x[1] + a(1, 2) * x[2],
          a(2, 0) * x[0] + a(2, 1) * x[1] + a(2, 2) * x[2]};
}

/// x . M x
constexpr double quadratic_form(const Mat3& m, const Vec3& x) { return dot(x, m * x); }

/// Coefficients (c2, c1, c0) of the monic characteristic polynomial s^3 + c2 s^2 + c1 s + c0.
constexpr std::array<double, 3> characteristic_polynomial(const Mat3& m) {
  const double minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                        m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  return {-m.trace(), minors, -m.det()};
}

inline std::complex<double> eval_monic_cubic(const std::array<double, 3>& c, std::complex<double> s) {
  return ((s + c[0]) * s + c[1]) * s + c[2];
}

/// Roots of s^3 + c2 s^2 + c1 s + c0 known to be all real (trigonometric method), ascending.
/// A slightly negative discriminant from round-off is clamped.
inline std::array<double, 3> real_cubic_roots(double c2, double c1, double c0) {
  const double shift = c2 / 3.0;
  const double p = c1 - c2 * c2 / 3.0;
  const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
  std::array<double, 3> r{};
  if (p >= 0.0) {
    // Triple (or numerically near-triple) root.
    const double y = std::cbrt(-q);
    r = {y - shift, y - shift, y - shift};
    return r;
  }
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  for (int k = 0; k < 3; ++k) r[k] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift;
  std::sort(r.begin(), r.end());
  return r;
}

/// Eigenvalues of a symmetric matrix, ascending.
inline std::array<double, 3> symmetric_eigenvalues(const Mat3& m) {
  const auto c = characteristic_polynomial(m.symmetric_part());
  return real_cubic_roots(c[0], c[1], c[2]);
}

/// Induced 2-norm.
inline double spectral_norm(const Mat3& m) {
  const auto ev = symmetric_eigenvalues(m.transpose() * m);
  return std::sqrt(std::max(ev[2], 0.0));
}

/// e^{M} by scaling and squaring with a Taylor series of the given order.
inline Mat3 expm_scaling_squaring(const Mat3& m, int order = 12) {
  const double nrm = m.norm_inf();
  int squarings = 0;
  if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const Mat3 x = std::ldexp(1.0, -squarings) * m;
  Mat3 term = Mat3::identity();
  Mat3 sum = Mat3::identity();
  for (int k = 1; k <= order; ++k) {
    term = (1.0 / k) * (term * x);
    sum = sum + term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// e^{tF} for a matrix whose spectrum is {0, +lambda, -lambda} with lambda^2 = lambda_sq (signed),
/// i.e. F^3 = lambda_sq F. Uses e^{tF} = I + a F + b F^2 when the spectral gap is resolvable and the
/// hyperbolic functions cannot overflow; otherwise falls back to scaling and squaring.
/// For strongly non-normal F the b F^2 term cancels against a F by orders of magnitude, so the closed form
/// runs in long double with lambda^2 = tr(F^2)/2 taken from F itself rather than from lambda_sq.
class FlowExponential {
 public:
  FlowExponential() = default;
  FlowExponential(const Mat3& f, double lambda_sq)
      : f_(f), lambda_sq_(lambda_sq), lambda_(std::sqrt(std::abs(lambda_sq))), f_norm_(f.frobenius()) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        long double s = 0.0L;
        for (int k = 0; k < 3; ++k) s += static_cast<long double>(f(i, k)) * f(k, j);
        f2_[i][j] = s;
      }
    const long double tr = static_cast<long double>(f(0, 0)) + f(1, 1) + f(2, 2);
    const long double l2 = 0.5L * (f2_[0][0] + f2_[1][1] + f2_[2][2] - tr * tr);
    // Keep the algebraic sign; only the magnitude is refined.
    if ((l2 > 0.0L) == (lambda_sq > 0.0)) consistent_lambda_sq_ = l2;
    else consistent_lambda_sq_ = lambda_sq;
  }

  Mat3 operator()(double t) const {
    if (f_norm_ == 0.0 || t == 0.0) return Mat3::identity();
    const bool closed_form =
        std::abs(lambda_sq_) > 1e-10 * f_norm_ * f_norm_ && lambda_ * std::abs(t) < 700.0;
    if (!closed_form) return expm_scaling_squaring(t * f_);
    const long double l2 = consistent_lambda_sq_;
    const long double lam = std::sqrt(std::abs(l2));
    const long double x = lam * t;
    long double a = 0.0L;
    long double b = 0.0L;
    if (l2 > 0.0L) {
      const long double sh = std::sinh(0.5L * x);
      a = std::sinh(x) / lam;
      b = 2.0L * sh * sh / l2;
    } else {
      const long double sn = std::sin(0.5L * x);
      a = std::sin(x) / lam;
      b = 2.0L * sn * sn / -l2;
    }
    Mat3 out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out(i, j) = static_cast<double>(a * f_(i, j) + b * f2_[i][j] + (i == j ? 1.0L : 0.0L));
    return out;
  }

 private:
  Mat3 f_;
  std::array<std::array<long double, 3>, 3> f2_{};
  double lambda_sq_ = 0.0;
  double lambda_ = 0.0;
  long double consistent_lambda_sq_ = 0.0L;
  double f_norm_ = 0.0;
};

inline Mat3 flow_exponential(const Mat3& f, double lambda_sq, double t) { return FlowExponential(f, lambda_sq)(t); }

}  // namespace lsg
