#pragma once

// Grid realisation of the solution operator G(t), its adjoint F(t) and the generator L.
//
// G(t) phi = e^{-tF^T} Phi(e^{-tF} x) with Phi^(xi) = M~(t; xi) phi^(xi), and
// F(t) psi = e^{-tF}   Psi(e^{+tF} x) with Psi^(xi) = M-bar(t; xi) psi^(xi),
// where F is the model's flow matrix (S for SG, M for QG).
//
// The spectral path applies the frame change on the Fourier side,
//   (G(t) phi)^(xi) = e^{-tF^T} M-bar(t; xi) phi^(e^{tF^T} xi),
//   (F(t) psi)^(xi) = e^{-tF}   M~(t; xi)    psi^(e^{-tF^T} xi),
// using M~(t; e^{tF^T} xi) = M-bar(t; xi). Only the transform of the (compactly supported) input is
// interpolated; the multiplier, which is singular at xi = 0, is evaluated exactly on the lattice.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lsg/error.hpp"
#include "lsg/grid.hpp"
#include "lsg/linalg.hpp"
#include "lsg/quadrature.hpp"
#include "lsg/symbols.hpp"

namespace lsg {

enum class Interpolation { Trilinear, SpectralResample };

inline std::string to_string(Interpolation i) { return i == Interpolation::Trilinear ? "trilinear" : "spectral"; }

inline Interpolation parse_interpolation(const std::string& s) {
  if (s == "trilinear") return Interpolation::Trilinear;
  if (s == "spectral") return Interpolation::SpectralResample;
  throw Error(ErrorCode::InvalidArgument, "unknown interpolation '" + s + "' (expected trilinear or spectral)");
}

struct EvolverConfig {
  Interpolation interpolation = Interpolation::SpectralResample;
  QuadratureConfig quadrature{};
  double clamp_time = 10.0;
  /// Largest relative L2 mass allowed to alias past Nyquist or wrap around the box.
  double wrap_tolerance = 1e-5;

  void validate() const {
    quadrature.validate();
    if (!(clamp_time > 0.0)) throw Error(ErrorCode::InvalidArgument, "clamp_time must be positive");
    if (!(wrap_tolerance > 0.0 && wrap_tolerance <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "wrap_tolerance must lie in (0, 1]");
  }
  friend bool operator==(const EvolverConfig&, const EvolverConfig&) = default;
};

/// (Px)_i = sign_i x_{axis_i}; maps the centred lattice onto itself.
struct SignedPermutation {
  std::array<int, 3> axis{0, 1, 2};
  std::array<int, 3> sign{1, 1, 1};

  Mat3 matrix() const {
    Mat3 p;
    for (int i = 0; i < 3; ++i) p(i, axis[i]) = sign[i];
    return p;
  }
  bool is_identity() const { return axis == std::array{0, 1, 2} && sign == std::array{1, 1, 1}; }
};

/// Factorisation W = P R3 R2 R1 of a pullback map into a lattice symmetry and three maps that each
/// rewrite a single coordinate. Passes are stored in application order (R3 first).
struct ResamplePlan {
  SignedPermutation perm;
  std::array<int, 3> axes{};
  std::array<Vec3, 3> rows{};
  /// Largest stretch max(|Q|, |Q^{-1}|) over the partial products Q = R3, R3 R2, R3 R2 R1 that the
  /// intermediate fields are warped by.
  double stretch = 0.0;
};

namespace detail {

inline const std::vector<SignedPermutation>& signed_permutations() {
  static const std::vector<SignedPermutation> all = [] {
    std::vector<SignedPermutation> out;
    std::array<int, 3> axis{0, 1, 2};
    do {
      for (int s = 0; s < 8; ++s)
        out.push_back({axis, {(s & 1) ? -1 : 1, (s & 2) ? -1 : 1, (s & 4) ? -1 : 1}});
    } while (std::next_permutation(axis.begin(), axis.end()));
    return out;
  }();
  return all;
}

/// Row-replacement matrix: identity with row `axis` set to r.
inline Mat3 row_map(int axis, const Vec3& r) {
  Mat3 m = Mat3::identity();
  for (int q = 0; q < 3; ++q) m(axis, q) = r[q];
  return m;
}

}  // namespace detail

inline ResamplePlan plan_resample(const Mat3& w) {
  ResamplePlan best;
  best.stretch = std::numeric_limits<double>::infinity();
  for (const auto& perm : detail::signed_permutations()) {
    const Mat3 wp = perm.matrix().transpose() * w;
    std::array<int, 3> order{0, 1, 2};
    do {
      Mat3 c = Mat3::identity();
      std::array<Vec3, 3> rows{};
      bool valid = true;
      for (int s = 0; s < 3; ++s) {
        const int p = order[s];
        const Vec3 r = c.transpose() * wp.row(p);
        const double peak = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
        if (!(std::abs(r[p]) > 1e-12 * peak)) {
          valid = false;
          break;
        }
        rows[s] = r;
        c = c * detail::row_map(p, r).inverse();
      }
      if (!valid) continue;
      double stretch = 0.0;
      Mat3 q = Mat3::identity();
      for (int s = 2; s >= 0; --s) {
        q = q * detail::row_map(order[s], rows[s]);
        stretch = std::max({stretch, spectral_norm(q), spectral_norm(q.inverse())});
      }
      if (stretch < best.stretch * (1.0 - 1e-12)) {
        best.perm = perm;
        best.stretch = stretch;
        for (int s = 0; s < 3; ++s) {
          best.axes[s] = order[2 - s];
          best.rows[s] = rows[2 - s];
        }
      }
    } while (std::next_permutation(order.begin(), order.end()));
  }
  if (!std::isfinite(best.stretch)) throw Error(ErrorCode::InvalidArgument, "pullback map is singular");
  return best;
}

namespace detail {

using Components = std::array<GridField::Component, 3>;

/// Centred lattice coordinate of index j.
constexpr double offset(int j, int n) { return j - n / 2; }

inline std::size_t flat(int n, int i, int j, int k) {
  return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n) * k);
}

inline void permute(int n, Components& comps, const SignedPermutation& perm) {
  if (perm.is_identity()) return;
  Components out;
  for (auto& c : out) c.resize(comps[0].size());
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::array<int, 3> at{i, j, k};
        std::array<int, 3> src{};
        for (int q = 0; q < 3; ++q) {
          const int v = at[perm.axis[q]];
          src[q] = perm.sign[q] > 0 ? v : (n - v) % n;
        }
        const std::size_t from = flat(n, src[0], src[1], src[2]);
        const std::size_t to = flat(n, i, j, k);
        for (int c = 0; c < 3; ++c) out[c][to] = comps[c][from];
      }
  comps = std::move(out);
}

/// out(u) = in(u with coordinate `axis` replaced by r.u) in centred index coordinates, evaluating the
/// periodic trigonometric interpolant of each lattice line. The Nyquist mode is split evenly
/// between +-n/2.
inline void resample_pass(int n, Components& comps, int axis, const Vec3& r) {
  const std::size_t stride = axis == 0 ? 1 : (axis == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n);
  const int oa = axis == 0 ? 1 : 0;
  const int ob = axis == 2 ? 1 : 2;
  Fft::Lines dft(n, FFTW_FORWARD);
  std::array<std::vector<cplx>, 3> line;
  std::array<std::vector<double>, 3> re, im;
  for (int c = 0; c < 3; ++c) {
    line[c].resize(n);
    re[c].resize(n + 1);
    im[c].resize(n + 1);
  }
  const double inv_n = 1.0 / n;
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      std::array<int, 3> idx{};
      idx[oa] = a;
      idx[ob] = b;
      const std::size_t base = flat(n, idx[0], idx[1], idx[2]);
      const double beta = r[oa] * offset(a, n) + r[ob] * offset(b, n);
      for (int c = 0; c < 3; ++c) {
        for (int j = 0; j < n; ++j) line[c][j] = comps[c][base + j * stride];
        dft(line[c]);
        // d_m multiplies z^{m - n/2}, m = 0..n.
        const cplx nyq = 0.5 * line[c][n / 2];
        re[c][0] = re[c][n] = nyq.real();
        im[c][0] = im[c][n] = nyq.imag();
        for (int m = 1; m < n; ++m) {
          const cplx v = line[c][(m - n / 2 + n) % n];
          re[c][m] = v.real();
          im[c][m] = v.imag();
        }
      }
      for (int j = 0; j < n; ++j) {
        const double s = r[axis] * offset(j, n) + beta + 0.5 * n;
        const double zr = std::cos(2.0 * std::numbers::pi * s * inv_n);
        const double zi = std::sin(2.0 * std::numbers::pi * s * inv_n);
        const double pr = std::cos(std::numbers::pi * s) * inv_n;
        const double pi = -std::sin(std::numbers::pi * s) * inv_n;
        for (int c = 0; c < 3; ++c) {
          const double* dr = re[c].data();
          const double* di = im[c].data();
          double ar = dr[n], ai = di[n];
          for (int m = n - 1; m >= 0; --m) {
            const double tr = ar * zr - ai * zi + dr[m];
            ai = ar * zi + ai * zr + di[m];
            ar = tr;
          }
          comps[c][base + j * stride] = {ar * pr - ai * pi, ar * pi + ai * pr};
        }
      }
    }
  }
}

inline void trilinear(int n, Components& comps, const Mat3& w) {
  Components out;
  for (auto& c : out) c.resize(comps[0].size());
  auto wrap = [n](long i) { return static_cast<int>(((i % n) + n) % n); };
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 y = w * Vec3{offset(i, n), offset(j, n), offset(k, n)};
        std::array<int, 3> lo{}, hi{};
        std::array<double, 3> frac{};
        for (int q = 0; q < 3; ++q) {
          const double s = y[q] + 0.5 * n;
          const double fl = std::floor(s);
          frac[q] = s - fl;
          lo[q] = wrap(static_cast<long>(fl));
          hi[q] = wrap(static_cast<long>(fl) + 1);
        }
        std::array<cplx, 3> acc{};
        for (int corner = 0; corner < 8; ++corner) {
          double weight = 1.0;
          std::array<int, 3> at{};
          for (int q = 0; q < 3; ++q) {
            const bool up = corner & (1 << q);
            at[q] = up ? hi[q] : lo[q];
            weight *= up ? frac[q] : 1.0 - frac[q];
          }
          if (weight == 0.0) continue;
          const std::size_t from = flat(n, at[0], at[1], at[2]);
          for (int c = 0; c < 3; ++c) acc[c] += weight * comps[c][from];
        }
        for (int c = 0; c < 3; ++c) out[c][flat(n, i, j, k)] = acc[c];
      }
  comps = std::move(out);
}

/// comps(u) <- comps(W u) on the centred periodic lattice.
inline void warp(int n, Components& comps, const Mat3& w, Interpolation interp) {
  if (w == Mat3::identity()) return;
  if (interp == Interpolation::Trilinear) {
    trilinear(n, comps, w);
    return;
  }
  const ResamplePlan plan = plan_resample(w);
  permute(n, comps, plan.perm);
  for (int s = 0; s < 3; ++s) resample_pass(n, comps, plan.axes[s], plan.rows[s]);
}

/// Swaps FFT ordering and centred ordering (a half-period cyclic shift on each axis).
inline void fftshift(int n, Components& comps) {
  const int h = n / 2;
  for (auto& comp : comps) {
    GridField::Component out(comp.size());
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) out[flat(n, (i + h) % n, (j + h) % n, (k + h) % n)] = comp[flat(n, i, j, k)];
    comp = std::move(out);
  }
}

}  // namespace detail

/// Replaces the (physical) field by x -> field(W x) on the periodic grid.
inline void pullback(GridField& field, const Mat3& w, Interpolation interp) {
  field.require(Representation::Physical);
  detail::warp(field.spec().n, field.components(), w, interp);
}

/// Replaces Fourier data by xi -> data(V xi), interpolating the transform between lattice modes.
inline void fourier_pullback(GridField& field, const Mat3& v) {
  field.require(Representation::Fourier);
  if (v == Mat3::identity()) return;
  const int n = field.spec().n;
  detail::fftshift(n, field.components());
  detail::warp(n, field.components(), v, Interpolation::SpectralResample);
  detail::fftshift(n, field.components());
}

/// Evaluates an even function of xi on every lattice mode; mirrored pairs away from the Nyquist
/// planes share one evaluation.
template <class Fn>
std::vector<double> mode_table(const GridSpec& spec, Fn&& fn) {
  const int n = spec.n;
  std::vector<double> out(spec.points());
  std::vector<char> done(spec.points(), 0);
  for (std::size_t lin = 0; lin < spec.points(); ++lin) {
    if (done[lin]) continue;
    const auto [i, j, k] = spec.unravel(lin);
    const double v = fn(spec.frequency_vector(lin));
    out[lin] = v;
    done[lin] = 1;
    if (!spec.is_nyquist(i) && !spec.is_nyquist(j) && !spec.is_nyquist(k)) {
      const std::size_t mirror = spec.index((n - i) % n, (n - j) % n, (n - k) % n);
      out[mirror] = v;
      done[mirror] = 1;
    }
  }
  return out;
}

enum class Direction { Forward, Adjoint };

/// M~(t; xi) (forward) or M-bar(t; xi) (adjoint) on the lattice, by adaptive quadrature.
inline std::vector<double> multiplier_table(const SymbolEvaluator& ev, const GridSpec& spec, double t, Direction d) {
  return mode_table(spec, [&](const Vec3& xi) { return d == Direction::Forward ? ev.M_tilde(t, xi) : ev.M_bar(t, xi); });
}

/// M~(t; V xi) on the lattice by classical RK4 of y' = m~(r; V xi) y, y(0) = 1, with ceil(|t|/h)
/// equal steps.
inline std::vector<double> rk4_multiplier_table(const LinearisedModel& model, const GridSpec& spec, double t, double h,
                                                const Mat3& frame = Mat3::identity()) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "RK4 step must be positive");
  if (t == 0.0 || model.multiplier_degenerate()) return std::vector<double>(spec.points(), 1.0);
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / h - 1e-9)));
  const double dt = t / steps;
  // m~(r; V xi) = 2 xi.N_r xi / xi.D_r xi with N_r = E^T N E, D_r = E^T D E, E = e^{-rF^T} V.
  struct Forms {
    std::array<double, 6> num;
    std::array<double, 6> den;
  };
  auto pack = [](const Mat3& m) {
    return std::array<double, 6>{m(0, 0), 2.0 * m(0, 1), 2.0 * m(0, 2), m(1, 1), 2.0 * m(1, 2), m(2, 2)};
  };
  std::vector<Forms> nodes(static_cast<std::size_t>(2 * steps + 1));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Mat3 e = model.exp_transpose(-0.5 * dt * static_cast<double>(i)) * frame;
    const Mat3 et = e.transpose();
    nodes[i] = {pack(et * model.symbol().numerator * e), pack(et * model.symbol().denominator * e)};
  }
  std::vector<double> vals(nodes.size());
  return mode_table(spec, [&](const Vec3& xi) {
    if (xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0) return 1.0;
    const std::array<double, 6> q{xi[0] * xi[0], xi[0] * xi[1], xi[0] * xi[2], xi[1] * xi[1], xi[1] * xi[2], xi[2] * xi[2]};
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double nu = 0.0, de = 0.0;
      for (int k = 0; k < 6; ++k) {
        nu += nodes[i].num[k] * q[k];
        de += nodes[i].den[k] * q[k];
      }
      vals[i] = 2.0 * nu / de;
    }
    double y = 1.0;
    for (long s = 0; s < steps; ++s) {
      const double m0 = vals[2 * s], m1 = vals[2 * s + 1], m2 = vals[2 * s + 2];
      const double k1 = m0 * y;
      const double k2 = m1 * (y + 0.5 * dt * k1);
      const double k3 = m1 * (y + 0.5 * dt * k2);
      const double k4 = m2 * (y + dt * k3);
      y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
  });
}

/// Wrap-around leakage of a warp x -> W x: the relative L2 mass that the evolved field would carry
/// beyond the Nyquist frequency (spectral) or outside the fundamental cell (spatial).
struct ResolutionReport {
  double spectral_leakage = 0.0;
  double spatial_leakage = 0.0;

  bool ok(double tol) const { return spectral_leakage <= tol && spatial_leakage <= tol; }
};

inline ResolutionReport resolution_report(const GridField& physical, const GridField& fourier, const Mat3& w) {
  const GridSpec& spec = physical.spec();
  auto energy = [](const GridField& f, std::size_t i) {
    return std::norm(f.component(0)[i]) + std::norm(f.component(1)[i]) + std::norm(f.component(2)[i]);
  };
  auto beyond = [](const Vec3& v, double limit) {
    return std::abs(v[0]) > limit || std::abs(v[1]) > limit || std::abs(v[2]) > limit;
  };
  const Mat3 wt = w.transpose();
  const Mat3 winv = w.inverse();
  double f_total = 0.0, f_out = 0.0, p_total = 0.0, p_out = 0.0;
  for (std::size_t i = 0; i < spec.points(); ++i) {
    const double ef = energy(fourier, i);
    f_total += ef;
    if (ef > 0.0 && beyond(wt * spec.frequency_vector(i), spec.nyquist())) f_out += ef;
    const double ep = energy(physical, i);
    p_total += ep;
    if (ep > 0.0 && beyond(winv * spec.position(i), 0.5 * spec.box_length)) p_out += ep;
  }
  ResolutionReport out;
  if (f_total > 0.0) out.spectral_leakage = std::sqrt(f_out / f_total);
  if (p_total > 0.0) out.spatial_leakage = std::sqrt(p_out / p_total);
  return out;
}

namespace detail {

inline void check_time(double t, const EvolverConfig& cfg) {
  if (!std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "time must be finite");
  if (std::abs(t) > cfg.clamp_time) {
    std::ostringstream os;
    os << "|t| = " << std::abs(t) << " exceeds clamp_time " << cfg.clamp_time;
    throw Error(ErrorCode::TimeClamp, os.str());
  }
}

inline void check_resolution(const GridField& physical, const GridField& fourier, const Mat3& w, double t,
                             const EvolverConfig& cfg) {
  const ResolutionReport r = resolution_report(physical, fourier, w);
  if (r.ok(cfg.wrap_tolerance)) return;
  std::ostringstream os;
  os.precision(6);
  os << "t = " << t << " is not resolvable on this grid:";
  if (r.spectral_leakage > cfg.wrap_tolerance)
    os << " the flow stretches frequencies past the Nyquist frequency n/(2L) = " << physical.spec().nyquist()
       << " (relative leakage " << r.spectral_leakage << ");";
  if (r.spatial_leakage > cfg.wrap_tolerance)
    os << " warped support leaves the periodic box (relative leakage " << r.spatial_leakage << ");";
  os << " reduce |t|, refine the grid or enlarge the box";
  throw Error(ErrorCode::TimeClamp, os.str());
}

/// Value factor, physical warp W and Fourier-side warp V = W^{-T} of one solution operator.
struct Frame {
  Mat3 factor;
  Mat3 w;
  Mat3 v;
};

inline Frame frame(const LinearisedModel& model, double t, Direction d) {
  if (d == Direction::Forward) return {model.exp_transpose(-t), model.exp(-t), model.exp_transpose(t)};
  return {model.exp(-t), model.exp(t), model.exp_transpose(-t)};
}

/// Direction of the lattice multiplier table needed by `propagate`: on the spectral path the
/// multiplier is evaluated at the warped frequency, which swaps M~ and M-bar.
inline Direction table_direction(Direction d, Interpolation interp) {
  if (interp == Interpolation::Trilinear) return d;
  return d == Direction::Forward ? Direction::Adjoint : Direction::Forward;
}

inline GridField propagate(GridField fourier, const std::vector<double>& multipliers, const Frame& fr,
                           Interpolation interp, bool conservative) {
  auto multiply = [&](GridField& f) {
    for (auto& comp : f.components())
      for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= multipliers[i];
  };
  GridField out;
  if (interp == Interpolation::SpectralResample) {
    fourier_pullback(fourier, fr.v);
    multiply(fourier);
    fourier.apply_matrix(fr.factor);
    out = fourier.to_physical();
  } else {
    multiply(fourier);
    out = fourier.to_physical();
    out.apply_matrix(fr.factor);
    pullback(out, fr.w, interp);
  }
  out.set_conservative(conservative);
  return out;
}

inline GridField evolve_field(const LinearisedModel& model, double t, const GridField& field, const EvolverConfig& cfg,
                              Direction d) {
  cfg.validate();
  field.require(Representation::Physical);
  check_time(t, cfg);
  if (t == 0.0) return field;
  const Frame fr = frame(model, t, d);
  GridField fourier = field.to_fourier();
  check_resolution(field, fourier, fr.w, t, cfg);
  const SymbolEvaluator ev(model, cfg.quadrature);
  const auto table = multiplier_table(ev, field.spec(), t, table_direction(d, cfg.interpolation));
  return propagate(std::move(fourier), table, fr, cfg.interpolation, field.conservative());
}

/// IFFT of (2 pi i xi_axis) f^, with the Nyquist derivative set to zero.
inline GridField::Component spectral_derivative(const GridSpec& spec, const GridField::Component& fhat, int axis) {
  GridField::Component out(fhat.size());
  for (std::size_t lin = 0; lin < fhat.size(); ++lin) {
    const int idx = spec.unravel(lin)[axis];
    out[lin] = spec.is_nyquist(idx) ? cplx{} : cplx{0.0, 2.0 * std::numbers::pi * spec.frequency(idx)} * fhat[lin];
  }
  GridField::inverse_transform(spec, out);
  return out;
}

}  // namespace detail

/// Solution operator G(t) of the linearised problem.
inline GridField apply_G(const LinearisedModel& model, double t, const GridField& field, const EvolverConfig& cfg = {}) {
  return detail::evolve_field(model, t, field, cfg, Direction::Forward);
}

/// Adjoint solution operator F(t) = G(t)'.
inline GridField apply_F(const LinearisedModel& model, double t, const GridField& field, const EvolverConfig& cfg = {}) {
  return detail::evolve_field(model, t, field, cfg, Direction::Adjoint);
}

/// G(t) with the multiplier integrated per mode by RK4 instead of quadrature.
inline GridField oracle_evolve(const LinearisedModel& model, double t, const GridField& field, double h,
                               const EvolverConfig& cfg = {}) {
  cfg.validate();
  field.require(Representation::Physical);
  detail::check_time(t, cfg);
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "RK4 step must be positive");
  if (t == 0.0) return field;
  const detail::Frame fr = detail::frame(model, t, Direction::Forward);
  GridField fourier = field.to_fourier();
  detail::check_resolution(field, fourier, fr.w, t, cfg);
  const Mat3 lattice_frame = cfg.interpolation == Interpolation::SpectralResample ? fr.v : Mat3::identity();
  return detail::propagate(std::move(fourier), rk4_multiplier_table(model, field.spec(), t, h, lattice_frame), fr,
                           cfg.interpolation, field.conservative());
}

/// L phi = -(F x . grad) phi - F^T phi + F^{-1}[m phi^].
inline GridField apply_L(const LinearisedModel& model, const GridField& field) {
  field.require(Representation::Physical);
  const GridSpec& spec = field.spec();
  const GridField fourier = field.to_fourier();
  const std::vector<double> m = mode_table(spec, [&](const Vec3& xi) { return model.m(xi); });
  const Mat3& f = model.flow();
  const Mat3& ft = model.flow_transpose();
  GridField out(spec, Representation::Physical);
  for (int c = 0; c < 3; ++c) {
    GridField::Component term = fourier.component(c);
    for (std::size_t i = 0; i < term.size(); ++i) term[i] *= m[i];
    GridField::inverse_transform(spec, term);
    auto& dst = out.component(c);
    for (std::size_t i = 0; i < term.size(); ++i) {
      dst[i] = term[i];
      for (int q = 0; q < 3; ++q) dst[i] -= ft(c, q) * field.component(q)[i];
    }
    for (int axis = 0; axis < 3; ++axis) {
      const GridField::Component deriv = detail::spectral_derivative(spec, fourier.component(c), axis);
      for (std::size_t i = 0; i < deriv.size(); ++i) {
        const Vec3 x = spec.position(i);
        const double u = f(axis, 0) * x[0] + f(axis, 1) * x[1] + f(axis, 2) * x[2];
        dst[i] -= u * deriv[i];
      }
    }
  }
  out.set_conservative(field.conservative());
  return out;
}

/// Samples fn(x) at the grid points.
template <class Fn>
GridField::Component sample_scalar(const GridSpec& spec, Fn&& fn) {
  spec.validate();
  GridField::Component out(spec.points());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(spec.position(i));
  return out;
}

/// grad f from Fourier-space scalar data f^ (continuous-transform normalisation); flagged conservative.
inline GridField gradient_field(const GridSpec& spec, const GridField::Component& fhat) {
  spec.validate();
  if (fhat.size() != spec.points()) throw Error(ErrorCode::InvalidArgument, "scalar data does not match the grid");
  GridField out(spec, Representation::Physical);
  for (int axis = 0; axis < 3; ++axis) out.component(axis) = detail::spectral_derivative(spec, fhat, axis);
  out.set_conservative(true);
  return out;
}

/// grad f from physical-space scalar samples.
inline GridField gradient_of(const GridSpec& spec, GridField::Component f) {
  spec.validate();
  if (f.size() != spec.points()) throw Error(ErrorCode::InvalidArgument, "scalar data does not match the grid");
  GridField::forward_transform(spec, f);
  return gradient_field(spec, f);
}

/// max over the grid of |curl phi|, derivatives taken spectrally.
inline double curl_norm(const GridField& field) {
  field.require(Representation::Physical);
  const GridSpec& spec = field.spec();
  const GridField fourier = field.to_fourier();
  // d_j phi_c for the six off-diagonal pairs.
  auto d = [&](int j, int c) { return detail::spectral_derivative(spec, fourier.component(c), j); };
  const auto d1p2 = d(1, 2), d2p1 = d(2, 1), d2p0 = d(2, 0), d0p2 = d(0, 2), d0p1 = d(0, 1), d1p0 = d(1, 0);
  double peak = 0.0;
  for (std::size_t i = 0; i < spec.points(); ++i) {
    const double s = std::norm(d1p2[i] - d2p1[i]) + std::norm(d2p0[i] - d0p2[i]) + std::norm(d0p1[i] - d1p0[i]);
    peak = std::max(peak, s);
  }
  return std::sqrt(peak);
}

inline GridField::Component gaussian(const GridSpec& spec, const Vec3& center, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "Gaussian width must be positive");
  return sample_scalar(spec, [&](const Vec3& x) {
    const Vec3 r = x - center;
    return cplx{std::exp(-dot(r, r) / (2.0 * sigma * sigma)), 0.0};
  });
}

/// (-sigma^2 Laplacian)^order applied to a Gaussian. The spectrum vanishes like |xi|^{2 order} at the
/// origin, which keeps the evolved field's algebraic tails (the multipliers are discontinuous at
/// xi = 0) well below the box edge.
inline GridField::Component bandpass_gaussian(const GridSpec& spec, const Vec3& center, double sigma, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "band-pass order must be >= 0");
  GridField::Component g = gaussian(spec, center, sigma);
  if (order == 0) return g;
  GridField::forward_transform(spec, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 xi = spec.frequency_vector(i);
    g[i] *= std::pow(4.0 * std::numbers::pi * std::numbers::pi * sigma * sigma * dot(xi, xi), order);
  }
  GridField::inverse_transform(spec, g);
  return g;
}

/// Gradient of a band-pass Gaussian; flagged conservative.
inline GridField gaussian_gradient_field(const GridSpec& spec, double sigma, int order = 0, const Vec3& center = {}) {
  return gradient_of(spec, bandpass_gaussian(spec, center, sigma, order));
}

/// Sum of `count` band-pass Gaussian bumps with random complex vector amplitudes and centres drawn
/// with standard deviation `spread`.
inline GridField random_smooth_field(const GridSpec& spec, std::uint64_t seed, double sigma, int order = 0, int count = 3,
                                     double spread = 0.5) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  GridField out(spec, Representation::Physical);
  for (int b = 0; b < count; ++b) {
    const Vec3 center{spread * gauss(rng), spread * gauss(rng), spread * gauss(rng)};
    std::array<cplx, 3> amp{};
    for (auto& a : amp) a = {gauss(rng), gauss(rng)};
    const auto bump = bandpass_gaussian(spec, center, sigma, order);
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < bump.size(); ++i) out.component(c)[i] += amp[c] * bump[i];
  }
  return out;
}

/// a0 k0 e^{2 pi i k0.x} with k0 = wavenumbers / L on the lattice.
inline GridField plane_wave_field(const GridSpec& spec, double a0, const std::array<int, 3>& wavenumbers) {
  spec.validate();
  for (int w : wavenumbers)
    if (w < -spec.n / 2 || w >= spec.n / 2) throw Error(ErrorCode::InvalidArgument, "wavenumber outside the lattice");
  const Vec3 k{wavenumbers[0] / spec.box_length, wavenumbers[1] / spec.box_length, wavenumbers[2] / spec.box_length};
  GridField out(spec, Representation::Physical);
  for (std::size_t i = 0; i < spec.points(); ++i) {
    const cplx phase = std::polar(a0, 2.0 * std::numbers::pi * dot(k, spec.position(i)));
    out.set(i, {phase * k[0], phase * k[1], phase * k[2]});
  }
  return out;
}

}  // namespace lsg
