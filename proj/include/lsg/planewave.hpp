#pragma once

// Plane-wave solutions phi(x,t) = a(t) k(t) exp(2 pi i k(t).x) with a' = m(k) a, k' = -F^T k,
// and the plane-wave stability verdict built on them.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "lsg/error.hpp"
#include "lsg/linalg.hpp"
#include "lsg/symbols.hpp"

namespace lsg {

struct PlaneWave {
  double a0 = 1.0;
  Vec3 k0{1.0, 0.0, 0.0};

  void validate() const {
    if (!std::isfinite(a0) || a0 == 0.0) throw Error(ErrorCode::InvalidArgument, "plane-wave amplitude must be nonzero");
    if (!(norm(k0) > 0.0) || !std::isfinite(norm(k0)))
      throw Error(ErrorCode::InvalidArgument, "plane-wave frequency must be a nonzero finite vector");
  }
};

struct PlaneWaveState {
  double t = 0.0;
  double a_t = 0.0;
  Vec3 k_t{};
  double sup_norm = 0.0;
};

inline PlaneWaveState make_state(double t, double a, const Vec3& k) { return {t, a, k, std::abs(a) * norm(k)}; }

/// Closed-form evolution: a(t) = a0 M~(t; k0), k(t) = e^{-tF^T} k0.
inline PlaneWaveState evolve(const SymbolEvaluator& ev, const PlaneWave& pw, double t) {
  pw.validate();
  const Vec3 k = ev.model().exp_transpose(-t) * pw.k0;
  return make_state(t, pw.a0 * ev.M_tilde(t, pw.k0), k);
}

/// Classical RK4 on the coupled system a' = m(k) a, k' = -F^T k; the last step is shortened to land on t.
inline PlaneWaveState evolve_ode(const SymbolEvaluator& ev, const PlaneWave& pw, double t, double h) {
  pw.validate();
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "RK4 step must be positive");
  const Mat3& ft = ev.model().flow_transpose();
  double a = pw.a0;
  Vec3 k = pw.k0;
  const double dir = t >= 0.0 ? 1.0 : -1.0;
  const long steps = static_cast<long>(std::ceil(std::abs(t) / h - 1e-9));
  double done = 0.0;
  for (long s = 0; s < steps; ++s) {
    const double dt = dir * std::min(h, std::abs(t) - done);
    auto rhs_k = [&](const Vec3& kk) { return -(ft * kk); };
    const Vec3 k1 = rhs_k(k);
    const double a1 = ev.m(k) * a;
    const Vec3 kb = k + (0.5 * dt) * k1;
    const double ab = a + 0.5 * dt * a1;
    const Vec3 k2 = rhs_k(kb);
    const double a2 = ev.m(kb) * ab;
    const Vec3 kc = k + (0.5 * dt) * k2;
    const double ac = a + 0.5 * dt * a2;
    const Vec3 k3 = rhs_k(kc);
    const double a3 = ev.m(kc) * ac;
    const Vec3 kd = k + dt * k3;
    const double ad = a + dt * a3;
    const Vec3 k4 = rhs_k(kd);
    const double a4 = ev.m(kd) * ad;
    k = k + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    a += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    done += std::abs(dt);
  }
  return make_state(t, a, k);
}

/// States at each requested time. The amplitude integral is accumulated segment by segment in the
/// order given, so long sampled horizons cost one short quadrature per sample.
inline std::vector<PlaneWaveState> trajectory(const SymbolEvaluator& ev, const PlaneWave& pw, std::span<const double> times) {
  pw.validate();
  std::vector<PlaneWaveState> out;
  out.reserve(times.size());
  const auto& model = ev.model();
  auto integrand = [&](double r) { return model.m(model.exp_transpose(-r) * pw.k0); };
  const bool constant_symbol = model.multiplier_degenerate() || ev.is_flow_eigenvector(pw.k0);
  double log_a = 0.0;
  double prev = 0.0;
  for (double t : times) {
    if (constant_symbol) {
      log_a = model.multiplier_degenerate() ? 0.0 : t * model.m(pw.k0);
    } else if (t != prev) {
      log_a += integrate_adaptive(integrand, prev, t, ev.quadrature()).value;
    }
    prev = t;
    out.push_back(make_state(t, pw.a0 * std::exp(log_a), model.exp_transpose(-t) * pw.k0));
  }
  return out;
}

/// int_0^tau m(k(r)) dr over one elliptic period; zero in exact arithmetic.
inline double period_integral(const SymbolEvaluator& ev, const Vec3& k0) {
  const auto& model = ev.model();
  if (model.regime() != Regime::EllipticMinus)
    throw Error(ErrorCode::NotElliptic, "period integral requires an elliptic flow (mu < 0)");
  if (!(norm(k0) > 0.0)) throw Error(ErrorCode::InvalidArgument, "k0 must be nonzero");
  if (model.multiplier_degenerate()) return 0.0;
  auto integrand = [&](double r) { return model.m(model.exp_transpose(-r) * k0); };
  return integrate_adaptive(integrand, 0.0, model.period(), ev.quadrature()).value;
}

/// Unit real eigenvector of the 3x3 matrix for a real simple eigenvalue: the largest cross product
/// of two rows of (M - nu I); inverse iteration when the rows are nearly parallel.
inline Vec3 real_eigenvector(const Mat3& m, double nu) {
  Mat3 shifted = m;
  for (int i = 0; i < 3; ++i) shifted(i, i) -= nu;
  Vec3 best{};
  double best_norm = 0.0;
  for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}}) {
    const Vec3 c = cross(shifted.row(i), shifted.row(j));
    const double n = norm(c);
    if (n > best_norm) {
      best_norm = n;
      best = c;
    }
  }
  const double scale = std::max(1e-300, shifted.max_abs());
  if (best_norm > 1e-8 * scale * scale) return (1.0 / best_norm) * best;
  Mat3 perturbed = m;
  const double delta = 1e-10 * std::max(1.0, m.max_abs());
  for (int i = 0; i < 3; ++i) perturbed(i, i) -= nu + delta;
  const Mat3 inv = perturbed.inverse();
  Vec3 v{1.0, 0.7, 0.3};
  for (int it = 0; it < 8; ++it) {
    v = inv * v;
    v = (1.0 / norm(v)) * v;
  }
  return v;
}

enum class Verdict { StablePlaneWave, UnstablePlaneWave };

inline std::string to_string(Verdict v) { return v == Verdict::StablePlaneWave ? "stable" : "unstable"; }

struct StabilityVerdict {
  Verdict verdict = Verdict::StablePlaneWave;
  /// Exponentially growing plane wave (a0 = 1, |k0| = 1) when unstable.
  std::optional<PlaneWave> witness;
  /// Exponential rate of |a(t)||k(t)| along the witness; 0 when stable.
  double growth_rate = 0.0;
  /// Sup-norm bound over all times for a0 = 1, |k0| = 1 when stable: max_{[0,tau]} |e^{-rF^T}| e^{tau |m|_inf}.
  double bound = 0.0;
  /// Empirical confirmation: horizon scanned and the largest observed sup-norm ratio on it.
  double scan_horizon = 0.0;
  double scan_max_ratio = 0.0;
};

/// max over r in [0, tau] of the spectral norm of e^{-rF^T}.
inline double max_flow_norm_over_period(const LinearisedModel& model, int samples = 2048) {
  const double tau = model.period();
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) best = std::max(best, spectral_norm(model.exp_transpose(-tau * i / samples)));
  return best;
}

/// Per-wave elliptic bound max_{[0,tau]} |k| |a0| e^{tau |m|_inf}.
inline double elliptic_bound(const SymbolEvaluator& ev, const PlaneWave& pw, int samples = 2048) {
  const auto& model = ev.model();
  const double tau = model.period();
  double kmax = 0.0;
  for (int i = 0; i <= samples; ++i) kmax = std::max(kmax, norm(model.exp_transpose(-tau * i / samples) * pw.k0));
  const double m_inf = model.multiplier_degenerate() ? 0.0 : model.symbol_sup();
  return kmax * std::abs(pw.a0) * std::exp(tau * m_inf);
}

inline StabilityVerdict classify_stability(const SymbolEvaluator& ev) {
  const auto& model = ev.model();
  StabilityVerdict out;
  if (model.regime() == Regime::Degenerate)
    throw Error(ErrorCode::DegenerateFlow, model.name() + " discriminant is zero within threshold (mu = " +
                                              std::to_string(model.mu()) + ")");
  if (model.regime() == Regime::HyperbolicPlus) {
    // Along a real eigenvector k of F^T with eigenvalue nu, m~ is constant, so |a||k| ~ e^{(m(k) - nu) t}.
    const double lam = model.lambda();
    double best_rate = -std::numeric_limits<double>::infinity();
    Vec3 best_k{};
    for (double nu : {lam, -lam}) {
      const Vec3 k = real_eigenvector(model.flow_transpose(), nu);
      const double rate = (model.multiplier_degenerate() ? 0.0 : model.m(k)) - nu;
      if (rate > best_rate) {
        best_rate = rate;
        best_k = k;
      }
    }
    out.verdict = Verdict::UnstablePlaneWave;
    out.witness = PlaneWave{1.0, best_k};
    out.growth_rate = best_rate;
    out.scan_horizon = 10.0 / lam;
    const auto s = evolve(ev, *out.witness, out.scan_horizon);
    out.scan_max_ratio = s.sup_norm / norm(best_k);
    return out;
  }
  out.verdict = Verdict::StablePlaneWave;
  const double tau = model.period();
  const double m_inf = model.multiplier_degenerate() ? 0.0 : model.symbol_sup();
  out.bound = max_flow_norm_over_period(model) * std::exp(tau * m_inf);
  out.scan_horizon = 50.0 * tau;
  std::vector<double> times(2000);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = out.scan_horizon * (i + 1) / times.size();
  for (const Vec3& k0 : {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}, Vec3{1, 1, 1}}) {
    const PlaneWave pw{1.0, (1.0 / norm(k0)) * k0};
    for (const auto& s : trajectory(ev, pw, times)) out.scan_max_ratio = std::max(out.scan_max_ratio, s.sup_norm);
  }
  return out;
}

/// CSV with columns t,a_t,k1,k2,k3,sup_norm at 17 significant digits.
inline void write_trajectory_csv(std::ostream& os, std::span<const PlaneWaveState> states) {
  const auto old_precision = os.precision(17);
  os << "t,a_t,k1,k2,k3,sup_norm\n";
  for (const auto& s : states)
    os << s.t << ',' << s.a_t << ',' << s.k_t[0] << ',' << s.k_t[1] << ',' << s.k_t[2] << ',' << s.sup_norm << '\n';
  os.precision(old_precision);
}

}  // namespace lsg
