#pragma once

// Periodic N^3 grids on the box [-L/2, L/2)^3 carrying complex 3-vector fields.
//
// Fourier data is stored as the Riemann-sum approximation of the continuous transform
// F[phi](xi) = int phi(x) e^{-2 pi i xi.x} dx at the lattice xi_k = k / L, k in [-n/2, n/2).

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "lsg/error.hpp"
#include "lsg/linalg.hpp"

namespace lsg {

using cplx = std::complex<double>;

struct GridSpec {
  int n = 64;
  double box_length = 16.0 * std::numbers::pi;

  void validate() const {
    if (n < 8 || (n & (n - 1)) != 0) throw Error(ErrorCode::InvalidArgument, "grid size must be a power of two >= 8");
    if (!(box_length > 0.0) || !std::isfinite(box_length))
      throw Error(ErrorCode::InvalidArgument, "box length must be positive");
  }

  double spacing() const { return box_length / n; }
  std::size_t points() const { return static_cast<std::size_t>(n) * n * n; }
  double cell_volume() const {
    const double h = spacing();
    return h * h * h;
  }
  /// Physical coordinate of grid index j (the origin sits at index n/2).
  double coordinate(int j) const { return (j - n / 2) * spacing(); }
  /// Signed integer wavenumber of FFT index idx.
  int wavenumber(int idx) const { return idx < n / 2 ? idx : idx - n; }
  double frequency(int idx) const { return wavenumber(idx) / box_length; }
  double nyquist() const { return 0.5 * n / box_length; }

  /// x-fastest linear index.
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n) * k);
  }
  std::array<int, 3> unravel(std::size_t lin) const {
    const auto nn = static_cast<std::size_t>(n);
    return {static_cast<int>(lin % nn), static_cast<int>((lin / nn) % nn), static_cast<int>(lin / (nn * nn))};
  }
  Vec3 position(std::size_t lin) const {
    const auto [i, j, k] = unravel(lin);
    return {coordinate(i), coordinate(j), coordinate(k)};
  }
  Vec3 frequency_vector(std::size_t lin) const {
    const auto [i, j, k] = unravel(lin);
    return {frequency(i), frequency(j), frequency(k)};
  }
  bool is_nyquist(int idx) const { return idx == n / 2; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Thin RAII wrapper over FFTW's in-place complex transforms.
class Fft {
 private:
  class Plan {
   public:
    Plan() = default;
    explicit Plan(fftw_plan p) : p_(p) {
      if (!p_) throw Error(ErrorCode::InvalidArgument, "FFTW planning failed");
    }
    Plan(Plan&& o) noexcept : p_(std::exchange(o.p_, nullptr)) {}
    Plan& operator=(Plan&& o) noexcept {
      std::swap(p_, o.p_);
      return *this;
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan() {
      if (p_) fftw_destroy_plan(p_);
    }
    fftw_plan get() const { return p_; }

   private:
    fftw_plan p_ = nullptr;
  };

 public:
  /// In-place unnormalised 3D DFT over an n^3 array (x fastest).
  static void transform3d(std::span<cplx> data, int n, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    Plan plan(fftw_plan_dft_3d(n, n, n, p, p, sign, FFTW_ESTIMATE));
    fftw_execute(plan.get());
  }

  /// Reusable 1D DFT of length n.
  class Lines {
   public:
    Lines(int n, int sign) : buf_(static_cast<std::size_t>(n)) {
      auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
      plan_ = Plan(fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE));
    }
    /// Transforms `line` (length n) in place.
    void operator()(std::span<cplx> line) {
      std::copy(line.begin(), line.end(), buf_.begin());
      fftw_execute(plan_.get());
      std::copy(buf_.begin(), buf_.end(), line.begin());
    }

   private:
    std::vector<cplx> buf_;
    Plan plan_;
  };
};

enum class Representation { Physical, Fourier };

/// Complex 3-component vector field sampled on a periodic grid.
class GridField {
 public:
  using Component = std::vector<cplx>;

  GridField() = default;
  GridField(const GridSpec& spec, Representation rep) : spec_(spec), rep_(rep) {
    spec_.validate();
    for (auto& c : data_) c.assign(spec_.points(), cplx{});
  }

  const GridSpec& spec() const { return spec_; }
  Representation rep() const { return rep_; }
  void set_rep(Representation rep) { rep_ = rep; }

  /// Set by gradient constructors and carried through the evolution operators.
  bool conservative() const { return conservative_; }
  void set_conservative(bool c) { conservative_ = c; }

  Component& component(int c) { return data_[static_cast<std::size_t>(c)]; }
  const Component& component(int c) const { return data_[static_cast<std::size_t>(c)]; }
  std::array<Component, 3>& components() { return data_; }
  const std::array<Component, 3>& components() const { return data_; }

  std::array<cplx, 3> at(std::size_t lin) const { return {data_[0][lin], data_[1][lin], data_[2][lin]}; }
  void set(std::size_t lin, const std::array<cplx, 3>& v) {
    for (int c = 0; c < 3; ++c) data_[static_cast<std::size_t>(c)][lin] = v[static_cast<std::size_t>(c)];
  }

  GridField to_fourier() const {
    require(Representation::Physical);
    GridField out = *this;
    for (auto& c : out.data_) forward_transform(spec_, c);
    out.rep_ = Representation::Fourier;
    return out;
  }

  GridField to_physical() const {
    require(Representation::Fourier);
    GridField out = *this;
    for (auto& c : out.data_) inverse_transform(spec_, c);
    out.rep_ = Representation::Physical;
    return out;
  }

  void require(Representation rep) const {
    if (rep_ != rep)
      throw Error(ErrorCode::RepMismatch,
                  rep == Representation::Physical ? "field must be in physical representation"
                                                  : "field must be in Fourier representation");
  }

  /// Physical rep: forward transform with the continuous-transform normalisation.
  static void forward_transform(const GridSpec& spec, Component& c) {
    Fft::transform3d(c, spec.n, FFTW_FORWARD);
    apply_phase(spec, c, spec.cell_volume());
  }
  static void inverse_transform(const GridSpec& spec, Component& c) {
    const double l = spec.box_length;
    apply_phase(spec, c, 1.0 / (l * l * l));
    Fft::transform3d(c, spec.n, FFTW_BACKWARD);
  }

  /// Discrete L2 inner product h^3 sum u . conj(v) (physical rep).
  friend cplx inner(const GridField& u, const GridField& v) {
    u.require(Representation::Physical);
    v.require(Representation::Physical);
    cplx s{};
    for (int c = 0; c < 3; ++c) {
      const auto& a = u.component(c);
      const auto& b = v.component(c);
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    }
    return s * u.spec().cell_volume();
  }

  double l2_norm() const { return std::sqrt(std::max(0.0, inner(*this, *this).real())); }

  /// max over grid points of the Euclidean norm of the 3-vector.
  double max_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < spec_.points(); ++i) {
      const double s = std::norm(data_[0][i]) + std::norm(data_[1][i]) + std::norm(data_[2][i]);
      m = std::max(m, s);
    }
    return std::sqrt(m);
  }

  GridField& operator+=(const GridField& o) {
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < spec_.points(); ++i) component(c)[i] += o.component(c)[i];
    return *this;
  }
  GridField& operator-=(const GridField& o) {
    for (int c = 0; c < 3; ++c)
      for (std::size_t i = 0; i < spec_.points(); ++i) component(c)[i] -= o.component(c)[i];
    return *this;
  }
  GridField& operator*=(cplx s) {
    for (auto& comp : data_)
      for (auto& x : comp) x *= s;
    return *this;
  }
  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(cplx s, GridField a) { return a *= s; }

  /// Left-multiplies every point value by a constant real matrix.
  void apply_matrix(const Mat3& m) {
    for (std::size_t i = 0; i < spec_.points(); ++i) {
      const auto v = at(i);
      std::array<cplx, 3> w{};
      for (int r = 0; r < 3; ++r) w[r] = m(r, 0) * v[0] + m(r, 1) * v[1] + m(r, 2) * v[2];
      set(i, w);
    }
  }

  /// Real part in physical space; equivalently a Hermitian-symmetrised spectrum.
  GridField real_part() const {
    require(Representation::Physical);
    GridField out = *this;
    for (auto& comp : out.data_)
      for (auto& x : comp) x = {x.real(), 0.0};
    return out;
  }

 private:
  // (-1)^{k1+k2+k3} accounts for the origin sitting at index n/2.
  static void apply_phase(const GridSpec& spec, Component& c, double scale) {
    for (std::size_t lin = 0; lin < c.size(); ++lin) {
      const auto [i, j, k] = spec.unravel(lin);
      const int parity = (spec.wavenumber(i) + spec.wavenumber(j) + spec.wavenumber(k)) & 1;
      c[lin] *= parity ? -scale : scale;
    }
  }

  GridSpec spec_;
  Representation rep_ = Representation::Physical;
  bool conservative_ = false;
  std::array<Component, 3> data_;
};

}  // namespace lsg
