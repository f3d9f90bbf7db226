#pragma once

// Binary field files and CSV slice export.
//
// Layout (all little-endian): "GFLD", u32 version = 1, u32 n, f64 L, u32 rep (0 physical,
// 1 Fourier), then n^3 points in x-fastest order, each point holding its three components as
// (re, im) f64 pairs.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "lsg/error.hpp"
#include "lsg/grid.hpp"

namespace lsg {

inline constexpr std::uint32_t kFieldFormatVersion = 1;

namespace detail {

template <class T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <class T>
void put(std::ostream& os, T v) {
  const T le = byteswap_if_big(v);
  os.write(reinterpret_cast<const char*>(&le), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error(ErrorCode::Io, "truncated field file");
  return byteswap_if_big(v);
}

}  // namespace detail

inline void write_field(std::ostream& os, const GridField& field) {
  const GridSpec& spec = field.spec();
  os.write("GFLD", 4);
  detail::put<std::uint32_t>(os, kFieldFormatVersion);
  detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(spec.n));
  detail::put<double>(os, spec.box_length);
  detail::put<std::uint32_t>(os, field.rep() == Representation::Physical ? 0u : 1u);
  for (std::size_t i = 0; i < spec.points(); ++i)
    for (int c = 0; c < 3; ++c) {
      detail::put<double>(os, field.component(c)[i].real());
      detail::put<double>(os, field.component(c)[i].imag());
    }
  if (!os) throw Error(ErrorCode::Io, "failed to write field");
}

inline GridField read_field(std::istream& is) {
  char magic[4]{};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "GFLD", 4) != 0) throw Error(ErrorCode::Io, "not a field file (bad magic)");
  const auto version = detail::get<std::uint32_t>(is);
  if (version != kFieldFormatVersion)
    throw Error(ErrorCode::Io, "unsupported field file version " + std::to_string(version));
  GridSpec spec;
  spec.n = static_cast<int>(detail::get<std::uint32_t>(is));
  spec.box_length = detail::get<double>(is);
  const auto rep = detail::get<std::uint32_t>(is);
  if (rep > 1) throw Error(ErrorCode::Io, "invalid representation flag " + std::to_string(rep));
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Io, std::string("invalid grid in field file: ") + e.what());
  }
  GridField field(spec, rep == 0 ? Representation::Physical : Representation::Fourier);
  for (std::size_t i = 0; i < spec.points(); ++i)
    for (int c = 0; c < 3; ++c) {
      const double re = detail::get<double>(is);
      const double im = detail::get<double>(is);
      field.component(c)[i] = {re, im};
    }
  return field;
}

inline void save_field(const std::string& path, const GridField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_field(os, field);
}

inline GridField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return read_field(is);
}

/// Plane `index` normal to `axis` as CSV: the two in-plane coordinates (positions, or frequencies
/// for Fourier data), then re/im of each component and the vector magnitude.
inline void write_slice_csv(std::ostream& os, const GridField& field, int axis, int index) {
  const GridSpec& spec = field.spec();
  if (axis < 0 || axis > 2) throw Error(ErrorCode::InvalidArgument, "slice axis must be 0, 1 or 2");
  if (index < 0 || index >= spec.n) throw Error(ErrorCode::InvalidArgument, "slice index outside the grid");
  const bool fourier = field.rep() == Representation::Fourier;
  auto coord = [&](int j) { return fourier ? spec.frequency(j) : spec.coordinate(j); };
  const int ua = axis == 0 ? 1 : 0;
  const int va = axis == 2 ? 1 : 2;
  const auto old = os.precision(17);
  os << "u,v,re0,im0,re1,im1,re2,im2,magnitude\n";
  for (int b = 0; b < spec.n; ++b)
    for (int a = 0; a < spec.n; ++a) {
      std::array<int, 3> idx{};
      idx[axis] = index;
      idx[ua] = a;
      idx[va] = b;
      const auto v = field.at(spec.index(idx[0], idx[1], idx[2]));
      os << coord(a) << ',' << coord(b);
      double mag = 0.0;
      for (const auto& z : v) {
        os << ',' << z.real() << ',' << z.imag();
        mag += std::norm(z);
      }
      os << ',' << std::sqrt(mag) << '\n';
    }
  os.precision(old);
}

}  // namespace lsg
