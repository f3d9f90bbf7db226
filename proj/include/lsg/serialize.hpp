#pragma once

// JSON and CSV renderings of reports. Doubles in JSON use the shortest representation that
// round-trips; CSV columns are written with 17 significant digits.

#include <nlohmann/json.hpp>

#include <fstream>
#include <ostream>
#include <string>

#include "lsg/error.hpp"
#include "lsg/geometry.hpp"
#include "lsg/planewave.hpp"
#include "lsg/qg.hpp"

namespace lsg {

using json = nlohmann::ordered_json;

inline json to_json(const SymPosDef3::Coefficients& k) {
  return {{"a", k[0]}, {"b", k[1]}, {"c", k[2]}, {"d", k[3]}, {"e", k[4]}, {"f", k[5]}};
}

inline json to_json(const SymPosDef3& A) { return to_json(A.coefficients()); }

/// Accepts {"a":..,"f":..}, a six-element array, or either of those under a "matrix" key.
inline SymPosDef3::Coefficients coefficients_from_json(const json& j) {
  if (j.is_object() && j.contains("matrix")) return coefficients_from_json(j.at("matrix"));
  SymPosDef3::Coefficients k{};
  try {
    if (j.is_array()) {
      if (j.size() != 6) throw Error(ErrorCode::InvalidArgument, "matrix array must hold six coefficients");
      for (std::size_t i = 0; i < 6; ++i) k[i] = j.at(i).get<double>();
    } else if (j.is_object()) {
      const char* keys[] = {"a", "b", "c", "d", "e", "f"};
      for (const auto& [key, _] : j.items())
        if (key.size() != 1 || key[0] < 'a' || key[0] > 'f')
          throw Error(ErrorCode::InvalidArgument, "unknown matrix key '" + key + "'");
      for (std::size_t i = 0; i < 6; ++i) {
        if (!j.contains(keys[i]))
          throw Error(ErrorCode::InvalidArgument, std::string("matrix is missing coefficient '") + keys[i] + "'");
        k[i] = j.at(keys[i]).get<double>();
      }
    } else {
      throw Error(ErrorCode::InvalidArgument, "matrix must be an object or an array");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad matrix JSON: ") + e.what());
  }
  return k;
}

inline SymPosDef3::Coefficients load_coefficients(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::Io, "cannot open matrix file '" + path + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "matrix file '" + path + "' is not valid JSON: " + e.what());
  }
  return coefficients_from_json(j);
}

inline json to_json(const RegimeReport& r) {
  return {{"matrix", to_json(r.matrix)},
          {"mu_sg", r.mu_sg},
          {"mu_qg", r.mu_qg},
          {"quadrant", r.quadrant()},
          {"regime_sg", to_string(r.regime_sg)},
          {"regime_qg", to_string(r.regime_qg)},
          {"degenerate_sg", r.degenerate_sg()},
          {"degenerate_qg", r.degenerate_qg()},
          {"degenerate_multiplier", r.degenerate_multiplier}};
}

inline json to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

inline json to_json(const StabilityVerdict& v) {
  json j{{"verdict", to_string(v.verdict)}};
  if (v.witness) j["witness"] = {{"a0", v.witness->a0}, {"k0", to_json(v.witness->k0)}};
  j["growth_rate"] = v.growth_rate;
  j["bound"] = v.bound;
  j["scan_horizon"] = v.scan_horizon;
  j["scan_max_ratio"] = v.scan_max_ratio;
  return j;
}

inline void write_histogram_csv(std::ostream& os, const ScanResult& s) {
  os << "quadrant,count\n";
  for (const auto& [q, n] : s.counts) os << q << ',' << n << '\n';
}

inline json scan_to_json(const ScanResult& s, std::uint64_t seed) {
  json pinned = json::array();
  for (const auto& [name, r] : s.pinned) {
    json e = to_json(r);
    e["name"] = name;
    pinned.push_back(std::move(e));
  }
  json counts = json::object();
  for (const auto& [q, n] : s.counts) counts[q] = n;
  json witnesses = json::object();
  for (const auto& [q, r] : s.first_witness) witnesses[q] = to_json(r);
  return {{"seed", seed},
          {"count", s.samples.size()},
          {"histogram", counts},
          {"pinned", pinned},
          {"witnesses", witnesses}};
}

}  // namespace lsg
