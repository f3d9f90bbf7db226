#pragma once

// Command-line front end: option binding, config files and the five subcommands.
//
// Exit codes: 0 ok, 1 input error, 2 degenerate flow, 3 time clamp / unresolvable evolution.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lsg/error.hpp"
#include "lsg/field_io.hpp"
#include "lsg/geometry.hpp"
#include "lsg/grid.hpp"
#include "lsg/planewave.hpp"
#include "lsg/qg.hpp"
#include "lsg/serialize.hpp"
#include "lsg/spectral.hpp"
#include "lsg/symbols.hpp"

namespace lsg::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kDegenerate = 2, kClamp = 3 };

inline int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateFlow: return kDegenerate;
    case ErrorCode::TimeClamp: return kClamp;
    default: return kInputError;
  }
}

struct RunConfig {
  std::string command;

  std::vector<double> matrix;
  std::string matrix_file;
  double bv_frequency = 1.0;
  int grid_n = 64;
  double box_length = 16.0 * std::numbers::pi;
  QuadratureConfig quadrature;
  std::vector<double> times;
  std::uint64_t seed = kDefaultSeed;
  std::string format = "json";
  bool oracle = false;
  double oracle_step = 1e-3;
  std::string out;

  // planewave / evolve
  std::string model = "sg";
  double a0 = 1.0;
  std::vector<double> k0{1.0, 0.0, 0.0};
  bool witness = false;

  // scan
  std::size_t count = 10000;

  // evolve
  std::string initial = "gradient";
  std::string input;
  double sigma = 2.5;
  int bandpass = 3;
  std::vector<int> wavenumbers{1, 0, 0};
  std::string interpolation = "spectral";
  double clamp_time = 10.0;
  double wrap_tolerance = 1e-5;
  std::string field_out;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  bool needs_matrix() const { return command != "scan"; }

  void validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
    if (needs_matrix()) {
      if (matrix.empty() == matrix_file.empty()) fail("exactly one of --matrix or --matrix-file is required");
      if (!matrix.empty() && matrix.size() != 6) fail("--matrix takes six coefficients a,b,c,d,e,f");
    }
    QGParams{bv_frequency}.validate();
    grid().validate();
    quadrature.validate();
    for (double t : times)
      if (!std::isfinite(t)) fail("time points must be finite");
    if ((command == "planewave" || command == "evolve") && times.empty()) fail("--times must list at least one time");
    if (!(oracle_step > 0.0)) fail("--oracle-step must be positive");
    if (k0.size() != 3) fail("--k0 takes three components");
    if (wavenumbers.size() != 3) fail("--wavenumbers takes three integers");
    PlaneWave{a0, {k0[0], k0[1], k0[2]}}.validate();
    if (!(sigma > 0.0)) fail("--sigma must be positive");
    if (bandpass < 0) fail("--bandpass must be >= 0");
    if (initial == "file" && input.empty()) fail("--initial file needs --input");
    evolver().validate();
  }

  SymPosDef3 steady_state() const {
    if (!matrix_file.empty()) return SymPosDef3::from_coefficients(load_coefficients(matrix_file));
    SymPosDef3::Coefficients k{};
    std::copy_n(matrix.begin(), 6, k.begin());
    return SymPosDef3::from_coefficients(k);
  }

  GridSpec grid() const { return {grid_n, box_length}; }
  QGParams qg() const { return {bv_frequency}; }

  EvolverConfig evolver() const {
    return {parse_interpolation(interpolation), quadrature, clamp_time, wrap_tolerance};
  }

  LinearisedModel linearised_model() const {
    const SymPosDef3 A = steady_state();
    return model == "qg" ? qg_model(A, qg()) : sg_model(A);
  }
};

namespace detail {

template <class T>
std::string format_list(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + '"';
}

}  // namespace detail

/// Flat `key = value` block that parses back (via --config) to the same RunConfig.
inline std::string effective_config(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  if (!c.matrix.empty()) os << "matrix = " << detail::format_list(c.matrix) << '\n';
  if (!c.matrix_file.empty()) os << "matrix-file = " << detail::quote(c.matrix_file) << '\n';
  os << "bv-frequency = " << c.bv_frequency << '\n';
  os << "grid-n = " << c.grid_n << '\n';
  os << "box-length = " << c.box_length << '\n';
  os << "abs-tol = " << c.quadrature.abs_tol << '\n';
  os << "rel-tol = " << c.quadrature.rel_tol << '\n';
  os << "max-subdivisions = " << c.quadrature.max_subdivisions << '\n';
  if (!c.times.empty()) os << "times = " << detail::format_list(c.times) << '\n';
  os << "seed = " << c.seed << '\n';
  os << "format = " << detail::quote(c.format) << '\n';
  os << "oracle = " << (c.oracle ? "true" : "false") << '\n';
  os << "oracle-step = " << c.oracle_step << '\n';
  if (!c.out.empty()) os << "out = " << detail::quote(c.out) << '\n';
  os << "model = " << detail::quote(c.model) << '\n';
  os << "a0 = " << c.a0 << '\n';
  os << "k0 = " << detail::format_list(c.k0) << '\n';
  os << "witness = " << (c.witness ? "true" : "false") << '\n';
  os << "count = " << c.count << '\n';
  os << "initial = " << detail::quote(c.initial) << '\n';
  if (!c.input.empty()) os << "input = " << detail::quote(c.input) << '\n';
  os << "sigma = " << c.sigma << '\n';
  os << "bandpass = " << c.bandpass << '\n';
  os << "wavenumbers = " << detail::format_list(c.wavenumbers) << '\n';
  os << "interpolation = " << detail::quote(c.interpolation) << '\n';
  os << "clamp-time = " << c.clamp_time << '\n';
  os << "wrap-tolerance = " << c.wrap_tolerance << '\n';
  if (!c.field_out.empty()) os << "field-out = " << detail::quote(c.field_out) << '\n';
  return os.str();
}

inline const std::vector<std::pair<std::string, std::string>>& subcommands() {
  static const std::vector<std::pair<std::string, std::string>> s{
      {"classify", "SG/QG regime report for one steady state"},
      {"planewave", "plane-wave trajectory and stability verdict"},
      {"evolve", "grid evolution of a vector field"},
      {"scan", "random SPD sampling of the SG x QG quadrants"},
      {"qg-compare", "joint SG/QG stability verdicts for one steady state"},
  };
  return s;
}

/// All options live on the root app; subcommands fall through to it, so config files are flat.
inline std::unique_ptr<CLI::App> make_app(RunConfig& c, bool& print_config) {
  auto app = std::make_unique<CLI::App>("Linearised SG/QG dynamics around quadratic steady states", "lsg");
  app->set_config("--config", "", "flat key = value file; command-line flags override it");
  app->allow_config_extras(false);
  app->require_subcommand(1);
  for (const auto& [name, desc] : subcommands()) app->add_subcommand(name, desc)->fallthrough();

  app->add_option("--matrix", c.matrix, "steady state coefficients a,b,c,d,e,f")->delimiter(',')->expected(6);
  app->add_option("--matrix-file", c.matrix_file, "JSON file with the coefficients");
  app->add_option("--bv-frequency", c.bv_frequency, "Brunt-Vaisala frequency N");
  app->add_option("--grid-n", c.grid_n, "grid points per axis (power of two)");
  app->add_option("--box-length", c.box_length, "periodic box side L");
  app->add_option("--abs-tol", c.quadrature.abs_tol, "quadrature absolute tolerance");
  app->add_option("--rel-tol", c.quadrature.rel_tol, "quadrature relative tolerance");
  app->add_option("--max-subdivisions", c.quadrature.max_subdivisions, "quadrature bisection depth");
  app->add_option("--times", c.times, "time points t1,t2,...")->delimiter(',');
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_flag("--oracle", c.oracle, "cross-check against RK4");
  app->add_option("--oracle-step", c.oracle_step, "RK4 step for --oracle");
  app->add_option("--out", c.out, "output path (default stdout)");
  app->add_option("--model", c.model, "sg or qg")->check(CLI::IsMember({"sg", "qg"}));
  app->add_option("--a0", c.a0, "plane-wave amplitude");
  app->add_option("--k0", c.k0, "plane-wave frequency k1,k2,k3")->delimiter(',')->expected(3);
  app->add_flag("--witness", c.witness, "start the plane wave from the stability witness");
  app->add_option("--count", c.count, "number of random samples");
  app->add_option("--initial", c.initial, "gradient, gaussian, planewave or file")
      ->check(CLI::IsMember({"gradient", "gaussian", "planewave", "file"}));
  app->add_option("--input", c.input, "initial field file (GFLD)");
  app->add_option("--sigma", c.sigma, "Gaussian width");
  app->add_option("--bandpass", c.bandpass, "band-pass order p of (-sigma^2 Laplacian)^p");
  app->add_option("--wavenumbers", c.wavenumbers, "lattice wavenumbers of the plane-wave field")
      ->delimiter(',')
      ->expected(3);
  app->add_option("--interpolation", c.interpolation, "spectral or trilinear")
      ->check(CLI::IsMember({"spectral", "trilinear"}));
  app->add_option("--clamp-time", c.clamp_time, "largest |t| accepted by the evolver");
  app->add_option("--wrap-tolerance", c.wrap_tolerance, "largest relative leakage past Nyquist or the box");
  app->add_option("--field-out", c.field_out, "prefix for evolved field files");
  app->add_flag("--print-config", print_config, "print the effective config and exit")->configurable(false);
  return app;
}

struct ParseOutcome {
  RunConfig config;
  bool print_config = false;
  /// Set when parsing already decided the exit status (help or a usage error).
  std::optional<int> exit;
};

inline ParseOutcome parse_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ParseOutcome r;
  auto app = make_app(r.config, r.print_config);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app->parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app->exit(e, out, err);
    r.exit = code == 0 ? kOk : kInputError;
    return r;
  }
  r.config.command = app->get_subcommands().front()->get_name();
  return r;
}

namespace detail {

inline json config_json(const RunConfig& c) { return effective_config(c); }

inline json model_summary(const LinearisedModel& m) {
  json j{{"regime", to_string(m.regime())}, {"mu", m.mu()}, {"lambda_sq", m.lambda_sq()}};
  j["multiplier_degenerate"] = m.multiplier_degenerate();
  j["symbol_sup"] = m.multiplier_degenerate() ? 0.0 : m.symbol_sup();
  return j;
}

inline int cmd_classify(const RunConfig& c, std::ostream& os, std::ostream& err) {
  const RegimeReport r = regime_report(c.steady_state(), c.qg());
  if (c.format == "csv") {
    os.precision(17);
    os << "a,b,c,d,e,f,mu_sg,mu_qg,quadrant,regime_sg,regime_qg,degenerate_multiplier\n";
    for (double k : r.matrix.coefficients()) os << k << ',';
    os << r.mu_sg << ',' << r.mu_qg << ',' << r.quadrant() << ',' << to_string(r.regime_sg) << ','
       << to_string(r.regime_qg) << ',' << (r.degenerate_multiplier ? "true" : "false") << '\n';
  } else {
    json j = to_json(r);
    j["effective_config"] = config_json(c);
    os << j.dump(2) << '\n';
  }
  if (r.degenerate_sg()) {
    err << "degenerate: mu_SG = " << r.mu_sg << " is zero within threshold\n";
    return kDegenerate;
  }
  return kOk;
}

inline int cmd_planewave(const RunConfig& c, std::ostream& os, std::ostream& err) {
  const LinearisedModel model = c.linearised_model();
  if (model.regime() == Regime::Degenerate) {
    err << "degenerate: " << model.name() << " flow has mu = " << model.mu() << " (zero within threshold)\n";
    return kDegenerate;
  }
  const SymbolEvaluator ev(model, c.quadrature);
  const StabilityVerdict verdict = classify_stability(ev);
  PlaneWave pw{c.a0, {c.k0[0], c.k0[1], c.k0[2]}};
  if (c.witness) {
    if (verdict.witness)
      pw.k0 = verdict.witness->k0;
    else
      err << "note: elliptic flow has no growing witness; using --k0\n";
  }
  const auto states = trajectory(ev, pw, c.times);

  std::optional<double> oracle_delta;
  if (c.oracle) {
    // RK4 continued from each sample to the next.
    double worst = 0.0;
    PlaneWave cur = pw;
    double prev = 0.0;
    for (const auto& s : states) {
      const PlaneWaveState o = evolve_ode(ev, cur, s.t - prev, c.oracle_step);
      worst = std::max(worst, std::abs(o.a_t - s.a_t) / std::abs(s.a_t));
      cur = {o.a_t, o.k_t};
      prev = s.t;
    }
    oracle_delta = worst;
  }

  if (c.format == "csv") {
    write_trajectory_csv(os, states);
    os.precision(17);
    os << "# model," << model.name() << '\n';
    os << "# verdict," << to_string(verdict.verdict) << '\n';
    if (verdict.witness)
      os << "# witness_k0," << verdict.witness->k0[0] << ',' << verdict.witness->k0[1] << ',' << verdict.witness->k0[2]
         << '\n';
    os << "# growth_rate," << verdict.growth_rate << '\n';
    os << "# bound," << verdict.bound << '\n';
    if (oracle_delta) os << "# oracle_max_rel_delta," << *oracle_delta << '\n';
  } else {
    json traj = json::array();
    for (const auto& s : states)
      traj.push_back({{"t", s.t}, {"a_t", s.a_t}, {"k_t", to_json(s.k_t)}, {"sup_norm", s.sup_norm}});
    json j{{"model", model.name()},
           {"a0", pw.a0},
           {"k0", to_json(pw.k0)},
           {"trajectory", traj},
           {"verdict", to_json(verdict)}};
    if (oracle_delta) j["oracle_max_rel_delta"] = *oracle_delta;
    j["effective_config"] = config_json(c);
    os << j.dump(2) << '\n';
  }
  return kOk;
}

inline GridField initial_field(const RunConfig& c) {
  const GridSpec spec = c.grid();
  if (c.initial == "file") {
    GridField f = load_field(c.input);
    if (f.spec() != spec) throw Error(ErrorCode::InvalidArgument, "input field grid differs from --grid-n/--box-length");
    return f.rep() == Representation::Fourier ? f.to_physical() : f;
  }
  if (c.initial == "gaussian") return random_smooth_field(spec, c.seed, c.sigma, c.bandpass);
  if (c.initial == "planewave")
    return plane_wave_field(spec, c.a0, {c.wavenumbers[0], c.wavenumbers[1], c.wavenumbers[2]});
  return gaussian_gradient_field(spec, c.sigma, c.bandpass);
}

/// max over modes |a - b| relative to max |b|.
inline double relative_max_delta(const GridField& a, const GridField& b) {
  double num = 0.0;
  double den = 0.0;
  for (int comp = 0; comp < 3; ++comp)
    for (std::size_t i = 0; i < a.component(comp).size(); ++i) {
      num = std::max(num, std::abs(a.component(comp)[i] - b.component(comp)[i]));
      den = std::max(den, std::abs(b.component(comp)[i]));
    }
  return den > 0.0 ? num / den : num;
}

inline json field_diagnostics(const GridField& f) {
  const double mx = f.max_norm();
  const double curl = curl_norm(f);
  return {{"l2_norm", f.l2_norm()},
          {"max_norm", mx},
          {"curl_norm", curl},
          {"curl_ratio", mx > 0.0 ? curl / mx : 0.0},
          {"conservative", f.conservative()}};
}

inline int cmd_evolve(const RunConfig& c, std::ostream& os, std::ostream&) {
  const LinearisedModel model = c.linearised_model();
  const EvolverConfig ecfg = c.evolver();
  const GridField field = initial_field(c);
  const SymbolEvaluator ev(model, c.quadrature);

  json steps = json::array();
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    const double t = c.times[i];
    const GridField evolved = apply_G(model, t, field, ecfg);
    json d{{"t", t}};
    d.update(field_diagnostics(evolved));
    if (c.oracle && t != 0.0) {
      const Direction dir = lsg::detail::table_direction(Direction::Forward, ecfg.interpolation);
      const auto fr = lsg::detail::frame(model, t, Direction::Forward);
      const Mat3 lattice = ecfg.interpolation == Interpolation::SpectralResample ? fr.v : Mat3::identity();
      const auto quad = multiplier_table(ev, field.spec(), t, dir);
      const auto rk4 = rk4_multiplier_table(model, field.spec(), t, c.oracle_step, lattice);
      double worst = 0.0;
      for (std::size_t k = 0; k < quad.size(); ++k) worst = std::max(worst, std::abs(rk4[k] - quad[k]) / std::abs(quad[k]));
      const GridField oracle =
          lsg::detail::propagate(field.to_fourier(), rk4, fr, ecfg.interpolation, field.conservative());
      d["oracle_mode_delta"] = worst;
      d["oracle_field_delta"] = relative_max_delta(evolved, oracle);
    }
    if (!c.field_out.empty()) {
      const std::string path = c.field_out + "_t" + std::to_string(i) + ".gfld";
      const std::filesystem::path parent = std::filesystem::path(path).parent_path();
      std::error_code ec;
      if (!parent.empty()) std::filesystem::create_directories(parent, ec);
      save_field(path, evolved);
      d["field_file"] = path;
    }
    steps.push_back(std::move(d));
  }

  if (c.format == "csv") {
    os.precision(17);
    os << "t,l2_norm,max_norm,curl_norm,curl_ratio";
    if (c.oracle) os << ",oracle_mode_delta,oracle_field_delta";
    os << '\n';
    for (const auto& d : steps) {
      os << d["t"].get<double>() << ',' << d["l2_norm"].get<double>() << ',' << d["max_norm"].get<double>() << ','
         << d["curl_norm"].get<double>() << ',' << d["curl_ratio"].get<double>();
      if (c.oracle) {
        const bool has = d.contains("oracle_mode_delta");
        os << ',' << (has ? d["oracle_mode_delta"].get<double>() : 0.0) << ','
           << (has ? d["oracle_field_delta"].get<double>() : 0.0);
      }
      os << '\n';
    }
  } else {
    json j{{"model", model.name()},
           {"regime", to_string(model.regime())},
           {"interpolation", c.interpolation},
           {"initial", field_diagnostics(field)},
           {"steps", steps}};
    j["effective_config"] = config_json(c);
    os << j.dump(2) << '\n';
  }
  return kOk;
}

inline int cmd_scan(const RunConfig& c, std::ostream& os, std::ostream&) {
  const ScanResult s = scan_regimes(c.seed, c.count, c.qg());
  json j = scan_to_json(s, c.seed);
  if (c.format == "csv") {
    write_histogram_csv(os, s);
    if (!c.out.empty()) {
      std::ofstream w(c.out + ".witnesses.json");
      if (!w) throw Error(ErrorCode::Io, "cannot write '" + c.out + ".witnesses.json'");
      w << j.dump(2) << '\n';
    }
  } else {
    j["effective_config"] = config_json(c);
    os << j.dump(2) << '\n';
  }
  return kOk;
}

inline json verdict_or_null(const SymbolEvaluator& ev) {
  if (ev.model().regime() == Regime::Degenerate) return nullptr;
  return to_json(classify_stability(ev));
}

inline int cmd_qg_compare(const RunConfig& c, std::ostream& os, std::ostream& err) {
  const SymPosDef3 A = c.steady_state();
  const RegimeReport r = regime_report(A, c.qg());
  const SymbolEvaluator sg(sg_model(A), c.quadrature);
  const SymbolEvaluator qg(qg_model(A, c.qg()), c.quadrature);
  const json vsg = verdict_or_null(sg);
  const json vqg = verdict_or_null(qg);
  if (c.format == "csv") {
    os.precision(17);
    os << "model,regime,mu,lambda_sq,symbol_sup,verdict\n";
    for (const auto* ev : {&sg, &qg}) {
      const auto& m = ev->model();
      const json& v = ev == &sg ? vsg : vqg;
      os << m.name() << ',' << to_string(m.regime()) << ',' << m.mu() << ',' << m.lambda_sq() << ','
         << (m.multiplier_degenerate() ? 0.0 : m.symbol_sup()) << ','
         << (v.is_null() ? std::string("degenerate") : v["verdict"].get<std::string>()) << '\n';
    }
  } else {
    json msg = model_summary(sg.model());
    msg["stability"] = vsg;
    json mqg = model_summary(qg.model());
    mqg["stability"] = vqg;
    json j{{"report", to_json(r)}, {"sg", msg}, {"qg", mqg}};
    j["effective_config"] = config_json(c);
    os << j.dump(2) << '\n';
  }
  if (r.degenerate_sg() || r.degenerate_qg()) {
    err << "degenerate: quadrant " << r.quadrant() << '\n';
    return kDegenerate;
  }
  return kOk;
}

}  // namespace detail

inline int execute(const RunConfig& c, std::ostream& os, std::ostream& err) {
  if (c.command == "classify") return detail::cmd_classify(c, os, err);
  if (c.command == "planewave") return detail::cmd_planewave(c, os, err);
  if (c.command == "evolve") return detail::cmd_evolve(c, os, err);
  if (c.command == "scan") return detail::cmd_scan(c, os, err);
  if (c.command == "qg-compare") return detail::cmd_qg_compare(c, os, err);
  throw Error(ErrorCode::InvalidArgument, "unknown command '" + c.command + "'");
}

/// Full CLI run; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ParseOutcome p = parse_args(args, out, err);
  if (p.exit) return *p.exit;
  const RunConfig& c = p.config;
  try {
    c.validate();
    if (p.print_config) {
      out << effective_config(c);
      return kOk;
    }
    // Render into memory first so a failing command never leaves a partial file behind.
    std::ostringstream buf;
    const int code = execute(c, buf, err);
    if (c.out.empty()) {
      out << buf.str();
    } else {
      std::ofstream f(c.out);
      if (!f) throw Error(ErrorCode::Io, "cannot open '" + c.out + "' for writing");
      f << buf.str();
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
}

}  // namespace lsg::cli
