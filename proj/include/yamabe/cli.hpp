#pragma once

// Config-driven runs: verify (lifted residual sweep), construct (one solution
// family plus self-validation), sweep (one construction per parameter value).
//
// Exit codes: 0 pass, 1 fail, 2 config error, 3 domain error, 4 singular
// construction.

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "yamabe/catalog.hpp"
#include "yamabe/constructors.hpp"
#include "yamabe/io.hpp"
#include "yamabe/reduction.hpp"
#include "yamabe/warped.hpp"

namespace yamabe::cli {

enum ExitCode : int {
  kPass = 0,
  kFail = 1,
  kConfigError = 2,
  kDomainError = 3,
  kSingular = 4,
};

enum class Mode { verify, construct, sweep };

struct GeometryBlock {
  int n = 3;
  Signature sig = Signature::euclidean(3);
  int m = 1;
  double lambda_F = 0.0;
  double rho = 0.0;
};

struct GridBlock {
  Box box;
  int points_per_axis = kDefaultPointsPerAxis;
};

struct RunConfig {
  Mode mode = Mode::verify;
  std::string name = "run";
  GeometryBlock geometry;
  std::optional<Eigen::VectorXd> direction;
  // verify
  std::optional<ClosedForm> phi, f, h;
  Interval domain;
  std::optional<GridBlock> grid;
  // construct / sweep
  nlohmann::json family;
  std::string sweep_parameter;
  std::vector<double> sweep_values;

  double tolerance = 1e-7;
  Backend backend = Backend::dual;
  int samples = kDefaultSampleCount;
};

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<double> tol;
  std::optional<Backend> backend;
  std::optional<unsigned> threads;
};

// ---------------------------------------------------------------------------
// Parsing

inline Backend parse_backend(const std::string& s) {
  if (s == "dual") return Backend::dual;
  if (s == "fd") return Backend::finite_difference;
  if (s == "analytic") return Backend::analytic;
  throw ConfigError("unknown backend '" + s + "' (expected dual, fd or analytic)");
}

inline double parse_real(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("expected a number, got " + j.dump());
}

inline Interval parse_interval(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("interval must be [lo, hi]");
  Interval r{parse_real(j[0]), parse_real(j[1])};
  if (!(r.hi > r.lo)) throw ConfigError("interval needs lo < hi");
  return r;
}

inline Eigen::VectorXd parse_vector(const nlohmann::json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw ConfigError(std::string(what) + " must be an array of length n = " + std::to_string(n));
  }
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = parse_real(j[i]);
  return v;
}

inline ClosedForm parse_closed_form(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("profile spec needs a 'kind'");
  ClosedForm c;
  c.kind = parse_kind(j.at("kind").get<std::string>());
  auto num = [&](const char* key, double def) {
    return j.contains(key) ? parse_real(j.at(key)) : def;
  };
  c.a = num("a", c.kind == ClosedForm::Kind::constant ? 0.0 : 1.0);
  c.b = num("b", 0.0);
  c.c = num("c", 0.0);
  c.p = num("p", 1.0);
  if (c.kind == ClosedForm::Kind::constant && j.contains("value")) c.a = parse_real(j.at("value"));
  if (c.kind == ClosedForm::Kind::power_series) {
    if (!j.contains("coeffs") || !j.at("coeffs").is_array() || j.at("coeffs").empty()) {
      throw ConfigError("power-series needs a nonempty 'coeffs' array");
    }
    for (const auto& v : j.at("coeffs")) c.coeffs.push_back(parse_real(v));
  }
  return c;
}

inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  const std::string mode = j.value("mode", std::string("verify"));
  if (mode == "verify") cfg.mode = Mode::verify;
  else if (mode == "construct") cfg.mode = Mode::construct;
  else if (mode == "sweep") cfg.mode = Mode::sweep;
  else throw ConfigError("unknown mode '" + mode + "'");
  cfg.name = j.value("name", cfg.name);

  if (!j.contains("geometry")) throw ConfigError("config needs a 'geometry' block");
  const auto& g = j.at("geometry");
  cfg.geometry.n = g.at("n").get<int>();
  if (cfg.geometry.n < 2 || cfg.geometry.n > kMaxDim) {
    throw ConfigError("n must be between 2 and " + std::to_string(kMaxDim));
  }
  if (g.contains("signature")) {
    const auto eps = g.at("signature").get<std::vector<int>>();
    if (static_cast<int>(eps.size()) != cfg.geometry.n) throw ConfigError("signature length must equal n");
    cfg.geometry.sig = Signature(eps);
  } else {
    cfg.geometry.sig = Signature::euclidean(cfg.geometry.n);
  }
  cfg.geometry.m = g.value("m", 1);
  if (cfg.geometry.m < 1) throw ConfigError("fiber dimension m must be >= 1");
  cfg.geometry.lambda_F = g.contains("lambda_F") ? parse_real(g.at("lambda_F")) : 0.0;
  cfg.geometry.rho = g.contains("rho") ? parse_real(g.at("rho")) : 0.0;

  if (j.contains("direction")) cfg.direction = parse_vector(j.at("direction"), cfg.geometry.n, "direction");
  if (j.contains("profiles")) {
    const auto& p = j.at("profiles");
    if (p.contains("phi")) cfg.phi = parse_closed_form(p.at("phi"));
    if (p.contains("f")) cfg.f = parse_closed_form(p.at("f"));
    if (p.contains("h")) cfg.h = parse_closed_form(p.at("h"));
  }
  if (j.contains("domain")) cfg.domain = parse_interval(j.at("domain"));
  if (j.contains("grid")) {
    const auto& gr = j.at("grid");
    GridBlock gb;
    gb.box.lo = parse_vector(gr.at("lo"), cfg.geometry.n, "grid.lo");
    gb.box.hi = parse_vector(gr.at("hi"), cfg.geometry.n, "grid.hi");
    gb.points_per_axis = gr.value("points_per_axis", kDefaultPointsPerAxis);
    if (gb.points_per_axis < 1) throw ConfigError("grid.points_per_axis must be >= 1");
    cfg.grid = gb;
  }
  if (j.contains("tolerance")) cfg.tolerance = parse_real(j.at("tolerance"));
  if (!(cfg.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  if (j.contains("backend")) cfg.backend = parse_backend(j.at("backend").get<std::string>());
  cfg.samples = j.value("samples", kDefaultSampleCount);
  if (cfg.samples < 2) throw ConfigError("samples must be >= 2");
  if (j.contains("family")) cfg.family = j.at("family");
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    cfg.sweep_parameter = s.at("parameter").get<std::string>();
    for (const auto& v : s.at("values")) cfg.sweep_values.push_back(parse_real(v));
  }

  if (cfg.mode == Mode::verify) {
    if (!cfg.phi || !cfg.f || !cfg.h) throw ConfigError("verify needs profiles phi, f and h");
    if (!cfg.direction) throw ConfigError("verify needs a direction");
    if (!cfg.grid) throw ConfigError("verify needs a grid");
  } else {
    if (!cfg.family.is_object() || !cfg.family.contains("name")) {
      throw ConfigError(mode + " needs a 'family' block with a name");
    }
  }
  if (cfg.mode == Mode::sweep && (cfg.sweep_parameter.empty() || cfg.sweep_values.empty())) {
    throw ConfigError("sweep needs 'sweep.parameter' and a nonempty 'sweep.values'");
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Building blocks

inline Direction config_direction(const RunConfig& cfg, bool null_default = false) {
  if (cfg.direction) return {*cfg.direction, cfg.geometry.sig};
  const int n = cfg.geometry.n;
  if (null_default) return Direction::null_lorentz(n);
  return Direction::diagonal(n);
}

/// Profiles realized on the requested backend. The fd backend differentiates
/// the lifted fields numerically, so profiles stay analytic there.
inline InvariantProfile config_profile(const RunConfig& cfg) {
  const Backend pb = cfg.backend == Backend::finite_difference ? Backend::analytic : cfg.backend;
  return make_invariant_profile(config_direction(cfg), make_profile(*cfg.phi, pb, cfg.domain),
                                make_profile(*cfg.f, pb, cfg.domain),
                                make_profile(*cfg.h, pb, cfg.domain), cfg.geometry.m,
                                cfg.geometry.lambda_F, cfg.geometry.rho);
}

inline ResidualReport verify_report(const RunConfig& cfg, unsigned threads = 0) {
  const InvariantProfile p = config_profile(cfg);
  const WarpedSolitonData d = lift_to_field(p, cfg.grid->box, cfg.backend);
  ResidualReport rep = residual_sweep(d, lattice(cfg.grid->box, cfg.grid->points_per_axis), cfg.tolerance, threads);
  rep.meta.backend = to_string(cfg.backend);
  if (p.rescale != 1.0) {
    rep.meta.warnings.push_back("direction rescaled by 1/" + io::format_number(p.rescale));
  }
  return rep;
}

inline double family_real(const nlohmann::json& fam, const char* key, double def) {
  return fam.contains(key) ? parse_real(fam.at(key)) : def;
}

/// Runs the family named in `fam` (with `override_key` replaced by
/// `override_value` when given).
inline Construction build_family(const RunConfig& cfg, nlohmann::json fam) {
  const std::string name = fam.at("name").get<std::string>();
  const int n = cfg.geometry.n;
  const int m = cfg.geometry.m;
  const Interval domain = fam.contains("domain") ? parse_interval(fam.at("domain")) : cfg.domain;
  if (!std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
    throw ConfigError("family needs a finite domain");
  }
  if (name == "steady") {
    SteadyFamilyParams sp;
    sp.n = n;
    sp.m = m;
    sp.alpha_const = family_real(fam, "alpha", 1.0);
    sp.beta = family_real(fam, "beta", 0.0);
    sp.c = family_real(fam, "c", 0.0);
    sp.nu = family_real(fam, "nu", 0.0);
    sp.domain = domain;
    // Default initial value: the beta = 0 solution through xi0 with shift nu.
    sp.phi0 = fam.contains("phi0") ? parse_real(fam.at("phi0")) : steady_beta0_phi(sp, domain.lo);
    if (!std::isfinite(sp.phi0)) throw ConfigError("phi0 undefined: alpha (xi0 + nu) must be > 0");
    sp.direction = config_direction(cfg);
    return steady_family(sp);
  }
  if (name == "riccati") {
    RiccatiParams rp;
    rp.n = n;
    rp.m = m;
    const Backend pb = cfg.backend == Backend::finite_difference ? Backend::analytic : cfg.backend;
    rp.phi = make_profile(parse_closed_form(fam.at("phi")), pb);
    rp.z_p = make_profile(parse_closed_form(fam.at("z_p")), pb);
    rp.C = family_real(fam, "C", 1.0);
    rp.domain = domain;
    rp.direction = config_direction(cfg);
    return riccati_family(rp);
  }
  if (name == "lightlike") {
    const Backend pb = cfg.backend == Backend::finite_difference ? Backend::analytic : cfg.backend;
    return lightlike_family(make_profile(parse_closed_form(fam.at("phi")), pb),
                            make_profile(parse_closed_form(fam.at("f")), pb),
                            family_real(fam, "alpha", 1.0), domain, config_direction(cfg, true), m);
  }
  throw ConfigError("unknown family '" + name + "'");
}

// ---------------------------------------------------------------------------
// Output

inline void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

/// Run information that is allowed to vary between runs.
inline void write_metadata(const RunOptions& opt, const RunConfig& cfg, int exit_code) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::ostringstream ts;
  ts << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
  nlohmann::json meta = {{"config", opt.config.string()},
                         {"name", cfg.name},
                         {"backend", to_string(cfg.backend)},
                         {"tolerance", cfg.tolerance},
                         {"threads", opt.threads ? *opt.threads : worker_count()},
                         {"exit_code", exit_code},
                         {"finished_at", ts.str()}};
  write_json(opt.out_dir / (cfg.name + "_meta.json"), meta);
}

// ---------------------------------------------------------------------------
// Modes

inline int run_verify(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const ResidualReport rep = verify_report(cfg, opt.threads.value_or(0));
  write_json(opt.out_dir / (cfg.name + "_report.json"), io::to_json(rep));
  std::ostringstream csv;
  io::write_residual_csv(csv, rep);
  write_text(opt.out_dir / (cfg.name + "_residuals.csv"), csv.str());
  log << cfg.name << ": " << rep.evaluated() << "/" << rep.grid_size << " points, max residual "
      << io::format_number(rep.max_abs()) << " (tol " << io::format_number(rep.tol) << ") -> "
      << (rep.pass ? "PASS" : "FAIL") << "\n";
  return rep.pass ? kPass : kFail;
}

inline int run_construct(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
  const Construction c = build_family(cfg, cfg.family);
  write_json(opt.out_dir / (cfg.name + "_profile.json"), io::profile_json(c, cfg.samples));
  const auto rows = profile_sweep(c.profile, c.domain, cfg.samples);
  std::ostringstream csv;
  io::write_profile_csv(csv, rows);
  write_text(opt.out_dir / (cfg.name + "_profile.csv"), csv.str());

  const OdeResiduals worst = max_residuals(rows);
  bool pass = worst.max_abs() <= cfg.tolerance;
  nlohmann::json report = {{"family", c.family},
                           {"samples", rows.size()},
                           {"ode_max", io::to_json(worst)},
                           {"tol", cfg.tolerance},
                           {"truncated", c.truncated},
                           {"termination", c.termination},
                           {"domain", {c.domain.lo, c.domain.hi}},
                           {"requested_domain", {c.requested.lo, c.requested.hi}}};
  if (cfg.grid) {
    const WarpedSolitonData d = lift_to_field(c.profile, cfg.grid->box);
    const ResidualReport rep =
        residual_sweep(d, lattice(cfg.grid->box, cfg.grid->points_per_axis), cfg.tolerance,
                       opt.threads.value_or(0));
    report["field"] = io::to_json(rep);
    pass = pass && rep.pass;
  }
  report["pass"] = pass;
  write_json(opt.out_dir / (cfg.name + "_report.json"), report);
  log << cfg.name << ": " << c.family << " on [" << io::format_number(c.domain.lo) << ", "
      << io::format_number(c.domain.hi) << "], max ODE residual "
      << io::format_number(worst.max_abs()) << (c.truncated ? " (truncated)" : "") << " -> "
      << (c.truncated ? "SINGULAR" : (pass ? "PASS" : "FAIL")) << "\n";
  if (c.truncated) return kSingular;
  return pass ? kPass : kFail;
}

inline int run_sweep(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
  std::ostringstream csv;
  csv << "parameter,value,max_residual,domain_lo,domain_hi,status\n";
  bool all_pass = true;
  for (double v : cfg.sweep_values) {
    nlohmann::json fam = cfg.family;
    fam[cfg.sweep_parameter] = v;
    std::string status;
    double worst = std::numeric_limits<double>::quiet_NaN();
    Interval dom{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    try {
      const Construction c = build_family(cfg, fam);
      worst = max_residuals(profile_sweep(c.profile, c.domain, cfg.samples)).max_abs();
      dom = c.domain;
      status = c.truncated ? "singular" : (worst <= cfg.tolerance ? "pass" : "fail");
    } catch (const ConfigError& e) {
      status = "config_error";
    } catch (const DomainError& e) {
      status = "domain_error";
    }
    all_pass = all_pass && status == "pass";
    csv << cfg.sweep_parameter << ',' << io::format_number(v) << ',' << io::format_number(worst)
        << ',' << io::format_number(dom.lo) << ',' << io::format_number(dom.hi) << ',' << status
        << '\n';
    log << cfg.name << ": " << cfg.sweep_parameter << " = " << io::format_number(v) << " -> "
        << status << "\n";
  }
  write_text(opt.out_dir / (cfg.name + "_sweep.csv"), csv.str());
  return all_pass ? kPass : kFail;
}

/// Loads, applies overrides, dispatches, and maps failures to exit codes.
inline int run(const RunOptions& opt, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  try {
    cfg = load_config(opt.config);
    if (opt.tol) {
      if (!(*opt.tol > 0.0)) throw ConfigError("--tol must be positive");
      cfg.tolerance = *opt.tol;
    }
    if (opt.backend) cfg.backend = *opt.backend;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  std::filesystem::create_directories(opt.out_dir);
  int code = kPass;
  try {
    switch (cfg.mode) {
      case Mode::verify: code = run_verify(cfg, opt, log); break;
      case Mode::construct: code = run_construct(cfg, opt, log); break;
      case Mode::sweep: code = run_sweep(cfg, opt, log); break;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    code = kConfigError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    code = cfg.mode == Mode::verify ? kDomainError : kSingular;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    code = kConfigError;
  }
  write_metadata(opt, cfg, code);
  return code;
}

}  // namespace yamabe::cli
