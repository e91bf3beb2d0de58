#pragma once

// JSON and CSV serialization of residual reports, profile sweeps and
// constructed profiles. Numbers are written in shortest round-trip form so
// identical inputs give byte-identical files.

#include <nlohmann/json.hpp>

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include "yamabe/constructors.hpp"
#include "yamabe/reduction.hpp"
#include "yamabe/warped.hpp"

namespace yamabe::io {

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// JSON cannot carry inf/nan; they become strings.
inline nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

inline nlohmann::json to_json(const EquationStats& s) {
  return {{"max", s.max_abs}, {"mean", s.mean_abs}, {"l2", s.l2}};
}

inline nlohmann::json to_json(const ResidualReport& r) {
  nlohmann::json j;
  j["grid_size"] = r.grid_size;
  j["evaluated"] = r.evaluated();
  j["excluded"] = r.excluded;
  j["eq19_max"] = r.eq19.max_abs;
  j["eq20_max"] = r.eq20.max_abs;
  j["eq21_max"] = r.eq21.max_abs;
  j["means"] = {{"eq19", r.eq19.mean_abs}, {"eq20", r.eq20.mean_abs}, {"eq21", r.eq21.mean_abs}};
  j["l2s"] = {{"eq19", r.eq19.l2}, {"eq20", r.eq20.l2}, {"eq21", r.eq21.l2}};
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  j["metadata"] = {{"backend", r.meta.backend},   {"n", r.meta.n},
                   {"m", r.meta.m},               {"lambda_F", r.meta.lambda_F},
                   {"rho", r.meta.rho},           {"warnings", r.meta.warnings}};
  return j;
}

/// One row per evaluated point: coordinates, then the three residual magnitudes.
inline void write_residual_csv(std::ostream& os, const ResidualReport& r) {
  for (int i = 0; i < r.meta.n; ++i) os << 'x' << (i + 1) << ',';
  os << "eq19,eq20,eq21\n";
  for (const auto& p : r.points) {
    for (int i = 0; i < p.x.size(); ++i) os << format_number(p.x[i]) << ',';
    os << format_number(p.eq19) << ',' << format_number(p.eq20) << ',' << format_number(p.eq21)
       << '\n';
  }
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfileSample>& rows) {
  os << "xi,phi,f,h,r_h,r_diag,r_fiber\n";
  for (const auto& s : rows) {
    os << format_number(s.xi) << ',' << format_number(s.phi) << ',' << format_number(s.f) << ','
       << format_number(s.h) << ',' << format_number(s.r.r_h) << ','
       << format_number(s.r.r_diag) << ',' << format_number(s.r.r_fiber) << '\n';
  }
}

inline nlohmann::json to_json(const OdeResiduals& r) {
  return {{"r_h", r.r_h}, {"r_diag", r.r_diag}, {"r_fiber", r.r_fiber}};
}

/// {family, params, domain, samples: [{xi, phi, f, h}]}
inline nlohmann::json profile_json(const Construction& c, int samples = kDefaultSampleCount) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : c.params) params[k] = number_json(v);
  nlohmann::json j;
  j["family"] = c.family;
  j["params"] = params;
  j["domain"] = {c.domain.lo, c.domain.hi};
  j["requested_domain"] = {c.requested.lo, c.requested.hi};
  j["truncated"] = c.truncated;
  j["termination"] = c.termination;
  j["direction"] = std::vector<double>(c.profile.alpha.data(),
                                       c.profile.alpha.data() + c.profile.alpha.size());
  j["signature"] = c.profile.sig.entries();
  j["eps_k0"] = c.profile.eps_k0;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : profile_sweep(c.profile, c.domain, samples)) {
    rows.push_back({{"xi", s.xi}, {"phi", s.phi}, {"f", s.f}, {"h", s.h}});
  }
  j["samples"] = std::move(rows);
  return j;
}

}  // namespace yamabe::io
