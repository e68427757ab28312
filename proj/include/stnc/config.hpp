// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stnc/errors.hpp"
#include "stnc/modulation.hpp"
#include "stnc/scenario.hpp"

namespace stnc {

/// A parsed scenario config: the network plus the modulation it is meant to
/// be evaluated with.
struct LoadedScenario {
  Scenario scenario;
  Modulation modulation = Modulation::psk(2);
};

namespace detail {

struct ConfigEntry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

class ConfigMap {
 public:
  explicit ConfigMap(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = raw.substr(0, raw.find('#'));
      auto trim = [](std::string t) {
        size_t a = t.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        size_t b = t.find_last_not_of(" \t\r");
        return t.substr(a, b - a + 1);
      };
      s = trim(s);
      if (s.empty()) continue;
      const size_t eq = s.find('=');
      if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
      std::string key = trim(s.substr(0, eq));
      std::string value = trim(s.substr(eq + 1));
      if (key.empty() || value.empty()) throw ParseError("expected 'key = value'", line);
      if (entries_.count(key)) throw ParseError("duplicate key '" + key + "'", line);
      entries_.emplace(key, ConfigEntry{value, line, false});
    }
  }

  std::optional<std::string> raw(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  double number(const std::string& key, double fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    return parse_number(key, *v);
  }

  int integer(const std::string& key, int fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    return parse_integer(key, *v);
  }

  /// Integer that is semantically a fading shape: a numeric non-integer is a
  /// NonIntegerFadingParameter, not a syntax error.
  int shape(const std::string& key, int fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    char* end = nullptr;
    const double d = std::strtod(v->c_str(), &end);
    if (end != v->c_str() + v->size())
      throw ParseError("key '" + key + "': '" + *v + "' is not a number", line_of(key));
    const long long i = static_cast<long long>(d);
    if (static_cast<double>(i) != d)
      throw NonIntegerFadingParameter("key '" + key + "': fading parameter must be a positive integer, got " + *v);
    return static_cast<int>(i);
  }

  double parse_number(const std::string& key, const std::string& v) const {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size())
      throw ParseError("key '" + key + "': '" + v + "' is not a number", line_of(key));
    return d;
  }

  int parse_integer(const std::string& key, const std::string& v) const {
    char* end = nullptr;
    const long long i = std::strtoll(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size())
      throw ParseError("key '" + key + "': '" + v + "' is not an integer", line_of(key));
    return static_cast<int>(i);
  }

  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  void fail_on_unused() const {
    for (const auto& [key, entry] : entries_)
      if (!entry.used) throw ParseError("unknown key '" + key + "'", entry.line);
  }

 private:
  std::map<std::string, ConfigEntry> entries_;
};

}  // namespace detail

/// Parses the flat dotted-key scenario grammar (see README for the key set).
/// Unknown keys, duplicates and malformed values raise ParseError with the
/// offending line; violated model invariants raise ValidationError.
inline LoadedScenario parse_scenario_text(const std::string& text) {
  detail::ConfigMap cfg(text);

  const int relays = cfg.integer("relays", -1);
  if (relays < 0) throw ParseError("missing required key 'relays'");
  if (relays > 16) throw ValidationError("at most 16 relays are supported");
  const int sources = cfg.integer("sources", 1);
  if (sources < 1) throw ValidationError("sources must be >= 1");

  Scenario scn = Scenario::unit(sources, relays);
  scn.path_loss_exponent = cfg.number("path_loss_exponent", 3.5);
  scn.noise = cfg.number("noise", 1.0);

  const std::string mode = cfg.raw("snr.mode").value_or("geometry");
  if (mode != "geometry" && mode != "coefficients")
    throw ParseError("snr.mode must be 'geometry' or 'coefficients'",
                     cfg.line_of("snr.mode"));

  // Fading shapes are legal in both modes.
  for (int l = 1; l <= sources; ++l) {
    const std::string sl = "source." + std::to_string(l);
    scn.m_source_dest[l - 1] = cfg.shape(sl + ".m_to_dest", 1);
  }
  for (int q = 1; q <= relays; ++q) {
    const std::string rq = "relay." + std::to_string(q);
    scn.m_relay_dest[q - 1] = cfg.shape(rq + ".m_to_dest", 1);
    for (int l = 1; l <= sources; ++l)
      scn.m_source_relay[l - 1][q - 1] =
          cfg.shape(rq + ".m_from_source." + std::to_string(l), 1);
  }

  if (mode == "geometry") {
    for (int l = 1; l <= sources; ++l) {
      const std::string sl = "source." + std::to_string(l);
      scn.p_source[l - 1] = cfg.number(sl + ".power", 1.0);
      scn.d_source_dest[l - 1] = cfg.number(sl + ".d_to_dest", 1.0);
    }
    for (int q = 1; q <= relays; ++q) {
      const std::string rq = "relay." + std::to_string(q);
      scn.d_relay_dest[q - 1] = cfg.number(rq + ".d_to_dest", 1.0);
      for (int l = 1; l <= sources; ++l) {
        scn.p_relay[q - 1][l - 1] = cfg.number(rq + ".power." + std::to_string(l), 1.0);
        scn.d_source_relay[l - 1][q - 1] =
            cfg.number(rq + ".d_from_source." + std::to_string(l), 1.0);
      }
    }
  } else {
    // Equivalent-SNR coefficients per unit sweep scale; the parser
    // synthesizes a unit geometry realizing them exactly.
    if (sources != 1)
      throw ValidationError("snr.mode = coefficients requires a single source");
    auto c0 = cfg.raw("branch.0.coeff");
    if (!c0) throw ParseError("snr.mode = coefficients requires branch.0.coeff");
    const double c0v = cfg.parse_number("branch.0.coeff", *c0);
    if (!(c0v > 0.0)) throw ValidationError("branch.0.coeff must be positive");
    scn.p_source[0] = c0v;
    scn.d_source_dest[0] = 1.0;
    for (int q = 1; q <= relays; ++q) {
      const std::string bq = "branch." + std::to_string(q);
      auto cq = cfg.raw(bq + ".coeff");
      if (!cq) throw ParseError("missing " + bq + ".coeff");
      const double cqv = cfg.parse_number(bq + ".coeff", *cq);
      const double inv = cfg.number(bq + ".input_coeff", cqv);
      if (!(cqv > 0.0) || !(inv > 0.0))
        throw ValidationError("branch coefficients must be positive");
      scn.p_relay[q - 1][0] = cqv;
      scn.d_relay_dest[q - 1] = 1.0;
      // d_lq chosen so the relay input SNR is exactly inv per unit scale.
      scn.d_source_relay[0][q - 1] = std::pow(c0v / inv, 1.0 / scn.path_loss_exponent);
    }
    scn.noise = 1.0;
    if (cfg.has("noise"))
      throw ParseError("'noise' is not allowed with snr.mode = coefficients",
                       cfg.line_of("noise"));
  }

  // Correlations: uniform shorthand plus pairwise overrides.
  const double rho = cfg.number("correlation.rho", 0.0);
  for (int p = 0; p < relays; ++p)
    for (int q = 0; q < relays; ++q)
      if (p != q) scn.correlation(p, q) = rho;
  for (int p = 1; p <= relays; ++p)
    for (int q = 1; q <= relays; ++q) {
      const std::string key = "correlation." + std::to_string(p) + "." + std::to_string(q);
      if (!cfg.has(key)) continue;
      if (p == q) throw ParseError("diagonal correlation entries are fixed at 1", cfg.line_of(key));
      const double r = cfg.number(key, 0.0);
      scn.correlation(p - 1, q - 1) = r;
      scn.correlation(q - 1, p - 1) = r;
    }

  LoadedScenario out;
  const std::string kind = cfg.raw("modulation").value_or("psk");
  const int order = cfg.integer("order", kind == "qam" ? 4 : 2);
  if (kind == "psk")
    out.modulation = Modulation::psk(order);
  else if (kind == "qam")
    out.modulation = Modulation::qam(order);
  else
    throw ParseError("modulation must be 'psk' or 'qam'", cfg.line_of("modulation"));

  cfg.fail_on_unused();
  scn.validate();
  out.scenario = std::move(scn);
  return out;
}

inline LoadedScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

/// Validated Scenario from a config file.
inline Scenario parse_scenario(const std::string& path) {
  return load_scenario_file(path).scenario;
}

}  // namespace stnc
