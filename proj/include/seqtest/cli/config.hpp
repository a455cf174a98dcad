#pragma once

// Experiment configuration shared by all commands. Every field is set from a
// string, whether it came from a flag or from a JSON config file, so both
// routes validate identically. File values are applied first, then flags.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqtest/errors.hpp"
#include "seqtest/sprt.hpp"
#include "seqtest/states.hpp"

namespace seqtest::cli {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw ValidationError(key + ": '" + text + "' is not a number");
  return v;
}

inline long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw ValidationError(key + ": '" + text + "' is not an integer");
  return v;
}

/// A number, or a multiple of pi: "pi", "-pi/2", "3pi/4", "0.5*pi".
inline double parse_angle(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const auto at = t.find("pi");
  if (at == std::string::npos) return parse_number(key, t);
  std::string coef = trim(t.substr(0, at));
  if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
  double c = 1.0;
  if (coef == "-") {
    c = -1.0;
  } else if (!coef.empty() && coef != "+") {
    c = parse_number(key, coef);
  }
  const std::string rest = trim(t.substr(at + 2));
  double den = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw ValidationError(key + ": cannot parse angle '" + text + "'");
    den = parse_number(key, rest.substr(1));
    if (den == 0.0) throw ValidationError(key + ": division by zero in '" + text + "'");
  }
  return c * std::numbers::pi / den;
}

/// count evenly spaced points on [lo, hi], written "lo:hi:count".
struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  int count = 1;

  std::vector<double> values() const {
    std::vector<double> v;
    for (int i = 0; i < count; ++i) {
      v.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return v;
  }

  std::string str() const {
    std::ostringstream os;
    os.precision(17);
    os << lo << ":" << hi << ":" << count;
    return os.str();
  }
};

inline Grid parse_grid(const std::string& key, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ValidationError(key + ": expected lo:hi:count, got '" + text + "'");
  Grid g{parse_angle(key, parts[0]), parse_angle(key, parts[1]), static_cast<int>(parse_integer(key, parts[2]))};
  if (g.count < 1) throw ValidationError(key + ": grid count must be positive");
  if (g.hi < g.lo) throw ValidationError(key + ": grid upper end below lower end");
  return g;
}

/// Integers lo, lo+step, ..., <= hi, written "lo:hi" or "lo:hi:step".
struct IntRange {
  int lo = 1;
  int hi = 1;
  int step = 1;

  std::vector<int> values() const {
    std::vector<int> v;
    for (int x = lo; x <= hi; x += step) v.push_back(x);
    return v;
  }

  std::string str() const {
    return std::to_string(lo) + ":" + std::to_string(hi) + ":" + std::to_string(step);
  }
};

inline IntRange parse_int_range(const std::string& key, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2 && parts.size() != 3) throw ValidationError(key + ": expected lo:hi[:step]");
  IntRange r{static_cast<int>(parse_integer(key, parts[0])), static_cast<int>(parse_integer(key, parts[1])), 1};
  if (parts.size() == 3) r.step = static_cast<int>(parse_integer(key, parts[2]));
  if (r.lo < 1 || r.hi < r.lo || r.step < 1) throw ValidationError(key + ": need 1 <= lo <= hi and step >= 1");
  return r;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_angle(key, part));
  if (out.empty()) throw ValidationError(key + ": empty list");
  return out;
}

struct ExperimentConfig {
  std::optional<QubitPair> pair;
  std::string mode = "strong";
  std::optional<double> eps0;
  std::optional<double> eps1;
  std::optional<double> alpha;
  std::optional<double> beta;
  double prior = 0.5;
  std::optional<double> phi;
  int phi_grid = 181;
  std::optional<IntRange> ell_range;
  std::optional<int> n_max;
  std::optional<long> trials;
  std::uint64_t seed = 1;
  std::optional<long> max_steps;
  int hypothesis = 0;
  std::string method = "sdp";
  std::optional<Grid> r_grid;
  std::optional<Grid> theta_grid;
  std::optional<std::vector<double>> theta_list;
  std::optional<Grid> s_grid;
  std::optional<double> s;
  std::optional<std::vector<double>> eps_sweep;
  std::string sweep;
  std::string out;
  std::string format = "csv";
  std::string log_base = "e";

  // Keys, in the order flags are documented.
  static const std::vector<std::string>& keys() {
    static const std::vector<std::string> k{
        "pair",   "mode",      "eps0",       "eps1",       "alpha",  "beta",   "prior",  "phi",     "phi-grid",
        "ell-range", "n-max",  "trials",     "seed",       "max-steps", "hypothesis", "method", "r-grid",
        "theta-grid", "theta-list", "s-grid", "s",        "eps-sweep", "sweep", "out",    "format",  "log-base"};
    return k;
  }

  void set(const std::string& key, const std::string& value) {
    if (key == "pair") {
      const auto parts = split(value, ',');
      if (parts.size() != 3) throw ValidationError("pair: expected r0,r1,theta");
      QubitPair p{parse_number(key, parts[0]), parse_number(key, parts[1]), parse_angle(key, parts[2])};
      try {
        p.validate();
      } catch (const Error& e) {
        throw ValidationError(std::string("pair: ") + e.what());
      }
      pair = p;
    } else if (key == "mode") {
      mode = to_string(parse_error_mode(trim(value)));
    } else if (key == "eps0") {
      eps0 = parse_number(key, value);
    } else if (key == "eps1") {
      eps1 = parse_number(key, value);
    } else if (key == "alpha") {
      alpha = parse_number(key, value);
    } else if (key == "beta") {
      beta = parse_number(key, value);
    } else if (key == "prior") {
      prior = parse_number(key, value);
      if (!(prior > 0.0 && prior < 1.0)) throw ValidationError("prior must lie in (0,1)");
    } else if (key == "phi") {
      phi = parse_angle(key, value);
    } else if (key == "phi-grid") {
      phi_grid = static_cast<int>(parse_integer(key, value));
      if (phi_grid < 2) throw ValidationError("phi-grid must be at least 2");
    } else if (key == "ell-range") {
      ell_range = parse_int_range(key, value);
    } else if (key == "n-max") {
      n_max = static_cast<int>(parse_integer(key, value));
      if (*n_max < 1) throw ValidationError("n-max must be positive");
    } else if (key == "trials") {
      trials = parse_integer(key, value);
      if (*trials < 1) throw ValidationError("trials must be positive");
    } else if (key == "seed") {
      const std::string t = trim(value);
      std::size_t used = 0;
      try {
        seed = std::stoull(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (t.empty() || t.front() == '-' || used != t.size()) throw ValidationError("seed: expected a 64-bit unsigned integer");
    } else if (key == "max-steps") {
      max_steps = parse_integer(key, value);
    } else if (key == "hypothesis") {
      const long h = parse_integer(key, value);
      if (h != 0 && h != 1) throw ValidationError("hypothesis must be 0 or 1");
      hypothesis = static_cast<int>(h);
    } else if (key == "method") {
      method = trim(value);
      if (method != "sdp" && method != "lp") throw ValidationError("method must be sdp or lp");
    } else if (key == "r-grid") {
      r_grid = parse_grid(key, value);
    } else if (key == "theta-grid") {
      theta_grid = parse_grid(key, value);
    } else if (key == "theta-list") {
      theta_list = parse_list(key, value);
    } else if (key == "s-grid") {
      s_grid = parse_grid(key, value);
    } else if (key == "s") {
      s = parse_number(key, value);
    } else if (key == "eps-sweep") {
      eps_sweep = parse_list(key, value);
    } else if (key == "sweep") {
      sweep = trim(value);
    } else if (key == "out") {
      out = value;
    } else if (key == "format") {
      format = trim(value);
      if (format != "csv" && format != "json") throw ValidationError("format must be csv or json");
    } else if (key == "log-base") {
      log_base = trim(value);
      if (log_base != "e" && log_base != "2") throw ValidationError("log-base must be e or 2");
    } else {
      throw ValidationError("unknown configuration field '" + key + "'");
    }
  }

  /// Error requirements from mode/eps0/eps1/alpha/beta with per-command defaults.
  ErrorSpec error_spec(double default_eps = 1e-3) const {
    const ErrorMode m = parse_error_mode(mode);
    if (m == ErrorMode::kStrong) return ErrorSpec::strong(eps0.value_or(default_eps), eps1.value_or(eps0.value_or(default_eps)));
    if (m == ErrorMode::kSymmetric) return ErrorSpec::symmetric(eps0.value_or(default_eps));
    if (!alpha || !beta) throw ValidationError("weak-asymmetric mode needs --alpha and --beta");
    return ErrorSpec::weak(*alpha, *beta);
  }

  double units() const { return log_base == "2" ? 1.0 / std::numbers::ln2 : 1.0; }
  std::string unit_name() const { return log_base == "2" ? "bits" : "nats"; }
};

/// Converts a JSON value to the flag-string form of the same field.
inline std::string json_field_text(const std::string& key, const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + json_field_text(key, v[i]);
    return out;
  }
  throw ValidationError(key + ": unsupported value type in config file");
}

/// Applies a JSON config file; unknown fields are rejected.
inline void apply_config_file(ExperimentConfig& cfg, const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      if (!value.is_string() || value.get<std::string>() != command) {
        throw ValidationError("config file is for command '" + json_field_text(key, value) + "', not '" + command + "'");
      }
      continue;
    }
    cfg.set(key, json_field_text(key, value));
  }
}

}  // namespace seqtest::cli
