#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "wavegauge/core.hpp"
#include "wavegauge/grid.hpp"
#include "wavegauge/noise.hpp"
#include "wavegauge/reaction.hpp"
#include "wavegauge/wave.hpp"

namespace wavegauge {

namespace toml {

/// Scalar or array value of the supported TOML subset.
struct Value {
  using Array = std::vector<Value>;
  std::variant<bool, std::int64_t, double, std::string, Array> data;
  std::size_t line = 0;

  [[nodiscard]] bool is_number() const {
    return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
  }
};

/// Flat table: dotted keys ("noise.amp") mapped to values.
using Table = std::map<std::string, Value>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void fail(std::size_t line, const std::string& msg) {
  throw DomainError("config line " + std::to_string(line) + ": " + msg);
}

inline bool bare_key_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
}

inline std::string parse_key(std::string_view s, std::size_t line) {
  std::string out;
  std::size_t i = 0;
  bool expect_part = true;
  while (i < s.size()) {
    const char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (expect_part) {
      std::string part;
      if (ch == '"') {
        const auto end = s.find('"', i + 1);
        if (end == std::string_view::npos) fail(line, "unterminated quoted key");
        part = std::string(s.substr(i + 1, end - i - 1));
        i = end + 1;
      } else {
        while (i < s.size() && bare_key_char(s[i])) part += s[i++];
        if (part.empty()) fail(line, "invalid key '" + std::string(s) + "'");
      }
      out += part;
      expect_part = false;
    } else if (ch == '.') {
      out += '.';
      expect_part = true;
      ++i;
    } else {
      fail(line, "invalid key '" + std::string(s) + "'");
    }
  }
  if (expect_part) fail(line, "invalid key '" + std::string(s) + "'");
  return out;
}

class ValueParser {
 public:
  ValueParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  Value parse_all() {
    Value v = parse_value();
    skip_ws();
    if (pos_ != s_.size()) fail(line_, "unexpected trailing characters '" + std::string(s_.substr(pos_)) + "'");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size()) {
      const char ch = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else if (ch == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Value parse_value() {
    skip_ws();
    if (pos_ >= s_.size()) fail(line_, "missing value");
    const char ch = s_[pos_];
    Value v;
    v.line = line_;
    if (ch == '"') {
      v.data = parse_string();
    } else if (ch == '\'') {
      const auto end = s_.find('\'', pos_ + 1);
      if (end == std::string_view::npos) fail(line_, "unterminated string");
      v.data = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
    } else if (ch == '[') {
      ++pos_;
      Value::Array arr;
      for (;;) {
        skip_ws();
        if (pos_ >= s_.size()) fail(line_, "unterminated array");
        if (s_[pos_] == ']') {
          ++pos_;
          break;
        }
        arr.push_back(parse_value());
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
        } else if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          break;
        } else {
          fail(line_, "expected ',' or ']' in array");
        }
      }
      v.data = std::move(arr);
    } else {
      std::size_t end = pos_;
      while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != '#' &&
             !std::isspace(static_cast<unsigned char>(s_[end])))
        ++end;
      const std::string tok(s_.substr(pos_, end - pos_));
      pos_ = end;
      v.data = parse_scalar(tok);
    }
    return v;
  }

  std::string parse_string() {
    std::string out;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char ch = s_[pos_++];
      if (ch == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        switch (e) {
          case 'n': ch = '\n'; break;
          case 't': ch = '\t'; break;
          case '\\': ch = '\\'; break;
          case '"': ch = '"'; break;
          default: fail(line_, std::string("unsupported escape '\\") + e + "'");
        }
      }
      out += ch;
    }
    if (pos_ >= s_.size()) fail(line_, "unterminated string");
    ++pos_;
    return out;
  }

  std::variant<bool, std::int64_t, double, std::string, Value::Array> parse_scalar(std::string tok) {
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    if (tok == "nan" || tok == "+nan" || tok == "-nan") return std::numeric_limits<double>::quiet_NaN();
    std::string clean;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] == '_') {
        if (i == 0 || i + 1 == tok.size() || !std::isdigit(static_cast<unsigned char>(tok[i - 1])) ||
            !std::isdigit(static_cast<unsigned char>(tok[i + 1])))
          fail(line_, "invalid number '" + tok + "'");
        continue;
      }
      clean += tok[i];
    }
    if (clean.empty()) fail(line_, "missing value");
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    std::size_t used = 0;
    try {
      if (is_float) {
        const double d = std::stod(clean, &used);
        if (used == clean.size()) return d;
      } else {
        const long long i = std::stoll(clean, &used, 10);
        if (used == clean.size()) return static_cast<std::int64_t>(i);
      }
    } catch (const std::exception&) {
    }
    fail(line_, "invalid value '" + tok + "'");
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

inline int bracket_balance(std::string_view s) {
  int depth = 0;
  bool in_str = false;
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char ch = s[i];
    if (in_str) {
      if (ch == '\\' && quote == '"') {
        ++i;
      } else if (ch == quote) {
        in_str = false;
      }
    } else if (ch == '"' || ch == '\'') {
      in_str = true;
      quote = ch;
    } else if (ch == '#') {
      while (i + 1 < s.size() && s[i + 1] != '\n') ++i;
    } else if (ch == '[') {
      ++depth;
    } else if (ch == ']') {
      --depth;
    }
  }
  return depth;
}

// position of the first '=' outside quotes
inline std::size_t find_equals(std::string_view s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (!in_str && s[i] == '=') return i;
  }
  return std::string_view::npos;
}

}  // namespace detail

inline Value parse_value(std::string_view text, std::size_t line = 0) {
  return detail::ValueParser(text, line).parse_all();
}

/// Parses tables, dotted keys, strings, integers, floats, booleans and
/// (possibly multi-line) arrays. Inline tables, dates and arrays of tables are
/// rejected with the line number.
inline Table parse(std::istream& in) {
  Table out;
  std::string prefix;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    if (s.front() == '[') {
      if (s.size() > 1 && s[1] == '[') detail::fail(lineno, "arrays of tables are not supported");
      const auto close = s.find(']');
      if (close == std::string_view::npos) detail::fail(lineno, "unterminated table header");
      const std::string_view rest = detail::trim(s.substr(close + 1));
      if (!rest.empty() && rest.front() != '#') detail::fail(lineno, "unexpected text after table header");
      prefix = detail::parse_key(s.substr(1, close - 1), lineno) + ".";
      continue;
    }
    const auto eq = detail::find_equals(s);
    if (eq == std::string_view::npos) detail::fail(lineno, "expected 'key = value'");
    const std::string key = prefix + detail::parse_key(s.substr(0, eq), lineno);
    std::string value_text(detail::trim(s.substr(eq + 1)));
    const std::size_t start_line = lineno;
    while (detail::bracket_balance(value_text) > 0) {
      std::string more;
      if (!std::getline(in, more)) detail::fail(start_line, "unterminated array");
      ++lineno;
      value_text += '\n';
      value_text += more;
    }
    if (!value_text.empty() && value_text.front() == '{')
      detail::fail(start_line, "inline tables are not supported");
    if (out.count(key)) detail::fail(start_line, "duplicate key '" + key + "'");
    out.emplace(key, parse_value(value_text, start_line));
  }
  return out;
}

inline Table parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

}  // namespace toml

enum class WaveSolver { automatic, shooting, closed_form };
enum class InitialKind { bump, shift, zero };

struct RunConfig {
  // reaction
  std::string reaction = "nagumo";
  double a = 0.25;
  std::vector<double> coeffs;
  // wave and grid
  double nu = 1.0;
  double b = 2.0;
  std::optional<double> l_dom;  // default 25 / k
  std::size_t n = 4096;
  WaveSolver solver = WaveSolver::automatic;
  double profile_tol = 1e-6;
  // tolerances
  Tolerance tol;
  std::size_t assumption_samples = 1000;
  // noise
  NoiseKind noise_kind = NoiseKind::white;
  SigmaKind noise_sigma = SigmaKind::nagumo_shape;
  double noise_amp = 0.0;
  std::optional<double> noise_hs_target;
  double noise_corr_len = 1.0;
  double translation_tol = 1e-6;
  long translation_shift = 64;
  // simulation
  double dt = 1e-3;
  double t_end = 40.0;
  double t_max = 0.0;  // <= 0: 20 / kappa*
  double delta = 0.5;
  std::optional<double> m;  // default C*
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t record_every = 100;
  double envelope_tol = 1e-2;
  InitialKind u0 = InitialKind::bump;
  double u0_norm = 0.015;
  double u0_width = 1.0;
  double u0_shift = 0.05;
  // verify battery sizes
  std::size_t hardy_samples = 100;
  std::size_t poincare_samples = 100;
  std::size_t master_samples = 200;
  // execution and output
  std::size_t threads = 0;  // 0: hardware concurrency
  std::string out;
  std::string paths_dir;

  [[nodiscard]] double resolved_l_dom() const {
    return l_dom ? *l_dom : 25.0 / std::sqrt(b / (2.0 * nu));
  }
  [[nodiscard]] GridSpec grid() const { return GridSpec::make(resolved_l_dom(), n); }
  [[nodiscard]] WaveParams wave_params() const { return WaveParams::make(nu, b); }
};

namespace config_detail {

inline const toml::Value& scalar(const std::string& key, const toml::Value& v) {
  if (std::holds_alternative<toml::Value::Array>(v.data))
    throw DomainError(key + ": expected a scalar (line " + std::to_string(v.line) + ")");
  return v;
}

inline double as_double(const std::string& key, const toml::Value& v) {
  scalar(key, v);
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v.data)) return *d;
  throw DomainError(key + ": expected a number (line " + std::to_string(v.line) + ")");
}

inline std::int64_t as_int(const std::string& key, const toml::Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v.data)) return *i;
  throw DomainError(key + ": expected an integer (line " + std::to_string(v.line) + ")");
}

inline std::size_t as_count(const std::string& key, const toml::Value& v) {
  const std::int64_t i = as_int(key, v);
  if (i < 0) throw DomainError(key + ": must be nonnegative");
  return static_cast<std::size_t>(i);
}

inline std::string as_string(const std::string& key, const toml::Value& v) {
  if (const auto* s = std::get_if<std::string>(&v.data)) return *s;
  throw DomainError(key + ": expected a string (line " + std::to_string(v.line) + ")");
}

inline std::vector<double> as_numbers(const std::string& key, const toml::Value& v) {
  const auto* arr = std::get_if<toml::Value::Array>(&v.data);
  if (!arr) throw DomainError(key + ": expected an array of numbers (line " + std::to_string(v.line) + ")");
  std::vector<double> out;
  for (const auto& e : *arr) out.push_back(as_double(key, e));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const toml::Value&)>;

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const char* key, double RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const toml::Value& v) { c.*field = as_double(k, v); };
    };
    auto count = [&t](const char* key, std::size_t RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const toml::Value& v) { c.*field = as_count(k, v); };
    };
    t["reaction"] = [](RunConfig& c, const std::string& k, const toml::Value& v) { c.reaction = as_string(k, v); };
    num("a", &RunConfig::a);
    t["coeffs"] = [](RunConfig& c, const std::string& k, const toml::Value& v) { c.coeffs = as_numbers(k, v); };
    num("nu", &RunConfig::nu);
    num("b", &RunConfig::b);
    t["l_dom"] = [](RunConfig& c, const std::string& k, const toml::Value& v) { c.l_dom = as_double(k, v); };
    count("n", &RunConfig::n);
    t["solver"] = [](RunConfig& c, const std::string& k, const toml::Value& v) {
      const std::string s = as_string(k, v);
      if (s == "auto") c.solver = WaveSolver::automatic;
      else if (s == "shooting") c.solver = WaveSolver::shooting;
      else if (s == "closed_form") c.solver = WaveSolver::closed_form;
      else throw DomainError(k + ": unknown value '" + s + "' (auto, shooting, closed_form)");
    };
    num("profile_tol", &RunConfig::profile_tol);
    t["seed"] = [](RunConfig& c, const std::string& k, const toml::Value& v) {
      const std::int64_t s = as_int(k, v);
      if (s < 0) throw DomainError(k + ": must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    };
    count("threads", &RunConfig::threads);

    t["tolerance.abs"] = [](RunConfig& c, const std::string& k, const toml::Value& v) { c.tol.abs = as_double(k, v); };
    t["tolerance.rel"] = [](RunConfig& c, const std::string& k, const toml::Value& v) { c.tol.rel = as_double(k, v); };
    count("tolerance.assumption_samples", &RunConfig::assumption_samples);
    num("tolerance.translation", &RunConfig::translation_tol);

    t["noise.kind"] = [](RunConfig& c, const std::string&, const toml::Value& v) {
      c.noise_kind = parse_noise_kind(as_string("noise.kind", v));
    };
    t["noise.sigma"] = [](RunConfig& c, const std::string&, const toml::Value& v) {
      c.noise_sigma = parse_sigma_kind(as_string("noise.sigma", v));
    };
    num("noise.amp", &RunConfig::noise_amp);
    t["noise.hs_target"] = [](RunConfig& c, const std::string& k, const toml::Value& v) {
      c.noise_hs_target = as_double(k, v);
    };
    num("noise.corr_len", &RunConfig::noise_corr_len);
    t["noise.translation_shift"] = [](RunConfig& c, const std::string& k, const toml::Value& v) {
      c.translation_shift = static_cast<long>(as_int(k, v));
    };

    num("simulation.dt", &RunConfig::dt);
    num("simulation.t_end", &RunConfig::t_end);
    num("simulation.t_max", &RunConfig::t_max);
    num("simulation.delta", &RunConfig::delta);
    t["simulation.m"] = [](RunConfig& c, const std::string& k, const toml::Value& v) { c.m = as_double(k, v); };
    count("simulation.trials", &RunConfig::trials);
    t["simulation.seed"] = t["seed"];
    count("simulation.record_every", &RunConfig::record_every);
    num("simulation.envelope_tol", &RunConfig::envelope_tol);
    t["simulation.u0"] = [](RunConfig& c, const std::string& k, const toml::Value& v) {
      const std::string s = as_string(k, v);
      if (s == "bump") c.u0 = InitialKind::bump;
      else if (s == "shift") c.u0 = InitialKind::shift;
      else if (s == "zero") c.u0 = InitialKind::zero;
      else throw DomainError(k + ": unknown value '" + s + "' (bump, shift, zero)");
    };
    num("simulation.u0_norm", &RunConfig::u0_norm);
    num("simulation.u0_width", &RunConfig::u0_width);
    num("simulation.u0_shift", &RunConfig::u0_shift);

    count("verify.hardy_samples", &RunConfig::hardy_samples);
    count("verify.poincare_samples", &RunConfig::poincare_samples);
    count("verify.master_samples", &RunConfig::master_samples);

    t["output.out"] = [](RunConfig& c, const std::string& k, const toml::Value& v) { c.out = as_string(k, v); };
    t["output.paths"] = [](RunConfig& c, const std::string& k, const toml::Value& v) { c.paths_dir = as_string(k, v); };
    return t;
  }();
  return table;
}

inline void apply(RunConfig& cfg, const std::string& key, const toml::Value& v) {
  const auto& t = setters();
  const auto it = t.find(key);
  if (it == t.end()) {
    std::string msg = "unknown key '" + key + "'";
    if (v.line > 0) msg += " (line " + std::to_string(v.line) + ")";
    throw DomainError(msg);
  }
  it->second(cfg, key, v);
}

}  // namespace config_detail

/// Domain checks, each naming the offending key.
inline void validate_config(const RunConfig& c) {
  if (c.reaction == "nagumo") {
    if (!(c.a > 0.0 && c.a < 1.0)) throw DomainError("a: must lie in (0,1), got " + format_number(c.a));
  } else if (c.reaction == "cubic" || c.reaction == "polynomial") {
    if (c.coeffs.empty()) throw DomainError("coeffs: required for reaction = \"" + c.reaction + "\"");
    if (c.reaction == "cubic" && c.coeffs.size() != 4)
      throw DomainError("coeffs: a cubic needs exactly 4 coefficients [c0,c1,c2,c3]");
    for (double x : c.coeffs)
      if (!std::isfinite(x)) throw DomainError("coeffs: entries must be finite");
  } else {
    throw DomainError("reaction: unknown value '" + c.reaction + "' (nagumo, cubic, polynomial)");
  }
  if (!(c.nu > 0.0) || !std::isfinite(c.nu)) throw DomainError("nu: must be positive");
  if (!(c.b > 0.0) || !std::isfinite(c.b)) throw DomainError("b: must be positive");
  if (c.l_dom && !(*c.l_dom > 0.0 && std::isfinite(*c.l_dom))) throw DomainError("l_dom: must be positive");
  if (c.n < 16 || (c.n & (c.n - 1)) != 0) throw DomainError("n: must be a power of two >= 16");
  if (!(c.profile_tol > 0.0)) throw DomainError("profile_tol: must be positive");
  if (!(c.tol.abs >= 0.0) || !(c.tol.rel >= 0.0)) throw DomainError("tolerance: abs and rel must be nonnegative");
  if (c.assumption_samples < 100) throw DomainError("tolerance.assumption_samples: must be >= 100");
  if (!(c.noise_amp >= 0.0) || !std::isfinite(c.noise_amp)) throw DomainError("noise.amp: must be nonnegative");
  if (c.noise_hs_target && !(*c.noise_hs_target >= 0.0)) throw DomainError("noise.hs_target: must be nonnegative");
  if (!(c.noise_corr_len > 0.0)) throw DomainError("noise.corr_len: must be positive");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw DomainError("simulation.dt: must be positive");
  if (!(c.t_end > 0.0)) throw DomainError("simulation.t_end: must be positive");
  if (!(c.t_max >= 0.0) || !std::isfinite(c.t_max)) throw DomainError("simulation.t_max: must be nonnegative");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw DomainError("simulation.delta: must lie in (0,1)");
  if (c.m && !(*c.m >= 0.0)) throw DomainError("simulation.m: must be nonnegative");
  if (c.trials < 1) throw DomainError("simulation.trials: must be >= 1");
  if (c.record_every < 1) throw DomainError("simulation.record_every: must be >= 1");
  if (!(c.envelope_tol >= 0.0)) throw DomainError("simulation.envelope_tol: must be nonnegative");
  if (!(c.u0_norm >= 0.0)) throw DomainError("simulation.u0_norm: must be nonnegative");
  if (!(c.u0_width > 0.0)) throw DomainError("simulation.u0_width: must be positive");
}

/// Applies `key=value` overrides (TOML value syntax) on top of a table.
inline void apply_overrides(toml::Table& table, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw DomainError("--set: expected key=value, got '" + o + "'");
    const std::string key = std::string(toml::detail::trim(std::string_view(o).substr(0, eq)));
    const std::string_view text = toml::detail::trim(std::string_view(o).substr(eq + 1));
    toml::Value v;
    try {
      v = toml::parse_value(text);
    } catch (const DomainError&) {
      // bare words are taken as strings: --set noise.kind=white
      v.data = std::string(text);
    }
    table[key] = v;
  }
}

inline RunConfig resolve_config(const toml::Table& table) {
  RunConfig cfg;
  for (const auto& [key, value] : table) config_detail::apply(cfg, key, value);
  validate_config(cfg);
  return cfg;
}

/// Reads `path` (empty: defaults only), applies overrides, fills defaults and validates.
inline RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  toml::Table table;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    table = toml::parse(in);
  }
  apply_overrides(table, overrides);
  return resolve_config(table);
}

inline ReactionSpec make_reaction(const RunConfig& c) {
  if (c.reaction == "nagumo") return make_nagumo(c.a);
  return make_polynomial_reaction(c.coeffs, c.reaction);
}

inline std::size_t resolve_threads(std::size_t configured) {
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace wavegauge
