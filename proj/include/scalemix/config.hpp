#pragma once

// Sectioned key=value run configuration:
//
//   [data]      y=<csv>  x=<csv>  [a=<real>]
//   [mixing]    family=<name> + per-family parameter keys
//   [run]       iterations=<n> [burn_in=] [thin=] [seed=] [algo=] [chains=]
//               [record_latent=]
//
// family=mixture takes repeated [mixing.component] blocks (each with weight=
// plus family keys); family=truncated takes delta= plus one [mixing.inner]
// block.  Any non-composite family accepts trunc_delta= as shorthand for
// wrapping it in a truncated density.  Unknown keys are rejected, and every
// diagnostic carries the offending line number.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scalemix/errors.hpp"
#include "scalemix/format.hpp"
#include "scalemix/mixing.hpp"

namespace scalemix {

struct RunSettings {
  std::size_t iterations = 0;
  std::optional<std::size_t> burn_in;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  std::string algo = "da";  // da | pxda | oracle
  int chains = 1;
  bool record_latent = false;
};

struct ParsedConfig {
  std::string y_path;
  std::string x_path;
  std::optional<double> a;  // defaults to (d+1)/2 once d is known
  MixingDensity h;
  bool has_run = false;
  RunSettings run;
};

namespace detail {

struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

using Section = std::map<std::string, ConfigEntry>;

struct RawConfig {
  Section data;
  Section mixing;
  Section run;
  std::vector<Section> components;
  Section inner;
  bool has_data = false, has_mixing = false, has_run = false, has_inner = false;
};

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline RawConfig lex_config(const std::string& text) {
  RawConfig raw;
  Section* current = nullptr;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto stop = text.find('\n', start);
    std::string line = text.substr(
        start, stop == std::string::npos ? std::string::npos : stop - start);
    start = stop == std::string::npos ? text.size() + 1 : stop + 1;
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(lineno, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name == "data") {
        raw.has_data = true;
        current = &raw.data;
      } else if (name == "mixing") {
        raw.has_mixing = true;
        current = &raw.mixing;
      } else if (name == "run") {
        raw.has_run = true;
        current = &raw.run;
      } else if (name == "mixing.component") {
        raw.components.emplace_back();
        current = &raw.components.back();
      } else if (name == "mixing.inner") {
        if (raw.has_inner)
          throw ConfigError(lineno, "duplicate [mixing.inner] section");
        raw.has_inner = true;
        current = &raw.inner;
      } else {
        throw ConfigError(lineno, "unknown section [" + name + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "expected key=value, got '" + line + "'");
    if (current == nullptr)
      throw ConfigError(lineno, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (current->count(key))
      throw ConfigError(lineno, "duplicate key '" + key + "'");
    (*current)[key] = ConfigEntry{value, lineno};
  }
  return raw;
}

inline double config_real(const Section& sec, const std::string& key) {
  const auto& entry = sec.at(key);
  try {
    return parse_double(entry.value);
  } catch (const std::exception&) {
    throw ConfigError(entry.line, "value of '" + key + "' is not a number: '" +
                                      entry.value + "'");
  }
}

inline double config_positive(const Section& sec, const std::string& key) {
  const double v = config_real(sec, key);
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(sec.at(key).line, "'" + key + "' must be positive");
  return v;
}

inline std::uint64_t config_unsigned(const Section& sec, const std::string& key) {
  const auto& entry = sec.at(key);
  if (entry.value.empty() ||
      entry.value.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(entry.line,
                      "'" + key + "' must be a nonnegative integer");
  try {
    return std::stoull(entry.value);
  } catch (const std::exception&) {
    throw ConfigError(entry.line, "'" + key + "' is out of range");
  }
}

inline bool config_bool(const Section& sec, const std::string& key) {
  const auto& entry = sec.at(key);
  if (entry.value == "true" || entry.value == "1") return true;
  if (entry.value == "false" || entry.value == "0") return false;
  throw ConfigError(entry.line, "'" + key + "' must be true or false");
}

inline void reject_unknown(const Section& sec, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (const auto& [key, entry] : sec)
    if (!allowed.count(key))
      throw ConfigError(entry.line, "unknown key '" + key + "' in " + where);
}

inline void require_keys(const Section& sec, const std::vector<std::string>& keys,
                         const std::string& where, std::size_t section_line) {
  for (const auto& key : keys)
    if (!sec.count(key))
      throw ConfigError(section_line ? section_line : 1,
                        where + " requires key '" + key + "'");
}

inline std::size_t section_line(const Section& sec) {
  std::size_t best = 0;
  for (const auto& [key, entry] : sec)
    if (best == 0 || entry.line < best) best = entry.line;
  return best;
}

// Builds a non-composite family from its keys; `extra` lists keys the caller
// already consumed (weight=, trunc_delta=, ...).
inline MixingDensity family_from_section(const Section& sec,
                                         const std::set<std::string>& extra,
                                         const std::string& where) {
  const std::size_t line = section_line(sec);
  if (!sec.count("family"))
    throw ConfigError(line ? line : 1, where + " requires key 'family'");
  const auto& fam_entry = sec.at("family");
  const std::string fam = fam_entry.value;
  auto allowed = extra;
  allowed.insert("family");
  const auto finish = [&](std::vector<std::string> keys,
                          auto&& build) -> MixingDensity {
    for (const auto& k : keys) allowed.insert(k);
    reject_unknown(sec, allowed, where);
    require_keys(sec, keys, where + " family '" + fam + "'", fam_entry.line);
    try {
      return build();
    } catch (const ConfigError&) {
      throw;  // per-key diagnostics already carry the right line
    } catch (const std::exception& err) {
      throw ConfigError(fam_entry.line, err.what());
    }
  };

  if (fam == "gamma")
    return finish({"alpha", "gamma"}, [&] {
      return MixingDensity::gamma(config_positive(sec, "alpha"),
                                  config_positive(sec, "gamma"));
    });
  if (fam == "beta")
    return finish({"alpha", "gamma"}, [&] {
      return MixingDensity::beta(config_positive(sec, "alpha"),
                                 config_positive(sec, "gamma"));
    });
  if (fam == "weibull")
    return finish({"alpha", "gamma"}, [&] {
      return MixingDensity::weibull(config_positive(sec, "alpha"),
                                    config_positive(sec, "gamma"));
    });
  if (fam == "f")
    return finish({"nu1", "nu2"}, [&] {
      return MixingDensity::fisher_f(config_positive(sec, "nu1"),
                                     config_positive(sec, "nu2"));
    });
  if (fam == "pareto")
    return finish({"alpha", "gamma"}, [&] {
      return MixingDensity::shifted_pareto(config_positive(sec, "alpha"),
                                           config_positive(sec, "gamma"));
    });
  if (fam == "ig")
    return finish({"alpha", "gamma"}, [&] {
      return MixingDensity::inverted_gamma(config_positive(sec, "alpha"),
                                           config_positive(sec, "gamma"));
    });
  if (fam == "gig")
    return finish({"v", "a", "b"}, [&] {
      return MixingDensity::gig(config_real(sec, "v"), config_real(sec, "a"),
                                config_real(sec, "b"));
    });
  if (fam == "lognormal")
    return finish({"mu", "gamma"}, [&] {
      return MixingDensity::log_normal(config_real(sec, "mu"),
                                       config_positive(sec, "gamma"));
    });
  if (fam == "frechet")
    return finish({"alpha", "gamma"}, [&] {
      return MixingDensity::frechet(config_positive(sec, "alpha"),
                                    config_positive(sec, "gamma"));
    });
  throw ConfigError(fam_entry.line, "unknown family '" + fam + "'");
}

// Family plus the trunc_delta= shorthand.
inline MixingDensity leaf_from_section(const Section& sec,
                                       const std::set<std::string>& extra,
                                       const std::string& where) {
  auto with_sugar = extra;
  with_sugar.insert("trunc_delta");
  MixingDensity base = family_from_section(sec, with_sugar, where);
  if (sec.count("trunc_delta")) {
    const double delta = config_positive(sec, "trunc_delta");
    try {
      return MixingDensity::truncated(base, delta);
    } catch (const std::exception& err) {
      throw ConfigError(sec.at("trunc_delta").line, err.what());
    }
  }
  return base;
}

inline MixingDensity mixing_from_raw(const RawConfig& raw) {
  const Section& sec = raw.mixing;
  const std::size_t line = section_line(sec);
  if (!sec.count("family"))
    throw ConfigError(line ? line : 1, "[mixing] requires key 'family'");
  const auto& fam_entry = sec.at("family");
  const std::string fam = fam_entry.value;

  if (fam == "mixture") {
    reject_unknown(sec, {"family"}, "[mixing] (family 'mixture')");
    if (raw.components.empty())
      throw ConfigError(fam_entry.line,
                        "family 'mixture' needs [mixing.component] sections");
    std::vector<double> weights;
    std::vector<MixingDensity> parts;
    for (const auto& comp : raw.components) {
      const std::size_t comp_line = section_line(comp);
      if (!comp.count("weight"))
        throw ConfigError(comp_line ? comp_line : fam_entry.line,
                          "[mixing.component] requires key 'weight'");
      weights.push_back(config_positive(comp, "weight"));
      parts.push_back(leaf_from_section(comp, {"weight"}, "[mixing.component]"));
    }
    try {
      return MixingDensity::mixture(weights, parts);
    } catch (const std::exception& err) {
      throw ConfigError(fam_entry.line, err.what());
    }
  }

  if (fam == "truncated") {
    reject_unknown(sec, {"family", "delta"}, "[mixing] (family 'truncated')");
    if (!sec.count("delta"))
      throw ConfigError(fam_entry.line, "family 'truncated' requires key 'delta'");
    if (!raw.has_inner)
      throw ConfigError(fam_entry.line,
                        "family 'truncated' needs a [mixing.inner] section");
    const double delta = config_positive(sec, "delta");
    const MixingDensity inner = leaf_from_section(raw.inner, {}, "[mixing.inner]");
    try {
      return MixingDensity::truncated(inner, delta);
    } catch (const std::exception& err) {
      throw ConfigError(sec.at("delta").line, err.what());
    }
  }

  if (!raw.components.empty())
    throw ConfigError(section_line(raw.components.front()),
                      "[mixing.component] is only valid with family 'mixture'");
  if (raw.has_inner)
    throw ConfigError(section_line(raw.inner),
                      "[mixing.inner] is only valid with family 'truncated'");
  return leaf_from_section(sec, {}, "[mixing]");
}

}  // namespace detail

inline ParsedConfig parse_config(const std::string& text) {
  const detail::RawConfig raw = detail::lex_config(text);
  if (!raw.has_data) throw ConfigError(1, "missing [data] section");
  if (!raw.has_mixing) throw ConfigError(1, "missing [mixing] section");
  if (!raw.components.empty() && !raw.has_mixing)
    throw ConfigError(1, "[mixing.component] without [mixing]");

  detail::reject_unknown(raw.data, {"y", "x", "a"}, "[data]");
  detail::require_keys(raw.data, {"y", "x"}, "[data]",
                       detail::section_line(raw.data));

  ParsedConfig config;
  config.y_path = raw.data.at("y").value;
  config.x_path = raw.data.at("x").value;
  if (config.y_path.empty())
    throw ConfigError(raw.data.at("y").line, "'y' must be a path");
  if (config.x_path.empty())
    throw ConfigError(raw.data.at("x").line, "'x' must be a path");
  if (raw.data.count("a")) config.a = detail::config_positive(raw.data, "a");

  config.h = detail::mixing_from_raw(raw);

  config.has_run = raw.has_run;
  if (raw.has_run) {
    detail::reject_unknown(raw.run,
                           {"iterations", "burn_in", "thin", "seed", "algo",
                            "chains", "record_latent"},
                           "[run]");
    detail::require_keys(raw.run, {"iterations"}, "[run]",
                         detail::section_line(raw.run));
    config.run.iterations = detail::config_unsigned(raw.run, "iterations");
    if (config.run.iterations == 0)
      throw ConfigError(raw.run.at("iterations").line,
                        "'iterations' must be at least 1");
    if (raw.run.count("burn_in"))
      config.run.burn_in = detail::config_unsigned(raw.run, "burn_in");
    if (raw.run.count("thin")) {
      config.run.thin = detail::config_unsigned(raw.run, "thin");
      if (config.run.thin == 0)
        throw ConfigError(raw.run.at("thin").line, "'thin' must be at least 1");
    }
    if (raw.run.count("seed"))
      config.run.seed = detail::config_unsigned(raw.run, "seed");
    if (raw.run.count("algo")) {
      const auto& entry = raw.run.at("algo");
      if (entry.value != "da" && entry.value != "pxda" && entry.value != "oracle")
        throw ConfigError(entry.line, "'algo' must be da, pxda, or oracle");
      config.run.algo = entry.value;
    }
    if (raw.run.count("chains")) {
      const std::uint64_t k = detail::config_unsigned(raw.run, "chains");
      if (k == 0 || k > 4096)
        throw ConfigError(raw.run.at("chains").line,
                          "'chains' must be between 1 and 4096");
      config.run.chains = static_cast<int>(k);
    }
    if (raw.run.count("record_latent"))
      config.run.record_latent = detail::config_bool(raw.run, "record_latent");
  }
  return config;
}

}  // namespace scalemix
