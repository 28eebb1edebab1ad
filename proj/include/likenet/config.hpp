#pragma once

// Flat "key = value" configuration with layered overrides.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "likenet/ensemble.hpp"
#include "likenet/text.hpp"

namespace likenet {

using Settings = std::map<std::string, std::string>;

/// Canonical key for a setting: lowercase, '-' -> '_', with the flag
/// spellings folded onto EnsembleConfig field names.
inline std::string canonical_key(std::string key) {
  for (auto& c : key) c = c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  static const std::map<std::string, std::string> aliases{
      {"samples", "sample_count"}, {"lambda", "rate_lambda"}, {"seed", "master_seed"},
      {"max_iter", "max_iterations"}, {"tail", "strategic_tail"}};
  if (auto it = aliases.find(key); it != aliases.end()) return it->second;
  return key;
}

inline Settings parse_settings(std::istream& in) {
  Settings out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config: expected 'key = value' on line " + std::to_string(lineno));
    }
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw std::runtime_error("config: empty key on line " + std::to_string(lineno));
    out[canonical_key(std::string(key))] = std::string(value);
  }
  return out;
}

inline Settings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_settings(in);
}

/// Reads PREFIX_<KEY> for each name, e.g. LIKENET_SAMPLES for "samples".
inline Settings env_settings(const std::string& prefix, std::initializer_list<const char*> names) {
  Settings out;
  for (const char* name : names) {
    std::string var = prefix;
    for (const char* p = name; *p; ++p) {
      var += *p == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    }
    if (const char* v = std::getenv(var.c_str()); v != nullptr) out[canonical_key(name)] = v;
  }
  return out;
}

/// Later layers win.
inline Settings merge(Settings base, const Settings& over) {
  for (const auto& [k, v] : over) base[k] = v;
  return base;
}

namespace detail {

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long x = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    x = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw std::invalid_argument("config: '" + key + "' expects a nonnegative integer, got '" +
                                value + "'");
  }
  return x;
}

inline double parse_real(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

}  // namespace detail

inline StrategicTail parse_tail(const std::string& value) {
  if (value == "highest" || value == "high") return StrategicTail::HighestStability;
  if (value == "lowest" || value == "low") return StrategicTail::LowestStability;
  throw std::invalid_argument("config: strategic_tail must be 'highest' or 'lowest', got '" +
                              value + "'");
}

inline const char* tail_name(StrategicTail t) {
  return t == StrategicTail::HighestStability ? "highest" : "lowest";
}

/// Applies recognised keys onto `config`; unknown keys are returned so the
/// caller can decide whether they are errors.
inline Settings apply_settings(EnsembleConfig& config, const Settings& settings) {
  Settings unknown;
  for (const auto& [key, value] : settings) {
    if (key == "sample_count") config.sample_count = detail::parse_unsigned(key, value);
    else if (key == "n") config.n = detail::parse_unsigned(key, value);
    else if (key == "k") config.k = detail::parse_unsigned(key, value);
    else if (key == "rate_lambda") config.rate_lambda = detail::parse_real(key, value);
    else if (key == "master_seed") config.master_seed = detail::parse_unsigned(key, value);
    else if (key == "tolerance") config.solver.tolerance = detail::parse_real(key, value);
    else if (key == "max_iterations") config.solver.max_iterations = detail::parse_unsigned(key, value);
    else if (key == "relaxation") config.solver.relaxation = detail::parse_real(key, value);
    else if (key == "strategic_fraction") config.strategic_fraction = detail::parse_real(key, value);
    else if (key == "strategic_tail") config.strategic_tail = parse_tail(value);
    else unknown[key] = value;
  }
  return unknown;
}

inline std::string to_config_text(const EnsembleConfig& c) {
  std::ostringstream out;
  out << "sample_count = " << c.sample_count << '\n'
      << "n = " << c.n << '\n'
      << "k = " << c.k << '\n'
      << "rate_lambda = " << format_double(c.rate_lambda) << '\n'
      << "master_seed = " << c.master_seed << '\n'
      << "tolerance = " << format_double(c.solver.tolerance) << '\n'
      << "max_iterations = " << c.solver.max_iterations << '\n'
      << "relaxation = " << format_double(c.solver.relaxation) << '\n'
      << "strategic_fraction = " << format_double(c.strategic_fraction) << '\n'
      << "strategic_tail = " << tail_name(c.strategic_tail) << '\n';
  return out.str();
}

}  // namespace likenet
