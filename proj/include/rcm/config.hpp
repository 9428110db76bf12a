#pragma once

// Flat key = value experiment configuration.  One config = one experiment =
// one master seed.  `#` starts a comment; lists are comma-separated.
// Unknown keys are rejected with their line number, and every required
// parameter is validated before any sampling happens.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcm {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ExperimentConfig {
  std::string experiment;
  // Canonicalized values (numbers re-rendered, lists re-joined).
  std::map<std::string, std::string> values;

  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int workers = 0;  // 0 = library default
  bool plot = false;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  double real(const std::string& key) const;
  double real_or(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer_or(const std::string& key, long fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;
  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;
  std::vector<double> list(const std::string& key) const;
};

// Parses and validates; throws ConfigError with a line-addressed message on
// syntax errors, unknown keys, missing keys or bad values.
ExperimentConfig parse_config(const std::string& text);

// Canonical rendering; serialize(parse(x)) is a fixed point.
std::string serialize_config(const ExperimentConfig& config);

const std::vector<std::string>& known_experiments();

}  // namespace rcm
