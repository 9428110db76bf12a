#include "rcm/config.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rcm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

enum class ValueType { Integer, Real, Bool, String, RealList };

struct KeySpec {
  const char* key;
  ValueType type;
  bool required;
};

// Keys accepted by every experiment.
const std::vector<KeySpec> kCommonKeys = {
    {"experiment", ValueType::String, true},
    {"seed", ValueType::Integer, false},
    {"out", ValueType::String, false},
    {"workers", ValueType::Integer, false},
    {"plot", ValueType::Bool, false},
};

const std::map<std::string, std::vector<KeySpec>>& schema() {
  static const std::map<std::string, std::vector<KeySpec>> s = {
      {"sample",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"halfwidth", ValueType::Real, true}}},
      {"graph",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"halfwidth", ValueType::Real, true},
        {"phi", ValueType::String, true},
        {"norm", ValueType::String, false}}},
      {"theta",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"phi", ValueType::String, true},
        {"norm", ValueType::String, false},
        {"r_inner", ValueType::Real, true},
        {"r_outer", ValueType::Real, true},
        {"reps", ValueType::Integer, true},
        {"two_level", ValueType::Bool, false}}},
      {"pi-k",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"phi", ValueType::String, true},
        {"norm", ValueType::String, false},
        {"halfwidth", ValueType::Real, true},
        {"k_max", ValueType::Integer, true},
        {"reps", ValueType::Integer, true}}},
      {"lambda-c",
       {{"dim", ValueType::Integer, true},
        {"phi", ValueType::String, true},
        {"norm", ValueType::String, false},
        {"geometry", ValueType::String, false},
        {"slab_thickness", ValueType::Real, false},
        {"window", ValueType::Real, true},
        {"tolerance", ValueType::Real, true},
        {"reps", ValueType::Integer, true},
        {"lambda_lo", ValueType::Real, true},
        {"lambda_hi", ValueType::Real, true}}},
      {"slab-curve",
       {{"dim", ValueType::Integer, true},
        {"phi", ValueType::String, true},
        {"norm", ValueType::String, false},
        {"m_list", ValueType::RealList, true},
        {"window", ValueType::Real, true},
        {"tolerance", ValueType::Real, true},
        {"reps", ValueType::Integer, true},
        {"lambda_lo", ValueType::Real, true},
        {"lambda_hi", ValueType::Real, true}}},
      {"decay",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"phi", ValueType::String, true},
        {"norm", ValueType::String, false},
        {"r_list", ValueType::RealList, true},
        {"r_outer", ValueType::Real, true},
        {"reps", ValueType::Integer, true}}},
      {"giant",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"phi", ValueType::String, true},
        {"norm", ValueType::String, false},
        {"s_list", ValueType::RealList, true},
        {"reps", ValueType::Integer, true},
        {"theta_reps", ValueType::Integer, false}}},
      {"fkg",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"phi", ValueType::String, true},
        {"norm", ValueType::String, false},
        {"halfwidth", ValueType::Real, true},
        {"pair", ValueType::String, true},
        {"reps", ValueType::Integer, true}}},
      {"explore",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"phi", ValueType::String, true},
        {"norm", ValueType::String, false},
        {"halfwidth", ValueType::Real, true},
        {"construction", ValueType::String, true}}},
      {"renorm",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"m", ValueType::Integer, true},
        {"n", ValueType::Integer, true},
        {"eps0", ValueType::Real, false},
        {"eps1", ValueType::Real, true},
        {"window", ValueType::Integer, true},
        {"runs", ValueType::Integer, false}}},
      {"oriented",
       {{"p", ValueType::Real, true},
        {"window", ValueType::Integer, true},
        {"reps", ValueType::Integer, true}}},
      {"constants",
       {{"dim", ValueType::Integer, true},
        {"lambda", ValueType::Real, true},
        {"mu", ValueType::Real, true},
        {"m", ValueType::Integer, true},
        {"n", ValueType::Integer, true},
        {"phi", ValueType::String, true},
        {"eps2_reps", ValueType::Integer, true}}},
  };
  return s;
}

std::string canon_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string canonicalize(const std::string& key, const std::string& raw,
                         ValueType type, int line) {
  auto bad = [&](const std::string& why) -> ConfigError {
    return ConfigError("line " + std::to_string(line) + ": " + why + " for key '" +
                       key + "'");
  };
  switch (type) {
    case ValueType::Integer: {
      try {
        std::size_t pos = 0;
        long v = std::stol(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument("");
        return std::to_string(v);
      } catch (...) {
        throw bad("type mismatch (expected integer)");
      }
    }
    case ValueType::Real: {
      try {
        std::size_t pos = 0;
        double v = std::stod(raw, &pos);
        if (pos != raw.size()) throw std::invalid_argument("");
        return canon_real(v);
      } catch (...) {
        throw bad("type mismatch (expected number)");
      }
    }
    case ValueType::Bool: {
      if (raw == "true" || raw == "1" || raw == "yes") return "true";
      if (raw == "false" || raw == "0" || raw == "no") return "false";
      throw bad("type mismatch (expected boolean)");
    }
    case ValueType::RealList: {
      std::istringstream ss(raw);
      std::string tok, out;
      bool any = false;
      while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
          std::size_t pos = 0;
          double v = std::stod(tok, &pos);
          if (pos != tok.size()) throw std::invalid_argument("");
          out += (any ? "," : "") + canon_real(v);
          any = true;
        } catch (...) {
          throw bad("type mismatch (expected number list)");
        }
      }
      if (!any) throw bad("empty list");
      return out;
    }
    case ValueType::String:
      return raw;
  }
  return raw;
}

}  // namespace

double ExperimentConfig::real(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing key: " + key);
  return std::stod(it->second);
}

double ExperimentConfig::real_or(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : std::stod(it->second);
}

long ExperimentConfig::integer(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing key: " + key);
  return std::stol(it->second);
}

long ExperimentConfig::integer_or(const std::string& key, long fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : std::stol(it->second);
}

bool ExperimentConfig::flag_or(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second == "true";
}

std::string ExperimentConfig::str(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing key: " + key);
  return it->second;
}

std::string ExperimentConfig::str_or(const std::string& key,
                                     const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::vector<double> ExperimentConfig::list(const std::string& key) const {
  std::vector<double> out;
  std::istringstream ss(str(key));
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

const std::vector<std::string>& known_experiments() {
  static std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, spec] : schema()) v.push_back(name);
    return v;
  }();
  return names;
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, std::pair<std::string, int>> raw;  // key -> (value, line)
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": syntax error (expected key = value)");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": syntax error (expected key = value)");
    if (raw.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    raw[key] = {value, lineno};
  }

  auto exp_it = raw.find("experiment");
  if (exp_it == raw.end()) throw ConfigError("missing key: experiment");
  const std::string experiment = exp_it->second.first;
  auto sch_it = schema().find(experiment);
  if (sch_it == schema().end())
    throw ConfigError("line " + std::to_string(exp_it->second.second) +
                      ": unknown experiment '" + experiment + "'");

  std::map<std::string, KeySpec> allowed;
  for (const auto& k : kCommonKeys) allowed[k.key] = k;
  for (const auto& k : sch_it->second) allowed[k.key] = k;

  ExperimentConfig cfg;
  cfg.experiment = experiment;
  for (const auto& [key, vl] : raw) {
    auto it = allowed.find(key);
    if (it == allowed.end())
      throw ConfigError("line " + std::to_string(vl.second) + ": unknown key '" + key + "'");
    cfg.values[key] = canonicalize(key, vl.first, it->second.type, vl.second);
  }
  for (const auto& k : sch_it->second) {
    if (k.required && !cfg.values.count(k.key))
      throw ConfigError("missing key: " + std::string(k.key));
  }

  // Bounds checks shared across experiments.
  if (cfg.values.count("reps") && std::stol(cfg.values["reps"]) < 1)
    throw ConfigError("reps must be ≥ 1");
  if (cfg.values.count("eps2_reps") && std::stol(cfg.values["eps2_reps"]) < 1)
    throw ConfigError("eps2_reps must be ≥ 1");
  if (cfg.values.count("runs") && std::stol(cfg.values["runs"]) < 1)
    throw ConfigError("runs must be ≥ 1");
  if (cfg.values.count("dim") && std::stol(cfg.values["dim"]) < 1)
    throw ConfigError("dim must be ≥ 1");

  cfg.seed = static_cast<std::uint64_t>(cfg.integer_or("seed", 1));
  cfg.out_dir = cfg.str_or("out", ".");
  cfg.workers = static_cast<int>(cfg.integer_or("workers", 0));
  cfg.plot = cfg.flag_or("plot", false);
  return cfg;
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "experiment = " << config.experiment << "\n";
  for (const auto& [k, v] : config.values) {
    if (k == "experiment") continue;
    os << k << " = " << v << "\n";
  }
  return os.str();
}

}  // namespace rcm
