#include "rcm/connection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcm {

ConnectionFunction ConnectionFunction::indicator(double range) {
  if (range <= 0) throw std::invalid_argument("indicator: range must be positive");
  ConnectionFunction f;
  f.kind_ = Kind::Indicator;
  f.range_ = range;
  return f;
}

ConnectionFunction ConnectionFunction::step(std::vector<std::pair<double, double>> levels) {
  if (levels.empty()) throw std::invalid_argument("step: no levels");
  ConnectionFunction f;
  f.kind_ = Kind::Step;
  for (auto& [r, v] : levels) {
    f.xs_.push_back(r);
    f.vs_.push_back(v);
  }
  f.range_ = f.xs_.back();
  f.validate();
  return f;
}

ConnectionFunction ConnectionFunction::truncated_exponential(double rate, double range) {
  if (range <= 0 || rate < 0) throw std::invalid_argument("truncated_exponential: bad parameters");
  ConnectionFunction f;
  f.kind_ = Kind::TruncExp;
  f.rate_ = rate;
  f.range_ = range;
  return f;
}

ConnectionFunction ConnectionFunction::table(std::vector<double> r, std::vector<double> value) {
  if (r.size() != value.size() || r.size() < 2)
    throw std::invalid_argument("table: need matching r/value columns");
  ConnectionFunction f;
  f.kind_ = Kind::Table;
  f.xs_ = std::move(r);
  f.vs_ = std::move(value);
  f.range_ = f.xs_.back();
  f.validate();
  return f;
}

ConnectionFunction ConnectionFunction::from_table_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open connection table " + path);
  std::vector<double> r, v;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (ss >> a >> b) {
      r.push_back(a);
      v.push_back(b);
    }
  }
  return table(std::move(r), std::move(v));
}

void ConnectionFunction::validate() const {
  double prev_r = -1.0, prev_v = 2.0;
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (xs_[i] <= prev_r) throw std::invalid_argument("connection function: radii not increasing");
    if (vs_[i] < 0.0 || vs_[i] > 1.0)
      throw std::invalid_argument("connection function: values outside [0,1]");
    if (vs_[i] > prev_v + 1e-12)
      throw std::invalid_argument("connection function: not nonincreasing");
    prev_r = xs_[i];
    prev_v = vs_[i];
  }
}

double ConnectionFunction::operator()(double r) const {
  if (r < 0) throw std::invalid_argument("connection function: negative distance");
  switch (kind_) {
    case Kind::Indicator:
      return r <= range_ ? 1.0 : 0.0;
    case Kind::TruncExp:
      return r <= range_ ? std::exp(-rate_ * r) : 0.0;
    case Kind::Step: {
      for (std::size_t i = 0; i < xs_.size(); ++i)
        if (r <= xs_[i]) return vs_[i];
      return 0.0;
    }
    case Kind::Table: {
      if (r > xs_.back()) return 0.0;
      if (r <= xs_.front()) return vs_.front();
      auto it = std::lower_bound(xs_.begin(), xs_.end(), r);
      std::size_t i = static_cast<std::size_t>(it - xs_.begin());
      double t = (r - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return vs_[i - 1] + t * (vs_[i] - vs_[i - 1]);
    }
  }
  return 0.0;
}

std::string ConnectionFunction::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Indicator:
      os << "indicator:" << range_;
      break;
    case Kind::TruncExp:
      os << "exp:" << rate_ << "," << range_;
      break;
    case Kind::Step: {
      os << "step:";
      for (std::size_t i = 0; i < xs_.size(); ++i)
        os << (i ? "," : "") << xs_[i] << "," << vs_[i];
      break;
    }
    case Kind::Table:
      os << "table[" << xs_.size() << " rows, range " << range_ << "]";
      break;
  }
  return os.str();
}

ConnectionFunction ConnectionFunction::parse(const std::string& text) {
  auto colon = text.find(':');
  std::string kind = colon == std::string::npos ? text : text.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);
  std::vector<double> nums;
  {
    std::istringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) nums.push_back(std::stod(tok));
  }
  if (kind == "indicator") {
    return indicator(nums.empty() ? 1.0 : nums[0]);
  }
  if (kind == "exp") {
    if (nums.size() != 2) throw std::invalid_argument("phi exp: expected rate,range");
    return truncated_exponential(nums[0], nums[1]);
  }
  if (kind == "step") {
    if (nums.size() < 2 || nums.size() % 2 != 0)
      throw std::invalid_argument("phi step: expected r1,v1,r2,v2,...");
    std::vector<std::pair<double, double>> lv;
    for (std::size_t i = 0; i < nums.size(); i += 2) lv.emplace_back(nums[i], nums[i + 1]);
    return step(std::move(lv));
  }
  if (kind == "table") {
    return from_table_file(args);
  }
  throw std::invalid_argument("unknown connection function: " + text);
}

}  // namespace rcm
