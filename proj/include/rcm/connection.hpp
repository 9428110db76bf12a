#pragma once

// Connection functions: nonincreasing maps [0,inf) -> [0,1] with finite
// range R = sup{r : phi(r) > 0}.  Builtin kinds plus tables with linear
// interpolation; tables load from two-column `r,phi(r)` files.

#include <string>
#include <vector>

namespace rcm {

class ConnectionFunction {
 public:
  enum class Kind { Indicator, Step, TruncExp, Table };

  // 1_{[0,R]}
  static ConnectionFunction indicator(double range);
  // piecewise constant: value levels[i] on [r_{i-1}, r_i), given as pairs
  // (r_i, value_i) with decreasing values; zero beyond the last r.
  static ConnectionFunction step(std::vector<std::pair<double, double>> levels);
  // min(1, c) * exp(-rate r) truncated to [0, R]; c=1 here.
  static ConnectionFunction truncated_exponential(double rate, double range);
  static ConnectionFunction table(std::vector<double> r, std::vector<double> value);
  static ConnectionFunction from_table_file(const std::string& path);

  // Parse "indicator:R", "exp:RATE,R", "step:r1,v1,r2,v2,...",
  // "table:PATH".
  static ConnectionFunction parse(const std::string& text);

  double operator()(double r) const;
  double range() const { return range_; }
  Kind kind() const { return kind_; }
  std::string describe() const;

 private:
  ConnectionFunction() = default;
  void validate() const;

  Kind kind_ = Kind::Indicator;
  double range_ = 1.0;
  double rate_ = 1.0;
  std::vector<double> xs_, vs_;
};

}  // namespace rcm
