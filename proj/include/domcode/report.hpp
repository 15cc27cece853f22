#pragma once

#include <string>
#include <utility>
#include <vector>

namespace domcode {

struct BoundRow {
  std::string name;
  double value = 0.0;
  // Value before clamping to [0, 1]; equals `value` when nothing was clamped.
  double raw = 0.0;
  bool vacuous = false;
};

struct BoundReport {
  std::vector<std::pair<std::string, double>> params;
  std::vector<BoundRow> rows;

  void add(std::string name, double value, bool vacuous = false);
  // Adds value clamped to [0, 1], keeping the raw value.
  void add_clamped(std::string name, double raw);
  const BoundRow& row(const std::string& name) const;
  double value(const std::string& name) const { return row(name).value; }
  bool has(const std::string& name) const;

  // Rows "params,bound,value,raw,vacuous"; params rendered as k=v pairs joined by ';'.
  std::string csv(bool header = true) const;
  std::string json() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval for k successes in n trials at normal quantile z.
Interval wilson_interval(long k, long n, double z);
inline constexpr double kZ99 = 2.5758293035489004;

}  // namespace domcode
