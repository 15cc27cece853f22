#include "domcode/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "domcode/errors.hpp"

namespace domcode {

void BoundReport::add(std::string name, double value, bool vacuous) {
  rows.push_back({std::move(name), value, value, vacuous});
}

void BoundReport::add_clamped(std::string name, double raw) {
  double v = std::clamp(raw, 0.0, 1.0);
  rows.push_back({std::move(name), v, raw, v != raw});
}

const BoundRow& BoundReport::row(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw ArgumentError("bound report has no row '" + name + "'");
}

bool BoundReport::has(const std::string& name) const {
  return std::any_of(rows.begin(), rows.end(), [&](const BoundRow& r) { return r.name == name; });
}

std::string BoundReport::csv(bool header) const {
  std::ostringstream out;
  out.precision(17);
  std::ostringstream p;
  p.precision(17);
  for (std::size_t i = 0; i < params.size(); ++i)
    p << (i ? ";" : "") << params[i].first << '=' << params[i].second;
  if (header) out << "params,bound,value,raw,vacuous\n";
  for (const auto& r : rows)
    out << p.str() << ',' << r.name << ',' << r.value << ',' << r.raw << ',' << (r.vacuous ? 1 : 0) << '\n';
  return out.str();
}

std::string BoundReport::json() const {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : params) j["params"][k] = v;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["bound"] = r.name;
    row["value"] = std::isfinite(r.value) ? nlohmann::json(r.value) : nlohmann::json(nullptr);
    row["raw"] = std::isfinite(r.raw) ? nlohmann::json(r.raw) : nlohmann::json(nullptr);
    row["vacuous"] = r.vacuous;
    j["rows"].push_back(row);
  }
  return j.dump(2);
}

Interval wilson_interval(long k, long n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double center = (phat + z2 / (2.0 * nn)) / (1.0 + z2 / nn);
  const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace domcode
