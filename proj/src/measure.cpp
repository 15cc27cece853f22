#include "domcode/measure.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "domcode/errors.hpp"

namespace domcode {

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double log_sum(std::span<const double> values) {
  double top = kNegInf;
  for (double v : values) top = std::max(top, v);
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values)
    if (v != kNegInf) acc += std::exp(v - top);
  return top + std::log(acc);
}

SiteMeasure::SiteMeasure(VertexSet sites, std::vector<double> log_weights)
    : sites_(std::move(sites)), log_p_(std::move(log_weights)) {
  if (static_cast<int>(sites_.size()) > kMaxSites) throw SizeError("measure exceeds site cap");
  if (!std::is_sorted(sites_.begin(), sites_.end()))
    throw ArgumentError("measure sites must be sorted");
  if (log_p_.size() != (std::size_t{1} << sites_.size()))
    throw ArgumentError("measure weight array has the wrong length");
  for (double w : log_p_)
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity())
      throw ArgumentError("measure weights must be finite or -inf");
  log_z_ = log_sum(log_p_);
  if (log_z_ == kNegInf) throw ArgumentError("measure has no mass");
  for (double& w : log_p_)
    if (w != kNegInf) w -= log_z_;
}

SiteMeasure SiteMeasure::from_probabilities(VertexSet sites, std::span<const double> probs) {
  std::vector<double> logs(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0) throw ArgumentError("negative probability");
    logs[i] = probs[i] > 0 ? std::log(probs[i]) : kNegInf;
  }
  return SiteMeasure(std::move(sites), std::move(logs));
}

SiteMeasure SiteMeasure::point_mass(VertexSet sites, Bits x) {
  std::vector<double> logs(std::size_t{1} << sites.size(), kNegInf);
  logs.at(x) = 0.0;
  return SiteMeasure(std::move(sites), std::move(logs));
}

double SiteMeasure::prob(Bits x) const {
  double l = log_p_[x];
  return l == kNegInf ? 0.0 : std::exp(l);
}

std::vector<double> SiteMeasure::probs() const {
  std::vector<double> out(log_p_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = prob(i);
  return out;
}

int SiteMeasure::site_index(int vertex) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), vertex);
  if (it == sites_.end() || *it != vertex) return -1;
  return static_cast<int>(it - sites_.begin());
}

Bits SiteMeasure::mask_of(const VertexSet& vertices) const {
  Bits m = 0;
  for (int v : vertices) {
    int i = site_index(v);
    if (i < 0) throw ArgumentError("vertex " + std::to_string(v) + " is not a site of the measure");
    m |= bit(i);
  }
  return m;
}

double SiteMeasure::log_marginal(Bits mask, Bits pattern) const {
  double acc = kNegInf;
  for (Bits x = 0; x < states(); ++x)
    if ((x & mask) == (pattern & mask)) acc = log_add(acc, log_p_[x]);
  return acc;
}

double total_variation(const SiteMeasure& a, const SiteMeasure& b) {
  if (a.sites() != b.sites()) throw ArgumentError("total_variation: measures on different sites");
  double acc = 0.0;
  for (Bits x = 0; x < a.states(); ++x) acc += std::abs(a.prob(x) - b.prob(x));
  return 0.5 * acc;
}

double max_abs_difference(const SiteMeasure& a, const SiteMeasure& b) {
  if (a.sites() != b.sites()) throw ArgumentError("max_abs_difference: measures on different sites");
  double worst = 0.0;
  for (Bits x = 0; x < a.states(); ++x) worst = std::max(worst, std::abs(a.prob(x) - b.prob(x)));
  return worst;
}

SiteMeasure empirical_measure(VertexSet sites, std::span<const Bits> samples) {
  std::vector<double> counts(std::size_t{1} << sites.size(), 0.0);
  for (Bits x : samples) counts.at(x) += 1.0;
  return SiteMeasure::from_probabilities(std::move(sites), counts);
}

void write_measure(std::ostream& out, const SiteMeasure& mu) {
  out << "m " << mu.size() << '\n';
  for (Bits x = 0; x < mu.states(); ++x) {
    if (mu.log_prob(x) == kNegInf) continue;
    std::string bits(static_cast<std::size_t>(mu.size()), '0');
    for (int i = 0; i < mu.size(); ++i)
      if (x >> i & 1) bits[i] = '1';
    out << bits << ' ' << std::setprecision(17) << mu.log_prob(x) << '\n';
  }
}

SiteMeasure read_measure(std::istream& in, VertexSet sites) {
  std::string tag;
  int n = -1;
  if (!(in >> tag >> n) || tag != "m" || n < 0) throw ConfigError("measure: missing 'm <n>' header");
  if (n > SiteMeasure::kMaxSites) throw SizeError("measure exceeds site cap");
  if (sites.empty()) {
    sites.resize(static_cast<std::size_t>(n));
    std::iota(sites.begin(), sites.end(), 0);
  }
  if (static_cast<int>(sites.size()) != n) throw ConfigError("measure: site list length mismatch");
  std::vector<double> logs(std::size_t{1} << n, kNegInf);
  std::string bits;
  std::string weight;
  while (in >> bits >> weight) {
    if (static_cast<int>(bits.size()) != n) throw ConfigError("measure: bad configuration '" + bits + "'");
    Bits x = 0;
    for (int i = 0; i < n; ++i) {
      if (bits[i] == '1') x |= bit(i);
      else if (bits[i] != '0') throw ConfigError("measure: bad configuration '" + bits + "'");
    }
    try {
      logs[x] = std::stod(weight);
    } catch (const std::exception&) {
      throw ConfigError("measure: bad weight '" + weight + "'");
    }
  }
  return SiteMeasure(std::move(sites), std::move(logs));
}

}  // namespace domcode
