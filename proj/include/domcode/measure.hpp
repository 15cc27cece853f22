#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "domcode/graph.hpp"

namespace domcode {

// Configuration on the sites of a SiteMeasure: bit i is the value at sites()[i].
using Bits = std::uint64_t;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kProbTol = 1e-12;
inline constexpr double kFlowTol = 1e-9;

double log_add(double a, double b);
double log_sum(std::span<const double> values);
inline Bits bit(int i) { return Bits{1} << i; }

// Exact probability measure on {0,1}^sites stored as normalized log-probabilities.
class SiteMeasure {
 public:
  static constexpr int kMaxSites = 24;

  SiteMeasure() = default;
  // Normalizes the given unnormalized log-weights; entries may be -inf.
  SiteMeasure(VertexSet sites, std::vector<double> log_weights);
  static SiteMeasure from_probabilities(VertexSet sites, std::span<const double> probs);
  static SiteMeasure point_mass(VertexSet sites, Bits x);

  int size() const { return static_cast<int>(sites_.size()); }
  std::size_t states() const { return log_p_.size(); }
  const VertexSet& sites() const { return sites_; }
  Bits full() const { return (Bits{1} << size()) - 1; }
  double log_prob(Bits x) const { return log_p_[x]; }
  double prob(Bits x) const;
  const std::vector<double>& log_probs() const { return log_p_; }
  std::vector<double> probs() const;
  // Log of the normalizing constant of the weights passed to the constructor.
  double log_partition() const { return log_z_; }

  // Index of a graph vertex among the sites, or -1.
  int site_index(int vertex) const;
  Bits mask_of(const VertexSet& vertices) const;
  // Probability that the configuration restricted to `mask` equals `pattern`.
  double log_marginal(Bits mask, Bits pattern) const;

 private:
  VertexSet sites_;
  std::vector<double> log_p_;
  double log_z_ = 0.0;
};

double total_variation(const SiteMeasure& a, const SiteMeasure& b);
double max_abs_difference(const SiteMeasure& a, const SiteMeasure& b);
// Empirical measure of the given samples.
SiteMeasure empirical_measure(VertexSet sites, std::span<const Bits> samples);

void write_measure(std::ostream& out, const SiteMeasure& mu);
SiteMeasure read_measure(std::istream& in, VertexSet sites = {});

}  // namespace domcode
