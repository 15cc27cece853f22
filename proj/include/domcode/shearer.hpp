#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <limits>
#include <map>
#include <unordered_map>
#include <vector>

#include "domcode/graph.hpp"
#include "domcode/ising.hpp"
#include "domcode/measure.hpp"

namespace domcode {

// Set of dependency-graph elements as a bitmask.
using ElementSet = std::uint64_t;

struct ShearerLimits {
  static constexpr int kElementCap = 64;
  static constexpr long kIndependentSetCap = 1'000'000;
  static constexpr int kDilutedVolumeCap = 12;
};

// Hard-core dependency graph. Elements may carry the vertex sets they stand for.
class DependencyGraph {
 public:
  DependencyGraph() = default;
  DependencyGraph(int size, const std::vector<std::pair<int, int>>& edges);
  // Elements are the connected subsets of `volume` (up to max_size vertices);
  // two are adjacent when distinct and at graph distance at most one.
  static DependencyGraph of_connected_subsets(const Graph& g, const VertexSet& volume, int max_size);

  int size() const { return static_cast<int>(adj_.size()); }
  ElementSet all() const { return size() == 64 ? ~ElementSet{0} : (ElementSet{1} << size()) - 1; }
  ElementSet neighbors(int x) const { return adj_[x]; }
  bool adjacent(int x, int y) const { return adj_[x] >> y & 1; }
  bool independent(ElementSet s) const;
  // S together with all its neighbors.
  ElementSet closed_neighborhood(ElementSet s) const;
  const std::vector<VertexSet>& elements() const { return elements_; }
  // Index of the element with the given vertex set, or -1.
  int find(const VertexSet& s) const;

 private:
  std::vector<ElementSet> adj_;
  std::vector<VertexSet> elements_;
  std::map<VertexSet, int> lookup_;
};

std::vector<ElementSet> independent_sets(const DependencyGraph& dep, ElementSet within,
                                         long cap = ShearerLimits::kIndependentSetCap);

double indep_poly(const DependencyGraph& dep, std::span<const double> w);
// Sum over independent supersets of s; zero when s is not independent.
double indep_poly_rooted(const DependencyGraph& dep, std::span<const double> w, ElementSet s);

struct ShearerEntry {
  ElementSet set;
  double log_prob;  // -inf for zero
  // log of the hard-core partition function at -alpha on the elements outside the
  // closed neighborhood of `set`; log_prob = sum of log alpha + log_free.
  double log_free;
};

class ShearerSystem {
 public:
  const DependencyGraph& dep() const { return dep_; }
  const std::vector<double>& log_alpha() const { return log_alpha_; }
  const std::vector<double>& log_r() const { return log_r_; }
  const std::vector<ShearerEntry>& table() const { return table_; }
  // log P(Y = s); -inf when s is not independent or has zero mass.
  double log_prob(ElementSet s) const;
  double prob(ElementSet s) const;
  double log_partition() const { return log_partition_; }
  int precision_bits() const { return precision_bits_; }
  double log_alpha_product(ElementSet s) const;

 private:
  friend ShearerSystem shearer_measure_log(const DependencyGraph&, std::vector<double>, std::vector<double>, int);
  DependencyGraph dep_;
  std::vector<double> log_alpha_;
  std::vector<double> log_r_;
  std::vector<ShearerEntry> table_;
  std::unordered_map<ElementSet, std::size_t> index_;
  double log_partition_ = 0.0;
  int precision_bits_ = 0;
};

// precision_bits = 0 uses double arithmetic; otherwise MPFR with that many bits.
ShearerSystem shearer_measure(const DependencyGraph& dep, std::span<const double> alpha,
                              std::span<const double> r = {}, int precision_bits = 0);
// Same from log-weights, for weights below double range.
ShearerSystem shearer_measure_log(const DependencyGraph& dep, std::vector<double> log_alpha,
                                  std::vector<double> log_r, int precision_bits);

bool check_sufficient(const DependencyGraph& dep, std::span<const double> alpha, std::span<const double> r);
bool check_sufficient_log(const DependencyGraph& dep, std::span<const double> log_alpha,
                          std::span<const double> log_r);

struct RatioCheck {
  double lhs;
  double rhs;
  bool ok;
};

RatioCheck ratio_bound_check(const ShearerSystem& sys, ElementSet s1, ElementSet s2);

struct DilutionChecks {
  bool alpha_below_r_product = false;  // alpha_S <= r_S prod (1 - r_S') for all S
  bool r_sum_target = false;           // sum_{S contains u} r_S <= 0.01 eps h / (delta + 1) for all u
  double worst_r_sum = 0.0;
  double r_sum_target_value = 0.0;
};

struct DilutionSystem {
  ShearerSystem shearer;
  VertexSet volume;
  double beta1 = 0, beta2 = 0, b1 = 0, b2 = 0, h = 0;
  DilutionChecks checks;
};

// Connected subsets of the volume as elements, with alpha_S and r_S built from the
// two temperatures, the fields and the isoperimetric constant h.
DilutionSystem build_dilution_system(const Graph& g, const VertexSet& volume, double beta1, double beta2,
                                     double b1, double b2, double h, int precision_bits = 0);

struct DilutedIsingRoutes {
  // Log-probabilities of Z indexed by volume configurations (1 = plus).
  std::vector<double> convolution;
  std::vector<double> closed_form;
  double max_log_disagreement = 0.0;
  double total_mass = 0.0;
};

DilutedIsingRoutes diluted_ising_routes(const Graph& g, const DilutionSystem& sys);
// Law of Z = X with the minus clusters of the dilution added; throws ConsistencyError
// when the two routes disagree by more than 1e-9 relative.
SiteMeasure diluted_ising_law(const Graph& g, const DilutionSystem& sys);

struct HolleyRatioReport {
  bool ok = true;
  long checked = 0;
  long failures = 0;
  // Smallest log(observed ratio) - log(required ratio).
  double worst_margin = std::numeric_limits<double>::infinity();
};

HolleyRatioReport verify_holley_ratio(const Graph& g, const SiteMeasure& zlaw, const IsingParams& params2);

void write_shearer(std::ostream& out, const ShearerSystem& sys);

}  // namespace domcode
