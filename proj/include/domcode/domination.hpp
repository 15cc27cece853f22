#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "domcode/graph.hpp"
#include "domcode/measure.hpp"

namespace domcode {

struct DominationLimits {
  static constexpr int kStrassenCap = 14;
  static constexpr int kWitnessCap = 12;
  static constexpr int kHolleyCap = 10;
  static constexpr int kDilutionBayesCap = 12;
  static constexpr int kTiltScanCap = 10;
  static constexpr int kDecoupleCap = 12;
};

struct CouplingEntry {
  Bits x;
  Bits y;
  double prob;
};

// Joint law of a pair of configurations on the same sites.
struct Coupling {
  VertexSet sites;
  std::vector<CouplingEntry> entries;

  std::vector<double> first_marginal() const;
  std::vector<double> second_marginal() const;
  // Mass on pairs with x >= y coordinatewise.
  double monotone_mass() const;
};

SiteMeasure bernoulli_measure(const VertexSet& sites, double p);
SiteMeasure bernoulli_measure(const Graph& g, double p);

// P(X_v = 1 | X elsewhere = x); nullopt when the conditioning event has no mass.
std::optional<double> site_conditional(const SiteMeasure& mu, int site, Bits x);

double p_star(const SiteMeasure& mu);

// Maximum monotone transport from mu (upper) to nu (lower).
double monotone_flow_value(const SiteMeasure& mu, const SiteMeasure& nu);
// Dominates when the maximum flow reaches 1 - flow_tol.
bool strassen_dominates(const SiteMeasure& mu, const SiteMeasure& nu, double flow_tol = kFlowTol);
// A coupling with X ~ mu, Y ~ nu and X >= Y, when one exists.
std::optional<Coupling> strassen_coupling(const SiteMeasure& mu, const SiteMeasure& nu);

// Bisection to `tolerance`; deficits below flow_tol count as domination, so the result
// can overshoot when some decreasing event has mass of order flow_tol.
double p_of(const SiteMeasure& mu, double tolerance = 1e-6, double flow_tol = kFlowTol);

bool holley_star(const SiteMeasure& mu_x, const SiteMeasure& mu_y);

// Masks index the measure's sites.
SiteMeasure tilt(const SiteMeasure& mu, Bits ones, Bits reweighted, double p);
SiteMeasure dilute_law(const SiteMeasure& mu, double p);
// Law of X given XY = z, computed by Bayes over the joint law of (X, Y).
SiteMeasure conditional_given_dilution(const SiteMeasure& mu, double p, Bits z);
double p_star_given_dilution(const SiteMeasure& mu, double p);

// Site-index order in which the coupling is built.
Coupling sequential_monotone_coupling(const SiteMeasure& mu_x, const SiteMeasure& mu_y,
                                      std::span<const int> order);

using ConditionalFn = std::function<double(int site, Bits config)>;

std::pair<Bits, Bits> joint_glauber_step(Bits x, Bits y, int site, double u, const ConditionalFn& p_x,
                                         const ConditionalFn& q_y);

// Checks that inside and outside of every A are conditionally independent given that
// the neighbors of A (within the sites) are all ones; with `connected_ones` the event
// additionally requires those neighbors to lie in one cluster of ones outside A.
bool is_decoupled_by_ones(const Graph& g, const SiteMeasure& mu, bool connected_ones = false);

namespace detail {
// Max flow through the single-layer lattice network; optionally reports the flow on
// every lattice edge x -> x minus site i (indexed x * n + i) and into the sink.
double lattice_max_flow(int n, std::span<const double> upper, std::span<const double> lower,
                        std::vector<double>* edge_flow, std::vector<double>* sink_flow,
                        std::vector<double>* source_flow);
}  // namespace detail

}  // namespace domcode
