#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "domcode/graph.hpp"
#include "domcode/measure.hpp"
#include "domcode/report.hpp"

namespace domcode {

enum class PercMode { Site, Bond };

// 0/1 values over vertices (site mode) or over g.edges() (bond mode).
using BinaryConfig = std::vector<std::uint8_t>;

struct PercConfig {
  PercMode mode = PercMode::Site;
  BinaryConfig open;

  bool operator==(const PercConfig&) const = default;
};

struct Cutset {
  VertexSet vertices;
  VertexSet interior;
  VertexSet exterior;
};

struct PercLimits {
  static constexpr long kCutsetCap = 100'000;
  static constexpr int kLawCap = 20;
};

PercConfig perc_sample(const Graph& g, double p, PercMode mode, std::uint64_t seed);

// Open sites whose open cluster meets the boundary set. Bond configurations are
// handled as site percolation on the line graph and the result is over edges.
BinaryConfig infinite_proxy(const Graph& g, const PercConfig& omega);

// Site mode only: 1 at v iff the r-ball around v is open and every vertex at distance
// r + 1 either lies in a boundary-avoiding component of the ball's complement or is
// joined to the boundary by an open path avoiding the ball.
BinaryConfig tilde_x(const Graph& g, const PercConfig& omega, int r);

// Minimal vertex cutsets separating `pivot` from the boundary set, with interiors of
// at most max_interior vertices. The trivial cutset {pivot} has an empty interior.
std::vector<Cutset> cutsets(const Graph& g, int pivot, int max_interior, long cap = PercLimits::kCutsetCap);

// Vertices that are boundary-connected once the cutset's sites take the values in
// `eps` (bit k for cut.vertices[k]) but not when they are all closed.
VertexSet newly_connected(const Graph& g, const Cutset& cut, const BinaryConfig& omega_rest, Bits eps);

// Law of the cutset's sites given the infinite-cluster dilution z = omega_inf * Y
// (Y i.i.d. with density q) and the percolation values off the cutset. Index k of
// the result is the configuration with bit j giving cut.vertices[j].
std::vector<double> cutset_conditional_law(const Graph& g, const Cutset& cut, const BinaryConfig& z,
                                           const PercConfig& omega_rest, double p, double q);

// Rows: series (or divergent), upper, hole_ratio, hole_tail_<k>.
BoundReport perc_bounds(int delta, double h, double p, double q, int k_max = 20);

// Exact law of the infinite-cluster proxy under site percolation of density p.
SiteMeasure infinite_proxy_law(const Graph& g, double p);

// Size of the component of v in the complement of the infinite-cluster proxy.
int hole_size(const Graph& g, const BinaryConfig& omega_inf, int v);

void write_perc(std::ostream& out, const PercConfig& c);
PercConfig read_perc(std::istream& in);

}  // namespace domcode
