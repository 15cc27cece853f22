#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "domcode/cftp.hpp"
#include "domcode/graph.hpp"
#include "domcode/stream.hpp"

namespace domcode {

// Value at v after n steps of the disease chain restricted to the radius-r ball
// around v, started from all stars (stars stay frozen outside the ball).
Tri disease_run(const Graph& g, double p, int r, int n, int v, const UpdateStream& stream, bool connected_ones = false);

// Sum over k >= min_length of 3 delta (3 delta - 1)^(k-1) (1 - p)^k; infinite when
// the series diverges and 1 when min_length <= 0.
double union_bound(int delta, double p, double min_length);

struct SurvivalRow {
  double p = 0.0;
  int r = 0;
  int n = 0;
  long trials = 0;
  long survivals = 0;
  double rate = 0.0;
  double wilson_hi = 0.0;
  double bound = 0.0;        // C ((3 delta - 1)(1 - p))^min(r, n/2)
  double union_bound = 0.0;  // series form of the same bound
  bool vacuous = false;
};

// P(star survives at v) for each r with n = 2r, over seeds family_seed(base_seed, k).
std::vector<SurvivalRow> survival_curve(const Graph& g, int v, double p, const std::vector<int>& r_values, long trials,
                                        std::uint64_t base_seed, int jobs = 1, bool connected_ones = false);

struct SpaceTimeUpdate {
  int vertex = 0;
  int step = 0;
  double time = 0.0;  // T - step, in (-step, -step + 1)
  bool one = false;   // U <= p
};

// All updates of steps 1..steps at the given vertices.
std::vector<SpaceTimeUpdate> space_time_updates(const VertexSet& region, const UpdateStream& stream, double p,
                                                int steps);

// Path x_0..x_k with times t_0 = 0 >= t_1 >= ... >= t_{k+1}.
struct Chain {
  std::vector<int> path;
  std::vector<double> times;

  int length() const { return static_cast<int>(path.size()) - 1; }
};

// A chain from (v, 0) that passes only through updates producing 0 or * and whose
// endpoint leaves the ball of radius r or falls at or below time -n. The last
// vertical segment may not pass through an update either.
bool is_witnessing_chain(const Graph& g, const std::vector<SpaceTimeUpdate>& updates, const Chain& chain, int v, int r,
                         int n);

// Shortest witnessing chain, or nullopt when none exists.
std::optional<Chain> shortest_chain(const Graph& g, const std::vector<SpaceTimeUpdate>& updates, int v, int r, int n);

// The chain's update sequence is a simple path in the space-time update graph with
// at least min(r, n/2) elements. Throws ArgumentError on a malformed chain.
bool h_graph_check(const Graph& g, const std::vector<SpaceTimeUpdate>& updates, const Chain& chain, int r, int n);

}  // namespace domcode
