#pragma once

// Small seeded generators for the property tests.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "domcode/graph.hpp"
#include "domcode/measure.hpp"

namespace domcode::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Connected graph on n vertices: a random spanning tree plus extra edges with probability `extra`.
// Each vertex lands on the boundary with probability `boundary_rate`, keeping vertex 0 interior.
inline Graph random_connected_graph(Rng& rng, int n, double extra, double boundary_rate = 0.0) {
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
  for (int v = 1; v < n; ++v) {
    int u = uniform_int(rng, 0, v - 1);
    edges.emplace_back(u, v);
    has[u][v] = has[v][u] = 1;
  }
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (!has[u][v] && uniform(rng) < extra) edges.emplace_back(u, v);
  VertexSet boundary;
  for (int v = 1; v < n; ++v)
    if (uniform(rng) < boundary_rate) boundary.push_back(v);
  return Graph(n, edges, boundary);
}

// As above with vertex n - 1 always on the boundary (n >= 2).
inline Graph random_graph_with_boundary(Rng& rng, int n, double extra, double boundary_rate) {
  Graph g = random_connected_graph(rng, n, extra, boundary_rate);
  VertexSet boundary = g.boundary();
  if (boundary.empty() || boundary.back() != n - 1) boundary.push_back(n - 1);
  return Graph(n, g.edges(), boundary);
}

// Strictly positive random law on `sites`.
inline SiteMeasure random_measure(Rng& rng, const VertexSet& sites, bool allow_zeros = false) {
  std::vector<double> probs(std::size_t{1} << sites.size());
  double total = 0.0;
  for (auto& p : probs) {
    p = allow_zeros && uniform(rng) < 0.25 ? 0.0 : uniform(rng, 0.05, 1.0);
    total += p;
  }
  if (total == 0.0) probs.back() = total = 1.0;
  for (auto& p : probs) p /= total;
  return SiteMeasure::from_probabilities(sites, probs);
}

inline VertexSet iota_sites(int n) {
  VertexSet s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[i] = i;
  return s;
}

}  // namespace domcode::testing
