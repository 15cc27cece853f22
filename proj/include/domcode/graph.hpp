#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace domcode {

// Sorted list of distinct vertex indices.
using VertexSet = std::vector<int>;

struct Limits {
  static constexpr long kVertexCap = 2'000'000;
  static constexpr int kCheegerCap = 20;
  static constexpr long kSubsetCap = 100'000;
};

// Finite simple undirected graph with a designated boundary set that stands in
// for "infinity".
class Graph {
 public:
  Graph() = default;
  Graph(int vertex_count, const std::vector<std::pair<int, int>>& edges, VertexSet boundary = {});

  int size() const { return static_cast<int>(adj_.size()); }
  std::span<const int> neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  int max_degree() const;
  bool is_boundary(int v) const { return boundary_flag_[v] != 0; }
  const VertexSet& boundary() const { return boundary_; }
  VertexSet interior() const;
  bool adjacent(int u, int v) const;
  // Edges (u, v) with u < v, lexicographic order.
  std::vector<std::pair<int, int>> edges() const;
  long edge_count() const;

  // BFS distances from the sources; -1 when unreachable.
  std::vector<int> distances(std::span<const int> sources) const;
  VertexSet ball(int v, int radius) const;

  bool operator==(const Graph& other) const = default;

 private:
  std::vector<std::vector<int>> adj_;
  std::vector<char> boundary_flag_;
  VertexSet boundary_;
};

Graph tree_ball(int degree, int radius);
Graph grid_box(int dim, int side);
Graph path_graph(int n);
Graph cycle_graph(int n);
Graph complete_graph(int n);
// K_{1,k}; the leaves are the boundary.
Graph star_graph(int leaves);
Graph power_graph(const Graph& g, int k);
Graph tree_with_paths(int degree, int path_len, int radius, bool path_ends_on_boundary = false);
// Vertices are the edges of g (in g.edges() order); an edge is on the boundary
// when it touches a boundary vertex of g.
Graph line_graph(const Graph& g);
// Induced subgraph on the sorted vertex list `keep`; vertex i of the result is keep[i].
Graph induced_subgraph(const Graph& g, const VertexSet& keep);

struct Boundaries {
  VertexSet vertex_boundary;
  long edge_boundary_size = 0;
  VertexSet internal_boundary;
};

Boundaries boundaries(const Graph& g, const VertexSet& s);
long edge_boundary_size(const Graph& g, const VertexSet& s);

struct Rational {
  long num = 0;
  long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational& o) const { return num * o.den == o.num * den; }
  bool operator<(const Rational& o) const { return num * o.den < o.num * den; }
};

struct CheegerConstants {
  Rational vertex;
  Rational edge;
};

// Exact minima of |dS|/|S| and |d_e S|/|S| over eligible nonempty S by exhaustive
// enumeration. This is a finite proxy for the constants of an infinite graph.
CheegerConstants cheeger(const Graph& g, bool exclude_boundary);

// Every connected S within `within` with 1 <= |S| <= max_size, ordered by size and
// then lexicographically.
std::vector<VertexSet> connected_subsets(const Graph& g, const VertexSet& within, int max_size,
                                         long cap = Limits::kSubsetCap);

bool is_connected(const Graph& g, const VertexSet& s);
bool is_subset(const VertexSet& a, const VertexSet& b);
VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_difference(const VertexSet& a, const VertexSet& b);
VertexSet all_vertices(const Graph& g);

// Parses "tree:d:r", "grid:dim:side", "path:n", "cycle:n", "star:k",
// "complete:n" or "file:<path>".
Graph graph_from_spec(const std::string& spec);

void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);

}  // namespace domcode
