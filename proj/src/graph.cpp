#include "domcode/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "domcode/errors.hpp"

namespace domcode {

Graph::Graph(int vertex_count, const std::vector<std::pair<int, int>>& edges, VertexSet boundary)
    : adj_(static_cast<std::size_t>(vertex_count)),
      boundary_flag_(static_cast<std::size_t>(vertex_count), 0) {
  if (vertex_count < 0) throw ArgumentError("negative vertex count");
  if (vertex_count > Limits::kVertexCap) throw SizeError("graph exceeds vertex cap");
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
      throw ArgumentError("edge endpoint out of range");
    if (u == v) throw ArgumentError("self-loop at vertex " + std::to_string(u));
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  for (auto& list : adj_) {
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end())
      throw ArgumentError("multi-edge in graph");
  }
  for (int b : boundary) {
    if (b < 0 || b >= vertex_count) throw ArgumentError("boundary vertex out of range");
    boundary_flag_[b] = 1;
  }
  for (int v = 0; v < vertex_count; ++v)
    if (boundary_flag_[v]) boundary_.push_back(v);
}

int Graph::max_degree() const {
  int d = 0;
  for (const auto& list : adj_) d = std::max(d, static_cast<int>(list.size()));
  return d;
}

VertexSet Graph::interior() const {
  VertexSet out;
  for (int v = 0; v < size(); ++v)
    if (!boundary_flag_[v]) out.push_back(v);
  return out;
}

bool Graph::adjacent(int u, int v) const {
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < size(); ++u)
    for (int v : adj_[u])
      if (u < v) out.emplace_back(u, v);
  return out;
}

long Graph::edge_count() const {
  long twice = 0;
  for (const auto& list : adj_) twice += static_cast<long>(list.size());
  return twice / 2;
}

std::vector<int> Graph::distances(std::span<const int> sources) const {
  std::vector<int> dist(adj_.size(), -1);
  std::deque<int> queue;
  for (int s : sources) {
    if (dist[s] < 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int w : adj_[u]) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

VertexSet Graph::ball(int v, int radius) const {
  int src[] = {v};
  auto dist = distances(src);
  VertexSet out;
  for (int u = 0; u < size(); ++u)
    if (dist[u] >= 0 && dist[u] <= radius) out.push_back(u);
  return out;
}

namespace {

long checked_pow(long base, int exp) {
  long out = 1;
  for (int i = 0; i < exp; ++i) {
    out *= base;
    if (out > Limits::kVertexCap) throw SizeError("graph exceeds vertex cap");
  }
  return out;
}

struct TreeParts {
  int count = 0;
  std::vector<std::pair<int, int>> edges;
  VertexSet leaves;
};

TreeParts build_tree(int degree, int radius) {
  if (degree < 3) throw ArgumentError("tree degree must be at least 3");
  if (radius < 0) throw ArgumentError("negative radius");
  long total = 1;
  for (int r = 1; r <= radius; ++r) total += degree * checked_pow(degree - 1, r - 1);
  if (total > Limits::kVertexCap) throw SizeError("tree_ball exceeds vertex cap");
  TreeParts t;
  t.count = 1;
  std::vector<int> layer{0};
  for (int r = 1; r <= radius; ++r) {
    std::vector<int> next;
    for (int parent : layer) {
      int children = (r == 1) ? degree : degree - 1;
      for (int c = 0; c < children; ++c) {
        int id = t.count++;
        t.edges.emplace_back(parent, id);
        next.push_back(id);
      }
    }
    layer = std::move(next);
  }
  t.leaves = layer;
  return t;
}

}  // namespace

Graph tree_ball(int degree, int radius) {
  auto t = build_tree(degree, radius);
  return Graph(t.count, t.edges, t.leaves);
}

Graph grid_box(int dim, int side) {
  if (dim < 1 || side < 1) throw ArgumentError("grid_box needs dim >= 1 and side >= 1");
  long n = checked_pow(side, dim);
  std::vector<std::pair<int, int>> edges;
  VertexSet boundary;
  std::vector<int> coord(dim);
  for (long id = 0; id < n; ++id) {
    long rest = id;
    bool on_face = false;
    for (int k = 0; k < dim; ++k) {
      coord[k] = static_cast<int>(rest % side);
      rest /= side;
      if (coord[k] == 0 || coord[k] == side - 1) on_face = true;
    }
    if (on_face) boundary.push_back(static_cast<int>(id));
    long stride = 1;
    for (int k = 0; k < dim; ++k) {
      if (coord[k] + 1 < side) edges.emplace_back(static_cast<int>(id), static_cast<int>(id + stride));
      stride *= side;
    }
  }
  return Graph(static_cast<int>(n), edges, boundary);
}

Graph path_graph(int n) {
  if (n < 1) throw ArgumentError("path needs at least one vertex");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, edges);
}

Graph cycle_graph(int n) {
  if (n < 3) throw ArgumentError("cycle needs at least three vertices");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph(n, edges);
}

Graph complete_graph(int n) {
  if (n < 1) throw ArgumentError("complete graph needs at least one vertex");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph(n, edges);
}

Graph star_graph(int leaves) {
  if (leaves < 1) throw ArgumentError("star needs at least one leaf");
  std::vector<std::pair<int, int>> edges;
  VertexSet boundary;
  for (int i = 1; i <= leaves; ++i) {
    edges.emplace_back(0, i);
    boundary.push_back(i);
  }
  return Graph(leaves + 1, edges, boundary);
}

Graph power_graph(const Graph& g, int k) {
  if (g.size() == 0) throw ArgumentError("power_graph of an empty graph");
  if (k < 1) throw ArgumentError("power_graph needs k >= 1");
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < g.size(); ++u) {
    int src[] = {u};
    auto dist = g.distances(src);
    for (int v = u + 1; v < g.size(); ++v)
      if (dist[v] >= 1 && dist[v] <= k) edges.emplace_back(u, v);
  }
  return Graph(g.size(), edges, g.boundary());
}

Graph tree_with_paths(int degree, int path_len, int radius, bool path_ends_on_boundary) {
  if (path_len < 0) throw ArgumentError("negative path length");
  auto t = build_tree(degree, radius);
  std::vector<char> leaf(static_cast<std::size_t>(t.count), 0);
  for (int l : t.leaves) leaf[l] = 1;
  long total = t.count + static_cast<long>(t.count - static_cast<long>(t.leaves.size())) * path_len;
  if (total > Limits::kVertexCap) throw SizeError("tree_with_paths exceeds vertex cap");
  VertexSet boundary = t.leaves;
  int base = t.count;
  for (int v = 0; v < base; ++v) {
    if (leaf[v]) continue;
    int prev = v;
    for (int j = 0; j < path_len; ++j) {
      int id = t.count++;
      t.edges.emplace_back(prev, id);
      prev = id;
    }
    if (path_len > 0 && path_ends_on_boundary) boundary.push_back(prev);
  }
  std::sort(boundary.begin(), boundary.end());
  return Graph(t.count, t.edges, boundary);
}

Graph line_graph(const Graph& g) {
  auto edges = g.edges();
  std::vector<std::vector<int>> incident(static_cast<std::size_t>(g.size()));
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    incident[edges[e].first].push_back(e);
    incident[edges[e].second].push_back(e);
  }
  std::vector<std::pair<int, int>> out;
  for (const auto& list : incident)
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = i + 1; j < list.size(); ++j) out.emplace_back(list[i], list[j]);
  // Two edges share at most one endpoint in a simple graph, so no duplicates arise.
  VertexSet boundary;
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    if (g.is_boundary(edges[e].first) || g.is_boundary(edges[e].second)) boundary.push_back(e);
  return Graph(static_cast<int>(edges.size()), out, boundary);
}

Graph induced_subgraph(const Graph& g, const VertexSet& keep) {
  std::vector<int> index(static_cast<std::size_t>(g.size()), -1);
  for (int i = 0; i < static_cast<int>(keep.size()); ++i) index[keep[i]] = i;
  std::vector<std::pair<int, int>> edges;
  VertexSet boundary;
  for (int i = 0; i < static_cast<int>(keep.size()); ++i) {
    int u = keep[i];
    if (g.is_boundary(u)) boundary.push_back(i);
    for (int w : g.neighbors(u))
      if (index[w] > i) edges.emplace_back(i, index[w]);
  }
  return Graph(static_cast<int>(keep.size()), edges, boundary);
}

Boundaries boundaries(const Graph& g, const VertexSet& s) {
  if (s.empty()) throw ArgumentError("boundaries of an empty set");
  std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
  for (int v : s) in[v] = 1;
  Boundaries out;
  std::vector<char> outer(static_cast<std::size_t>(g.size()), 0);
  for (int v : s) {
    bool internal = false;
    for (int w : g.neighbors(v)) {
      if (!in[w]) {
        ++out.edge_boundary_size;
        outer[w] = 1;
        internal = true;
      }
    }
    if (internal) out.internal_boundary.push_back(v);
  }
  for (int v = 0; v < g.size(); ++v)
    if (outer[v]) out.vertex_boundary.push_back(v);
  return out;
}

long edge_boundary_size(const Graph& g, const VertexSet& s) {
  std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
  for (int v : s) in[v] = 1;
  long count = 0;
  for (int v : s)
    for (int w : g.neighbors(v))
      if (!in[w]) ++count;
  return count;
}

CheegerConstants cheeger(const Graph& g, bool exclude_boundary) {
  VertexSet eligible = exclude_boundary ? g.interior() : all_vertices(g);
  const int n = static_cast<int>(eligible.size());
  if (n == 0) throw ArgumentError("cheeger: no eligible vertices");
  if (n > Limits::kCheegerCap) throw SizeError("cheeger: eligible vertex count exceeds cap");
  std::vector<int> local(static_cast<std::size_t>(g.size()), -1);
  for (int i = 0; i < n; ++i) local[eligible[i]] = i;
  // Neighbor masks restricted to eligible vertices, plus the count of outside neighbors.
  std::vector<std::uint32_t> nbr(n, 0);
  std::vector<int> outside(n, 0);
  std::vector<std::vector<int>> outside_list(n);
  for (int i = 0; i < n; ++i) {
    for (int w : g.neighbors(eligible[i])) {
      if (local[w] >= 0) {
        nbr[i] |= 1u << local[w];
      } else {
        ++outside[i];
        outside_list[i].push_back(w);
      }
    }
  }
  CheegerConstants best{{1, 0}, {1, 0}};  // sentinel "infinity"
  bool first = true;
  std::vector<int> stamp(static_cast<std::size_t>(g.size()), -1);
  for (std::uint32_t s = 1; s < (1u << n); ++s) {
    long size = std::popcount(s);
    long edge = 0;
    std::uint32_t inner_bd = 0;
    long outer_bd = 0;
    for (int i = 0; i < n; ++i) {
      if (!(s >> i & 1u)) continue;
      edge += std::popcount(nbr[i] & ~s) + outside[i];
      inner_bd |= nbr[i] & ~s;
      for (int w : outside_list[i]) {
        if (stamp[w] != static_cast<int>(s)) {
          stamp[w] = static_cast<int>(s);
          ++outer_bd;
        }
      }
    }
    long vertex = std::popcount(inner_bd) + outer_bd;
    Rational rv{vertex, size}, re{edge, size};
    if (first || rv < best.vertex) best.vertex = rv;
    if (first || re < best.edge) best.edge = re;
    first = false;
  }
  auto reduce = [](Rational r) {
    long d = std::gcd(r.num, r.den);
    if (d > 1) {
      r.num /= d;
      r.den /= d;
    }
    if (r.num == 0) r.den = 1;
    return r;
  };
  return {reduce(best.vertex), reduce(best.edge)};
}

namespace {

struct SubsetEnumerator {
  const Graph& g;
  const std::vector<char>& allowed;
  int max_size;
  long cap;
  std::vector<VertexSet>& out;
  std::vector<char> in_set;
  std::vector<char> blocked;

  // Standard extension-set recursion: every connected set whose least vertex is the
  // root is produced exactly once.
  void extend(VertexSet& current, std::vector<int>& candidates) {
    if (static_cast<int>(current.size()) == max_size || candidates.empty()) return;
    std::vector<int> marked;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      int c = candidates[k];
      current.push_back(c);
      in_set[c] = 1;
      emit(current);
      std::vector<int> next(candidates.begin() + static_cast<long>(k) + 1, candidates.end());
      std::vector<int> added;
      for (int w : g.neighbors(c)) {
        if (allowed[w] && !in_set[w] && !blocked[w] &&
            std::find(next.begin(), next.end(), w) == next.end()) {
          next.push_back(w);
          added.push_back(w);
          blocked[w] = 1;
        }
      }
      extend(current, next);
      for (int w : added) blocked[w] = 0;
      in_set[c] = 0;
      current.pop_back();
      blocked[c] = 1;
      marked.push_back(c);
    }
    for (int c : marked) blocked[c] = 0;
  }

  void emit(const VertexSet& current) {
    if (static_cast<long>(out.size()) >= cap) throw SizeError("connected_subsets exceeds cap");
    VertexSet s = current;
    std::sort(s.begin(), s.end());
    out.push_back(std::move(s));
  }
};

}  // namespace

std::vector<VertexSet> connected_subsets(const Graph& g, const VertexSet& within, int max_size,
                                         long cap) {
  std::vector<VertexSet> out;
  if (max_size < 1) return out;
  std::vector<char> allowed(static_cast<std::size_t>(g.size()), 0);
  for (int v : within) allowed[v] = 1;
  SubsetEnumerator e{g, allowed, max_size, cap, out, std::vector<char>(g.size(), 0),
                     std::vector<char>(g.size(), 0)};
  for (int root : within) {
    // Vertices below the root are excluded so that each set is rooted at its minimum.
    for (int v : within)
      if (v < root) e.blocked[v] = 1;
    VertexSet current{root};
    e.in_set[root] = 1;
    e.emit(current);
    std::vector<int> candidates;
    for (int w : g.neighbors(root)) {
      if (allowed[w] && w > root) {
        candidates.push_back(w);
        e.blocked[w] = 1;
      }
    }
    e.extend(current, candidates);
    for (int w : candidates) e.blocked[w] = 0;
    e.in_set[root] = 0;
    for (int v : within)
      if (v < root) e.blocked[v] = 0;
  }
  std::sort(out.begin(), out.end(), [](const VertexSet& a, const VertexSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

bool is_connected(const Graph& g, const VertexSet& s) {
  if (s.empty()) return false;
  std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
  for (int v : s) in[v] = 1;
  std::vector<int> stack{s.front()};
  in[s.front()] = 2;
  std::size_t seen = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int w : g.neighbors(u)) {
      if (in[w] == 1) {
        in[w] = 2;
        ++seen;
        stack.push_back(w);
      }
    }
  }
  return seen == s.size();
}

bool is_subset(const VertexSet& a, const VertexSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VertexSet all_vertices(const Graph& g) {
  VertexSet out(static_cast<std::size_t>(g.size()));
  std::iota(out.begin(), out.end(), 0);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("graph: bad integer '" + s + "' for " + what);
  }
}

}  // namespace

Graph graph_from_spec(const std::string& spec) {
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw ConfigError("graph: cannot open '" + spec.substr(5) + "'");
    return read_graph(in);
  }
  auto parts = split(spec, ':');
  if (parts.empty()) throw ConfigError("graph: empty spec");
  const auto& kind = parts[0];
  auto need = [&](std::size_t n) {
    if (parts.size() != n + 1)
      throw ConfigError("graph: '" + kind + "' expects " + std::to_string(n) + " parameters");
  };
  if (kind == "tree") {
    need(2);
    return tree_ball(parse_int(parts[1], "degree"), parse_int(parts[2], "radius"));
  }
  if (kind == "grid") {
    need(2);
    return grid_box(parse_int(parts[1], "dim"), parse_int(parts[2], "side"));
  }
  if (kind == "path") {
    need(1);
    return path_graph(parse_int(parts[1], "n"));
  }
  if (kind == "cycle") {
    need(1);
    return cycle_graph(parse_int(parts[1], "n"));
  }
  if (kind == "star") {
    need(1);
    return star_graph(parse_int(parts[1], "leaves"));
  }
  if (kind == "complete") {
    need(1);
    return complete_graph(parse_int(parts[1], "n"));
  }
  std::ifstream in(spec);
  if (in) return read_graph(in);
  throw ConfigError("graph: unknown generator '" + kind + "'");
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "n " << g.size() << '\n';
  for (auto [u, v] : g.edges()) out << "e " << u << ' ' << v << '\n';
  for (int b : g.boundary()) out << "b " << b << '\n';
}

Graph read_graph(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<std::pair<int, int>> edges;
  VertexSet boundary;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    auto fail = [&] { throw ConfigError("graph: malformed line " + std::to_string(line_no)); };
    if (tag == "n") {
      if (!(ls >> n)) fail();
    } else if (tag == "e") {
      int u, v;
      if (!(ls >> u >> v)) fail();
      edges.emplace_back(u, v);
    } else if (tag == "b") {
      int b;
      if (!(ls >> b)) fail();
      boundary.push_back(b);
    } else if (tag == "P") {
      break;  // start of a table section appended by other writers
    } else {
      fail();
    }
  }
  if (n < 0) throw ConfigError("graph: missing 'n' header");
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  try {
    return Graph(n, edges, boundary);
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("graph: ") + e.what());
  }
}

}  // namespace domcode
