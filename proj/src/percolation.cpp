#include "domcode/percolation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "domcode/errors.hpp"

namespace domcode {

namespace {

// Marks every vertex reachable from `seeds` through vertices with allowed[v] != 0.
std::vector<char> reach(const Graph& g, const std::vector<int>& seeds, const std::vector<char>& allowed) {
  std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
  std::deque<int> queue;
  for (int s : seeds) {
    if (allowed[s] && !seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int w : g.neighbors(u)) {
      if (allowed[w] && !seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

BinaryConfig site_proxy(const Graph& g, const BinaryConfig& open) {
  if (g.boundary().empty()) throw ConfigError("infinite_proxy: graph has an empty boundary set");
  std::vector<char> allowed(open.begin(), open.end());
  auto seen = reach(g, g.boundary(), allowed);
  return BinaryConfig(seen.begin(), seen.end());
}

}  // namespace

PercConfig perc_sample(const Graph& g, double p, PercMode mode, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("perc_sample: p outside [0,1]");
  std::size_t len = mode == PercMode::Site ? static_cast<std::size_t>(g.size())
                                           : static_cast<std::size_t>(g.edge_count());
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  PercConfig c{mode, BinaryConfig(len)};
  for (auto& o : c.open) o = coin(rng) ? 1 : 0;
  return c;
}

BinaryConfig infinite_proxy(const Graph& g, const PercConfig& omega) {
  if (omega.mode == PercMode::Site) {
    if (static_cast<int>(omega.open.size()) != g.size()) throw ArgumentError("infinite_proxy: length mismatch");
    return site_proxy(g, omega.open);
  }
  if (static_cast<long>(omega.open.size()) != g.edge_count()) throw ArgumentError("infinite_proxy: length mismatch");
  return site_proxy(line_graph(g), omega.open);
}

BinaryConfig tilde_x(const Graph& g, const PercConfig& omega, int r) {
  if (omega.mode != PercMode::Site) throw ArgumentError("tilde_x: site configurations only");
  if (r < 0) throw ArgumentError("tilde_x: negative radius");
  if (static_cast<int>(omega.open.size()) != g.size()) throw ArgumentError("tilde_x: length mismatch");
  const int n = g.size();
  BinaryConfig out(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    int src[] = {v};
    auto dist = g.distances(src);
    bool ball_open = true;
    std::vector<char> outside(static_cast<std::size_t>(n), 0), open_outside(static_cast<std::size_t>(n), 0);
    for (int u = 0; u < n; ++u) {
      bool in_ball = dist[u] >= 0 && dist[u] <= r;
      if (in_ball && !omega.open[u]) ball_open = false;
      outside[u] = !in_ball;
      open_outside[u] = !in_ball && omega.open[u];
    }
    if (!ball_open) continue;
    std::vector<int> boundary_seeds(g.boundary().begin(), g.boundary().end());
    auto infinite_part = reach(g, boundary_seeds, outside);
    auto open_to_boundary = reach(g, boundary_seeds, open_outside);
    bool ok = true;
    for (int u = 0; u < n && ok; ++u) {
      if (dist[u] != r + 1) continue;
      ok = !infinite_part[u] || open_to_boundary[u];
    }
    out[v] = ok ? 1 : 0;
  }
  return out;
}

std::vector<Cutset> cutsets(const Graph& g, int pivot, int max_interior, long cap) {
  if (pivot < 0 || pivot >= g.size()) throw ArgumentError("cutsets: pivot out of range");
  if (g.is_boundary(pivot)) throw ArgumentError("cutsets: pivot lies on the boundary set");
  const int n = g.size();
  std::vector<Cutset> out;
  std::set<VertexSet> seen;
  auto consider = [&](const VertexSet& interior, const VertexSet& pi) {
    if (pi.empty()) return;
    for (int u : pi)
      if (g.is_boundary(u)) return;
    std::vector<char> blocked(static_cast<std::size_t>(n), 0);
    for (int u : interior) blocked[u] = 1;
    for (int u : pi) blocked[u] = 1;
    std::vector<char> allowed(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) allowed[u] = !blocked[u];
    auto far = reach(g, g.boundary(), allowed);
    // Minimal iff every cut vertex touches the boundary-reaching exterior.
    for (int u : pi) {
      bool touches = false;
      for (int w : g.neighbors(u)) touches = touches || far[w];
      if (!touches) return;
    }
    if (!seen.insert(pi).second) return;
    if (static_cast<long>(out.size()) >= cap) throw SizeError("cutsets: count exceeds cap");
    Cutset c{pi, interior, {}};
    for (int u = 0; u < n; ++u)
      if (!blocked[u]) c.exterior.push_back(u);
    out.push_back(std::move(c));
  };
  consider({}, {pivot});
  if (max_interior >= 1) {
    // Connected interiors avoiding the boundary, restricted to those containing the pivot.
    VertexSet within;
    int src[] = {pivot};
    auto dist = g.distances(src);
    for (int u = 0; u < n; ++u)
      if (!g.is_boundary(u) && dist[u] >= 0 && dist[u] < max_interior) within.push_back(u);
    for (const auto& s : connected_subsets(g, within, max_interior, cap * 100)) {
      if (!std::binary_search(s.begin(), s.end(), pivot)) continue;
      consider(s, boundaries(g, s).vertex_boundary);
    }
  }
  return out;
}

VertexSet newly_connected(const Graph& g, const Cutset& cut, const BinaryConfig& omega_rest, Bits eps) {
  const int n = g.size();
  std::vector<char> closed(static_cast<std::size_t>(n)), with(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) closed[u] = with[u] = omega_rest[u] != 0;
  for (std::size_t k = 0; k < cut.vertices.size(); ++k) {
    int u = cut.vertices[k];
    closed[u] = 0;
    with[u] = (eps >> k & 1) ? 1 : 0;
  }
  auto base = reach(g, g.boundary(), closed);
  auto grown = reach(g, g.boundary(), with);
  VertexSet out;
  for (int u = 0; u < n; ++u)
    if (grown[u] && !base[u]) out.push_back(u);
  return out;
}

std::vector<double> cutset_conditional_law(const Graph& g, const Cutset& cut, const BinaryConfig& z,
                                           const PercConfig& omega_rest, double p, double q) {
  if (omega_rest.mode != PercMode::Site) throw ArgumentError("cutset_conditional_law: site configurations only");
  if (static_cast<int>(z.size()) != g.size() || static_cast<int>(omega_rest.open.size()) != g.size())
    throw ArgumentError("cutset_conditional_law: length mismatch");
  if (!(p >= 0 && p <= 1 && q >= 0 && q <= 1)) throw ArgumentError("cutset_conditional_law: probability out of range");
  const int k = static_cast<int>(cut.vertices.size());
  if (k > 24) throw SizeError("cutset_conditional_law: cutset too large");
  if (g.boundary().empty()) throw ConfigError("cutset_conditional_law: empty boundary set");
  // Every observed one must already be boundary-connected with the cutset closed.
  {
    std::vector<char> closed(static_cast<std::size_t>(g.size()));
    for (int u = 0; u < g.size(); ++u) closed[u] = omega_rest.open[u] != 0;
    for (int u : cut.vertices) closed[u] = 0;
    auto base = reach(g, g.boundary(), closed);
    for (int u = 0; u < g.size(); ++u)
      if (z[u] && !base[u])
        throw ConditioningError("cutset_conditional_law: z has zero mass (vertex " + std::to_string(u) +
                                " is one but cannot be boundary-connected)");
  }
  const double lp = std::log(p), l1p = std::log1p(-p), l1q = std::log1p(-q);
  auto term = [](int count, double l) { return count == 0 ? 0.0 : count * l; };
  std::vector<double> logs(std::size_t{1} << k);
  for (Bits eps = 0; eps < logs.size(); ++eps) {
    int opened = std::popcount(eps);
    double w = term(opened, lp) + term(k - opened, l1p);
    if (w != kNegInf) w += term(static_cast<int>(newly_connected(g, cut, omega_rest.open, eps).size()), l1q);
    if (std::isnan(w)) w = kNegInf;
    logs[eps] = w;
  }
  double total = log_sum(logs);
  if (total == kNegInf) throw ConditioningError("cutset_conditional_law: every cutset value has zero weight");
  std::vector<double> out(logs.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = logs[i] == kNegInf ? 0.0 : std::exp(logs[i] - total);
  return out;
}

BoundReport perc_bounds(int delta, double h, double p, double q, int k_max) {
  if (!(p >= 0 && p <= 1 && q >= 0 && q < 1) || delta < 1 || h < 0)
    throw ArgumentError("perc_bounds: parameters out of range");
  BoundReport r;
  r.params = {{"delta", delta}, {"h", h}, {"p", p}, {"q", q}};
  const double ld = std::log(static_cast<double>(delta));
  const double kappa = 2.0 * ld - (delta + 1) * std::log1p(-q) + (h > 0 ? 0.5 * h * std::log1p(-p) : 0.0);
  if (kappa < 0.0) {
    double e = std::exp(kappa);
    r.add("series", e / (1.0 - e));
  } else {
    r.add("series", std::numeric_limits<double>::infinity(), true);
  }
  r.add("upper", h == 0.0 ? 0.0 : 1.0 - std::pow(1.0 - p, h));
  const double log_ratio = 2.0 * ld + (h / delta) * std::log1p(-p);
  r.add("hole_ratio", std::exp(log_ratio));
  for (int k = 1; k <= k_max; ++k) {
    if (log_ratio < 0.0) {
      double tail = std::exp(k * log_ratio - std::log1p(-std::exp(log_ratio)));
      r.add("hole_tail_" + std::to_string(k), tail, tail >= 1.0);
    } else {
      r.add("hole_tail_" + std::to_string(k), std::numeric_limits<double>::infinity(), true);
    }
  }
  return r;
}

SiteMeasure infinite_proxy_law(const Graph& g, double p) {
  const int n = g.size();
  if (n > PercLimits::kLawCap) throw SizeError("infinite_proxy_law: graph exceeds cap");
  const double lp = std::log(p), l1p = std::log1p(-p);
  std::vector<double> logs(std::size_t{1} << n, kNegInf);
  PercConfig omega{PercMode::Site, BinaryConfig(static_cast<std::size_t>(n))};
  for (Bits w = 0; w < logs.size(); ++w) {
    int opened = std::popcount(w);
    double weight = (opened ? opened * lp : 0.0) + ((n - opened) ? (n - opened) * l1p : 0.0);
    if (std::isnan(weight) || weight == kNegInf) continue;
    for (int u = 0; u < n; ++u) omega.open[u] = (w >> u & 1) ? 1 : 0;
    auto inf = infinite_proxy(g, omega);
    Bits x = 0;
    for (int u = 0; u < n; ++u)
      if (inf[u]) x |= bit(u);
    logs[x] = log_add(logs[x], weight);
  }
  return SiteMeasure(all_vertices(g), std::move(logs));
}

int hole_size(const Graph& g, const BinaryConfig& omega_inf, int v) {
  if (omega_inf[v]) return 0;
  std::vector<char> allowed(static_cast<std::size_t>(g.size()));
  for (int u = 0; u < g.size(); ++u) allowed[u] = !omega_inf[u];
  auto seen = reach(g, {v}, allowed);
  return static_cast<int>(std::count(seen.begin(), seen.end(), 1));
}

void write_perc(std::ostream& out, const PercConfig& c) {
  out << (c.mode == PercMode::Site ? "site " : "bond ") << c.open.size() << '\n';
  for (std::size_t base = 0; base < c.open.size(); base += 64) {
    std::uint64_t word = 0;
    for (std::size_t j = 0; j < 64 && base + j < c.open.size(); ++j)
      if (c.open[base + j]) word |= std::uint64_t{1} << j;
    out << std::hex << std::setw(16) << std::setfill('0') << word << std::dec << '\n';
  }
}

PercConfig read_perc(std::istream& in) {
  std::string mode;
  std::size_t len = 0;
  if (!(in >> mode >> len) || (mode != "site" && mode != "bond"))
    throw ConfigError("perc: missing '<site|bond> <length>' header");
  PercConfig c{mode == "site" ? PercMode::Site : PercMode::Bond, BinaryConfig(len, 0)};
  for (std::size_t base = 0; base < len; base += 64) {
    std::string hex;
    if (!(in >> hex)) throw ConfigError("perc: truncated bitmask");
    std::uint64_t word = 0;
    try {
      word = std::stoull(hex, nullptr, 16);
    } catch (const std::exception&) {
      throw ConfigError("perc: bad hex word '" + hex + "'");
    }
    for (std::size_t j = 0; j < 64 && base + j < len; ++j) c.open[base + j] = (word >> j & 1) ? 1 : 0;
  }
  return c;
}

}  // namespace domcode
