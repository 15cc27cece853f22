#include "domcode/disease.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include "domcode/errors.hpp"
#include "domcode/parallel.hpp"
#include "domcode/report.hpp"

namespace domcode {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-vertex update times in increasing order.
class UpdateIndex {
 public:
  explicit UpdateIndex(const std::vector<SpaceTimeUpdate>& updates) {
    for (const auto& u : updates) by_vertex_[u.vertex].push_back({u.time, u.one});
    for (auto& [v, list] : by_vertex_) {
      std::sort(list.begin(), list.end());
      for (std::size_t k = 1; k < list.size(); ++k)
        if (list[k].first == list[k - 1].first) throw ArgumentError("updates: repeated time at one vertex");
    }
  }

  const std::vector<std::pair<double, bool>>& at(int v) const {
    static const std::vector<std::pair<double, bool>> empty;
    auto it = by_vertex_.find(v);
    return it == by_vertex_.end() ? empty : it->second;
  }

  // Index of the latest update of v at or before t, or -1.
  int latest(int v, double t) const {
    const auto& list = at(v);
    auto it = std::upper_bound(list.begin(), list.end(), std::make_pair(t, true));
    return static_cast<int>(it - list.begin()) - 1;
  }

  double latest_time(int v, double t) const {
    int j = latest(v, t);
    return j < 0 ? -kInf : at(v)[j].first;
  }

 private:
  std::unordered_map<int, std::vector<std::pair<double, bool>>> by_vertex_;
};

void check_shape(const Graph& g, const Chain& c) {
  if (c.path.empty() || c.times.size() != c.path.size() + 1) throw ArgumentError("chain: malformed path or times");
  for (int x : c.path)
    if (x < 0 || x >= g.size()) throw ArgumentError("chain: vertex out of range");
  for (std::size_t i = 1; i < c.path.size(); ++i)
    if (!g.adjacent(c.path[i - 1], c.path[i])) throw ArgumentError("chain: consecutive vertices are not adjacent");
}

}  // namespace

Tri disease_run(const Graph& g, double p, int r, int n, int v, const UpdateStream& stream, bool connected_ones) {
  if (n < 1 || r < 0) throw ArgumentError("disease_run: requires n >= 1 and r >= 0");
  if (v < 0 || v >= g.size()) throw ArgumentError("disease_run: vertex out of range");
  DiseaseOracle oracle(g, p, connected_ones);
  return localized_value(oracle, stream, v, r, n);
}

double union_bound(int delta, double p, double min_length) {
  if (min_length <= 0.0) return 1.0;
  const double x = (3.0 * delta - 1.0) * (1.0 - p);
  if (x >= 1.0) return kInf;
  const double k0 = std::ceil(min_length);
  return 3.0 * delta * (1.0 - p) * std::pow(x, k0 - 1.0) / (1.0 - x);
}

std::vector<SurvivalRow> survival_curve(const Graph& g, int v, double p, const std::vector<int>& r_values, long trials,
                                        std::uint64_t base_seed, int jobs, bool connected_ones) {
  if (trials <= 0) throw ArgumentError("survival_curve: trials must be positive");
  if (r_values.empty()) return {};
  for (int r : r_values)
    if (r < 1) throw ArgumentError("survival_curve: radii must be at least 1");
  const int r_max = *std::max_element(r_values.begin(), r_values.end());
  DiseaseOracle oracle(g, p, connected_ones);
  const auto dist = bounded_distances(g, v, r_max);
  const std::size_t m = r_values.size();
  std::vector<char> survived(static_cast<std::size_t>(trials) * m, 0);
  parallel_for(static_cast<std::size_t>(trials), jobs, [&](std::size_t k) {
    UpdateStream stream(family_seed(base_seed, k));
    for (std::size_t j = 0; j < m; ++j)
      survived[k * m + j] = localized_value(oracle, stream, v, r_values[j], 2 * r_values[j], dist) == Tri::Star;
  });
  const int delta = g.max_degree();
  std::vector<SurvivalRow> rows;
  for (std::size_t j = 0; j < m; ++j) {
    SurvivalRow row;
    row.p = p;
    row.r = r_values[j];
    row.n = 2 * row.r;
    row.trials = trials;
    for (long k = 0; k < trials; ++k) row.survivals += survived[static_cast<std::size_t>(k) * m + j];
    row.rate = static_cast<double>(row.survivals) / static_cast<double>(trials);
    row.wilson_hi = wilson_interval(row.survivals, trials, kZ99).hi;
    const double len = std::min<double>(row.r, row.n / 2.0);
    row.bound = coding_bound(delta, p, len);
    row.union_bound = union_bound(delta, p, len);
    row.vacuous = !std::isfinite(row.bound);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SpaceTimeUpdate> space_time_updates(const VertexSet& region, const UpdateStream& stream, double p,
                                                int steps) {
  std::vector<SpaceTimeUpdate> out;
  for (int i = 1; i <= steps; ++i)
    for (int x : region) {
      const UpdateDraw d = stream.at(x, i);
      out.push_back({x, i, d.t - i, d.u <= p});
    }
  return out;
}

bool is_witnessing_chain(const Graph& g, const std::vector<SpaceTimeUpdate>& updates, const Chain& chain, int v, int r,
                         int n) {
  check_shape(g, chain);
  if (chain.path[0] != v || chain.times[0] != 0.0) return false;
  for (std::size_t i = 1; i < chain.times.size(); ++i)
    if (chain.times[i] > chain.times[i - 1]) return false;
  const UpdateIndex index(updates);
  const auto dist = bounded_distances(g, v, r);
  const int k = chain.length();
  for (int i = 0; i < k; ++i) {
    const int x = chain.path[i];
    if (dist[x] < 0) return false;
    const int j = index.latest(x, chain.times[i]);
    if (j < 0) return false;
    const auto [time, one] = index.at(x)[j];
    if (time > chain.times[i + 1] || one) return false;
  }
  const int end = chain.path[k];
  if (dist[end] < 0) return true;
  const double end_time = chain.times[k + 1];
  return index.latest_time(end, chain.times[k]) <= end_time && end_time <= -n;
}

std::optional<Chain> shortest_chain(const Graph& g, const std::vector<SpaceTimeUpdate>& updates, int v, int r, int n) {
  const UpdateIndex index(updates);
  const auto dist = bounded_distances(g, v, r);
  struct Node {
    int x;
    double t;  // arrival time at x
    int j;     // latest update of x at or before t
    int parent;
  };
  std::vector<Node> nodes{{v, 0.0, index.latest(v, 0.0), -1}};
  auto terminal = [&](const Node& node) { return node.j < 0 || index.at(node.x)[node.j].first <= -n; };
  auto build = [&](int last, std::optional<int> exterior) {
    Chain c;
    for (int at = last; at >= 0; at = nodes[at].parent) {
      c.path.push_back(nodes[at].x);
      c.times.push_back(nodes[at].t);
    }
    std::reverse(c.path.begin(), c.path.end());
    std::reverse(c.times.begin(), c.times.end());
    if (exterior) {
      c.path.push_back(*exterior);
      c.times.push_back(nodes[last].t);
      c.times.push_back(nodes[last].t);
    } else {
      c.times.push_back(std::min(nodes[last].t, static_cast<double>(-n)));
    }
    return c;
  };
  if (terminal(nodes[0])) return build(0, std::nullopt);

  std::map<std::pair<int, int>, double> best;
  std::vector<int> frontier{0};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int idx : frontier) {
      const Node node = nodes[idx];
      const auto [s, one] = index.at(node.x)[node.j];
      if (one) continue;
      for (int y : g.neighbors(node.x)) {
        if (dist[y] < 0) return build(idx, y);
        const auto& list = index.at(y);
        const int lo = index.latest(y, s), hi = index.latest(y, node.t);
        for (int j = lo; j <= hi; ++j) {
          const double next_time = j + 1 < static_cast<int>(list.size()) ? list[j + 1].first : kInf;
          const double t = std::min(node.t, std::nextafter(next_time, -kInf));
          Node child{y, t, j, idx};
          if (terminal(child)) {
            nodes.push_back(child);
            return build(static_cast<int>(nodes.size()) - 1, std::nullopt);
          }
          auto [it, inserted] = best.emplace(std::make_pair(y, j), t);
          if (!inserted) {
            if (it->second >= t) continue;
            it->second = t;
          }
          nodes.push_back(child);
          next.push_back(static_cast<int>(nodes.size()) - 1);
        }
      }
    }
    frontier.swap(next);
  }
  return std::nullopt;
}

bool h_graph_check(const Graph& g, const std::vector<SpaceTimeUpdate>& updates, const Chain& chain, int r, int n) {
  check_shape(g, chain);
  const UpdateIndex index(updates);
  const int k = chain.length();
  std::vector<std::pair<int, double>> seq;
  for (int i = 0; i < k; ++i) {
    const double t = index.latest_time(chain.path[i], chain.times[i]);
    if (!std::isfinite(t)) throw ArgumentError("chain: passes a vertex with no update before its time");
    seq.emplace_back(chain.path[i], t);
  }
  for (std::size_t i = 1; i < seq.size(); ++i) {
    auto a = seq[i - 1], b = seq[i];
    if (a.second < b.second) std::swap(a, b);
    if (a.second == b.second || !g.adjacent(a.first, b.first)) return false;
    if (index.latest_time(b.first, a.second) != b.second) return false;
  }
  std::set<std::pair<int, double>> distinct(seq.begin(), seq.end());
  if (distinct.size() != seq.size()) return false;
  return k >= std::min<double>(r, n / 2.0);
}

}  // namespace domcode
