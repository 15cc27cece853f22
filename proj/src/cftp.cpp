#include "domcode/cftp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "domcode/errors.hpp"
#include "domcode/ising.hpp"
#include "domcode/parallel.hpp"
#include "domcode/report.hpp"

namespace domcode {

namespace {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// Effective field passed along a tree edge at coupling beta.
double edge_message(double cavity, double beta) {
  return 0.5 * (log_cosh(cavity + beta) - log_cosh(cavity - beta));
}

int local_index(const VertexSet& s, int v) {
  auto it = std::lower_bound(s.begin(), s.end(), v);
  return (it != s.end() && *it == v) ? static_cast<int>(it - s.begin()) : -1;
}

bool contains(const VertexSet& s, int v) { return std::binary_search(s.begin(), s.end(), v); }

long internal_edges(const Graph& g, const VertexSet& s) {
  long e = 0;
  for (int u : s)
    for (int w : g.neighbors(u))
      if (u < w && contains(s, w)) ++e;
  return e;
}

std::vector<VertexSet> induced_components(const Graph& g, const VertexSet& s) {
  std::vector<VertexSet> out;
  std::vector<char> seen(s.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (seen[i]) continue;
    VertexSet comp{s[i]};
    seen[i] = 1;
    for (std::size_t k = 0; k < comp.size(); ++k)
      for (int w : g.neighbors(comp[k])) {
        int j = local_index(s, w);
        if (j >= 0 && !seen[j]) {
          seen[j] = 1;
          comp.push_back(w);
        }
      }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

// Evaluates one vertex of the backward composition by recursing only into the
// updates it reads. Update (w, i) sees neighbor u at its latest earlier update:
// (u, i) if u comes first within step i, otherwise (u, i + 1), or the initial star.
class LazyEvaluator {
 public:
  LazyEvaluator(const SiteOracle& oracle, const UpdateStream& stream, int n, std::span<const int> level, int radius)
      : oracle_(oracle), stream_(stream), n_(n), level_(level), radius_(radius) {}

  Tri value(int v) {
    if (!oracle_.is_site(v)) return Tri::One;
    if (!in_set(v) || n_ < 1) return Tri::Star;
    std::vector<std::uint64_t> stack{key(v, 1)};
    const double floor = oracle_.floor();
    while (!stack.empty()) {
      const std::uint64_t k = stack.back();
      if (memo_.count(k)) {
        stack.pop_back();
        continue;
      }
      const int w = static_cast<int>(k >> 32), i = static_cast<int>(k & 0xffffffffu);
      const UpdateDraw draw = stream_.at(w, i);
      if (draw.u <= floor) {
        memo_.emplace(k, Tri::One);
        stack.pop_back();
        continue;
      }
      std::uint64_t missing = 0;
      TriView view = [&](int u) -> std::optional<Tri> {
        if (!oracle_.is_site(u)) return Tri::One;
        if (!in_set(u)) return Tri::Star;
        const double tu = stream_.t(u, i);
        const bool earlier = tu < draw.t || (tu == draw.t && u < w);
        const int j = earlier ? i : i + 1;
        if (j > n_) return Tri::Star;
        auto it = memo_.find(key(u, j));
        if (it != memo_.end()) return it->second;
        missing = key(u, j);
        return std::nullopt;
      };
      const OracleAnswer ans = oracle_.query(w, view);
      if (ans.kind == OracleAnswer::Kind::Missing) {
        stack.push_back(missing);
        continue;
      }
      memo_.emplace(k, ans.kind == OracleAnswer::Kind::Resolved ? (draw.u <= ans.q ? Tri::One : Tri::Zero)
                                                                 : Tri::Star);
      stack.pop_back();
    }
    return memo_.at(key(v, 1));
  }

 private:
  static std::uint64_t key(int v, int i) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)) << 32) | static_cast<std::uint32_t>(i);
  }
  bool in_set(int u) const { return level_[u] >= 0 && level_[u] <= radius_; }

  const SiteOracle& oracle_;
  const UpdateStream& stream_;
  int n_;
  std::span<const int> level_;
  int radius_;
  std::unordered_map<std::uint64_t, Tri> memo_;
};

int radius_with(const SiteOracle& oracle, const UpdateStream& stream, int v, int r_max, std::span<const int> dist) {
  for (int r = 0; r <= r_max; ++r) {
    LazyEvaluator eval(oracle, stream, std::max(1, 2 * r), dist, r);
    if (eval.value(v) != Tri::Star) return r;
  }
  return r_max + 1;
}

void check_floor(const SiteOracle& oracle) {
  const int delta = oracle.graph().max_degree();
  const double threshold = 1.0 - 1.0 / (3.0 * delta - 1.0);
  if (!(oracle.floor() > threshold))
    throw RegimeError("cftp: oracle floor " + std::to_string(oracle.floor()) + " is not above 1 - 1/(3*delta - 1) = " +
                      std::to_string(threshold));
}

}  // namespace

std::vector<int> bounded_distances(const Graph& g, int v, int r_max) {
  std::vector<int> dist(static_cast<std::size_t>(g.size()), -1);
  std::vector<int> frontier{v};
  dist[v] = 0;
  for (int d = 0; d < r_max && !frontier.empty(); ++d) {
    std::vector<int> next;
    for (int x : frontier)
      for (int w : g.neighbors(x))
        if (dist[w] < 0) {
          dist[w] = d + 1;
          next.push_back(w);
        }
    frontier.swap(next);
  }
  return dist;
}

char tri_char(Tri t) { return t == Tri::Zero ? '0' : t == Tri::One ? '1' : '*'; }

bool refines(const TriConfig& a, const TriConfig& b) {
  if (a.size() != b.size()) throw ArgumentError("refines: size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!refines(a[i], b[i])) return false;
  return true;
}

SiteOracle::SiteOracle(const Graph& g, VertexSet sites)
    : g_(&g), sites_(std::move(sites)), site_flag_(static_cast<std::size_t>(g.size()), 0) {
  if (!std::is_sorted(sites_.begin(), sites_.end()) ||
      std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end())
    throw ArgumentError("oracle: sites must be sorted and distinct");
  for (int v : sites_) {
    if (v < 0 || v >= g.size()) throw ArgumentError("oracle: site out of range");
    site_flag_[v] = 1;
  }
}

BernoulliOracle::BernoulliOracle(const Graph& g, VertexSet sites, double p) : SiteOracle(g, std::move(sites)), p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("bernoulli oracle: p outside [0, 1]");
}

DilutedIsingOracle::DilutedIsingOracle(const Graph& g, VertexSet sites, double beta, double field, double dilution)
    : SiteOracle(g, std::move(sites)), beta_(beta), field_(field), q_(dilution) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ArgumentError("diluted ising oracle: beta must be finite and >= 0");
  if (!std::isfinite(field)) throw ArgumentError("diluted ising oracle: field must be finite");
  if (!(dilution > 0.0 && dilution < 1.0)) throw ArgumentError("diluted ising oracle: dilution must lie in (0, 1)");
  for (int v : sites_)
    if (g.is_boundary(v)) throw ArgumentError("diluted ising oracle: sites must avoid the boundary set");
  tilted_ = field + 0.5 * std::log1p(-dilution);
  floor_ = compute_floor();
}

double DilutedIsingOracle::conditional(int v, const VertexSet& cluster) const {
  const Graph& g = *g_;
  if (!contains(cluster, v)) throw ArgumentError("conditional: cluster must contain v");
  if (internal_edges(g, cluster) + 1 == static_cast<long>(cluster.size())) {
    // Rooted tree recursion on the cluster; neighbors outside hold plus spins.
    const int m = static_cast<int>(cluster.size());
    std::vector<double> h(m);
    for (int i = 0; i < m; ++i) {
      const int u = cluster[i];
      int outside = 0;
      for (int w : g.neighbors(u))
        if (!contains(cluster, w)) ++outside;
      h[i] = (u == v ? field_ : tilted_) + beta_ * outside;
    }
    std::vector<int> order{local_index(cluster, v)}, parent(m, -1);
    std::vector<char> seen(m, 0);
    seen[order[0]] = 1;
    for (std::size_t k = 0; k < order.size(); ++k)
      for (int w : g.neighbors(cluster[order[k]])) {
        int j = local_index(cluster, w);
        if (j >= 0 && !seen[j]) {
          seen[j] = 1;
          parent[j] = order[k];
          order.push_back(j);
        }
      }
    std::vector<double> cavity(h);
    for (std::size_t k = order.size(); k-- > 1;) cavity[parent[order[k]]] += edge_message(cavity[order[k]], beta_);
    return q_ * logistic(2.0 * cavity[order[0]]);
  }
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find({v, cluster}); it != cache_.end()) return it->second;
  }
  if (static_cast<int>(cluster.size()) > kClusterCap)
    throw ResolutionError("diluted ising oracle: cluster of " + std::to_string(cluster.size()) + " sites around vertex " +
                          std::to_string(v) + " exceeds the exact-conditional cap");
  const double value = conditional_enumerated(v, cluster);
  std::lock_guard lock(cache_mutex_);
  cache_.emplace(std::make_pair(v, cluster), value);
  return value;
}

double DilutedIsingOracle::conditional_enumerated(int v, const VertexSet& cluster) const {
  IsingParams params;
  params.beta = beta_;
  params.field.assign(static_cast<std::size_t>(g_->size()), tilted_);
  params.field[v] = field_;
  params.volume = cluster;
  auto mu = ising_measure(*g_, params);
  const int i = local_index(cluster, v);
  return q_ * std::exp(mu.log_marginal(bit(i), bit(i)));
}

double DilutedIsingOracle::compute_floor() const {
  // Removing plus neighbors from the conditioning only lowers the plus probability,
  // so the smallest conditional is attained with the whole component at zero.
  const Graph& g = *g_;
  double best = 1.0;
  for (const auto& comp : induced_components(g, sites_)) {
    const int m = static_cast<int>(comp.size());
    if (internal_edges(g, comp) + 1 != static_cast<long>(m)) {
      if (m > kClusterCap) throw SizeError("diluted ising oracle: cyclic component exceeds the exact-conditional cap");
      for (int v : comp) best = std::min(best, conditional_enumerated(v, comp) / q_);
      continue;
    }
    // All plus probabilities on a tree component from inward and outward messages.
    std::vector<double> h(m);
    std::vector<int> outside(m, 0);
    for (int i = 0; i < m; ++i) {
      for (int w : g.neighbors(comp[i]))
        if (!contains(comp, w)) ++outside[i];
      h[i] = tilted_ + beta_ * outside[i];
    }
    std::vector<int> order{0}, parent(m, -1);
    std::vector<char> seen(m, 0);
    seen[0] = 1;
    for (std::size_t k = 0; k < order.size(); ++k)
      for (int w : g.neighbors(comp[order[k]])) {
        int j = local_index(comp, w);
        if (j >= 0 && !seen[j]) {
          seen[j] = 1;
          parent[j] = order[k];
          order.push_back(j);
        }
      }
    std::vector<double> up(h), child_sum(m, 0.0);
    for (std::size_t k = order.size(); k-- > 1;) {
      const int c = order[k];
      const double msg = edge_message(up[c], beta_);
      up[parent[c]] += msg;
      child_sum[parent[c]] += msg;
    }
    std::vector<double> down(m, 0.0);  // message from parent into the vertex
    for (std::size_t k = 1; k < order.size(); ++k) {
      const int c = order[k], p = parent[c];
      double cavity = h[p] + child_sum[p] - edge_message(up[c], beta_);
      if (parent[p] >= 0) cavity += down[p];
      down[c] = edge_message(cavity, beta_);
    }
    for (int i = 0; i < m; ++i) {
      const double total = field_ + beta_ * outside[i] + child_sum[i] + (parent[i] >= 0 ? down[i] : 0.0);
      best = std::min(best, logistic(2.0 * total));
    }
  }
  return q_ * best;
}

OracleAnswer DilutedIsingOracle::query(int v, const TriView& view) const {
  VertexSet cluster{v};
  for (std::size_t k = 0; k < cluster.size(); ++k) {
    for (int w : g_->neighbors(cluster[k])) {
      if (w == v || std::find(cluster.begin(), cluster.end(), w) != cluster.end()) continue;
      const auto s = view(w);
      if (!s) return OracleAnswer::missing();
      if (*s == Tri::Star) return OracleAnswer::blocked();
      if (*s == Tri::Zero) cluster.push_back(w);
    }
  }
  std::sort(cluster.begin(), cluster.end());
  return OracleAnswer::resolved(conditional(v, cluster));
}

DiseaseOracle::DiseaseOracle(const Graph& g, double p, bool connected_ones)
    : SiteOracle(g, all_vertices(g)), p_(p), connected_ones_(connected_ones) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("disease oracle: p outside [0, 1]");
}

OracleAnswer DiseaseOracle::query(int v, const TriView& view) const {
  const Graph& g = *g_;
  std::vector<int> zeros{v};
  for (std::size_t k = 0; k < zeros.size(); ++k)
    for (int w : g.neighbors(zeros[k])) {
      if (w == v || std::find(zeros.begin(), zeros.end(), w) != zeros.end()) continue;
      const auto s = view(w);
      if (!s) return OracleAnswer::missing();
      if (*s == Tri::Star) return OracleAnswer::blocked();
      if (*s == Tri::Zero) zeros.push_back(w);
    }
  if (!connected_ones_) return OracleAnswer::resolved(p_);

  // Some cluster K of ones must cut v off from every star: the component of v
  // in the complement of K may not contain a star other than at v.
  std::vector<std::optional<Tri>> state(static_cast<std::size_t>(g.size()));
  for (int u = 0; u < g.size(); ++u) {
    if (u == v) continue;
    state[u] = view(u);
    if (!state[u]) return OracleAnswer::missing();
  }
  std::vector<int> cluster_id(static_cast<std::size_t>(g.size()), -1);
  int clusters = 0;
  for (int s = 0; s < g.size(); ++s) {
    if (s == v || *state[s] != Tri::One || cluster_id[s] >= 0) continue;
    std::vector<int> stack{s};
    cluster_id[s] = clusters;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int w : g.neighbors(x))
        if (w != v && *state[w] == Tri::One && cluster_id[w] < 0) {
          cluster_id[w] = clusters;
          stack.push_back(w);
        }
    }
    ++clusters;
  }
  for (int k = 0; k < clusters; ++k) {
    std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
    std::vector<int> stack{v};
    seen[v] = 1;
    bool starred = false;
    while (!stack.empty() && !starred) {
      int x = stack.back();
      stack.pop_back();
      for (int w : g.neighbors(x)) {
        if (seen[w] || cluster_id[w] == k) continue;
        if (*state[w] == Tri::Star) {
          starred = true;
          break;
        }
        seen[w] = 1;
        stack.push_back(w);
      }
    }
    if (!starred) return OracleAnswer::resolved(p_);
  }
  return OracleAnswer::blocked();
}

TriConfig all_star(const SiteOracle& oracle) {
  TriConfig y(static_cast<std::size_t>(oracle.graph().size()), Tri::One);
  for (int v : oracle.sites()) y[v] = Tri::Star;
  return y;
}

Tri psi_hat_value(const TriConfig& y, int v, double u, const SiteOracle& oracle) {
  if (u <= oracle.floor()) return Tri::One;
  const TriView view = [&](int w) -> std::optional<Tri> { return y[w]; };
  const OracleAnswer ans = oracle.query(v, view);
  if (ans.kind == OracleAnswer::Kind::Resolved) return u <= ans.q ? Tri::One : Tri::Zero;
  return Tri::Star;
}

TriConfig psi_hat(const TriConfig& y, int v, double u, const SiteOracle& oracle) {
  if (static_cast<int>(y.size()) != oracle.graph().size()) throw ArgumentError("psi_hat: configuration size mismatch");
  if (!oracle.is_site(v)) throw ArgumentError("psi_hat: vertex is not a process site");
  TriConfig out = y;
  out[v] = psi_hat_value(y, v, u, oracle);
  return out;
}

TriConfig sweep(const TriConfig& y, const VertexSet& a, const UpdateStream& stream, int step, const SiteOracle& oracle) {
  if (static_cast<int>(y.size()) != oracle.graph().size()) throw ArgumentError("sweep: configuration size mismatch");
  TriConfig out = y;
  for (int v : oracle.sites())
    if (!contains(a, v)) out[v] = Tri::Star;
  std::vector<std::pair<double, int>> order;
  for (int v : a) {
    if (!oracle.is_site(v)) throw ArgumentError("sweep: update set must consist of process sites");
    order.emplace_back(stream.t(v, step), v);
  }
  std::sort(order.begin(), order.end());
  for (auto [t, v] : order) out[v] = psi_hat_value(out, v, stream.u(v, step), oracle);
  return out;
}

TriConfig compose_sweeps(const SiteOracle& oracle, const UpdateStream& stream, const VertexSet& a, int n) {
  TriConfig y = all_star(oracle);
  for (int i = n; i >= 1; --i) y = sweep(y, a, stream, i, oracle);
  return y;
}

Tri lazy_value(const SiteOracle& oracle, const UpdateStream& stream, int v, const VertexSet& a, int n) {
  std::vector<int> level(static_cast<std::size_t>(oracle.graph().size()), -1);
  for (int u : a) {
    if (!oracle.is_site(u)) throw ArgumentError("lazy_value: update set must consist of process sites");
    level[u] = 0;
  }
  LazyEvaluator eval(oracle, stream, n, level, 0);
  return eval.value(v);
}

Tri localized_value(const SiteOracle& oracle, const UpdateStream& stream, int v, int r, int n) {
  if (r < 0 || n < 0) throw ArgumentError("localized_value: negative radius or horizon");
  auto dist = bounded_distances(oracle.graph(), v, r);
  LazyEvaluator eval(oracle, stream, n, dist, r);
  return eval.value(v);
}

Tri localized_value(const SiteOracle& oracle, const UpdateStream& stream, int v, int r, int n,
                    std::span<const int> dist) {
  if (r < 0 || n < 0) throw ArgumentError("localized_value: negative radius or horizon");
  if (static_cast<int>(dist.size()) != oracle.graph().size() || dist[v] != 0)
    throw ArgumentError("localized_value: distance table does not match v");
  LazyEvaluator eval(oracle, stream, n, dist, r);
  return eval.value(v);
}

CftpResult cftp_sample(const SiteOracle& oracle, const UpdateStream& stream, CftpMode mode, int max_horizon,
                       VertexSet targets) {
  check_floor(oracle);
  if (max_horizon < 1) throw ArgumentError("cftp_sample: max_horizon must be positive");
  if (targets.empty()) targets = oracle.sites();
  for (int v : targets)
    if (!oracle.is_site(v)) throw ArgumentError("cftp_sample: target is not a process site");
  CftpResult res;
  const std::size_t m = targets.size();
  res.targets = targets;
  res.values.assign(m, Tri::Star);
  res.horizon.assign(m, -1);
  res.radius.assign(m, -1);

  if (mode == CftpMode::Global) {
    TriConfig prev;
    std::size_t resolved = 0;
    bool extra_done = false;
    for (int n = 1; n <= max_horizon; n *= 2) {
      TriConfig y = compose_sweeps(oracle, stream, oracle.sites(), n);
      if (!prev.empty()) {
        for (int v : oracle.sites())
          if (!refines(y[v], prev[v])) ++res.monotonicity_violations;
      }
      for (std::size_t k = 0; k < m; ++k) {
        const Tri val = y[targets[k]];
        if (res.horizon[k] >= 0) {
          if (val != res.values[k]) ++res.stability_violations;
        } else if (val != Tri::Star) {
          res.values[k] = val;
          res.horizon[k] = n;
          ++resolved;
        }
      }
      prev = std::move(y);
      if (resolved == m) {
        // One further doubling confirms the resolved values are stable.
        if (extra_done || n > max_horizon / 2) return res;
        extra_done = true;
      }
    }
    if (resolved == m) return res;
  } else {
    const int r_cap = max_horizon / 2;
    for (std::size_t k = 0; k < m; ++k) {
      const int v = targets[k];
      const auto d = bounded_distances(oracle.graph(), v, r_cap + 1);
      Tri last = Tri::Star;
      for (int n = 1; n <= max_horizon; n *= 2) {
        const int r = n / 2;
        LazyEvaluator eval(oracle, stream, n, d, r);
        const Tri val = eval.value(v);
        if (!refines(val, last)) {
          ++res.monotonicity_violations;
          if (res.horizon[k] >= 0) ++res.stability_violations;
        }
        last = val;
        if (res.horizon[k] >= 0) break;
        if (val != Tri::Star) {
          res.values[k] = val;
          res.horizon[k] = n;
          res.radius[k] = r;
          if (2 * n > max_horizon) break;
        }
      }
    }
    if (std::all_of(res.horizon.begin(), res.horizon.end(), [](int h) { return h >= 0; })) return res;
  }
  long unresolved = std::count(res.horizon.begin(), res.horizon.end(), -1);
  throw ResolutionError("cftp_sample: " + std::to_string(unresolved) + " target(s) still starred at horizon " +
                        std::to_string(max_horizon) + " (seed " + std::to_string(stream.seed()) + ")");
}

int coding_radius(const SiteOracle& oracle, const UpdateStream& stream, int v, int r_max) {
  if (r_max < 0) throw ArgumentError("coding_radius: negative r_max");
  auto dist = bounded_distances(oracle.graph(), v, r_max);
  return radius_with(oracle, stream, v, r_max, dist);
}

double coding_constant(int delta, double p) {
  const double x = (3.0 * delta - 1.0) * (1.0 - p);
  if (x >= 1.0) return std::numeric_limits<double>::infinity();
  return 3.0 * delta / ((3.0 * delta - 1.0) * (1.0 - x));
}

double coding_bound(int delta, double p, double r) {
  const double x = (3.0 * delta - 1.0) * (1.0 - p);
  if (x >= 1.0) return std::numeric_limits<double>::infinity();
  return coding_constant(delta, p) * std::pow(x, r);
}

std::vector<TailRow> coding_tail(const SiteOracle& oracle, int v, const std::vector<int>& r_values, long trials,
                                 std::uint64_t base_seed, int jobs) {
  if (trials <= 0) throw ArgumentError("coding_tail: trials must be positive");
  if (r_values.empty()) return {};
  const int r_max = *std::max_element(r_values.begin(), r_values.end());
  if (r_max < 0) throw ArgumentError("coding_tail: negative radius");
  const auto dist = bounded_distances(oracle.graph(), v, r_max);
  std::vector<int> radii(static_cast<std::size_t>(trials));
  parallel_for(radii.size(), jobs, [&](std::size_t k) {
    UpdateStream stream(family_seed(base_seed, k));
    radii[k] = radius_with(oracle, stream, v, r_max, dist);
  });
  const int delta = oracle.graph().max_degree();
  std::vector<TailRow> rows;
  for (int r : r_values) {
    TailRow row;
    row.r = r;
    row.trials = trials;
    row.exceed = std::count_if(radii.begin(), radii.end(), [r](int x) { return x > r; });
    row.rate = static_cast<double>(row.exceed) / static_cast<double>(trials);
    const Interval ci = wilson_interval(row.exceed, trials, kZ99);
    row.wilson_lo = ci.lo;
    row.wilson_hi = ci.hi;
    row.bound = coding_bound(delta, oracle.floor(), r);
    row.vacuous = !std::isfinite(row.bound);
    rows.push_back(row);
  }
  return rows;
}

ClusterLaw diluted_ising_cluster_law(const Graph& g, double beta, double field, double dilution) {
  if (!(dilution > 0.0 && dilution < 1.0)) throw ArgumentError("cluster law: dilution must lie in (0, 1)");
  struct State {
    std::mutex mutex;
    std::map<VertexSet, SiteMeasure> cache;
  };
  auto state = std::make_shared<State>();
  const double tilted = field + 0.5 * std::log1p(-dilution);
  const Graph* gp = &g;
  return [state, gp, beta, tilted](const VertexSet& cluster) {
    {
      std::lock_guard lock(state->mutex);
      if (auto it = state->cache.find(cluster); it != state->cache.end()) return it->second;
    }
    if (static_cast<int>(cluster.size()) > DilutedIsingOracle::kClusterCap)
      throw SizeError("cluster law: cluster of " + std::to_string(cluster.size()) + " sites exceeds the cap");
    IsingParams params;
    params.beta = beta;
    params.field.assign(static_cast<std::size_t>(gp->size()), tilted);
    params.volume = cluster;
    SiteMeasure mu = ising_measure(*gp, params);
    std::lock_guard lock(state->mutex);
    state->cache.emplace(cluster, mu);
    return mu;
  };
}

BinaryConfig compose_full(const Graph& g, const VertexSet& sites, const BinaryConfig& z, const ClusterLaw& law,
                          std::uint64_t aux_seed) {
  if (static_cast<int>(z.size()) != g.size()) throw ArgumentError("compose_full: configuration size mismatch");
  BinaryConfig x(static_cast<std::size_t>(g.size()), 1);
  VertexSet zeros;
  for (int v : sites)
    if (!z[v]) zeros.push_back(v);
  const UpdateStream aux(aux_seed);
  for (const auto& cluster : induced_components(g, zeros)) {
    const SiteMeasure mu = law(cluster);
    if (mu.sites() != cluster) throw ArgumentError("compose_full: cluster law returned the wrong sites");
    const int m = static_cast<int>(cluster.size());
    // Labels follow the auxiliary order; the minimal vertex supplies the uniform.
    std::vector<int> label_to_index(m);
    for (int i = 0; i < m; ++i) label_to_index[i] = i;
    std::sort(label_to_index.begin(), label_to_index.end(), [&](int a, int b) {
      return aux.t(cluster[a], 0) < aux.t(cluster[b], 0);
    });
    const double xi = aux.u(cluster[label_to_index[0]], 0);
    double cum = 0.0;
    Bits chosen = mu.full();
    for (Bits c = 0; c <= mu.full(); ++c) {
      Bits conf = 0;
      for (int j = 0; j < m; ++j)
        if (c >> j & 1) conf |= bit(label_to_index[j]);
      cum += mu.prob(conf);
      if (xi <= cum) {
        chosen = conf;
        break;
      }
    }
    for (int i = 0; i < m; ++i) x[cluster[i]] = static_cast<std::uint8_t>(chosen >> i & 1);
  }
  return x;
}

}  // namespace domcode
