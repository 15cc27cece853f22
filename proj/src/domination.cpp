#include "domcode/domination.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "domcode/errors.hpp"

namespace domcode {

namespace {

void require_cap(const SiteMeasure& mu, int cap, const char* what) {
  if (mu.size() > cap)
    throw SizeError(std::string(what) + ": " + std::to_string(mu.size()) + " sites exceed cap " +
                    std::to_string(cap));
}

void require_same_sites(const SiteMeasure& a, const SiteMeasure& b, const char* what) {
  if (a.sites() != b.sites()) throw ArgumentError(std::string(what) + ": measures on different sites");
}

// count * log(1 - p) with the convention 0 * log 0 = 0.
double log_one_minus_pow(double p, int count) {
  if (count == 0) return 0.0;
  return p >= 1.0 ? kNegInf : count * std::log1p(-p);
}

double log_of(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

// Log-marginal of mu on the coordinates in `mask`, stored at index x & mask.
std::vector<double> log_marginal_table(const SiteMeasure& mu, Bits mask) {
  std::vector<double> out(mu.states(), kNegInf);
  for (Bits x = 0; x < mu.states(); ++x) {
    double l = mu.log_prob(x);
    if (l != kNegInf) out[x & mask] = log_add(out[x & mask], l);
  }
  return out;
}

// P(v = 1 | pattern on the rest of the mask) from a marginal table; nullopt on zero mass.
std::optional<double> conditional_from_table(const std::vector<double>& table, Bits pattern, int v) {
  double l1 = table[pattern | bit(v)];
  double l0 = table[pattern & ~bit(v)];
  if (l1 == kNegInf && l0 == kNegInf) return std::nullopt;
  if (l1 == kNegInf) return 0.0;
  if (l0 == kNegInf) return 1.0;
  return 1.0 / (1.0 + std::exp(l0 - l1));
}

}  // namespace

std::vector<double> Coupling::first_marginal() const {
  std::vector<double> out(std::size_t{1} << sites.size(), 0.0);
  for (const auto& e : entries) out[e.x] += e.prob;
  return out;
}

std::vector<double> Coupling::second_marginal() const {
  std::vector<double> out(std::size_t{1} << sites.size(), 0.0);
  for (const auto& e : entries) out[e.y] += e.prob;
  return out;
}

double Coupling::monotone_mass() const {
  double acc = 0.0;
  for (const auto& e : entries)
    if ((e.y & ~e.x) == 0) acc += e.prob;
  return acc;
}

SiteMeasure bernoulli_measure(const VertexSet& sites, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("bernoulli_measure: p outside [0,1]");
  const int n = static_cast<int>(sites.size());
  if (n > SiteMeasure::kMaxSites) throw SizeError("bernoulli_measure: too many sites");
  std::vector<double> logs(std::size_t{1} << n);
  const double l1 = log_of(p), l0 = log_of(1.0 - p);
  for (Bits x = 0; x < logs.size(); ++x) {
    int ones = std::popcount(x);
    double a = ones ? (l1 == kNegInf ? kNegInf : ones * l1) : 0.0;
    double b = (n - ones) ? (l0 == kNegInf ? kNegInf : (n - ones) * l0) : 0.0;
    logs[x] = (a == kNegInf || b == kNegInf) ? kNegInf : a + b;
  }
  return SiteMeasure(sites, std::move(logs));
}

SiteMeasure bernoulli_measure(const Graph& g, double p) { return bernoulli_measure(all_vertices(g), p); }

std::optional<double> site_conditional(const SiteMeasure& mu, int site, Bits x) {
  double l1 = mu.log_prob(x | bit(site));
  double l0 = mu.log_prob(x & ~bit(site));
  if (l1 == kNegInf && l0 == kNegInf) return std::nullopt;
  if (l1 == kNegInf) return 0.0;
  if (l0 == kNegInf) return 1.0;
  return 1.0 / (1.0 + std::exp(l0 - l1));
}

double p_star(const SiteMeasure& mu) {
  double best = 1.0;
  for (int i = 0; i < mu.size(); ++i) {
    for (Bits x = 0; x < mu.states(); ++x) {
      if (x >> i & 1) continue;
      if (auto c = site_conditional(mu, i, x)) best = std::min(best, *c);
    }
  }
  return best;
}

double monotone_flow_value(const SiteMeasure& mu, const SiteMeasure& nu) {
  require_same_sites(mu, nu, "strassen_dominates");
  require_cap(mu, DominationLimits::kStrassenCap, "strassen_dominates");
  auto a = mu.probs(), b = nu.probs();
  return detail::lattice_max_flow(mu.size(), a, b, nullptr, nullptr, nullptr);
}

bool strassen_dominates(const SiteMeasure& mu, const SiteMeasure& nu, double flow_tol) {
  return monotone_flow_value(mu, nu) >= 1.0 - flow_tol;
}

std::optional<Coupling> strassen_coupling(const SiteMeasure& mu, const SiteMeasure& nu) {
  require_same_sites(mu, nu, "strassen_coupling");
  require_cap(mu, DominationLimits::kWitnessCap, "strassen_coupling");
  const int n = mu.size();
  const std::size_t states = mu.states();
  auto a = mu.probs(), b = nu.probs();
  std::vector<double> edge, sink, source;
  double value = detail::lattice_max_flow(n, a, b, &edge, &sink, &source);
  if (value < 1.0 - kFlowTol) return std::nullopt;
  // Split each node's outflow in proportion to the origins of its inflow. Parents
  // x + {i} have larger index than x, so a decreasing sweep sees them first.
  std::vector<std::map<Bits, double>> origin(states);
  std::map<std::pair<Bits, Bits>, double> pairs;
  for (std::size_t x = states; x-- > 0;) {
    auto& mix = origin[x];
    if (source[x] > 0) mix[x] += source[x];
    double inflow = 0.0;
    for (const auto& [o, m] : mix) inflow += m;
    if (inflow <= 0.0) continue;
    auto push = [&](double amount, auto&& sink_fn) {
      if (amount <= 0.0) return;
      for (const auto& [o, m] : mix) sink_fn(o, amount * m / inflow);
    };
    push(sink[x], [&](Bits o, double f) { pairs[{o, x}] += f; });
    for (int i = 0; i < n; ++i) {
      if (!(x >> i & 1)) continue;
      Bits child = x & ~bit(i);
      push(edge[x * n + i], [&](Bits o, double f) { origin[child][o] += f; });
    }
    mix.clear();
  }
  Coupling c{mu.sites(), {}};
  for (const auto& [k, p] : pairs)
    if (p > 0) c.entries.push_back({k.first, k.second, p});
  return c;
}

double p_of(const SiteMeasure& mu, double tolerance, double flow_tol) {
  require_cap(mu, DominationLimits::kStrassenCap, "p_of");
  if (!(tolerance > 0)) throw ArgumentError("p_of: tolerance must be positive");
  if (!(flow_tol >= 0)) throw ArgumentError("p_of: flow tolerance must be nonnegative");
  if (strassen_dominates(mu, bernoulli_measure(mu.sites(), 1.0), flow_tol)) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tolerance) {
    double mid = 0.5 * (lo + hi);
    if (strassen_dominates(mu, bernoulli_measure(mu.sites(), mid), flow_tol)) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool holley_star(const SiteMeasure& mu_x, const SiteMeasure& mu_y) {
  require_same_sites(mu_x, mu_y, "holley_star");
  require_cap(mu_x, DominationLimits::kHolleyCap, "holley_star");
  const int n = mu_x.size();
  const Bits full = mu_x.full();
  std::vector<double> best_y(mu_x.states());
  constexpr double kUndefined = -1.0;
  for (int v = 0; v < n; ++v) {
    const Bits rest = full & ~bit(v);
    // Enumerate F as submasks of the other sites.
    for (Bits f = rest;; f = (f - 1) & rest) {
      auto tx = log_marginal_table(mu_x, f | bit(v));
      auto ty = log_marginal_table(mu_y, f | bit(v));
      // Increasing submask order guarantees y \ {i} is visited before y.
      for (Bits y = 0;; y = (y - f) & f) {
        double m = kUndefined;
        if (auto c = conditional_from_table(ty, y, v)) m = *c;
        for (int i = 0; i < n; ++i)
          if (y >> i & 1) m = std::max(m, best_y[y & ~bit(i)]);
        best_y[y] = m;
        if (y == f) break;
      }
      for (Bits x = 0;; x = (x - f) & f) {
        if (auto c = conditional_from_table(tx, x, v)) {
          if (best_y[x] != kUndefined && *c < best_y[x] - kProbTol) return false;
        }
        if (x == f) break;
      }
      if (f == 0) break;
    }
  }
  return true;
}

SiteMeasure tilt(const SiteMeasure& mu, Bits ones, Bits reweighted, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("tilt: p outside [0,1]");
  std::vector<double> logs(mu.states(), kNegInf);
  bool any = false;
  for (Bits x = 0; x < mu.states(); ++x) {
    if ((x & ones) != ones || mu.log_prob(x) == kNegInf) continue;
    double w = log_one_minus_pow(p, std::popcount(x & reweighted));
    if (w == kNegInf) continue;
    logs[x] = mu.log_prob(x) + w;
    any = true;
  }
  if (!any) throw ConditioningError("tilt: conditioning event has zero mass");
  return SiteMeasure(mu.sites(), std::move(logs));
}

SiteMeasure dilute_law(const SiteMeasure& mu, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("dilute_law: p outside [0,1]");
  std::vector<double> w = mu.log_probs();
  const double keep = log_of(p), kill = log_of(1.0 - p);
  for (int i = 0; i < mu.size(); ++i) {
    for (Bits x = 0; x < w.size(); ++x) {
      if (!(x >> i & 1)) continue;
      double l = w[x];
      Bits z = x & ~bit(i);
      w[x] = (l == kNegInf || keep == kNegInf) ? kNegInf : l + keep;
      if (l != kNegInf && kill != kNegInf) w[z] = log_add(w[z], l + kill);
    }
  }
  return SiteMeasure(mu.sites(), std::move(w));
}

SiteMeasure conditional_given_dilution(const SiteMeasure& mu, double p, Bits z) {
  require_cap(mu, DominationLimits::kDilutionBayesCap, "conditional_given_dilution");
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("conditional_given_dilution: p outside [0,1]");
  const int n = mu.size();
  const double keep = log_of(p), kill = log_of(1.0 - p);
  std::vector<double> y_log(mu.states());
  for (Bits y = 0; y < mu.states(); ++y) {
    int ones = std::popcount(y);
    double a = ones ? (keep == kNegInf ? kNegInf : ones * keep) : 0.0;
    double b = (n - ones) ? (kill == kNegInf ? kNegInf : (n - ones) * kill) : 0.0;
    y_log[y] = (a == kNegInf || b == kNegInf) ? kNegInf : a + b;
  }
  std::vector<double> joint(mu.states(), kNegInf);
  bool any = false;
  for (Bits x = 0; x < mu.states(); ++x) {
    if (mu.log_prob(x) == kNegInf) continue;
    for (Bits y = 0; y < mu.states(); ++y) {
      if ((x & y) != z || y_log[y] == kNegInf) continue;
      joint[x] = log_add(joint[x], mu.log_prob(x) + y_log[y]);
      any = true;
    }
  }
  if (!any) throw ConditioningError("conditional_given_dilution: z has zero mass");
  return SiteMeasure(mu.sites(), std::move(joint));
}

double p_star_given_dilution(const SiteMeasure& mu, double p) {
  require_cap(mu, DominationLimits::kTiltScanCap, "p_star_given_dilution");
  if (mu.log_prob(mu.full()) == kNegInf)
    throw ConditioningError("p_star_given_dilution: measure does not support all ones");
  const Bits full = mu.full();
  double best = 1.0;
  for (int v = 0; v < mu.size(); ++v) {
    const Bits rest = full & ~bit(v);
    for (Bits a = rest;; a = (a - 1) & rest) {
      // Sites of A are always one, so reweighting them only rescales.
      const Bits free = rest & ~a;
      for (Bits b = free;; b = (b - 1) & free) {
        double num = kNegInf, den = kNegInf;
        for (Bits x = 0; x < mu.states(); ++x) {
          if ((x & a) != a || mu.log_prob(x) == kNegInf) continue;
          double w = mu.log_prob(x) + log_one_minus_pow(p, std::popcount(x & b));
          den = log_add(den, w);
          if (x >> v & 1) num = log_add(num, w);
        }
        if (den != kNegInf) best = std::min(best, num == kNegInf ? 0.0 : std::exp(num - den));
        if (b == 0) break;
      }
      if (a == 0) break;
    }
  }
  return best;
}

Coupling sequential_monotone_coupling(const SiteMeasure& mu_x, const SiteMeasure& mu_y,
                                      std::span<const int> order) {
  require_same_sites(mu_x, mu_y, "sequential_monotone_coupling");
  require_cap(mu_x, DominationLimits::kStrassenCap, "sequential_monotone_coupling");
  const int n = mu_x.size();
  {
    std::vector<int> sorted(order.begin(), order.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(static_cast<std::size_t>(n));
    std::iota(expect.begin(), expect.end(), 0);
    if (sorted != expect) throw ArgumentError("sequential_monotone_coupling: order is not a permutation");
  }
  std::vector<std::vector<double>> tx(n), ty(n);
  Bits prefix = 0;
  for (int k = 0; k < n; ++k) {
    tx[k] = log_marginal_table(mu_x, prefix | bit(order[k]));
    ty[k] = log_marginal_table(mu_y, prefix | bit(order[k]));
    prefix |= bit(order[k]);
  }
  Coupling out{mu_x.sites(), {}};
  struct Node {
    int k;
    Bits x, y;
    double prob;
  };
  std::vector<Node> stack{{0, 0, 0, 1.0}};
  while (!stack.empty()) {
    Node s = stack.back();
    stack.pop_back();
    if (s.k == n) {
      out.entries.push_back({s.x, s.y, s.prob});
      continue;
    }
    const int v = order[s.k];
    auto px = conditional_from_table(tx[s.k], s.x, v);
    auto qy = conditional_from_table(ty[s.k], s.y, v);
    if (!px || !qy) continue;  // history of zero mass
    if (*px < *qy - kProbTol)
      throw HolleyViolation("sequential_monotone_coupling: conditional of the upper measure at site " +
                            std::to_string(v) + " is below the lower one");
    const double both = *qy, upper_only = std::max(0.0, *px - *qy), none = 1.0 - std::max(*px, *qy);
    if (both > 0) stack.push_back({s.k + 1, s.x | bit(v), s.y | bit(v), s.prob * both});
    if (upper_only > 0) stack.push_back({s.k + 1, s.x | bit(v), s.y, s.prob * upper_only});
    if (none > 0) stack.push_back({s.k + 1, s.x, s.y, s.prob * none});
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  return out;
}

std::pair<Bits, Bits> joint_glauber_step(Bits x, Bits y, int site, double u, const ConditionalFn& p_x,
                                         const ConditionalFn& q_y) {
  if ((y & ~x) != 0) throw ArgumentError("joint_glauber_step: requires x >= y");
  const double px = p_x(site, x), qy = q_y(site, y);
  if (px < qy - kProbTol)
    throw HolleyViolation("joint_glauber_step: upper conditional below lower conditional at site " +
                          std::to_string(site));
  const Bits m = bit(site);
  if (u <= qy) return {x | m, y | m};
  if (u <= px) return {x | m, y & ~m};
  return {x & ~m, y & ~m};
}

namespace {

// Union-find over at most 64 sites.
struct Clusters {
  std::array<int, 64> parent{};
  explicit Clusters(int n) { std::iota(parent.begin(), parent.begin() + n, 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

bool is_decoupled_by_ones(const Graph& g, const SiteMeasure& mu, bool connected_ones) {
  require_cap(mu, DominationLimits::kDecoupleCap, "is_decoupled_by_ones");
  const int n = mu.size();
  const Bits full = mu.full();
  std::vector<Bits> nbr(n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && g.adjacent(mu.sites()[i], mu.sites()[j])) nbr[i] |= bit(j);
  auto boundary_of = [&](Bits a) {
    Bits out = 0;
    for (int i = 0; i < n; ++i)
      if (a >> i & 1) out |= nbr[i];
    return out & ~a;
  };
  auto ones_connected = [&](Bits x, Bits outside, Bits targets) {
    if (std::popcount(targets) <= 1) return true;
    Clusters c(n);
    Bits live = x & outside;
    for (int i = 0; i < n; ++i)
      if (live >> i & 1)
        for (int j = i + 1; j < n; ++j)
          if ((live >> j & 1) && (nbr[i] >> j & 1)) c.unite(i, j);
    int root = -1;
    for (int i = 0; i < n; ++i) {
      if (!(targets >> i & 1)) continue;
      if (root < 0) root = c.find(i);
      else if (c.find(i) != root) return false;
    }
    return true;
  };
  for (Bits a = 1; a < full; ++a) {
    const Bits bd = boundary_of(a);
    const Bits out = full & ~a;
    // Conditional law of the A-coordinates for every admissible outside pattern.
    std::vector<double> reference;
    for (Bits o = out;; o = (o - 1) & out) {
      bool admissible = (o & bd) == bd && (!connected_ones || ones_connected(o, out, bd));
      if (admissible) {
        std::vector<double> cond;
        double total = kNegInf;
        for (Bits in = a;; in = (in - 1) & a) {
          total = log_add(total, mu.log_prob(o | in));
          if (in == 0) break;
        }
        if (total != kNegInf) {
          for (Bits in = a;; in = (in - 1) & a) {
            double l = mu.log_prob(o | in);
            cond.push_back(l == kNegInf ? 0.0 : std::exp(l - total));
            if (in == 0) break;
          }
          if (reference.empty()) {
            reference = std::move(cond);
          } else {
            for (std::size_t k = 0; k < cond.size(); ++k)
              if (std::abs(cond[k] - reference[k]) > kProbTol) return false;
          }
        }
      }
      if (o == 0) break;
    }
  }
  return true;
}

}  // namespace domcode
