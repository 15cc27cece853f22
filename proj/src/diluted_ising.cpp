#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>

#include "domcode/errors.hpp"
#include "domcode/shearer.hpp"

namespace domcode {

namespace {

struct VolumeIndex {
  const VertexSet& volume;
  std::vector<int> local;

  VolumeIndex(const Graph& g, const VertexSet& vol) : volume(vol), local(static_cast<std::size_t>(g.size()), -1) {
    for (std::size_t i = 0; i < vol.size(); ++i) local[vol[i]] = static_cast<int>(i);
  }

  Bits mask(const VertexSet& s) const {
    Bits m = 0;
    for (int v : s) m |= bit(local[v]);
    return m;
  }

  VertexSet vertices(Bits m) const {
    VertexSet out;
    for (Bits t = m; t; t &= t - 1) out.push_back(volume[std::countr_zero(t)]);
    return out;
  }
};

// Connected components of the vertex set `m` (a volume mask), as masks.
std::vector<Bits> components(const Graph& g, const VolumeIndex& idx, Bits m) {
  std::vector<Bits> out;
  Bits left = m;
  while (left) {
    Bits comp = left & (~left + 1);
    Bits frontier = comp;
    while (frontier) {
      int i = std::countr_zero(frontier);
      frontier &= frontier - 1;
      for (int w : g.neighbors(idx.volume[i])) {
        int j = idx.local[w];
        if (j >= 0 && (left >> j & 1) && !(comp >> j & 1)) {
          comp |= bit(j);
          frontier |= bit(j);
        }
      }
    }
    out.push_back(comp);
    left &= ~comp;
  }
  return out;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw ArgumentError(std::string("dilution: ") + what + " must be finite");
}

}  // namespace

DilutionSystem build_dilution_system(const Graph& g, const VertexSet& volume, double beta1, double beta2,
                                     double b1, double b2, double h, int precision_bits) {
  require_finite(beta1, "beta1");
  require_finite(beta2, "beta2");
  require_finite(b1, "b1");
  require_finite(b2, "b2");
  require_finite(h, "h");
  if (!(beta1 > beta2) || beta2 < 0.0) throw ArgumentError("dilution: requires beta1 > beta2 >= 0");
  if (!(h > 0.0)) throw ArgumentError("dilution: h must be positive");
  if (volume.empty() || static_cast<int>(volume.size()) > ShearerLimits::kDilutedVolumeCap)
    throw SizeError("dilution: volume size must lie in [1, " + std::to_string(ShearerLimits::kDilutedVolumeCap) + "]");
  for (int v : volume)
    if (v < 0 || v >= g.size() || g.is_boundary(v)) throw ArgumentError("dilution: volume vertex invalid or on boundary");

  const double eps = beta1 - beta2;
  auto dep = DependencyGraph::of_connected_subsets(g, volume, static_cast<int>(volume.size()));
  std::vector<double> log_alpha, log_r;
  for (const auto& s : dep.elements()) {
    const double boundary = static_cast<double>(edge_boundary_size(g, s));
    const double size = static_cast<double>(s.size());
    const double gap = boundary - h * size;
    if (!(gap > 0.0))
      throw RegimeError("dilution: h is not strictly below |d_e S|/|S| for some connected S; alpha_S vanishes");
    double la = -2.0 * beta1 * boundary - 2.0 * b1 * size + std::log(std::expm1(2.0 * eps * gap));
    if (la >= 0.0) throw RegimeError("dilution: alpha_S >= 1; field b1 is below -beta1 h");
    log_alpha.push_back(la);
    log_r.push_back(la + 2.0 * eps * h * size + 2.0 * (b1 - b2) * size);
  }

  DilutionChecks checks;
  checks.alpha_below_r_product = std::all_of(log_r.begin(), log_r.end(), [](double l) { return l < 0.0; }) &&
                                 check_sufficient_log(dep, log_alpha, log_r);
  checks.r_sum_target_value = 0.01 * eps * h / (g.max_degree() + 1);
  for (int u : volume) {
    double sum = 0.0;
    for (int x = 0; x < dep.size(); ++x) {
      const auto& s = dep.elements()[x];
      if (std::binary_search(s.begin(), s.end(), u)) sum += std::exp(log_r[x]);
    }
    checks.worst_r_sum = std::max(checks.worst_r_sum, sum);
  }
  checks.r_sum_target = checks.worst_r_sum <= checks.r_sum_target_value;

  DilutionSystem sys;
  sys.shearer = shearer_measure_log(dep, std::move(log_alpha), std::move(log_r), precision_bits);
  sys.volume = volume;
  sys.beta1 = beta1;
  sys.beta2 = beta2;
  sys.b1 = b1;
  sys.b2 = b2;
  sys.h = h;
  sys.checks = checks;
  return sys;
}

DilutedIsingRoutes diluted_ising_routes(const Graph& g, const DilutionSystem& sys) {
  const VolumeIndex idx(g, sys.volume);
  const auto& shearer = sys.shearer;
  const auto& dep = shearer.dep();
  const int n = static_cast<int>(sys.volume.size());
  const Bits full = bit(n) - 1;
  const double eps = sys.beta1 - sys.beta2;

  std::unordered_map<Bits, int> element_of;
  for (int x = 0; x < dep.size(); ++x) element_of[idx.mask(dep.elements()[x])] = x;

  const auto xlaw = ising_measure(g, uniform_ising(g, sys.beta1, sys.b1, sys.volume));

  // log P(Y contains every element of t), summed from the table.
  std::unordered_map<ElementSet, double> superset_cache;
  auto log_superset = [&](ElementSet t) {
    if (auto it = superset_cache.find(t); it != superset_cache.end()) return it->second;
    std::vector<double> terms;
    for (const auto& e : shearer.table())
      if ((e.set & t) == t) terms.push_back(e.log_prob);
    double v = log_sum(terms);
    superset_cache.emplace(t, v);
    return v;
  };

  DilutedIsingRoutes out;
  out.convolution.assign(std::size_t{1} << n, kNegInf);
  out.closed_form.assign(std::size_t{1} << n, kNegInf);
  for (Bits plus = 0; plus <= full; ++plus) {
    const Bits minus = full & ~plus;
    const auto comps = components(g, idx, minus);
    std::vector<int> elem(comps.size());
    ElementSet t_sigma = 0;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      auto it = element_of.find(comps[k]);
      if (it == element_of.end()) throw ConsistencyError("dilution: minus cluster missing from the dependency graph");
      elem[k] = it->second;
      t_sigma |= ElementSet{1} << it->second;
    }
    const double log_y = shearer.log_prob(t_sigma);

    // Sum over which clusters of sigma came from the dilution.
    std::vector<double> terms;
    const std::size_t subsets = std::size_t{1} << comps.size();
    for (std::size_t j = 0; j < subsets; ++j) {
      Bits from_y = 0;
      ElementSet rest = 0;
      for (std::size_t k = 0; k < comps.size(); ++k) {
        if (j >> k & 1) from_y |= comps[k];
        else rest |= ElementSet{1} << elem[k];
      }
      const double ls = log_superset(rest);
      if (log_y == kNegInf || ls == kNegInf) continue;
      terms.push_back(xlaw.log_prob(plus | from_y) + log_y - ls);
    }
    out.convolution[plus] = log_sum(terms);

    if (log_y != kNegInf) {
      const double boundary = static_cast<double>(edge_boundary_size(g, idx.vertices(minus)));
      out.closed_form[plus] = xlaw.log_prob(plus) + log_y - shearer.log_alpha_product(t_sigma) +
                              2.0 * eps * boundary - 2.0 * eps * sys.h * std::popcount(minus);
    }

    const double a = out.convolution[plus], b = out.closed_form[plus];
    double diff = 0.0;
    if (a == kNegInf && b == kNegInf) diff = 0.0;
    else if (a == kNegInf || b == kNegInf) diff = std::numeric_limits<double>::infinity();
    else diff = std::abs(a - b);
    out.max_log_disagreement = std::max(out.max_log_disagreement, diff);
  }
  out.total_mass = std::exp(log_sum(out.convolution));
  return out;
}

SiteMeasure diluted_ising_law(const Graph& g, const DilutionSystem& sys) {
  auto routes = diluted_ising_routes(g, sys);
  if (!(routes.max_log_disagreement <= 1e-9))
    throw ConsistencyError("diluted_ising_law: routes disagree by " + std::to_string(routes.max_log_disagreement));
  return SiteMeasure(sys.volume, std::move(routes.convolution));
}

HolleyRatioReport verify_holley_ratio(const Graph& g, const SiteMeasure& zlaw, const IsingParams& params2) {
  if (zlaw.sites() != params2.volume) throw ArgumentError("verify_holley_ratio: law and params disagree on sites");
  HolleyRatioReport rep;
  const int n = zlaw.size();
  for (int i = 0; i < n; ++i) {
    const int v = params2.volume[i];
    const double b = params2.field_at(v);
    for (Bits x = 0; x <= zlaw.full(); ++x) {
      if (x >> i & 1) continue;
      const double lm = zlaw.log_prob(x), lp = zlaw.log_prob(x | bit(i));
      if (lm == kNegInf && lp == kNegInf) continue;
      ++rep.checked;
      const double required = 2.0 * params2.beta * local_field_sum(g, params2, x, v) + 2.0 * b;
      const double margin = (lp == kNegInf) ? -std::numeric_limits<double>::infinity()
                            : (lm == kNegInf) ? std::numeric_limits<double>::infinity()
                                              : lp - lm - required;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < -1e-9) ++rep.failures;
    }
  }
  rep.ok = rep.failures == 0;
  return rep;
}

}  // namespace domcode
