#include "domcode/shearer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include <boost/multiprecision/mpfr.hpp>

#include "domcode/errors.hpp"

namespace domcode {

namespace mp = boost::multiprecision;

namespace {

inline int lowest(ElementSet s) { return std::countr_zero(s); }

// Restores the MPFR default precision on scope exit.
class PrecisionScope {
 public:
  explicit PrecisionScope(int bits) : saved_(mp::mpfr_float::default_precision()) {
    unsigned digits10 = static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
    mp::mpfr_float::default_precision(digits10);
  }
  ~PrecisionScope() { mp::mpfr_float::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

// Hard-core partition function by the deletion recursion on the lowest element,
// memoized on the set of still-allowed elements.
template <class Real>
class PartitionFunction {
 public:
  PartitionFunction(const DependencyGraph& dep, std::vector<Real> w) : dep_(dep), w_(std::move(w)) {}

  Real operator()(ElementSet allowed) {
    if (allowed == 0) return Real(1);
    if (auto it = memo_.find(allowed); it != memo_.end()) return it->second;
    int x = lowest(allowed);
    ElementSet without = allowed & ~(ElementSet{1} << x);
    Real value = (*this)(without) + w_[x] * (*this)(without & ~dep_.neighbors(x));
    if (memo_.size() > static_cast<std::size_t>(ShearerLimits::kIndependentSetCap) * 4)
      throw SizeError("independent-set polynomial: memo exceeds cap");
    memo_.emplace(allowed, value);
    return value;
  }

 private:
  const DependencyGraph& dep_;
  std::vector<Real> w_;
  std::unordered_map<ElementSet, Real> memo_;
};

void check_size(const DependencyGraph& dep) {
  if (dep.size() > ShearerLimits::kElementCap) throw SizeError("dependency graph exceeds element cap");
}

template <class Real>
double to_log(const Real& x) {
  using std::log;
  if (x <= 0) return kNegInf;
  return static_cast<double>(log(x));
}

template <class Real>
void build_table(const DependencyGraph& dep, const std::vector<double>& log_alpha,
                 std::vector<ShearerEntry>& table, double& log_partition) {
  using std::exp;
  std::vector<Real> w(dep.size());
  for (int x = 0; x < dep.size(); ++x)
    w[x] = log_alpha[x] == kNegInf ? Real(0) : Real(-exp(Real(log_alpha[x])));
  PartitionFunction<Real> z(dep, w);
  Real total = z(dep.all());
  if (total <= 0)
    throw RegimeError("shearer_measure: hard-core partition function at -alpha is not positive");
  log_partition = to_log(total);
  const Real tol(1e-12);
  for (ElementSet s : independent_sets(dep, dep.all())) {
    Real free = z(dep.all() & ~dep.closed_neighborhood(s));
    double la = 0.0;
    for (ElementSet t = s; t; t &= t - 1) la += log_alpha[lowest(t)];
    Real p = la == kNegInf ? Real(0) : Real(exp(Real(la)) * free);
    if (p < 0) {
      if (p < -tol) throw RegimeError("shearer_measure: negative probability (beyond the zero-free region)");
      p = 0;
    }
    double lp = (la == kNegInf) ? kNegInf : to_log(p);
    table.push_back({s, lp, to_log(free)});
  }
}

}  // namespace

DependencyGraph::DependencyGraph(int size, const std::vector<std::pair<int, int>>& edges)
    : adj_(static_cast<std::size_t>(size), 0) {
  if (size < 0) throw ArgumentError("dependency graph: negative size");
  check_size(*this);
  for (auto [x, y] : edges) {
    if (x < 0 || y < 0 || x >= size || y >= size || x == y)
      throw ArgumentError("dependency graph: bad edge");
    adj_[x] |= ElementSet{1} << y;
    adj_[y] |= ElementSet{1} << x;
  }
}

DependencyGraph DependencyGraph::of_connected_subsets(const Graph& g, const VertexSet& volume, int max_size) {
  auto subsets = connected_subsets(g, volume, max_size);
  if (static_cast<int>(subsets.size()) > ShearerLimits::kElementCap)
    throw SizeError("dependency graph: " + std::to_string(subsets.size()) + " connected subsets exceed cap");
  std::vector<std::vector<char>> closed(subsets.size(), std::vector<char>(static_cast<std::size_t>(g.size()), 0));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (int v : subsets[i]) {
      closed[i][v] = 1;
      for (int w : g.neighbors(v)) closed[i][w] = 1;
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < subsets.size(); ++i)
    for (std::size_t j = i + 1; j < subsets.size(); ++j)
      if (std::any_of(subsets[j].begin(), subsets[j].end(), [&](int v) { return closed[i][v] != 0; }))
        edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  DependencyGraph dep(static_cast<int>(subsets.size()), edges);
  for (std::size_t i = 0; i < subsets.size(); ++i) dep.lookup_[subsets[i]] = static_cast<int>(i);
  dep.elements_ = std::move(subsets);
  return dep;
}

bool DependencyGraph::independent(ElementSet s) const {
  for (ElementSet t = s; t; t &= t - 1)
    if (adj_[lowest(t)] & s) return false;
  return true;
}

ElementSet DependencyGraph::closed_neighborhood(ElementSet s) const {
  ElementSet out = s;
  for (ElementSet t = s; t; t &= t - 1) out |= adj_[lowest(t)];
  return out;
}

int DependencyGraph::find(const VertexSet& s) const {
  auto it = lookup_.find(s);
  return it == lookup_.end() ? -1 : it->second;
}

std::vector<ElementSet> independent_sets(const DependencyGraph& dep, ElementSet within, long cap) {
  check_size(dep);
  std::vector<ElementSet> out;
  // Branch on the lowest allowed element: leave it out, or take it and drop its neighbors.
  std::vector<std::pair<ElementSet, ElementSet>> stack{{0, within}};
  while (!stack.empty()) {
    auto [chosen, allowed] = stack.back();
    stack.pop_back();
    if (allowed == 0) {
      if (static_cast<long>(out.size()) >= cap) throw SizeError("independent sets exceed cap");
      out.push_back(chosen);
      continue;
    }
    int x = lowest(allowed);
    ElementSet bitx = ElementSet{1} << x;
    stack.push_back({chosen | bitx, allowed & ~bitx & ~dep.neighbors(x)});
    stack.push_back({chosen, allowed & ~bitx});
  }
  std::sort(out.begin(), out.end());
  return out;
}

double indep_poly(const DependencyGraph& dep, std::span<const double> w) {
  check_size(dep);
  if (static_cast<int>(w.size()) != dep.size()) throw ArgumentError("indep_poly: weight count mismatch");
  PartitionFunction<double> z(dep, std::vector<double>(w.begin(), w.end()));
  return z(dep.all());
}

double indep_poly_rooted(const DependencyGraph& dep, std::span<const double> w, ElementSet s) {
  check_size(dep);
  if (static_cast<int>(w.size()) != dep.size()) throw ArgumentError("indep_poly_rooted: weight count mismatch");
  if (!dep.independent(s)) return 0.0;
  PartitionFunction<double> z(dep, std::vector<double>(w.begin(), w.end()));
  double prod = 1.0;
  for (ElementSet t = s; t; t &= t - 1) prod *= w[lowest(t)];
  return prod * z(dep.all() & ~dep.closed_neighborhood(s));
}

double ShearerSystem::log_prob(ElementSet s) const {
  auto it = index_.find(s);
  return it == index_.end() ? kNegInf : table_[it->second].log_prob;
}

double ShearerSystem::prob(ElementSet s) const {
  double l = log_prob(s);
  return l == kNegInf ? 0.0 : std::exp(l);
}

double ShearerSystem::log_alpha_product(ElementSet s) const {
  double acc = 0.0;
  for (ElementSet t = s; t; t &= t - 1) acc += log_alpha_[lowest(t)];
  return acc;
}

ShearerSystem shearer_measure_log(const DependencyGraph& dep, std::vector<double> log_alpha,
                                  std::vector<double> log_r, int precision_bits) {
  check_size(dep);
  if (static_cast<int>(log_alpha.size()) != dep.size()) throw ArgumentError("shearer_measure: alpha count mismatch");
  if (!log_r.empty() && static_cast<int>(log_r.size()) != dep.size())
    throw ArgumentError("shearer_measure: r count mismatch");
  for (double la : log_alpha)
    if (std::isnan(la) || la >= 0.0) throw ArgumentError("shearer_measure: alpha must lie in [0, 1)");
  if (precision_bits < 0) throw ArgumentError("shearer_measure: negative precision");
  ShearerSystem sys;
  sys.dep_ = dep;
  sys.log_alpha_ = std::move(log_alpha);
  sys.log_r_ = std::move(log_r);
  sys.precision_bits_ = precision_bits;
  if (precision_bits == 0) {
    build_table<double>(sys.dep_, sys.log_alpha_, sys.table_, sys.log_partition_);
  } else {
    PrecisionScope scope(precision_bits);
    build_table<mp::mpfr_float>(sys.dep_, sys.log_alpha_, sys.table_, sys.log_partition_);
  }
  for (std::size_t i = 0; i < sys.table_.size(); ++i) sys.index_[sys.table_[i].set] = i;
  return sys;
}

ShearerSystem shearer_measure(const DependencyGraph& dep, std::span<const double> alpha,
                              std::span<const double> r, int precision_bits) {
  auto to_logs = [](std::span<const double> v) {
    std::vector<double> out;
    for (double a : v) {
      if (!(a >= 0.0 && a < 1.0)) throw ArgumentError("shearer_measure: weights must lie in [0, 1)");
      out.push_back(a > 0 ? std::log(a) : kNegInf);
    }
    return out;
  };
  return shearer_measure_log(dep, to_logs(alpha), to_logs(r), precision_bits);
}

bool check_sufficient(const DependencyGraph& dep, std::span<const double> alpha, std::span<const double> r) {
  if (static_cast<int>(alpha.size()) != dep.size() || static_cast<int>(r.size()) != dep.size())
    throw ArgumentError("check_sufficient: weight count mismatch");
  for (int x = 0; x < dep.size(); ++x) {
    if (!(r[x] >= 0.0 && r[x] < 1.0)) throw ArgumentError("check_sufficient: r must lie in [0, 1)");
    double rhs = r[x];
    for (ElementSet t = dep.neighbors(x); t; t &= t - 1) rhs *= 1.0 - r[lowest(t)];
    if (alpha[x] > rhs) return false;
  }
  return true;
}

bool check_sufficient_log(const DependencyGraph& dep, std::span<const double> log_alpha,
                          std::span<const double> log_r) {
  if (static_cast<int>(log_alpha.size()) != dep.size() || static_cast<int>(log_r.size()) != dep.size())
    throw ArgumentError("check_sufficient: weight count mismatch");
  for (int x = 0; x < dep.size(); ++x) {
    if (log_r[x] >= 0.0) return false;
    double rhs = log_r[x];
    for (ElementSet t = dep.neighbors(x); t; t &= t - 1) {
      double lr = log_r[lowest(t)];
      if (lr >= 0.0) return false;
      rhs += std::log1p(-std::exp(lr));
    }
    if (log_alpha[x] > rhs) return false;
  }
  return true;
}

RatioCheck ratio_bound_check(const ShearerSystem& sys, ElementSet s1, ElementSet s2) {
  const auto& dep = sys.dep();
  if (!dep.independent(s1) || !dep.independent(s2)) throw ArgumentError("ratio_bound_check: sets must be independent");
  ElementSet n1 = dep.closed_neighborhood(s1), n2 = dep.closed_neighborhood(s2);
  if ((n1 & ~n2) != 0) throw ArgumentError("ratio_bound_check: requires S1+ to be contained in S2+");
  if (sys.log_r().empty()) throw ArgumentError("ratio_bound_check: system has no r weights");
  double a = sys.log_prob(s1) - sys.log_alpha_product(s1);
  double b = sys.log_prob(s2) - sys.log_alpha_product(s2);
  double lhs;
  if (b == kNegInf) lhs = std::numeric_limits<double>::infinity();
  else if (a == kNegInf) lhs = 0.0;
  else lhs = std::exp(a - b);
  double log_rhs = 0.0;
  for (ElementSet t = n2 & ~n1; t; t &= t - 1) log_rhs += std::log1p(-std::exp(sys.log_r()[lowest(t)]));
  double rhs = std::exp(log_rhs);
  return {lhs, rhs, lhs >= rhs - 1e-9};
}

void write_shearer(std::ostream& out, const ShearerSystem& sys) {
  const auto& dep = sys.dep();
  out << "n " << dep.size() << '\n';
  for (int x = 0; x < dep.size(); ++x)
    for (int y = x + 1; y < dep.size(); ++y)
      if (dep.adjacent(x, y)) out << "e " << x << ' ' << y << '\n';
  for (const auto& e : sys.table()) {
    if (e.log_prob == kNegInf) continue;
    std::string bits(static_cast<std::size_t>(dep.size()), '0');
    for (int x = 0; x < dep.size(); ++x)
      if (e.set >> x & 1) bits[x] = '1';
    out << "P " << bits << ' ' << std::setprecision(17) << e.log_prob << '\n';
  }
}

}  // namespace domcode
