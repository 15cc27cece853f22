#include "domcode/ising.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "domcode/errors.hpp"

namespace domcode {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const Graph& g, const IsingParams& p) {
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) throw ArgumentError("ising: beta must be finite and >= 0");
  if (!p.field.empty() && static_cast<int>(p.field.size()) != g.size())
    throw ArgumentError("ising: field vector must have one entry per vertex");
  if (!std::is_sorted(p.volume.begin(), p.volume.end()) ||
      std::adjacent_find(p.volume.begin(), p.volume.end()) != p.volume.end())
    throw ArgumentError("ising: volume must be sorted and duplicate-free");
  for (int v : p.volume) {
    if (v < 0 || v >= g.size()) throw ArgumentError("ising: volume vertex out of range");
    if (g.is_boundary(v)) throw ArgumentError("ising: volume meets the boundary set");
    if (std::isnan(p.field_at(v))) throw ArgumentError("ising: NaN field");
  }
}

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

IsingParams uniform_ising(const Graph& g, double beta, double b, VertexSet volume) {
  IsingParams p;
  p.beta = beta;
  p.field.assign(static_cast<std::size_t>(g.size()), b);
  p.volume = volume.empty() ? g.interior() : std::move(volume);
  return p;
}

SiteMeasure ising_measure(const Graph& g, const IsingParams& params) {
  validate(g, params);
  const auto& vol = params.volume;
  const int n = static_cast<int>(vol.size());
  if (n > kIsingCap) throw SizeError("ising_measure: volume of " + std::to_string(n) + " exceeds cap");
  std::vector<int> index(static_cast<std::size_t>(g.size()), -1);
  for (int i = 0; i < n; ++i) index[vol[i]] = i;

  // Sites with infinite fields are removed; their spins act as fixed neighbors.
  std::vector<int> free_sites;
  Bits pinned_plus = 0;
  for (int i = 0; i < n; ++i) {
    double b = params.field_at(vol[i]);
    if (b == kInf) pinned_plus |= bit(i);
    else if (b != -kInf) free_sites.push_back(i);
  }
  const int m = static_cast<int>(free_sites.size());
  std::vector<int> free_index(static_cast<std::size_t>(n), -1);
  for (int k = 0; k < m; ++k) free_index[free_sites[k]] = k;

  std::vector<double> h(m);
  std::vector<Bits> nbr(m, 0);
  long free_edges = 0;
  for (int k = 0; k < m; ++k) {
    const int v = vol[free_sites[k]];
    double acc = params.field_at(v);
    for (int w : g.neighbors(v)) {
      int i = index[w];
      if (i < 0) {
        acc += params.beta;  // frozen plus spin outside the volume
      } else if (free_index[i] >= 0) {
        nbr[k] |= bit(free_index[i]);
      } else {
        acc += (pinned_plus >> i & 1) ? params.beta : -params.beta;
      }
    }
    h[k] = acc;
    free_edges += std::popcount(nbr[k]);
  }
  free_edges /= 2;

  std::vector<double> logs(std::size_t{1} << n, kNegInf);
  const Bits all_free = m ? (bit(m) - 1) : 0;
  for (Bits c = 0; c <= all_free; ++c) {
    double e = 0.0;
    long disagree = 0;
    for (int k = 0; k < m; ++k) {
      bool up = c >> k & 1;
      e += up ? h[k] : -h[k];
      if (up) disagree += std::popcount(nbr[k] & ~c & all_free);
    }
    e += params.beta * static_cast<double>(free_edges - 2 * disagree);
    Bits x = pinned_plus;
    for (int k = 0; k < m; ++k)
      if (c >> k & 1) x |= bit(free_sites[k]);
    logs[x] = e;
    if (m == 0) break;
  }
  return SiteMeasure(vol, std::move(logs));
}

int local_field_sum(const Graph& g, const IsingParams& params, Bits config, int v) {
  int sum = 0;
  for (int w : g.neighbors(v)) {
    auto it = std::lower_bound(params.volume.begin(), params.volume.end(), w);
    if (it == params.volume.end() || *it != w) {
      sum += 1;
    } else {
      int i = static_cast<int>(it - params.volume.begin());
      sum += (config >> i & 1) ? 1 : -1;
    }
  }
  return sum;
}

double glauber_conditional(const Graph& g, const IsingParams& params, Bits config, int v) {
  double b = params.field_at(v);
  if (b == kInf) return 1.0;
  if (b == -kInf) return 0.0;
  return logistic(2.0 * params.beta * local_field_sum(g, params, config, v) + 2.0 * b);
}

Bits glauber_sample(const Graph& g, const IsingParams& params, int sweeps, std::uint64_t seed) {
  validate(g, params);
  if (sweeps < 0) throw ArgumentError("glauber_sample: negative sweep count");
  const int n = static_cast<int>(params.volume.size());
  if (n > 64) throw SizeError("glauber_sample: volume exceeds 64 sites");
  Bits x = n ? (n == 64 ? ~Bits{0} : bit(n) - 1) : 0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < sweeps; ++s) {
    for (int i = 0; i < n; ++i) {
      double p = glauber_conditional(g, params, x, params.volume[i]);
      if (unif(rng) < p) x |= bit(i);
      else x &= ~bit(i);
    }
  }
  return x;
}

double alpha(const Graph& g, const IsingParams& params) {
  auto mu = ising_measure(g, params);
  double best = 1.0;
  for (int i = 0; i < mu.size(); ++i) {
    double l = mu.log_marginal(bit(i), bit(i));
    best = std::min(best, l == kNegInf ? 0.0 : std::exp(l));
  }
  return best;
}

std::vector<double> bprime_grid(const IsingBoundInputs& in) {
  std::vector<double> grid;
  constexpr int kPoints = 64;
  constexpr double kSmallest = 1e-3, kLargest = 8.0;
  for (int k = 0; k < kPoints; ++k) {
    double gap = kSmallest * std::pow(kLargest / kSmallest, static_cast<double>(k) / (kPoints - 1));
    grid.push_back(in.b - gap);
  }
  double near_opt = 0.5 * in.b - 0.5 * in.beta * in.h_e + 0.25 * std::log(std::numbers::e * (in.delta - 1));
  if (near_opt <= in.b) grid.push_back(near_opt);
  return grid;
}

double alpha_peierls_lower(int delta, double h_e, double beta, double b) {
  // rho = e(delta-1) exp(-2 beta h_e - 2b); the cluster tail sums to rho/(1-rho).
  double log_rho = 1.0 + std::log(static_cast<double>(delta - 1)) - 2.0 * beta * h_e - 2.0 * b;
  if (log_rho >= std::log(0.5)) return 0.0;
  double rho = std::exp(log_rho);
  return std::max(0.0, 1.0 - rho / (1.0 - rho));
}

namespace {

BoundReport bounds_impl(const IsingBoundInputs& in, const AlphaFn& lower_alpha, double alpha_b) {
  if (!std::isfinite(in.beta) || !std::isfinite(in.b) || !std::isfinite(in.h_e) || in.delta < 1)
    throw ArgumentError("ising_bounds: parameters must be finite");
  BoundReport r;
  r.params = {{"delta", in.delta}, {"h_e", in.h_e}, {"beta", in.beta}, {"b", in.b}, {"alpha", alpha_b}};

  double best = 0.0, best_b = in.b;
  for (double bp : bprime_grid(in)) {
    double v = -std::expm1(-2.0 * (in.b - bp)) * lower_alpha(bp);
    if (v > best) {
      best = v;
      best_b = bp;
    }
  }
  r.add("lower_sup", best, best <= 0.0);
  r.add("lower_bprime", best_b);

  double upper_energy = 1.0 - std::exp(-2.0 * in.b - 2.0 * in.beta * in.h_e + std::log(alpha_b));
  r.add_clamped("upper_energy", upper_energy);

  double tanh_b = std::tanh(in.beta);
  double best_root = 0.0;
  for (int n = 1; n <= in.n_max; ++n) {
    double gap = std::pow(tanh_b, n - 1) - alpha_b;
    if (gap > 0.0) best_root = std::max(best_root, std::pow(gap, 1.0 / n));
  }
  r.add("upper_constant_spin", 1.0 - best_root, best_root <= 0.0);
  r.add("upper", std::min(r.value("upper_energy"), 1.0 - best_root));

  double closed = 1.0 - 2.0 * std::exp(0.5 * (1.0 + std::log(static_cast<double>(in.delta - 1))) -
                                       in.beta * in.h_e - in.b);
  r.add_clamped("closed_form_lower", closed);
  r.add("alpha_peierls_lower", alpha_peierls_lower(in.delta, in.h_e, in.beta, in.b));
  const double log_ratio = 1.0 + std::log(static_cast<double>(in.delta - 1)) - 2.0 * in.beta * in.h_e - 2.0 * in.b;
  for (int n = 1; n <= in.n_max; ++n) r.add("peierls_tail_" + std::to_string(n), std::exp(n * log_ratio));
  return r;
}

}  // namespace

BoundReport ising_bounds(const IsingBoundInputs& in, const AlphaFn& alpha_at) {
  return bounds_impl(in, alpha_at, alpha_at(in.b));
}

BoundReport ising_bounds(const IsingBoundInputs& in, double alpha_val) {
  if (!(alpha_val >= 0.0 && alpha_val <= 1.0)) throw ArgumentError("ising_bounds: alpha outside [0,1]");
  auto peierls = [&](double bp) { return alpha_peierls_lower(in.delta, in.h_e, in.beta, bp); };
  return bounds_impl(in, peierls, alpha_val);
}

OrderConditions order_conditions(int delta, double h_e, double beta1, double beta2, double b1, double b2) {
  OrderConditions c;
  c.temperatures = h_e > 0.0 && beta1 > beta2 && beta2 >= 100.0 * delta / h_e;
  c.field_gap = b2 - b1 <= 0.99 * (beta1 - beta2) * h_e;
  c.field_floor = b2 >= -beta2 * h_e + 0.5 * std::log(static_cast<double>(delta)) + 1.0;
  return c;
}

}  // namespace domcode
