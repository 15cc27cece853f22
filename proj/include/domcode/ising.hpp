#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "domcode/graph.hpp"
#include "domcode/measure.hpp"
#include "domcode/report.hpp"

namespace domcode {

// Ising model on a finite volume with every spin outside the volume frozen to +1.
// Spins are stored as bits: 0 is -1 and 1 is +1.
struct IsingParams {
  double beta = 0.0;
  // Per graph vertex; empty means zero field. Infinite values pin the spin.
  std::vector<double> field;
  VertexSet volume;

  double field_at(int v) const { return field.empty() ? 0.0 : field[v]; }
};

inline constexpr int kIsingCap = 22;

// Uniform field b on the given volume (default: all non-boundary vertices).
IsingParams uniform_ising(const Graph& g, double beta, double b, VertexSet volume = {});

SiteMeasure ising_measure(const Graph& g, const IsingParams& params);

// P(spin at vertex v is + | the other spins of `config`); config is over the volume.
double glauber_conditional(const Graph& g, const IsingParams& params, Bits config, int v);
// Spin sum over the neighbors of v, counting frozen spins outside the volume as +1.
int local_field_sum(const Graph& g, const IsingParams& params, Bits config, int v);

Bits glauber_sample(const Graph& g, const IsingParams& params, int sweeps, std::uint64_t seed);

double alpha(const Graph& g, const IsingParams& params);

// Plus-spin probability at an infinite-graph volume as a function of the field;
// used for the sup over b' in the lower bound.
using AlphaFn = std::function<double(double b)>;

struct IsingBoundInputs {
  int delta = 3;
  double h_e = 1.0;
  double beta = 0.0;
  double b = 0.0;
  int n_max = 10;
};

// Rows: lower_sup, lower_bprime, upper_energy, upper_constant_spin, upper,
// closed_form_lower, alpha_peierls_lower, peierls_tail_<n>.
BoundReport ising_bounds(const IsingBoundInputs& in, const AlphaFn& alpha_at);
// Constant alpha for the upper bounds; the lower bound then uses the Peierls lower
// bound on alpha at each b'.
BoundReport ising_bounds(const IsingBoundInputs& in, double alpha_val);

// The b' values scanned by the lower bound.
std::vector<double> bprime_grid(const IsingBoundInputs& in);
double alpha_peierls_lower(int delta, double h_e, double beta, double b);

struct OrderConditions {
  bool temperatures = false;  // beta1 > beta2 >= 100 delta / h_e
  bool field_gap = false;     // b2 - b1 <= 0.99 (beta1 - beta2) h_e
  bool field_floor = false;   // b2 >= -beta2 h_e + log(delta) / 2 + 1
  bool all() const { return temperatures && field_gap && field_floor; }
};

OrderConditions order_conditions(int delta, double h_e, double beta1, double beta2, double b1, double b2);

}  // namespace domcode
