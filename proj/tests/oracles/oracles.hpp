#pragma once

// Brute-force reference computations. Everything here is written directly from the
// definitions and shares no code with the library beyond its plain data types.

#include <cstdint>
#include <vector>

#include "domcode/cftp.hpp"
#include "domcode/graph.hpp"
#include "domcode/stream.hpp"

namespace domcode::oracle {

// Probabilities indexed by configuration bits (bit i = value at site i).
using Law = std::vector<double>;

// Plus-boundary Ising law on `volume` by summing the energy edge by edge.
Law ising_law(const Graph& g, const VertexSet& volume, double beta, double field);

// Minimum over sites and conditioning configurations of positive mass.
double min_conditional(const Law& law, int n);

// Domination checked against every up-set of {0,1}^n (n <= 5).
bool dominates_by_upsets(const Law& upper, const Law& lower, int n, double tol = 1e-12);
double p_of_by_upsets(const Law& law, int n, double tol = 1e-13);

Law bernoulli_law(int n, double p);
// Law of X given XY = z, with Y i.i.d. of density q, from the joint of (X, Y).
Law posterior_given_product(const Law& law, int n, double q, std::uint64_t z);
// Law of XY.
Law product_law(const Law& law, int n, double q);

// Signed sum over independent supersets: sum_{T >= S} (-1)^{|T - S|} prod_{x in T} alpha_x.
// adj[x] is the neighbour mask of element x.
double shearer_inclusion_exclusion(const std::vector<std::uint64_t>& adj, const std::vector<double>& alpha,
                                   std::uint64_t s);
// Same for every s at once, by the superset Moebius transform.
std::vector<double> shearer_table(const std::vector<std::uint64_t>& adj, const std::vector<double>& alpha);
bool is_independent(const std::vector<std::uint64_t>& adj, std::uint64_t s);

// Law of the cutset values given the percolation values off the cutset and the
// observed product z = (boundary cluster indicator) * Y, over the full joint of (omega_cut, Y).
std::vector<double> cutset_posterior(const Graph& g, const VertexSet& cut, const std::vector<std::uint8_t>& z,
                                     const std::vector<std::uint8_t>& omega_rest, double p, double q);

// Exact bounding-chain update: 1 if u is at most every conditional over the
// completions of the stars, 0 if u exceeds all of them, else star. `y` is over sites.
Tri exact_bounding_update(const Law& z_law, int n, const std::vector<Tri>& y, int site, double u);

// Disease chain run forward over steps n..1 on the radius-r ball, stars elsewhere.
Tri disease_forward(const Graph& g, const UpdateStream& stream, double p, int v, int r, int n);

}  // namespace domcode::oracle
