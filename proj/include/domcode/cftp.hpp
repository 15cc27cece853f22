#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "domcode/graph.hpp"
#include "domcode/measure.hpp"
#include "domcode/percolation.hpp"
#include "domcode/stream.hpp"

namespace domcode {

enum class Tri : std::uint8_t { Zero = 0, One = 1, Star = 2 };

// One value per graph vertex. Vertices that are not process sites hold One.
using TriConfig = std::vector<Tri>;

char tri_char(Tri t);
// a is at least as specified as b: b is a star or they agree.
inline bool refines(Tri a, Tri b) { return b == Tri::Star || a == b; }
bool refines(const TriConfig& a, const TriConfig& b);
// Total order 1 <= 0 <= *.
inline int disease_rank(Tri t) { return t == Tri::One ? 0 : t == Tri::Zero ? 1 : 2; }

// State of a vertex as seen by an update; nullopt when it is not known yet.
using TriView = std::function<std::optional<Tri>(int)>;

struct OracleAnswer {
  enum class Kind { Resolved, Blocked, Missing };
  Kind kind = Kind::Blocked;
  double q = 0.0;

  static OracleAnswer resolved(double q) { return {Kind::Resolved, q}; }
  static OracleAnswer blocked() { return {Kind::Blocked, 0.0}; }
  static OracleAnswer missing() { return {Kind::Missing, 0.0}; }
};

// Conditional probability that a process site takes value 1, available only when
// the site is cut off from every star by ones.
class SiteOracle {
 public:
  SiteOracle(const Graph& g, VertexSet sites);
  virtual ~SiteOracle() = default;

  const Graph& graph() const { return *g_; }
  const VertexSet& sites() const { return sites_; }
  bool is_site(int v) const { return site_flag_[v] != 0; }
  // Lower bound on every conditional the oracle can return.
  virtual double floor() const = 0;
  virtual OracleAnswer query(int v, const TriView& view) const = 0;

 protected:
  const Graph* g_;
  VertexSet sites_;
  std::vector<char> site_flag_;
};

class BernoulliOracle final : public SiteOracle {
 public:
  BernoulliOracle(const Graph& g, VertexSet sites, double p);
  double floor() const override { return p_; }
  OracleAnswer query(int, const TriView&) const override { return OracleAnswer::resolved(p_); }

 private:
  double p_;
};

// Target: Z = X * Y on the sites, with X the plus-boundary Ising model (inverse
// temperature beta, uniform field b) and Y i.i.d. with density q.
class DilutedIsingOracle final : public SiteOracle {
 public:
  static constexpr int kClusterCap = 22;

  DilutedIsingOracle(const Graph& g, VertexSet sites, double beta, double field, double dilution);
  double floor() const override { return floor_; }
  OracleAnswer query(int v, const TriView& view) const override;

  // P(Z_v = 1 | Z = 0 on cluster minus v, Z = 1 around the cluster); cluster contains v.
  double conditional(int v, const VertexSet& cluster) const;
  // Same by exhaustive enumeration, bypassing the tree recursion.
  double conditional_enumerated(int v, const VertexSet& cluster) const;
  double beta() const { return beta_; }
  double field() const { return field_; }
  double dilution() const { return q_; }

 private:
  double compute_floor() const;

  double beta_, field_, q_;
  double tilted_;  // field on sites conditioned to Z = 0
  double floor_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<int, VertexSet>, double> cache_;
};

// The disease rule: resolved with probability p unless the site reaches a star
// through zeros. With connected_ones, a site is also cut off when some finite set
// around it is bounded by a single cluster of ones.
class DiseaseOracle final : public SiteOracle {
 public:
  DiseaseOracle(const Graph& g, double p, bool connected_ones = false);
  double floor() const override { return p_; }
  OracleAnswer query(int v, const TriView& view) const override;

 private:
  double p_;
  bool connected_ones_;
};

// Star on every process site, One elsewhere.
TriConfig all_star(const SiteOracle& oracle);

Tri psi_hat_value(const TriConfig& y, int v, double u, const SiteOracle& oracle);
TriConfig psi_hat(const TriConfig& y, int v, double u, const SiteOracle& oracle);
// Stars outside `a`, then the updates of step i on `a` in increasing time order
// (ties by vertex index).
TriConfig sweep(const TriConfig& y, const VertexSet& a, const UpdateStream& stream, int step,
                const SiteOracle& oracle);
// Steps n, n-1, ..., 1 applied to the all-star configuration.
TriConfig compose_sweeps(const SiteOracle& oracle, const UpdateStream& stream, const VertexSet& a, int n);

// Value at v of compose_sweeps(oracle, stream, a, n), computed backwards from v and
// touching only the updates it depends on.
Tri lazy_value(const SiteOracle& oracle, const UpdateStream& stream, int v, const VertexSet& a, int n);
// Sweeps restricted to the radius-r ball around v.
Tri localized_value(const SiteOracle& oracle, const UpdateStream& stream, int v, int r, int n);
// Same with graph distances from v precomputed (-1 beyond the radius of interest).
Tri localized_value(const SiteOracle& oracle, const UpdateStream& stream, int v, int r, int n,
                    std::span<const int> dist);
std::vector<int> bounded_distances(const Graph& g, int v, int r_max);

enum class CftpMode { Global, Localized };

struct CftpResult {
  VertexSet targets;
  std::vector<Tri> values;
  std::vector<int> horizon;  // smallest doubling horizon that resolved the target
  std::vector<int> radius;   // localized mode: horizon / 2; global mode: -1
  long monotonicity_violations = 0;
  long stability_violations = 0;
};

// Doubling backward horizon until every target is resolved. Throws ResolutionError
// at max_horizon and RegimeError when the oracle floor is at most 1 - 1/(3 delta - 1).
CftpResult cftp_sample(const SiteOracle& oracle, const UpdateStream& stream, CftpMode mode, int max_horizon = 1 << 12,
                       VertexSet targets = {});

// Smallest r in [0, r_max] for which the radius-r sweeps over max(1, 2r) steps
// resolve v; r_max + 1 when none does.
int coding_radius(const SiteOracle& oracle, const UpdateStream& stream, int v, int r_max);

struct TailRow {
  int r = 0;
  long trials = 0;
  long exceed = 0;
  double rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double bound = 0.0;
  bool vacuous = false;
};

// C ((3 delta - 1)(1 - p))^r with C = 3 delta / ((3 delta - 1)(1 - (3 delta - 1)(1 - p))).
double coding_constant(int delta, double p);
double coding_bound(int delta, double p, double r);

// Empirical P(R_v > r) over seeds family_seed(base_seed, k), k < trials.
std::vector<TailRow> coding_tail(const SiteOracle& oracle, int v, const std::vector<int>& r_values, long trials,
                                 std::uint64_t base_seed, int jobs = 1);

// Exact conditional law of a zero-cluster, keyed by its vertex set.
using ClusterLaw = std::function<SiteMeasure(const VertexSet&)>;

// Cluster law of X given Z = 0 on the cluster and Z = 1 around it, for the
// diluted Ising target; results are cached.
ClusterLaw diluted_ising_cluster_law(const Graph& g, double beta, double field, double dilution);

// X = 1 where z = 1; each zero-cluster of z among `sites` drawn from its cluster
// law with the uniform of its minimal vertex under the auxiliary ordering.
BinaryConfig compose_full(const Graph& g, const VertexSet& sites, const BinaryConfig& z, const ClusterLaw& law,
                          std::uint64_t aux_seed);

}  // namespace domcode
