#include <cmath>

#include "doctest.h"
#include "domcode/domination.hpp"
#include "domcode/errors.hpp"
#include "domcode/ising.hpp"
#include "domcode/percolation.hpp"
#include "generators.hpp"
#include "oracles/oracles.hpp"

using namespace domcode;
using doctest::Approx;

namespace {

SiteMeasure two_point(double p) {
  const std::vector<double> probs{p * p, 0.0, 0.0, 1.0 - p * p};
  return SiteMeasure::from_probabilities({0, 1}, probs);
}

SiteMeasure point_mass_ones(int n) {
  auto sites = testing::iota_sites(n);
  return SiteMeasure::point_mass(sites, (Bits{1} << n) - 1);
}

// Measure leaning towards ones (slope > 0) or zeros, with multiplicative noise.
SiteMeasure leaning_measure(testing::Rng& rng, int n, double slope, double noise) {
  std::vector<double> logs(std::size_t{1} << n);
  for (Bits x = 0; x < logs.size(); ++x)
    logs[x] = slope * std::popcount(x) + testing::uniform(rng, -noise, noise);
  return SiteMeasure(testing::iota_sites(n), logs);
}

// Tilted mean of X_v for the plus Ising model on g with field `field` plus
// pinning on `pinned` and the extra field on `shifted`, by direct enumeration.
double tilted_ising_mean(const Graph& g, double beta, double field, double p, int v, const VertexSet& sites,
                         Bits pinned, Bits shifted) {
  const int n = static_cast<int>(sites.size());
  double num = 0.0, den = 0.0;
  for (Bits x = 0; x < (Bits{1} << n); ++x) {
    if ((x & pinned) != pinned) continue;
    auto spin = [&](int w) {
      for (int i = 0; i < n; ++i)
        if (sites[i] == w) return x >> i & 1 ? 1.0 : -1.0;
      return 1.0;
    };
    double energy = 0.0;
    for (auto [a, b] : g.edges())
      if (std::find(sites.begin(), sites.end(), a) != sites.end() ||
          std::find(sites.begin(), sites.end(), b) != sites.end())
        energy += beta * spin(a) * spin(b);
    for (int i = 0; i < n; ++i) {
      double h = field + ((shifted >> i & 1) && !(pinned >> i & 1) ? 0.5 * std::log1p(-p) : 0.0);
      energy += h * spin(sites[i]);
    }
    const double w = std::exp(energy);
    den += w;
    if (x >> v & 1) num += w;
  }
  return num / den;
}

}  // namespace

TEST_CASE("bernoulli_measure") {
  CHECK(bernoulli_measure(VertexSet{0}, 0.0).prob(0) == 1.0);
  CHECK(bernoulli_measure(VertexSet{0}, 1.0).prob(1) == 1.0);
  auto half = bernoulli_measure(VertexSet{0, 1}, 0.5);
  for (Bits x = 0; x < 4; ++x) CHECK(half.prob(x) == Approx(0.25));
}

TEST_CASE("p_star") {
  CHECK(p_star(bernoulli_measure(testing::iota_sites(3), 0.3)) == Approx(0.3));
  CHECK(p_star(two_point(0.4)) == 0.0);
  // The root of the radius-2 ball sees three minus children at worst.
  Graph g = tree_ball(3, 2);
  CHECK(p_star(ising_measure(g, uniform_ising(g, 1.0, 0.0))) == Approx(1.0 / (std::exp(6.0) + 1.0)).epsilon(1e-9));
}

TEST_CASE("strassen_dominates") {
  auto sites = testing::iota_sites(3);
  CHECK(strassen_dominates(bernoulli_measure(sites, 0.7), bernoulli_measure(sites, 0.5)));
  CHECK_FALSE(strassen_dominates(bernoulli_measure(sites, 0.5), bernoulli_measure(sites, 0.7)));
  auto mu = two_point(0.5);
  CHECK(strassen_dominates(mu, bernoulli_measure(mu.sites(), 0.49)));
  CHECK(strassen_dominates(mu, bernoulli_measure(mu.sites(), 0.5)));
  CHECK_FALSE(strassen_dominates(mu, bernoulli_measure(mu.sites(), 0.51)));
}

TEST_CASE("p_of") {
  CHECK(p_of(bernoulli_measure(testing::iota_sites(3), 0.35)) == Approx(0.35).epsilon(1e-5));
  CHECK(p_of(two_point(0.4)) == Approx(0.6).epsilon(1e-5));
  CHECK(p_of(point_mass_ones(3)) == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("holley_star") {
  auto sites = testing::iota_sites(2);
  CHECK(holley_star(bernoulli_measure(sites, 0.8), bernoulli_measure(sites, 0.3)));
  CHECK(holley_star(bernoulli_measure(sites, 0.4), bernoulli_measure(sites, 0.4)));
  const std::vector<double> probs{0.5, 0.0, 0.0, 0.5};
  CHECK_FALSE(holley_star(SiteMeasure::from_probabilities(sites, probs), bernoulli_measure(sites, 0.5)));
}

TEST_CASE("tilt") {
  testing::Rng rng(2);
  auto mu = testing::random_measure(rng, testing::iota_sites(3));
  CHECK(max_abs_difference(tilt(mu, 0, 0, 0.4), mu) < 1e-15);
  auto half = bernoulli_measure(VertexSet{0}, 0.5);
  CHECK(tilt(half, 0, 1, 0.5).prob(1) == Approx(1.0 / 3.0));
  CHECK(tilt(half, 1, 0, 0.2).prob(1) == Approx(1.0));
}

TEST_CASE("dilute_law") {
  auto sites = testing::iota_sites(3);
  CHECK(max_abs_difference(dilute_law(point_mass_ones(3), 0.3), bernoulli_measure(sites, 0.3)) < 1e-12);
  CHECK(max_abs_difference(dilute_law(bernoulli_measure(sites, 0.6), 0.5), bernoulli_measure(sites, 0.3)) < 1e-12);
  const std::vector<double> probs{0.5, 0.0, 0.0, 0.5};
  auto d = dilute_law(SiteMeasure::from_probabilities({0, 1}, probs), 0.5);
  CHECK(d.prob(0) == Approx(5.0 / 8));
  CHECK(d.prob(1) == Approx(1.0 / 8));
  CHECK(d.prob(2) == Approx(1.0 / 8));
  CHECK(d.prob(3) == Approx(1.0 / 8));
}

TEST_CASE("conditional_given_dilution examples") {
  auto ones = point_mass_ones(3);
  CHECK(conditional_given_dilution(ones, 0.4, 7).prob(7) == Approx(1.0));
  CHECK(conditional_given_dilution(bernoulli_measure(VertexSet{0}, 0.5), 0.5, 0).prob(1) == Approx(1.0 / 3.0));
  CHECK_THROWS_AS(conditional_given_dilution(bernoulli_measure(VertexSet{0}, 0.0), 0.5, 1), ConditioningError);
}

TEST_CASE("conditional_given_dilution is the tilt, and matches Bayes by brute force") {
  testing::Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = testing::uniform_int(rng, 1, 6);
    auto mu = testing::random_measure(rng, testing::iota_sites(n));
    const double q = testing::uniform(rng, 0.05, 0.95);
    const auto law = mu.probs();
    for (Bits z = 0; z < mu.states(); ++z) {
      auto cond = conditional_given_dilution(mu, q, z);
      CHECK(max_abs_difference(cond, tilt(mu, z, mu.full() & ~z, q)) <= 1e-12);
      auto brute = oracle::posterior_given_product(law, n, q, z);
      double worst = 0.0;
      for (Bits x = 0; x < mu.states(); ++x) worst = std::max(worst, std::abs(cond.prob(x) - brute[x]));
      CHECK(worst <= 1e-12);
    }
  }
}

TEST_CASE("p_star_given_dilution") {
  auto sites = testing::iota_sites(3);
  CHECK(p_star_given_dilution(bernoulli_measure(sites, 0.45), 0.7) == Approx(0.45));
  CHECK(p_star_given_dilution(point_mass_ones(3), 0.7) == Approx(1.0));
  CHECK_THROWS_AS(p_star_given_dilution(bernoulli_measure(sites, 0.0), 0.5), ConditioningError);
}

TEST_CASE("p_star_given_dilution on Ising matches the tilted field model") {
  constexpr double beta = 2.0, p = 0.9;
  for (int radius : {1, 2}) {
    Graph g = tree_ball(3, radius);
    VertexSet sites = g.interior();
    const int n = static_cast<int>(sites.size());
    double best = 1.0;
    for (int v = 0; v < n; ++v) {
      const Bits rest = ((Bits{1} << n) - 1) & ~bit(v);
      for (Bits a = 0; a <= rest; ++a) {
        if ((a & ~rest) != 0) continue;
        for (Bits b = 0; b <= rest; ++b)
          if ((b & ~rest) == 0) best = std::min(best, tilted_ising_mean(g, beta, 0.0, p, v, sites, a, b));
      }
    }
    auto mu = ising_measure(g, uniform_ising(g, beta, 0.0));
    CHECK(p_star_given_dilution(mu, p) == Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("strassen agrees with the up-set oracle") {
  testing::Rng rng(3);
  int positives = 0, negatives = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = testing::uniform_int(rng, 1, 4);
    auto upper = leaning_measure(rng, n, testing::uniform(rng, 0.0, 1.5), 0.6);
    auto lower = leaning_measure(rng, n, testing::uniform(rng, -1.5, 0.5), 0.6);
    const double flow = monotone_flow_value(upper, lower);
    const bool by_flow = flow >= 1.0 - 1e-9;
    const bool by_upsets = oracle::dominates_by_upsets(upper.probs(), lower.probs(), n, 1e-12);
    // Near-ties are left out: the two routes use different tolerances.
    if (std::abs(flow - 1.0) < 1e-6 && flow < 1.0 - 1e-9) continue;
    CHECK(by_flow == by_upsets);
    (by_flow ? positives : negatives)++;
  }
  CHECK(positives > 20);
  CHECK(negatives > 20);
}

TEST_CASE("strassen couplings are exact and monotone") {
  testing::Rng rng(4);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testing::uniform_int(rng, 1, 5);
    auto upper = leaning_measure(rng, n, 1.2, 0.5);
    auto lower = leaning_measure(rng, n, -1.2, 0.5);
    auto coupling = strassen_coupling(upper, lower);
    REQUIRE(coupling.has_value() == strassen_dominates(upper, lower));
    if (!coupling) continue;
    ++checked;
    auto first = coupling->first_marginal(), second = coupling->second_marginal();
    for (Bits x = 0; x < upper.states(); ++x) {
      CHECK(first[x] == Approx(upper.prob(x)).epsilon(1e-9));
      CHECK(second[x] == Approx(lower.prob(x)).epsilon(1e-9));
    }
    for (const auto& e : coupling->entries)
      if (e.prob > 1e-15) CHECK((e.x & e.y) == e.y);
    CHECK(coupling->monotone_mass() == Approx(1.0));
  }
  CHECK(checked > 50);
}

TEST_CASE("holley implies strassen") {
  testing::Rng rng(9);
  int holley = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = testing::uniform_int(rng, 1, 5);
    auto upper = leaning_measure(rng, n, testing::uniform(rng, 0.5, 3.0), 0.3);
    auto lower = leaning_measure(rng, n, testing::uniform(rng, -3.0, 0.5), 0.3);
    if (!holley_star(upper, lower)) continue;
    ++holley;
    CHECK(strassen_dominates(upper, lower));
  }
  CHECK(holley > 100);
}

TEST_CASE("p_of sits above p_star, drops under dilution and matches the up-set oracle") {
  testing::Rng rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = testing::uniform_int(rng, 1, 4);
    auto mu = leaning_measure(rng, n, testing::uniform(rng, -1.0, 2.0), 1.0);
    const double p = p_of(mu, 1e-9);
    CHECK(p >= p_star(mu) - 1e-8);
    CHECK(p_of(dilute_law(mu, testing::uniform(rng, 0.2, 0.95)), 1e-9) <= p + 1e-8);
    CHECK(p == Approx(oracle::p_of_by_upsets(mu.probs(), n)).epsilon(1e-6));
  }
}

TEST_CASE("sequential_monotone_coupling") {
  auto sites = testing::iota_sites(3);
  const std::vector<int> order{2, 0, 1};
  auto c = sequential_monotone_coupling(bernoulli_measure(sites, 0.8), bernoulli_measure(sites, 0.3), order);
  CHECK(c.monotone_mass() == Approx(1.0));

  testing::Rng rng(6);
  auto mu = testing::random_measure(rng, sites);
  auto diag = sequential_monotone_coupling(mu, mu, order);
  for (const auto& e : diag.entries)
    if (e.prob > 1e-15) CHECK(e.x == e.y);

  // Two interior sites between plus boundary ends.
  Graph p2 = grid_box(1, 4);
  auto hot = ising_measure(p2, uniform_ising(p2, 2.0, 0.0));
  auto cold = ising_measure(p2, uniform_ising(p2, 1.0, 0.0));
  auto ising = sequential_monotone_coupling(hot, cold, std::vector<int>{0, 1});
  auto first = ising.first_marginal(), second = ising.second_marginal();
  for (Bits x = 0; x < 4; ++x) {
    CHECK(first[x] == Approx(hot.prob(x)));
    CHECK(second[x] == Approx(cold.prob(x)));
  }
}

TEST_CASE("joint_glauber_step") {
  auto px = [](int, Bits) { return 0.9; };
  auto qy = [](int, Bits) { return 0.4; };
  CHECK(joint_glauber_step(0, 0, 0, 0.0, px, qy) == std::pair<Bits, Bits>{1, 1});
  CHECK(joint_glauber_step(1, 1, 0, 1.0, px, qy) == std::pair<Bits, Bits>{0, 0});
  CHECK(joint_glauber_step(0, 0, 0, 0.6, px, qy) == std::pair<Bits, Bits>{1, 0});
}

TEST_CASE("joint_glauber_step keeps each marginal transition") {
  testing::Rng rng(31);
  auto px = [](int site, Bits x) { return 0.3 + 0.1 * site + 0.2 * std::popcount(x) / 4.0; };
  auto qy = [](int site, Bits y) { return 0.1 + 0.05 * site + 0.1 * std::popcount(y) / 4.0; };
  const Bits x = 0b1011, y = 0b0010;
  constexpr int draws = 100000;
  for (int site = 0; site < 4; ++site) {
    int ones_x = 0, ones_y = 0;
    for (int k = 0; k < draws; ++k) {
      auto [nx, ny] = joint_glauber_step(x, y, site, testing::uniform(rng), px, qy);
      ones_x += nx >> site & 1;
      ones_y += ny >> site & 1;
      CHECK((nx & ~bit(site)) == (x & ~bit(site)));
    }
    for (auto [count, prob] : {std::pair{ones_x, px(site, x)}, std::pair{ones_y, qy(site, y)}}) {
      const double sd = std::sqrt(draws * prob * (1 - prob));
      CHECK(std::abs(count - draws * prob) < 5 * sd);
    }
  }
}

TEST_CASE("is_decoupled_by_ones") {
  Graph g = grid_box(2, 3);
  CHECK(is_decoupled_by_ones(g, bernoulli_measure(g, 0.4)));
  Graph t = tree_ball(3, 2);
  CHECK(is_decoupled_by_ones(t, ising_measure(t, uniform_ising(t, 0.7, 0.1))));
  auto proxy = infinite_proxy_law(g, 0.6);
  CHECK_FALSE(is_decoupled_by_ones(g, proxy));
  CHECK(is_decoupled_by_ones(g, proxy, true));
}
