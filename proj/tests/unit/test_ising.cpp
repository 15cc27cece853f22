#include <cmath>
#include <limits>

#include "doctest.h"
#include "domcode/domination.hpp"
#include "domcode/ising.hpp"
#include "generators.hpp"
#include "oracles/oracles.hpp"

using namespace domcode;
using doctest::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double magnetization_at(const SiteMeasure& mu, int site) { return std::exp(mu.log_marginal(bit(site), bit(site))); }

}  // namespace

TEST_CASE("ising_measure examples") {
  Graph g = tree_ball(3, 2);
  auto free = ising_measure(g, uniform_ising(g, 0.0, 0.0));
  CHECK(max_abs_difference(free, bernoulli_measure(g.interior(), 0.5)) < 1e-14);

  for (double beta : {0.3, 1.0}) {
    Graph star = tree_ball(3, 1);
    auto mu = ising_measure(star, uniform_ising(star, beta, 0.0));
    REQUIRE(mu.size() == 1);
    CHECK(mu.prob(1) == Approx(std::exp(6 * beta) / (std::exp(6 * beta) + 1)));
    CHECK(p_star(mu) == Approx(mu.prob(1)));
  }

  auto pinned = ising_measure(g, uniform_ising(g, 1.0, kInf));
  CHECK(pinned.prob(pinned.full()) == Approx(1.0));
}

TEST_CASE("ising_measure matches the edge-sum oracle") {
  testing::Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    Graph g = testing::random_connected_graph(rng, testing::uniform_int(rng, 2, 9), 0.25, 0.4);
    const double beta = testing::uniform(rng, 0.0, 2.0), b = testing::uniform(rng, -1.0, 1.0);
    auto mu = ising_measure(g, uniform_ising(g, beta, b));
    auto law = oracle::ising_law(g, g.interior(), beta, b);
    double worst = 0.0;
    for (Bits x = 0; x < mu.states(); ++x) worst = std::max(worst, std::abs(mu.prob(x) - law[x]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("glauber_conditional") {
  Graph g = tree_ball(3, 2);
  auto free = uniform_ising(g, 0.0, 0.0);
  CHECK(glauber_conditional(g, free, 0, 0) == Approx(0.5));
  auto p = uniform_ising(g, 1.0, 0.0);
  const Bits all = (Bits{1} << p.volume.size()) - 1;
  CHECK(glauber_conditional(g, p, all, 0) == Approx(1.0 / (1.0 + std::exp(-6.0))));
  CHECK(glauber_conditional(g, p, 0, 0) == Approx(1.0 / (1.0 + std::exp(6.0))));
}

TEST_CASE("glauber_conditional is the conditional of the measure") {
  testing::Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    Graph g = testing::random_connected_graph(rng, testing::uniform_int(rng, 2, 8), 0.3, 0.3);
    auto params = uniform_ising(g, testing::uniform(rng, 0.0, 1.5), testing::uniform(rng, -0.5, 0.5));
    auto mu = ising_measure(g, params);
    for (int i = 0; i < mu.size(); ++i)
      for (Bits x = 0; x < mu.states(); ++x) {
        auto c = site_conditional(mu, i, x & ~bit(i));
        REQUIRE(c.has_value());
        CHECK(glauber_conditional(g, params, x, mu.sites()[i]) == Approx(*c).epsilon(1e-10));
      }
  }
}

TEST_CASE("glauber_sample") {
  Graph g = grid_box(1, 5);
  auto params = uniform_ising(g, 0.8, 0.1);
  const Bits all = (Bits{1} << params.volume.size()) - 1;
  CHECK(glauber_sample(g, params, 0, 7) == all);

  Graph big = grid_box(2, 6);
  auto hot = uniform_ising(big, 0.0, 0.0);
  const int n = static_cast<int>(hot.volume.size());
  double m = 0.0;
  constexpr int runs = 2000;
  for (int s = 0; s < runs; ++s) m += 2.0 * std::popcount(glauber_sample(big, hot, 5, s)) - n;
  m /= runs;
  CHECK(std::abs(m) < 3.0 * std::sqrt(static_cast<double>(n) / runs));
}

TEST_CASE("glauber_sample reaches the exact law") {
  Graph g = grid_box(1, 5);
  auto params = uniform_ising(g, 0.7, -0.2);
  auto mu = ising_measure(g, params);
  std::vector<Bits> samples(100000);
  for (std::size_t k = 0; k < samples.size(); ++k) samples[k] = glauber_sample(g, params, 30, k);
  CHECK(total_variation(empirical_measure(mu.sites(), samples), mu) < 0.02);
}

TEST_CASE("alpha") {
  Graph g = tree_ball(3, 2);
  CHECK(alpha(g, uniform_ising(g, 1.0, kInf)) == Approx(1.0));
  CHECK(alpha(g, uniform_ising(g, 0.0, 0.0)) == Approx(0.5));
  auto law = oracle::ising_law(g, g.interior(), 1.0, 0.0);
  double best = 1.0;
  for (int i = 0; i < 4; ++i) {
    double m = 0.0;
    for (Bits x = 0; x < law.size(); ++x)
      if (x >> i & 1) m += law[x];
    best = std::min(best, m);
  }
  const double a = alpha(g, uniform_ising(g, 1.0, 0.0));
  CHECK(a == Approx(best).epsilon(1e-12));
  CHECK(a > 0.5);
}

TEST_CASE("ising_bounds examples") {
  IsingBoundInputs in{3, 1.0, 3.0, 0.0, 10};
  auto rep = ising_bounds(in, 1.0);
  CHECK(rep.value("closed_form_lower") == Approx(1.0 - 2.0 * std::sqrt(2.0 * std::exp(1.0)) * std::exp(-3.0)));
  CHECK(rep.value("closed_form_lower") == Approx(0.7678).epsilon(1e-4));

  in.beta = 0.0;
  auto cold = ising_bounds(in, 1.0);
  CHECK(cold.row("closed_form_lower").raw <= 0.0);
  CHECK(cold.value("closed_form_lower") == 0.0);
  CHECK(cold.row("closed_form_lower").vacuous);

  in.beta = 1.0;
  CHECK(ising_bounds(in, 1.0).value("upper_energy") == Approx(1.0 - std::exp(-2.0)));
}

TEST_CASE("ising_bounds probabilities stay in the unit interval") {
  testing::Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    IsingBoundInputs in{testing::uniform_int(rng, 3, 6), testing::uniform(rng, 0.2, 2.0),
                        testing::uniform(rng, 0.0, 3.0), testing::uniform(rng, -1.0, 1.0), 10};
    auto rep = ising_bounds(in, alpha_peierls_lower(in.delta, in.h_e, in.beta, in.b));
    for (const char* name : {"lower_sup", "upper_energy", "upper_constant_spin", "upper",
                             "closed_form_lower", "alpha_peierls_lower"}) {
      CHECK(rep.value(name) >= 0.0);
      CHECK(rep.value(name) <= 1.0);
    }
    CHECK(rep.value("upper") <= rep.value("upper_energy"));
  }
}

TEST_CASE("order_conditions") {
  CHECK(order_conditions(3, 1.0, 301, 300, 0, 0).all());
  CHECK_FALSE(order_conditions(3, 1.0, 301, 299, 0, 0).temperatures);
  auto gap = order_conditions(3, 1.0, 301, 300, 0, 1.0);
  CHECK_FALSE(gap.field_gap);
  CHECK(gap.temperatures);
}

TEST_CASE("magnetization is nondecreasing in beta") {
  for (const char* spec : {"tree:3:2", "tree:3:3", "grid:2:4", "grid:2:5"}) {
    Graph g = graph_from_spec(spec);
    std::vector<double> prev;
    for (double beta = 0.0; beta <= 2.0; beta += 0.125) {
      auto mu = ising_measure(g, uniform_ising(g, beta, 0.0));
      std::vector<double> cur;
      for (int i = 0; i < mu.size(); ++i) cur.push_back(magnetization_at(mu, i));
      for (std::size_t i = 0; i < prev.size(); ++i) CHECK(cur[i] >= prev[i] - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("constant-spin floor on connected sets") {
  testing::Rng rng(44);
  for (int trial = 0; trial < 25; ++trial) {
    Graph g = testing::random_connected_graph(rng, testing::uniform_int(rng, 3, 10), 0.2, 0.3);
    const double beta = testing::uniform(rng, 0.1, 2.0);
    auto mu = ising_measure(g, uniform_ising(g, beta, testing::uniform(rng, -0.5, 0.5)));
    for (const auto& s : connected_subsets(g, mu.sites(), mu.size())) {
      const Bits mask = mu.mask_of(s);
      const double constant = std::exp(mu.log_marginal(mask, mask)) + std::exp(mu.log_marginal(mask, 0));
      CHECK(constant >= std::pow(std::tanh(beta), static_cast<double>(s.size()) - 1) - 1e-12);
    }
  }
}

TEST_CASE("ising_measure is nondecreasing in the field") {
  testing::Rng rng(45);
  for (int trial = 0; trial < 30; ++trial) {
    Graph g = testing::random_connected_graph(rng, testing::uniform_int(rng, 2, 8), 0.3, 0.3);
    const double beta = testing::uniform(rng, 0.0, 1.5), b = testing::uniform(rng, -1.0, 1.0);
    auto low = ising_measure(g, uniform_ising(g, beta, b));
    auto high = ising_measure(g, uniform_ising(g, beta, b + testing::uniform(rng, 0.05, 1.0)));
    CHECK(strassen_dominates(high, low));
  }
}
