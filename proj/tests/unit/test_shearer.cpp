#include <cmath>

#include "doctest.h"
#include "domcode/domination.hpp"
#include "domcode/errors.hpp"
#include "domcode/ising.hpp"
#include "domcode/shearer.hpp"
#include "generators.hpp"
#include "oracles/oracles.hpp"

using namespace domcode;
using doctest::Approx;

namespace {

DependencyGraph complete_dep(int m) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) edges.emplace_back(a, b);
  return DependencyGraph(m, edges);
}

struct RandomSystem {
  DependencyGraph dep;
  std::vector<std::uint64_t> adj;
  std::vector<double> alpha, r;
};

// Random dependency graph with weights alpha <= r prod (1 - r) over neighbors.
RandomSystem random_system(testing::Rng& rng, int m) {
  RandomSystem s;
  std::vector<std::pair<int, int>> edges;
  s.adj.assign(static_cast<std::size_t>(m), 0);
  const double density = testing::uniform(rng, 0.2, 0.7);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      if (testing::uniform(rng) < density) {
        edges.emplace_back(a, b);
        s.adj[a] |= std::uint64_t{1} << b;
        s.adj[b] |= std::uint64_t{1} << a;
      }
  s.dep = DependencyGraph(m, edges);
  s.r.resize(static_cast<std::size_t>(m));
  for (auto& x : s.r) x = testing::uniform(rng, 0.01, 0.3);
  for (int x = 0; x < m; ++x) {
    double bound = s.r[x];
    for (int y = 0; y < m; ++y)
      if (s.adj[x] >> y & 1) bound *= 1.0 - s.r[y];
    s.alpha.push_back(bound * testing::uniform(rng, 0.1, 1.0));
  }
  return s;
}

}  // namespace

TEST_CASE("indep_poly") {
  const std::vector<double> w3(1, -0.3);
  CHECK(indep_poly(complete_dep(1), w3) == Approx(0.7));
  const std::vector<double> w33(2, -0.3);
  CHECK(indep_poly(complete_dep(2), w33) == Approx(0.4));
  const std::vector<double> w2(3, -0.2);
  CHECK(indep_poly(complete_dep(3), w2) == Approx(0.4));
}

TEST_CASE("indep_poly_rooted") {
  auto k2 = complete_dep(2);
  const std::vector<double> w(2, -0.3);
  CHECK(indep_poly_rooted(k2, w, 0) == Approx(indep_poly(k2, w)));
  CHECK(indep_poly_rooted(k2, w, 1) == Approx(-0.3));
  CHECK(indep_poly_rooted(k2, w, 3) == 0.0);
}

TEST_CASE("shearer_measure examples") {
  const std::vector<double> a1{0.3};
  auto one = shearer_measure(complete_dep(1), a1);
  CHECK(one.prob(0) == Approx(0.7));
  CHECK(one.prob(1) == Approx(0.3));

  const std::vector<double> a2{0.3, 0.3};
  auto two = shearer_measure(complete_dep(2), a2);
  CHECK(two.prob(0) == Approx(0.4));
  CHECK(two.prob(1) == Approx(0.3));
  CHECK(two.prob(2) == Approx(0.3));
  CHECK(two.prob(3) == 0.0);

  const std::vector<double> big{0.6, 0.6};
  CHECK_THROWS_AS(shearer_measure(complete_dep(2), big), RegimeError);
}

TEST_CASE("check_sufficient") {
  const std::vector<double> a{0.3}, r{0.3};
  CHECK(check_sufficient(complete_dep(1), a, r));
  const std::vector<double> a3{0.3, 0.3}, r5{0.5, 0.5}, a2{0.2, 0.2};
  CHECK_FALSE(check_sufficient(complete_dep(2), a3, r5));
  CHECK(check_sufficient(complete_dep(2), a2, r5));
}

TEST_CASE("ratio_bound_check examples") {
  const std::vector<double> a{0.2, 0.2}, r{0.5, 0.5};
  auto sys = shearer_measure(complete_dep(2), a, r);
  auto same = ratio_bound_check(sys, 1, 1);
  CHECK(same.lhs == Approx(1.0));
  CHECK(same.rhs == Approx(1.0));
  CHECK(same.ok);
  auto chk = ratio_bound_check(sys, 0, 1);
  CHECK(chk.lhs == Approx(sys.prob(0) / (sys.prob(1) / 0.2)));
  CHECK(chk.ok);
}

TEST_CASE("shearer tables match inclusion-exclusion and both routes agree") {
  testing::Rng rng(61);
  for (int trial = 0; trial < 150; ++trial) {
    const int m = testing::uniform_int(rng, 1, 11);
    auto s = random_system(rng, m);
    auto sys = shearer_measure(s.dep, s.alpha, s.r);
    auto table = oracle::shearer_table(s.adj, s.alpha);
    std::vector<double> neg(s.alpha.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -s.alpha[i];
    double total = 0.0;
    for (std::uint64_t set = 0; set < table.size(); ++set) {
      CHECK(std::abs(sys.prob(set) - table[set]) <= 1e-12);
      CHECK(sys.prob(set) >= 0.0);
      if (set < 64) {
        const double single = oracle::shearer_inclusion_exclusion(s.adj, s.alpha, set);
        CHECK(std::abs(single - table[set]) <= 1e-12);
      }
      if (oracle::is_independent(s.adj, set)) {
        const double sign = std::popcount(set) % 2 ? -1.0 : 1.0;
        CHECK(std::abs(sign * indep_poly_rooted(s.dep, neg, set) - table[set]) <= 1e-12);
      }
      total += sys.prob(set);
    }
    CHECK(total == Approx(1.0));
  }
}

TEST_CASE("sums over supersets give the alpha products") {
  testing::Rng rng(62);
  for (int trial = 0; trial < 60; ++trial) {
    auto s = random_system(rng, testing::uniform_int(rng, 1, 9));
    auto sys = shearer_measure(s.dep, s.alpha, s.r);
    for (auto set : independent_sets(s.dep, s.dep.all())) {
      double sum = 0.0;
      for (const auto& e : sys.table())
        if ((e.set & set) == set) sum += sys.prob(e.set);
      double product = 1.0;
      for (int x = 0; x < s.dep.size(); ++x)
        if (set >> x & 1) product *= s.alpha[x];
      CHECK(sum == Approx(product).epsilon(1e-10));
    }
  }
}

TEST_CASE("sufficient systems pass every admissible ratio pair") {
  testing::Rng rng(63);
  long pairs = 0;
  for (int trial = 0; trial < 80; ++trial) {
    auto s = random_system(rng, testing::uniform_int(rng, 1, 8));
    REQUIRE(check_sufficient(s.dep, s.alpha, s.r));
    auto sys = shearer_measure(s.dep, s.alpha, s.r);
    auto sets = independent_sets(s.dep, s.dep.all());
    for (auto a : sets)
      for (auto b : sets) {
        if ((s.dep.closed_neighborhood(a) & ~s.dep.closed_neighborhood(b)) != 0) continue;
        ++pairs;
        CHECK(ratio_bound_check(sys, a, b).ok);
      }
  }
  CHECK(pairs > 1000);
}

TEST_CASE("extended precision agrees with double") {
  testing::Rng rng(64);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_system(rng, testing::uniform_int(rng, 2, 9));
    auto plain = shearer_measure(s.dep, s.alpha, s.r);
    auto wide = shearer_measure(s.dep, s.alpha, s.r, 256);
    CHECK(wide.precision_bits() == 256);
    for (const auto& e : plain.table()) CHECK(wide.prob(e.set) == Approx(plain.prob(e.set)).epsilon(1e-12));
  }
}

TEST_CASE("build_dilution_system") {
  Graph g = tree_ball(3, 2);
  constexpr double beta1 = 1.0, beta2 = 0.9, h = 1.0;
  auto single = build_dilution_system(g, {0}, beta1, beta2, 0.0, 0.0, h);
  REQUIRE(single.shearer.dep().size() == 1);
  const double eps = beta1 - beta2;
  CHECK(std::exp(single.shearer.log_alpha()[0]) ==
        Approx(std::exp(-2.0 * beta1 * 3) * (std::exp(2.0 * eps * 3 - 2.0 * eps * h) - 1.0)));

  auto pair = build_dilution_system(g, {0, 1}, beta1, beta2, 0.0, 0.0, h);
  const auto& dep = pair.shearer.dep();
  REQUIRE(dep.size() == 3);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) CHECK(dep.adjacent(a, b));

  auto cold = build_dilution_system(g, {0, 1}, beta1, beta1 - 1e-12, 0.0, 0.0, h);
  CHECK(cold.shearer.prob(0) == Approx(1.0));
  for (double la : cold.shearer.log_alpha()) CHECK(std::exp(la) < 1e-10);

  CHECK_THROWS_AS(build_dilution_system(g, {0}, 1.0, 2.0, 0.0, 0.0, h), ArgumentError);
}

TEST_CASE("diluted_ising_law") {
  Graph g = tree_ball(3, 3);
  const VertexSet vol{0, 1};
  auto mu1 = ising_measure(g, uniform_ising(g, 1.0, 0.0, vol));

  auto nearly = build_dilution_system(g, vol, 1.0, 1.0 - 1e-12, 0.0, 0.0, 1.0);
  CHECK(max_abs_difference(diluted_ising_law(g, nearly), mu1) < 1e-9);

  auto sys = build_dilution_system(g, vol, 2.0, 1.5, 0.0, -0.5, 1.0);
  auto z = diluted_ising_law(g, sys);
  auto mu = ising_measure(g, uniform_ising(g, 2.0, 0.0, vol));
  CHECK(z.prob(z.full()) == Approx(mu.prob(mu.full()) * sys.shearer.prob(0)).epsilon(1e-10));
}

TEST_CASE("both routes to the diluted law agree") {
  Graph g = tree_ball(3, 3);
  for (const VertexSet& vol : {VertexSet{0, 1}, VertexSet{0, 1, 2}, VertexSet{0, 1, 2, 3}})
    for (double b2 : {0.0, -0.5, -1.5}) {
      auto routes = diluted_ising_routes(g, build_dilution_system(g, vol, 2.0, 1.5, 0.0, b2, 1.0));
      CHECK(routes.max_log_disagreement <= 1e-9);
      CHECK(routes.total_mass == Approx(1.0));
    }
}

TEST_CASE("verify_holley_ratio and the sandwich") {
  Graph g = tree_ball(3, 3);
  const VertexSet vol{0, 1, 2, 3};
  auto same = build_dilution_system(g, vol, 1.0, 1.0 - 1e-12, 0.0, 0.0, 1.0);
  auto report = verify_holley_ratio(g, diluted_ising_law(g, same), uniform_ising(g, 1.0 - 1e-12, 0.0, vol));
  CHECK(report.ok);
  CHECK(report.checked > 0);

  auto sys = build_dilution_system(g, vol, 2.0, 1.5, 0.0, 0.0, 1.0);
  auto z = diluted_ising_law(g, sys);
  auto params2 = uniform_ising(g, 1.5, 0.0, vol);
  REQUIRE(verify_holley_ratio(g, z, params2).ok);
  CHECK(strassen_dominates(ising_measure(g, uniform_ising(g, 2.0, 0.0, vol)), z));
  CHECK(strassen_dominates(z, ising_measure(g, params2)));
}
