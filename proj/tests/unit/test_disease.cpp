#include <cmath>

#include "doctest.h"
#include "domcode/disease.hpp"
#include "domcode/errors.hpp"
#include "generators.hpp"
#include "oracles/oracles.hpp"

using namespace domcode;
using doctest::Approx;

TEST_CASE("disease_run matches the forward simulation") {
  testing::Rng rng(81);
  for (int trial = 0; trial < 400; ++trial) {
    Graph g = trial % 2 ? tree_ball(3, 5) : testing::random_connected_graph(rng, testing::uniform_int(rng, 3, 14), 0.3, 0.2);
    const double p = testing::uniform(rng, 0.3, 1.0);
    const int v = testing::uniform_int(rng, 0, g.size() - 1);
    const int r = testing::uniform_int(rng, 0, 4);
    const int n = testing::uniform_int(rng, 1, 9);
    UpdateStream stream(static_cast<std::uint64_t>(trial) * 7919u);
    CHECK(disease_run(g, p, r, n, v, stream) == oracle::disease_forward(g, stream, p, v, r, n));
  }
}

TEST_CASE("disease_run examples") {
  Graph g = tree_ball(3, 3);
  UpdateStream stream(5);
  CHECK_THROWS_AS(disease_run(g, 0.5, 2, 0, 0, stream), ArgumentError);
  CHECK(disease_run(g, 1.0, 2, 4, 0, stream) == Tri::One);
  CHECK(disease_run(g, 0.0, 2, 4, 0, stream) == Tri::Star);
}

TEST_CASE("union_bound") {
  CHECK(union_bound(3, 0.5, 0) == 1.0);
  CHECK(std::isinf(union_bound(3, 0.8, 3)));
  CHECK(union_bound(3, 1.0, 2) == 0.0);
  for (double p : {0.9, 0.95, 0.99})
    for (int len : {1, 2, 5}) {
      double sum = 0.0, term = 9.0 * (1.0 - p);
      for (int k = 1; k < 4000; ++k, term *= 8.0 * (1.0 - p))
        if (k >= len) sum += term;
      CHECK(union_bound(3, p, len) == Approx(sum).epsilon(1e-10));
    }
  CHECK(union_bound(3, 0.95, 2.5) == union_bound(3, 0.95, 3));
}

TEST_CASE("space_time_updates") {
  const VertexSet region{0, 2, 5};
  UpdateStream stream(11);
  auto updates = space_time_updates(region, stream, 0.7, 4);
  CHECK(updates.size() == 12);
  for (const auto& up : updates) {
    CHECK(std::find(region.begin(), region.end(), up.vertex) != region.end());
    CHECK(up.time > -up.step);
    CHECK(up.time < -up.step + 1);
    CHECK(up.one == (stream.u(up.vertex, up.step) <= 0.7));
  }
}

TEST_CASE("surviving stars carry a witnessing chain") {
  Graph g = tree_ball(3, 6);
  long survivors = 0;
  for (double p : {0.75, 0.85, 0.9})
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      UpdateStream stream(family_seed(17, seed));
      const int r = 1 + static_cast<int>(seed % 4), n = 2 * r;
      if (disease_run(g, p, r, n, 0, stream) != Tri::Star) continue;
      ++survivors;
      auto updates = space_time_updates(g.ball(0, r + 1), stream, p, n);
      auto chain = shortest_chain(g, updates, 0, r, n);
      REQUIRE(chain.has_value());
      CHECK(is_witnessing_chain(g, updates, *chain, 0, r, n));
      CHECK(h_graph_check(g, updates, *chain, r, n));
      CHECK(chain->times.size() == chain->path.size() + 1);
      CHECK(chain->length() >= 0);
    }
  CHECK(survivors > 20);
}

TEST_CASE("no chain survives when every update resolves") {
  Graph g = grid_box(2, 5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    UpdateStream stream(seed);
    auto updates = space_time_updates(g.ball(12, 3), stream, 1.0, 4);
    CHECK_FALSE(shortest_chain(g, updates, 12, 2, 4).has_value());
    CHECK(disease_run(g, 1.0, 2, 4, 12, stream) == Tri::One);
  }
}

TEST_CASE("malformed chains are rejected") {
  Graph g = tree_ball(3, 3);
  UpdateStream stream(2);
  auto updates = space_time_updates(g.ball(0, 2), stream, 0.5, 2);
  Chain broken{{0, 7}, {0.0, -0.5, -1.0}};  // 0 and 7 are not adjacent
  CHECK_THROWS_AS(is_witnessing_chain(g, updates, broken, 0, 1, 2), ArgumentError);
  Chain short_times{{0, 1}, {0.0, -0.5}};
  CHECK_THROWS_AS(h_graph_check(g, updates, short_times, 1, 2), ArgumentError);
}

TEST_CASE("survival_curve") {
  Graph g = tree_ball(3, 6);
  auto rows = survival_curve(g, 0, 0.9, {1, 2, 3}, 4000, 5);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.n == 2 * row.r);
    CHECK(row.rate == Approx(static_cast<double>(row.survivals) / row.trials));
    CHECK(row.rate <= row.wilson_hi);
    CHECK(row.bound == Approx(coding_bound(3, 0.9, row.r)));
    CHECK_FALSE(row.vacuous);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].survivals <= rows[i - 1].survivals);

  auto threaded = survival_curve(g, 0, 0.9, {1, 2, 3}, 4000, 5, 3);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(threaded[i].survivals == rows[i].survivals);

  CHECK_THROWS_AS(survival_curve(g, 0, 0.9, {0}, 10, 1), ArgumentError);
  CHECK_THROWS_AS(survival_curve(g, 0, 0.9, {1}, 0, 1), ArgumentError);
}

TEST_CASE("disease oracle rule") {
  Graph g = path_graph(7);
  DiseaseOracle oracle(g, 0.8);
  TriConfig y(static_cast<std::size_t>(g.size()), Tri::One);
  auto view = [&](int w) -> std::optional<Tri> { return y[w]; };
  CHECK(oracle.query(3, view).kind == OracleAnswer::Kind::Resolved);
  CHECK(oracle.query(3, view).q == Approx(0.8));

  y[5] = Tri::Star;
  y[4] = Tri::Zero;
  CHECK(oracle.query(3, view).kind == OracleAnswer::Kind::Blocked);
  y[4] = Tri::One;
  CHECK(oracle.query(3, view).kind == OracleAnswer::Kind::Resolved);

  // Two separate clusters of ones around the site do not count as one cut.
  DiseaseOracle ones(g, 0.8, true);
  y.assign(y.size(), Tri::One);
  y[0] = y[6] = Tri::Star;
  y[1] = y[5] = Tri::Zero;
  CHECK(oracle.query(3, view).kind == OracleAnswer::Kind::Resolved);
  CHECK(ones.query(3, view).kind == OracleAnswer::Kind::Blocked);
  y[0] = Tri::One;
  y[1] = Tri::One;
  CHECK(ones.query(3, view).kind == OracleAnswer::Kind::Resolved);
}
