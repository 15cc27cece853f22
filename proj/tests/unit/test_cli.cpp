#include <algorithm>
#include <string>

#include "doctest.h"
#include "domcode/errors.hpp"
#include "experiments.hpp"
#include "json.hpp"

using namespace domcode;
using namespace domcode::cli;

namespace {

ExperimentSpec make_spec(const std::string& experiment, std::map<std::string, std::string> params) {
  ExperimentSpec spec;
  spec.experiment = experiment;
  spec.params = std::move(params);
  return spec;
}

std::string error_of(const ExperimentSpec& spec) {
  try {
    run_experiment(spec);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

int column(const Table& t, const std::string& name) {
  auto it = std::find(t.columns.begin(), t.columns.end(), name);
  REQUIRE(it != t.columns.end());
  return static_cast<int>(it - t.columns.begin());
}

}  // namespace

TEST_CASE("parse_config") {
  auto cfg = parse_config("# comment\ngraph = tree:3:2\n\nnu=0.5  # trailing\n");
  CHECK(cfg.size() == 2);
  CHECK(cfg["graph"] == "tree:3:2");
  CHECK(cfg["nu"] == "0.5");

  try {
    parse_config("a=1\nnot a pair\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("=3\n"), ConfigError);
  CHECK_THROWS_AS(read_config("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("parse_overrides") {
  auto o = parse_overrides({"--nu", "0.4", "--graph=tree:3:3", "--field", "-0.5"});
  CHECK(o["nu"] == "0.4");
  CHECK(o["graph"] == "tree:3:3");
  CHECK(o["field"] == "-0.5");
  CHECK_THROWS_AS(parse_overrides({"--nu"}), ConfigError);
  CHECK_THROWS_AS(parse_overrides({"--nu", "--beta", "1"}), ConfigError);
  CHECK_THROWS_AS(parse_overrides({"nu", "1"}), ConfigError);
}

TEST_CASE("bad keys and values name the key") {
  CHECK(error_of(make_spec("dominate", {{"nu", "oops"}})).find("'nu'") != std::string::npos);
  CHECK(error_of(make_spec("dominate", {{"bogus", "1"}})).find("'bogus'") != std::string::npos);
  CHECK(error_of(make_spec("dominate", {{"model", "potts"}})).find("'model'") != std::string::npos);
  CHECK(error_of(make_spec("disease", {{"radii", "1,x"}})).find("'radii'") != std::string::npos);
  CHECK(error_of(make_spec("dominate", {{"graph", "tree:3"}})) != "");
  CHECK(error_of(make_spec("teleport", {})).find("teleport") != std::string::npos);

  auto spec = make_spec("dominate", {});
  spec.seeds.clear();
  CHECK_THROWS_AS(run_experiment(spec), ConfigError);
  spec.seeds = {1};
  spec.jobs = 0;
  CHECK_THROWS_AS(run_experiment(spec), ConfigError);
}

TEST_CASE("size caps surface as SizeError") {
  CHECK_THROWS_AS(run_experiment(make_spec("dominate", {{"graph", "tree:3:6"}, {"model", "ising"}})), SizeError);
}

TEST_CASE("every experiment runs with small parameters") {
  const std::map<std::string, std::map<std::string, std::string>> small{
      {"dominate", {}},
      {"ising-bounds", {{"alpha", "0.9"}}},
      {"perc-bounds", {{"p", "0.99"}}},
      {"shearer-verify", {{"alpha", "0.1"}, {"r", "0.2"}}},
      {"cftp", {{"trials", "200"}, {"graph", "tree:3:2"}}},
      {"disease", {{"trials", "200"}, {"radii", "1,2"}, {"graph", "tree:3:5"}}},
      {"compose", {{"trials", "200"}}},
  };
  for (const auto& name : experiment_names()) {
    INFO(name);
    REQUIRE(small.count(name) == 1);
    auto table = run_experiment(make_spec(name, small.at(name)));
    CHECK_FALSE(table.columns.empty());
    CHECK_FALSE(table.rows.empty());
    for (const auto& row : table.rows) CHECK(row.size() == table.columns.size());
  }
}

TEST_CASE("dominate reports the strassen verdict") {
  auto table = run_experiment(make_spec("dominate", {{"nu", "0.5"}}));
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0][column(table, "strassen")] == "true");
  CHECK(table.rows[0][column(table, "holley")] == "true");
}

TEST_CASE("csv output is reproducible and carries its provenance") {
  auto spec = make_spec("cftp", {{"trials", "300"}, {"graph", "tree:3:2"}});
  spec.seeds = {3, 4};
  const std::string a = to_csv(spec, run_experiment(spec));
  const std::string b = to_csv(spec, run_experiment(spec));
  CHECK(a == b);
  CHECK(a.find("# experiment=cftp") != std::string::npos);
  CHECK(a.find("# seeds=3,4") != std::string::npos);
  CHECK(a.find("# trials=300") != std::string::npos);

  spec.jobs = 3;
  CHECK(to_csv(spec, run_experiment(spec)).substr(a.find("seed,")) == a.substr(a.find("seed,")));
}

TEST_CASE("json mirrors the csv table") {
  auto spec = make_spec("disease", {{"trials", "100"}, {"radii", "1,2,3"}});
  auto table = run_experiment(spec);
  auto doc = nlohmann::json::parse(to_json(spec, table));
  CHECK(doc["experiment"] == "disease");
  CHECK(doc["params"]["radii"] == "1,2,3");
  CHECK(doc["columns"].get<std::vector<std::string>>() == table.columns);
  CHECK(doc["rows"].get<std::vector<std::vector<std::string>>>() == table.rows);
}
