#include "experiments.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "domcode/cftp.hpp"
#include "domcode/disease.hpp"
#include "domcode/domination.hpp"
#include "domcode/errors.hpp"
#include "domcode/ising.hpp"
#include "domcode/parallel.hpp"
#include "domcode/percolation.hpp"
#include "domcode/shearer.hpp"
#include "json.hpp"

namespace domcode::cli {

namespace {

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string boolean(bool b) { return b ? "true" : "false"; }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Typed access to the flat parameter map; every lookup names its key on failure.
class Params {
 public:
  Params(const std::map<std::string, std::string>& values, const std::set<std::string>& allowed) : values_(values) {
    for (const auto& [k, v] : values)
      if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "'");
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& def) const {
    auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
  }

  double real(const std::string& key, double def) const {
    if (!has(key)) return def;
    return parse_real(key, values_.at(key));
  }

  double required_real(const std::string& key) const {
    if (!has(key)) throw ConfigError("missing key '" + key + "'");
    return parse_real(key, values_.at(key));
  }

  long integer(const std::string& key, long def) const {
    if (!has(key)) return def;
    const std::string& s = values_.at(key);
    long out = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
    return out;
  }

  std::vector<int> int_list(const std::string& key, const std::vector<int>& def) const {
    if (!has(key)) return def;
    std::vector<int> out;
    std::stringstream ss(values_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      int v = 0;
      item = trim(item);
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
        throw ConfigError("key '" + key + "': expected a comma-separated integer list, got '" + values_.at(key) + "'");
      out.push_back(v);
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
  }

  bool flag(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const std::string& s = values_.at(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("key '" + key + "': expected true or false, got '" + s + "'");
  }

  Graph graph(const std::string& key, const std::string& def) const {
    try {
      return graph_from_spec(str(key, def));
    } catch (const SizeError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }

  std::string choice(const std::string& key, const std::string& def, const std::vector<std::string>& options) const {
    std::string s = str(key, def);
    if (std::find(options.begin(), options.end(), s) == options.end())
      throw ConfigError("key '" + key + "': unsupported value '" + s + "'");
    return s;
  }

 private:
  static double parse_real(const std::string& key, const std::string& s) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out))
      throw ConfigError("key '" + key + "': expected a finite number, got '" + s + "'");
    return out;
  }

  const std::map<std::string, std::string>& values_;
};

Table bound_table(const BoundReport& rep) {
  Table t{{"bound", "value", "raw", "vacuous"}, {}};
  for (const auto& row : rep.rows) t.rows.push_back({row.name, num(row.value), num(row.raw), boolean(row.vacuous)});
  return t;
}

Table dominate(const ExperimentSpec& spec) {
  Params p(spec.params, {"graph", "model", "nu", "beta", "field", "nu2"});
  const Graph g = p.graph("graph", "tree:3:2");
  const VertexSet sites = g.interior();
  const std::string model = p.choice("model", "bernoulli", {"bernoulli", "ising"});
  const double nu2 = p.real("nu2", 0.5);
  SiteMeasure upper = model == "bernoulli"
                          ? bernoulli_measure(sites, p.real("nu", 0.7))
                          : ising_measure(g, uniform_ising(g, p.real("beta", 1.0), p.real("field", 0.0)));
  const SiteMeasure lower = bernoulli_measure(sites, nu2);
  Table t{{"graph", "model", "sites", "nu2", "flow", "strassen", "holley"}, {}};
  t.rows.push_back({p.str("graph", "tree:3:2"), model, std::to_string(sites.size()), num(nu2),
                    num(monotone_flow_value(upper, lower)), boolean(strassen_dominates(upper, lower)),
                    boolean(holley_star(upper, lower))});
  return t;
}

Table ising_bounds_experiment(const ExperimentSpec& spec) {
  Params p(spec.params, {"graph", "delta", "h_e", "beta", "b", "alpha", "n_max"});
  IsingBoundInputs in;
  in.beta = p.real("beta", 1.0);
  in.b = p.real("b", 0.0);
  if (!p.has("graph")) {
    in.delta = static_cast<int>(p.integer("delta", 3));
    in.h_e = p.real("h_e", 1.0);
    in.n_max = static_cast<int>(p.integer("n_max", 10));
    return bound_table(ising_bounds(in, p.required_real("alpha")));
  }
  const Graph g = p.graph("graph", "");
  const VertexSet sites = g.interior();
  in.delta = static_cast<int>(p.integer("delta", g.max_degree()));
  in.h_e = p.real("h_e", cheeger(g, true).edge.value());
  in.n_max = static_cast<int>(p.integer("n_max", std::min<long>(10, static_cast<long>(sites.size()))));
  const double beta = in.beta;
  Table t = bound_table(ising_bounds(in, [&](double bp) { return alpha(g, uniform_ising(g, beta, bp)); }));
  if (static_cast<int>(sites.size()) <= DominationLimits::kStrassenCap) {
    const double pe = p_of(ising_measure(g, uniform_ising(g, in.beta, in.b)));
    t.rows.push_back({"p_of_exact", num(pe), num(pe), "false"});
  }
  return t;
}

Table perc_bounds_experiment(const ExperimentSpec& spec) {
  Params p(spec.params, {"graph", "delta", "h", "p", "q", "k_max"});
  int delta = 3;
  double h = 1.0;
  if (p.has("graph")) {
    const Graph g = p.graph("graph", "");
    delta = g.max_degree();
    h = cheeger(g, true).vertex.value();
  }
  delta = static_cast<int>(p.integer("delta", delta));
  h = p.real("h", h);
  return bound_table(perc_bounds(delta, h, p.real("p", 0.5), p.real("q", 0.1), static_cast<int>(p.integer("k_max", 20))));
}

Table shearer_verify(const ExperimentSpec& spec) {
  Params p(spec.params, {"graph", "alpha", "r"});
  const Graph dg = p.graph("graph", "cycle:5");
  DependencyGraph dep(dg.size(), dg.edges());
  const std::vector<double> alpha(static_cast<std::size_t>(dep.size()), p.real("alpha", 0.1));
  std::vector<double> r;
  if (p.has("r")) r.assign(alpha.size(), p.real("r", 0.0));
  const auto sys = shearer_measure(dep, alpha, r, spec.precision);
  std::vector<double> neg(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) neg[i] = -alpha[i];
  double total = 0.0, min_prob = 1.0, worst = 0.0;
  for (const auto& e : sys.table()) {
    const double pr = sys.prob(e.set);
    total += pr;
    min_prob = std::min(min_prob, pr);
    const double sign = std::popcount(e.set) % 2 ? -1.0 : 1.0;
    worst = std::max(worst, std::abs(pr - sign * indep_poly_rooted(dep, neg, e.set)));
  }
  Table t{{"metric", "value"}, {}};
  t.rows.push_back({"elements", std::to_string(dep.size())});
  t.rows.push_back({"independent_sets", std::to_string(sys.table().size())});
  t.rows.push_back({"precision_bits", std::to_string(spec.precision)});
  t.rows.push_back({"total_mass", num(total)});
  t.rows.push_back({"min_prob", num(min_prob)});
  t.rows.push_back({"max_formula_error", num(worst)});
  if (!r.empty()) {
    t.rows.push_back({"sufficient", boolean(check_sufficient(dep, alpha, r))});
    long pairs = 0, failures = 0;
    for (const auto& a : sys.table())
      for (const auto& b : sys.table()) {
        if ((dep.closed_neighborhood(a.set) & ~dep.closed_neighborhood(b.set)) != 0) continue;
        ++pairs;
        failures += !ratio_bound_check(sys, a.set, b.set).ok;
      }
    t.rows.push_back({"ratio_pairs", std::to_string(pairs)});
    t.rows.push_back({"ratio_failures", std::to_string(failures)});
  }
  return t;
}

long trials_of(const Params& p, long def) {
  const long n = p.integer("trials", def);
  if (n <= 0) throw ConfigError("key 'trials': must be positive");
  return n;
}

Table cftp_experiment(const ExperimentSpec& spec) {
  Params p(spec.params, {"graph", "model", "beta", "field", "dilution", "p", "trials", "mode", "max_horizon", "report"});
  const Graph g = p.graph("graph", "tree:3:3");
  const VertexSet sites = g.interior();
  const std::string model = p.choice("model", "diluted-ising", {"diluted-ising", "bernoulli"});
  const CftpMode mode = p.choice("mode", "global", {"global", "localized"}) == "global" ? CftpMode::Global
                                                                                      : CftpMode::Localized;
  const long trials = trials_of(p, 10000);
  const int max_horizon = static_cast<int>(p.integer("max_horizon", 1 << 12));
  const bool per_vertex = p.choice("report", "tv", {"tv", "samples"}) == "samples";
  std::unique_ptr<SiteOracle> oracle;
  SiteMeasure exact;
  if (model == "diluted-ising") {
    const double beta = p.real("beta", 3.0), field = p.real("field", 0.0), q = p.real("dilution", 0.95);
    oracle = std::make_unique<DilutedIsingOracle>(g, sites, beta, field, q);
    exact = dilute_law(ising_measure(g, uniform_ising(g, beta, field)), q);
  } else {
    const double pr = p.real("p", 0.95);
    oracle = std::make_unique<BernoulliOracle>(g, sites, pr);
    exact = bernoulli_measure(sites, pr);
  }
  if (per_vertex) {
    // One row per (trial, site); the seed column is the trial's own stream seed.
    Table t{{"seed", "vertex", "value", "coding_radius", "horizon"}, {}};
    for (auto seed : spec.seeds)
      for (long k = 0; k < trials; ++k) {
        const std::uint64_t s = family_seed(seed, static_cast<std::uint64_t>(k));
        auto res = cftp_sample(*oracle, UpdateStream(s), mode, max_horizon);
        for (std::size_t i = 0; i < res.targets.size(); ++i)
          t.rows.push_back({std::to_string(s), std::to_string(res.targets[i]), std::string(1, tri_char(res.values[i])),
                            std::to_string(res.radius[i]), std::to_string(res.horizon[i])});
      }
    return t;
  }
  Table t{{"seed", "trials", "tv", "monotonicity_violations", "stability_violations", "mean_horizon"}, {}};
  for (auto seed : spec.seeds) {
    std::vector<Bits> samples(static_cast<std::size_t>(trials));
    std::vector<long> mono(samples.size()), stab(samples.size()), horizon(samples.size());
    parallel_for(samples.size(), spec.jobs, [&](std::size_t k) {
      auto res = cftp_sample(*oracle, UpdateStream(family_seed(seed, k)), mode, max_horizon);
      Bits x = 0;
      for (std::size_t i = 0; i < res.values.size(); ++i)
        if (res.values[i] == Tri::One) x |= bit(static_cast<int>(i));
      samples[k] = x;
      mono[k] = res.monotonicity_violations;
      stab[k] = res.stability_violations;
      horizon[k] = *std::max_element(res.horizon.begin(), res.horizon.end());
    });
    auto sum = [](const std::vector<long>& v) { return std::accumulate(v.begin(), v.end(), 0L); };
    const double tv = total_variation(empirical_measure(sites, samples), exact);
    t.rows.push_back({std::to_string(seed), std::to_string(trials), num(tv), std::to_string(sum(mono)),
                      std::to_string(sum(stab)), num(static_cast<double>(sum(horizon)) / static_cast<double>(trials))});
  }
  return t;
}

Table disease_experiment(const ExperimentSpec& spec) {
  Params p(spec.params, {"graph", "vertex", "p", "radii", "trials", "connected_ones"});
  const Graph g = p.graph("graph", "tree:3:11");
  const int v = static_cast<int>(p.integer("vertex", 0));
  if (v < 0 || v >= g.size()) throw ConfigError("key 'vertex': out of range");
  const double pr = p.real("p", 0.95);
  const auto radii = p.int_list("radii", {2, 3, 4, 5, 6, 7, 8, 9, 10});
  const long trials = trials_of(p, 10000);
  const bool connected = p.flag("connected_ones", false);
  Table t{{"seed", "p", "r", "n", "trials", "survivals", "rate", "wilson_hi", "bound", "union_bound", "vacuous"}, {}};
  for (auto seed : spec.seeds)
    for (const auto& row : survival_curve(g, v, pr, radii, trials, seed, spec.jobs, connected))
      t.rows.push_back({std::to_string(seed), num(row.p), std::to_string(row.r), std::to_string(row.n),
                        std::to_string(row.trials), std::to_string(row.survivals), num(row.rate), num(row.wilson_hi),
                        num(row.bound), num(row.union_bound), boolean(row.vacuous)});
  return t;
}

Table compose_experiment(const ExperimentSpec& spec) {
  Params p(spec.params, {"graph", "beta", "field", "dilution", "trials"});
  const Graph g = p.graph("graph", "tree:3:2");
  const VertexSet sites = g.interior();
  const double beta = p.real("beta", 3.0), field = p.real("field", 0.0), q = p.real("dilution", 0.95);
  const long trials = trials_of(p, 10000);
  DilutedIsingOracle oracle(g, sites, beta, field, q);
  const auto law = diluted_ising_cluster_law(g, beta, field, q);
  const auto exact = ising_measure(g, uniform_ising(g, beta, field));
  Table t{{"seed", "trials", "tv"}, {}};
  for (auto seed : spec.seeds) {
    std::vector<Bits> samples(static_cast<std::size_t>(trials));
    parallel_for(samples.size(), spec.jobs, [&](std::size_t k) {
      const std::uint64_t s = family_seed(seed, k);
      auto res = cftp_sample(oracle, UpdateStream(s), CftpMode::Global);
      BinaryConfig z(static_cast<std::size_t>(g.size()), 1);
      for (std::size_t i = 0; i < sites.size(); ++i) z[sites[i]] = res.values[i] == Tri::One;
      auto x = compose_full(g, sites, z, law, splitmix64(s));
      Bits b = 0;
      for (std::size_t i = 0; i < sites.size(); ++i)
        if (x[sites[i]]) b |= bit(static_cast<int>(i));
      samples[k] = b;
    });
    t.rows.push_back({std::to_string(seed), std::to_string(trials),
                      num(total_variation(empirical_measure(sites, samples), exact))});
  }
  return t;
}

using Runner = std::function<Table(const ExperimentSpec&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"dominate", dominate},         {"ising-bounds", ising_bounds_experiment},
      {"perc-bounds", perc_bounds_experiment}, {"shearer-verify", shearer_verify},
      {"cftp", cftp_experiment},      {"disease", disease_experiment},
      {"compose", compose_experiment}};
  return table;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"dominate", "ising-bounds", "perc-bounds", "shearer-verify",
                                              "cftp",     "disease",      "compose"};
  return names;
}

std::map<std::string, std::string> parse_config(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
      throw ConfigError("config line " + std::to_string(number) + ": expected key=value, got '" + line + "'");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::map<std::string, std::string> parse_overrides(const std::vector<std::string>& args) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() == 2) throw ConfigError("unexpected argument '" + a + "'");
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      out[a.substr(2, eq - 2)] = a.substr(eq + 1);
      continue;
    }
    if (i + 1 >= args.size() || args[i + 1].rfind("--", 0) == 0)
      throw ConfigError("key '" + a.substr(2) + "': missing value");
    out[a.substr(2)] = args[++i];
  }
  return out;
}

Table run_experiment(const ExperimentSpec& spec) {
  auto it = runners().find(spec.experiment);
  if (it == runners().end()) throw ConfigError("unknown experiment '" + spec.experiment + "'");
  if (spec.seeds.empty()) throw ConfigError("key 'seeds': the seed list is empty");
  if (spec.jobs < 1) throw ConfigError("key 'jobs': must be positive");
  if (spec.precision < 0) throw ConfigError("key 'precision': must be nonnegative");
  return it->second(spec);
}

std::string to_csv(const ExperimentSpec& spec, const Table& table) {
  std::ostringstream out;
  out << "# experiment=" << spec.experiment << '\n';
  out << "# seeds=";
  for (std::size_t i = 0; i < spec.seeds.size(); ++i) out << (i ? "," : "") << spec.seeds[i];
  out << '\n';
  out << "# precision=" << spec.precision << '\n';
  for (const auto& [k, v] : spec.params) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

std::string to_json(const ExperimentSpec& spec, const Table& table) {
  nlohmann::ordered_json j;
  j["experiment"] = spec.experiment;
  j["seeds"] = spec.seeds;
  j["precision"] = spec.precision;
  j["params"] = spec.params;
  j["columns"] = table.columns;
  j["rows"] = table.rows;
  return j.dump(2) + "\n";
}

}  // namespace domcode::cli
