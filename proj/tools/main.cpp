#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "acceptance/acceptance.hpp"
#include "domcode/errors.hpp"
#include "experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCap = 3;

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || id < 1 || id > 12)
      throw domcode::ConfigError("key 'only': expected criterion ids 1..12, got '" + text + "'");
    out.push_back(id);
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    std::uint64_t s = 0;
    try {
      s = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size() || item[0] == '-')
      throw domcode::ConfigError("key 'seeds': expected comma-separated unsigned integers, got '" + text + "'");
    out.push_back(s);
  }
  if (out.empty()) throw domcode::ConfigError("key 'seeds': the seed list is empty");
  return out;
}

int write_output(const domcode::cli::ExperimentSpec& spec, const domcode::cli::Table& table, std::string format) {
  std::string path = spec.out;
  if (path == "csv" || path == "json") {
    format = path;
    path.clear();
  } else if (format.empty()) {
    format = path.size() > 5 && path.ends_with(".json") ? "json" : "csv";
  }
  const std::string text = format == "json" ? domcode::cli::to_json(spec, table) : domcode::cli::to_csv(spec, table);
  if (path.empty() || path == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(path);
  if (!out) throw domcode::ConfigError("key 'out': cannot write '" + path + "'");
  out << text;
  return out ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic domination and finitary coding experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment; extra --key value pairs set its parameters");
  run->allow_extras();
  std::string experiment, config, format;
  std::string seeds_text;
  std::uint64_t seed = 1;
  domcode::cli::ExperimentSpec spec;
  run->add_option("experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(domcode::cli::experiment_names()));
  run->add_option("--config", config, "key=value parameter file; flags win");
  run->add_option("--out", spec.out, "Output path, or 'csv' / 'json' for stdout");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = run->add_option("--seed", seed, "Base seed");
  run->add_option("--seeds", seeds_text, "Comma-separated seeds")->excludes(seed_opt);
  run->add_option("--jobs", spec.jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--precision", spec.precision, "Mantissa bits for extended precision; 0 for double")
      ->check(CLI::NonNegativeNumber);

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  std::string level = "quick", only;
  domcode::acceptance::Options opts;
  verify->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--only", only, "Comma-separated criterion ids");
  verify->add_option("--fault", opts.fault, "Criterion whose tolerance is perturbed so it must fail")
      ->check(CLI::Range(1, 12));
  verify->add_option("--jobs", opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--seed", opts.seed, "Base seed");

  app.add_subcommand("list", "List experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("list")) {
      for (const auto& name : domcode::cli::experiment_names()) std::cout << name << '\n';
      return kExitOk;
    }
    if (run->parsed()) {
      spec.experiment = experiment;
      if (!config.empty()) spec.params = domcode::cli::read_config(config);
      for (auto& [k, v] : domcode::cli::parse_overrides(run->remaining())) spec.params[k] = v;
      spec.seeds = seeds_text.empty() ? std::vector<std::uint64_t>{seed} : parse_seed_list(seeds_text);
      return write_output(spec, domcode::cli::run_experiment(spec), format);
    }
    opts.level = domcode::acceptance::parse_level(level);
    if (!only.empty()) opts.only = parse_id_list(only);
    if (opts.fault != 0 && opts.only.empty()) opts.only = {opts.fault};
    int failed = 0;
    std::string names;
    for (const auto& r : domcode::acceptance::run(opts, &std::cout)) {
      if (!r.pass) {
        ++failed;
        names += (names.empty() ? "" : ", ") + std::to_string(r.id) + " (" + r.name + ")";
      }
    }
    if (failed) {
      std::cout << "FAILED " << failed << ": " << names << '\n';
      return kExitFailure;
    }
    std::cout << "ALL PASSED\n";
    return kExitOk;
  } catch (const domcode::SizeError& e) {
    std::cerr << "error: cap exceeded: " << e.what() << '\n';
    return kExitCap;
  } catch (const domcode::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const domcode::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
