#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace domcode::cli {

struct ExperimentSpec {
  std::string experiment;
  std::map<std::string, std::string> params;
  std::vector<std::uint64_t> seeds{1};
  int jobs = 1;
  int precision = 0;  // 0: double; otherwise MPFR mantissa bits
  std::string out;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

const std::vector<std::string>& experiment_names();

// Flat key=value lines; '#' starts a comment. Throws ConfigError naming the line.
std::map<std::string, std::string> read_config(const std::string& path);
std::map<std::string, std::string> parse_config(const std::string& text);

// Flags given as "--key value" or "--key=value"; throws ConfigError on a dangling key.
std::map<std::string, std::string> parse_overrides(const std::vector<std::string>& args);

// Throws ConfigError (bad or unknown key) or SizeError (cap exceeded).
Table run_experiment(const ExperimentSpec& spec);

// CSV with '#' header lines carrying the experiment, seeds and parameters.
std::string to_csv(const ExperimentSpec& spec, const Table& table);
std::string to_json(const ExperimentSpec& spec, const Table& table);

}  // namespace domcode::cli
