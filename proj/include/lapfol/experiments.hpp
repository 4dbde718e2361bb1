#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lapfol/config.hpp"
#include "lapfol/report.hpp"

namespace lapfol {

/// Parameters of one experiment run. Unset optionals select the experiment's
/// built-in case list and tolerances.
struct RunConfig {
  std::string experiment;
  std::optional<std::string> case_id;     // restrict to one catalog submetry
  std::optional<std::string> space;       // for algebra-only experiments
  std::vector<std::string> algebra;       // generator strings or one catalog algebra name
  std::optional<std::string> submetry;
  std::optional<double> tolerance;
  double window = 20.0;                   // focal window T
  std::optional<int> samples;
  int quadrature = 24;
  std::optional<int> degree;
  std::optional<double> phi;
  std::optional<int> terms;               // N of the Euler series
  std::optional<double> cutoff;           // eigenvalue cutoff
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::filesystem::path> output;
};

/// Keys accepted in config files and as --key value flags.
const std::vector<std::string>& config_keys();
/// Sets one key from its text value. Unknown keys and malformed values throw ConfigError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
/// Reads the [defaults] and [<experiment>] sections of a flat INI file into cfg.
void load_config_file(RunConfig& cfg, const std::filesystem::path& file);
/// Checks ids against the catalog and tolerances for positivity.
void validate(const RunConfig& cfg);

struct ExperimentInfo {
  std::string name;
  std::string summary;
};
const std::vector<ExperimentInfo>& experiments();

struct NamedAlgebra {
  std::string name;
  std::string space;
  std::vector<std::string> generators;
};
const std::vector<NamedAlgebra>& catalog_algebras();

/// Spaces, submetries, algebras and experiments, in a fixed order.
std::string catalog_list();

/// Runs the named experiment; unknown ids throw ConfigError. Cases run in a
/// work pool and are merged in case order, so bundles are reproducible.
ReportBundle run_case(const RunConfig& cfg);

}  // namespace lapfol
