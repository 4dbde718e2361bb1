#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lapfol/report.hpp"

namespace lapfol {

/// Numeric drift allowed between a bundle and its baseline:
/// |a − b| ≤ absolute + relative · max(|a|, |b|). Baselines written with
/// --init record the tolerance they were created with.
struct BaselineTolerance {
  double relative = 1e-9;
  double absolute = 1e-12;
};

struct BaselineDiff {
  std::vector<std::string> fields;  // JSON paths such as reports[3].trace_series_accel
  bool empty() const { return fields.empty(); }
  Json to_json() const;
};

/// Floating-point leaves are compared within tolerance; every other leaf
/// (strings, booleans, integers, null) and the key sets must match exactly.
BaselineDiff compare_bundles(const Json& bundle, const Json& baseline, const BaselineTolerance& tol = {});

/// Accepts a bundle directory or its bundle.json.
Json load_bundle(const std::filesystem::path& path);

/// Compares the bundle with the baseline file, or writes the baseline when
/// init is set. Missing files throw ConfigError.
BaselineDiff emit_baselines(const std::filesystem::path& bundle, const std::filesystem::path& baseline, bool init);

}  // namespace lapfol
