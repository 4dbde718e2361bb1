#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lapfol {

using Json = nlohmann::ordered_json;

/// Generic check report: {case, operation, samples, spread, tolerance, pass, seed}
/// plus free-form details.
Json make_report(const std::string& case_id, const std::string& operation, int samples, double spread,
                 double tolerance, bool pass, std::uint64_t seed, Json details = Json::object());

/// Trace report: {case, phi, trace_direct, trace_series_raw, trace_series_accel, tail_bound, pass}.
Json make_trace_report(const std::string& case_id, double phi, double trace_direct, double raw, double accelerated,
                       double tail_bound, double tolerance, bool pass, std::uint64_t seed);

struct BundleFile {
  std::string path;  // relative to the bundle directory
  std::string content;
};

/// Everything one experiment run produces. The summary passes iff every
/// component report passes.
struct ReportBundle {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<Json> reports;
  std::vector<BundleFile> files;  // CSV spectra and plot data

  bool pass() const;
  Json summary() const;
  /// Writes bundle.json, reports/*.json and the data files under dir.
  void write(const std::filesystem::path& dir) const;
};

/// Whitespace-delimited columns with a '#' header line, %.17g values.
std::string data_table(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows);

/// Maps −0 to +0 before serialization.
double json_number(double x);

}  // namespace lapfol
