// lapfol: catalog listing, experiment runs and regression baselines.
// Exit codes: 0 pass, 1 fail, 2 usage.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>

#include "lapfol/baseline.hpp"
#include "lapfol/errors.hpp"
#include "lapfol/experiments.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

void print_report_line(const lapfol::Json& r) {
  const bool pass = r.value("pass", false);
  std::string measure;
  if (r.contains("trace_series_accel")) {
    measure = "accel=" + r["trace_series_accel"].dump() + " direct=" + r["trace_direct"].dump();
  } else if (r.contains("spread")) {
    measure = "spread=" + r["spread"].dump() + " tol=" + r["tolerance"].dump();
  }
  std::printf("%s  %-22s %-28s %s\n", pass ? "PASS" : "FAIL", r.value("case", "").c_str(),
              r.value("operation", "").c_str(), measure.c_str());
  if (r.contains("details") && r["details"].contains("error"))
    std::printf("      error: %s\n", r["details"]["error"].get<std::string>().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplacian algebras and submetries workbench"};
  app.require_subcommand(1);

  auto* catalog = app.add_subcommand("catalog", "list spaces, submetries, algebras and experiments");

  auto* run = app.add_subcommand("run", "run a named experiment");
  std::string experiment;
  std::string config_file;
  bool print_json = false;
  run->add_option("experiment", experiment, "experiment name (see `catalog`)")->required();
  run->add_option("--config", config_file, "INI file with [defaults] and per-experiment sections");
  run->add_flag("--json", print_json, "print bundle.json to stdout");
  std::map<std::string, std::string> flags;
  for (const auto& key : lapfol::config_keys()) run->add_option("--" + key, flags[key], "overrides config key " + key);

  auto* baseline = app.add_subcommand("baseline", "compare a bundle with a stored baseline");
  std::string bundle_path, baseline_path;
  bool init = false;
  baseline->add_option("bundle", bundle_path, "bundle directory or bundle.json")->required();
  baseline->add_option("file", baseline_path, "baseline file")->required();
  baseline->add_flag("--init", init, "write the baseline from the bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (catalog->parsed()) {
      std::cout << lapfol::catalog_list();
      return kPass;
    }
    if (run->parsed()) {
      lapfol::RunConfig cfg;
      cfg.experiment = experiment;
      if (!config_file.empty()) lapfol::load_config_file(cfg, config_file);
      for (const auto& key : lapfol::config_keys())
        if (run->count("--" + key) > 0) lapfol::apply_setting(cfg, key, flags[key]);
      const lapfol::ReportBundle bundle = lapfol::run_case(cfg);
      if (print_json) {
        std::cout << bundle.summary().dump(2) << "\n";
      } else {
        for (const auto& r : bundle.reports) print_report_line(r);
        std::printf("%s: %s (%zu reports, seed %llu)\n", bundle.experiment.c_str(), bundle.pass() ? "pass" : "FAIL",
                    bundle.reports.size(), static_cast<unsigned long long>(bundle.seed));
      }
      return bundle.pass() ? kPass : kFail;
    }
    if (baseline->parsed()) {
      const lapfol::BaselineDiff diff = lapfol::emit_baselines(bundle_path, baseline_path, init);
      if (init) {
        std::printf("baseline written to %s\n", baseline_path.c_str());
        return kPass;
      }
      std::cout << diff.to_json().dump(2) << "\n";
      return diff.empty() ? kPass : kFail;
    }
  } catch (const lapfol::ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFail;
  }
  return kUsage;
}
