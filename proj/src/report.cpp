#include "lapfol/report.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "lapfol/errors.hpp"

namespace lapfol {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string slug(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')) c = '_';
  return s;
}

}  // namespace

// −0 and +0 print differently; fold them so baselines do not drift on the
// sign of an exact zero. Non-finite values serialize as null.
double json_number(double x) { return x == 0.0 ? 0.0 : x; }

Json make_report(const std::string& case_id, const std::string& operation, int samples, double spread,
                 double tolerance, bool pass, std::uint64_t seed, Json details) {
  Json r;
  r["case"] = case_id;
  r["operation"] = operation;
  r["samples"] = samples;
  r["spread"] = json_number(spread);
  r["tolerance"] = tolerance;
  r["pass"] = pass;
  r["seed"] = seed;
  if (!details.empty()) r["details"] = std::move(details);
  return r;
}

Json make_trace_report(const std::string& case_id, double phi, double trace_direct, double raw, double accelerated,
                       double tail_bound, double tolerance, bool pass, std::uint64_t seed) {
  Json r;
  r["case"] = case_id;
  r["operation"] = "trace";
  r["phi"] = phi;
  r["trace_direct"] = json_number(trace_direct);
  r["trace_series_raw"] = json_number(raw);
  r["trace_series_accel"] = json_number(accelerated);
  r["tail_bound"] = tail_bound;
  r["tolerance"] = tolerance;
  r["pass"] = pass;
  r["seed"] = seed;
  return r;
}

bool ReportBundle::pass() const {
  if (reports.empty()) return false;
  for (const auto& r : reports)
    if (!r.value("pass", false)) return false;
  return true;
}

Json ReportBundle::summary() const {
  Json s;
  s["experiment"] = experiment;
  s["seed"] = seed;
  s["pass"] = pass();
  int failed = 0;
  for (const auto& r : reports) failed += r.value("pass", false) ? 0 : 1;
  s["reports_total"] = static_cast<int>(reports.size());
  s["reports_failed"] = failed;
  s["reports"] = reports;
  Json names = Json::array();
  for (const auto& f : files) names.push_back(f.path);
  s["files"] = names;
  return s;
}

void ReportBundle::write(const std::filesystem::path& dir) const {
  write_text(dir / "bundle.json", summary().dump(2) + "\n");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    char idx[16];
    std::snprintf(idx, sizeof idx, "%03zu", i);
    const auto& r = reports[i];
    const std::string name = std::string(idx) + "-" + slug(r.value("case", "case")) + "-" +
                             slug(r.value("operation", "report")) + ".json";
    write_text(dir / "reports" / name, r.dump(2) + "\n");
  }
  for (const auto& f : files) write_text(dir / f.path, f.content);
}

std::string data_table(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string out = "#";
  for (const auto& c : columns) out += " " + c;
  out += "\n";
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      if (j) out += " ";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace lapfol
