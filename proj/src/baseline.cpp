#include "lapfol/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "lapfol/errors.hpp"

namespace lapfol {

namespace {

std::string child(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void walk(const Json& a, const Json& b, const std::string& path, const BaselineTolerance& tol,
          std::vector<std::string>& out) {
  if (a.is_number_float() || b.is_number_float()) {
    if (!a.is_number() || !b.is_number()) {
      out.push_back(path);
      return;
    }
    const double x = a.get<double>(), y = b.get<double>();
    if (std::fabs(x - y) > tol.absolute + tol.relative * std::max(std::fabs(x), std::fabs(y))) out.push_back(path);
    return;
  }
  if (a.type() != b.type()) {
    out.push_back(path);
    return;
  }
  if (a.is_object()) {
    std::set<std::string> keys;
    for (const auto& [k, v] : a.items()) keys.insert(k);
    for (const auto& [k, v] : b.items()) keys.insert(k);
    for (const auto& k : keys) {
      if (!a.contains(k) || !b.contains(k)) {
        out.push_back(child(path, k));
        continue;
      }
      walk(a[k], b[k], child(path, k), tol, out);
    }
    return;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      out.push_back(path);
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) walk(a[i], b[i], path + "[" + std::to_string(i) + "]", tol, out);
    return;
  }
  if (a.dump() != b.dump()) out.push_back(path);
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

Json BaselineDiff::to_json() const { return Json{{"drift", fields}, {"empty", fields.empty()}}; }

BaselineDiff compare_bundles(const Json& bundle, const Json& baseline, const BaselineTolerance& tol) {
  BaselineDiff d;
  walk(bundle, baseline, "", tol, d.fields);
  return d;
}

Json load_bundle(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return read_json(path / "bundle.json");
  return read_json(path);
}

BaselineDiff emit_baselines(const std::filesystem::path& bundle, const std::filesystem::path& baseline, bool init) {
  const Json current = load_bundle(bundle);
  BaselineTolerance tol;
  if (init) {
    Json out{{"baseline_tolerance", {{"relative", tol.relative}, {"absolute", tol.absolute}}}, {"bundle", current}};
    if (baseline.has_parent_path()) std::filesystem::create_directories(baseline.parent_path());
    std::ofstream f(baseline, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + baseline.string());
    f << out.dump(2) << "\n";
    return {};
  }
  if (!std::filesystem::exists(baseline))
    throw ConfigError("baseline " + baseline.string() + " does not exist (use --init to create it)");
  const Json stored = read_json(baseline);
  if (!stored.contains("bundle")) throw ConfigError(baseline.string() + " is not a baseline file");
  if (stored.contains("baseline_tolerance")) {
    tol.relative = stored["baseline_tolerance"].value("relative", tol.relative);
    tol.absolute = stored["baseline_tolerance"].value("absolute", tol.absolute);
  }
  return compare_bundles(current, stored["bundle"], tol);
}

}  // namespace lapfol
