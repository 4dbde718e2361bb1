// One line per acceptance criterion. A criterion passes when every
// experiment it names passes, every expected (case, operation) report is
// present in the required number and, where a runtime bound is part of the
// criterion, the experiments finish within it.

#include <chrono>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lapfol/experiments.hpp"

namespace {

using namespace lapfol;

struct Expect {
  std::string case_id;
  std::string operation;
  int count;
};

struct Criterion {
  int number;
  std::string title;
  std::vector<std::string> experiments;
  std::vector<Expect> expect;
  std::optional<double> max_seconds;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {1, "Euler identity", {"euler-identity"}, {{"euler", "euler_series", 4}}, 1.0},
      {2, "latitude focal spectra and trace", {"latitude-trace"}, {{"s2-latitude", "trace", 20}}, 10.0},
      {3,
       "Clifford and Hopf traces",
       {"clifford-trace"},
       {{"s3-clifford", "trace", 13}, {"s3-hopf", "trace", 4}},
       {}},
      {4,
       "basic focal data",
       {"basic-focal"},
       {{"s2-latitude", "basic_focal", 4}, {"s3-hopf", "basic_focal", 4}},
       {}},
      {5,
       "basic mean curvature",
       {"basic-mean"},
       {{"s2-latitude", "basic_mean_curvature", 1},
        {"s2-fold", "basic_mean_curvature", 1},
        {"s3-clifford", "basic_mean_curvature", 1},
        {"s3-hopf", "basic_mean_curvature", 1}},
       {}},
      {6,
       "averaging commutes with the Laplacian",
       {"avg-commute"},
       {{"s2-latitude", "average_commutes_laplacian", 1},
        {"s2-fold", "average_commutes_laplacian", 1},
        {"s3-hopf", "average_commutes_laplacian", 1}},
       {}},
      {7,
       "Reynolds operator",
       {"reynolds"},
       {{"s2-zonal", "reynolds_identity", 1},
        {"s2-even-zonal", "reynolds_identity", 1},
        {"s2-zonal", "reynolds_vs_average", 1}},
       {}},
      {8,
       "Laplacian closure and maximality",
       {"closure", "maximality"},
       {{"s2-zonal", "laplacian_closure", 1},
        {"s2-even-zonal", "laplacian_closure", 1},
        {"s3-hopf", "laplacian_closure", 1},
        {"s2-cubic", "laplacian_closure", 1},
        {"s2-zonal", "maximality_probe", 1},
        {"s2-even-zonal", "maximality_probe", 1},
        {"s2-cubic", "maximality_probe", 1}},
       {}},
      {9,
       "quotient construction",
       {"quotient-construction"},
       {{"s2-latitude", "gram_constant_on_fibers", 1},
        {"s2-fold", "gram_constant_on_fibers", 1},
        {"s3-hopf", "gram_constant_on_fibers", 1},
        {"s2-latitude", "quotient_length", 1},
        {"s2-latitude", "equidistance", 1},
        {"s3-hopf", "equidistance", 1}},
       {}},
      {10,
       "separation",
       {"separation"},
       {{"s2-latitude", "separation", 1},
        {"s2-fold", "separation", 1},
        {"s3-clifford", "separation", 1},
        {"s3-hopf", "separation", 1},
        {"t2-circles", "separation", 1},
        {"s2-latitude", "separation_negative", 1}},
       {}},
      {11,
       "numerical hygiene",
       {"hygiene"},
       {{"jacobi-s2", "ode_vs_closed_form", 10},
        {"jacobi-s3", "ode_vs_closed_form", 10},
        {"jacobi-s4", "ode_vs_closed_form", 10},
        {"jacobi-t2", "ode_vs_closed_form", 10},
        {"jacobi-s2xs2", "ode_vs_closed_form", 10},
        {"gradient-s2", "gradient_vs_fd", 1},
        {"eigen-s2", "eigen_identities", 1},
        {"eigen-s3", "eigen_identities", 1},
        {"eigen-s4", "eigen_identities", 1}},
       {}},
  };
  return c;
}

}  // namespace

int main() {
  int failed = 0;
  for (const auto& cr : criteria()) {
    bool pass = true;
    std::string why;
    double seconds = 0;
    std::map<std::pair<std::string, std::string>, int> seen;
    for (const auto& e : cr.experiments) {
      RunConfig cfg;
      cfg.experiment = e;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const ReportBundle b = run_case(cfg);
        if (!b.pass()) {
          pass = false;
          for (const auto& r : b.reports)
            if (!r.value("pass", false))
              why += " " + r.value("case", "?") + "/" + r.value("operation", "?") + " failed;";
        }
        for (const auto& r : b.reports)
          if (r.value("pass", false)) ++seen[{r.value("case", ""), r.value("operation", "")}];
      } catch (const std::exception& ex) {
        pass = false;
        why += " " + e + " threw: " + ex.what() + ";";
      }
      seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    for (const auto& x : cr.expect)
      if (seen[{x.case_id, x.operation}] < x.count) {
        pass = false;
        why += " missing " + x.case_id + "/" + x.operation + ";";
      }
    if (cr.max_seconds && seconds > *cr.max_seconds) {
      pass = false;
      why += " runtime above " + std::to_string(*cr.max_seconds) + " s;";
    }
    std::printf("criterion %2d  %s  %-40s %8.3f s%s\n", cr.number, pass ? "PASS" : "FAIL", cr.title.c_str(), seconds,
                why.c_str());
    if (!pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria().size()) - failed, criteria().size());
  return failed == 0 ? 0 : 1;
}
