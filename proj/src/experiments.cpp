#include "lapfol/experiments.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>

#include "lapfol/errors.hpp"
#include "lapfol/focal.hpp"
#include "lapfol/lapalg.hpp"
#include "lapfol/submetry.hpp"

namespace lapfol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- config parsing ----

double parse_plain(const std::string& t) {
  std::size_t pos = 0;
  const double v = std::stod(t, &pos);
  if (pos != t.size()) throw std::invalid_argument(t);
  return v;
}

// Plain numbers, or a*pi/b with both a and b optional ("pi/4", "3pi/4", "2*pi").
double parse_double(const std::string& key, const std::string& text) {
  static const std::regex pi_form(R"(^\s*([-+0-9.eE]*?)\s*\*?\s*pi\s*(?:/\s*([-+0-9.eE]+))?\s*$)");
  try {
    std::smatch m;
    if (!std::regex_match(text, m, pi_form)) return parse_plain(text);
    double a = 1;
    if (m[1].length() == 1 && (m[1].str() == "-" || m[1].str() == "+")) a = m[1].str() == "-" ? -1 : 1;
    else if (m[1].length() > 0) a = parse_plain(m[1].str());
    const double b = m[2].matched ? parse_plain(m[2].str()) : 1.0;
    if (b == 0) throw std::invalid_argument(text);
    return a * std::numbers::pi / b;
  } catch (const std::exception&) {
    throw ConfigError("bad value for " + key + ": '" + text + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad value for " + key + ": '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

// ---- work pool ----

struct Piece {
  std::vector<Json> reports;
  std::vector<BundleFile> files;
};

struct Job {
  std::string case_id;
  std::string operation;
  std::function<Piece(Rng&)> run;
};

Json error_report(const Job& job, const std::string& what, std::uint64_t seed) {
  return make_report(job.case_id, job.operation, 0, kNaN, 0.0, false, seed, Json{{"error", what}});
}

// Jobs are independent; each gets its own generator derived from the run
// seed and its index, and results are merged by case id (stable), so the
// bundle does not depend on scheduling.
std::vector<Piece> run_pool(const std::vector<Job>& jobs, std::uint64_t seed) {
  const long n = static_cast<long>(jobs.size());
  std::vector<Piece> out(jobs.size());
  std::vector<std::exception_ptr> fatal(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto& job = jobs[static_cast<std::size_t>(i)];
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(i)};
    Rng rng(sq);
    try {
      out[static_cast<std::size_t>(i)] = job.run(rng);
    } catch (const ConfigError&) {
      fatal[static_cast<std::size_t>(i)] = std::current_exception();
    } catch (const std::exception& e) {
      out[static_cast<std::size_t>(i)].reports.push_back(error_report(job, e.what(), seed));
    }
  }
  for (const auto& f : fatal)
    if (f) std::rethrow_exception(f);
  return out;
}

ReportBundle merge(const RunConfig& cfg, const std::vector<Job>& jobs, std::vector<Piece> pieces) {
  std::vector<std::size_t> order(jobs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return jobs[a].case_id < jobs[b].case_id; });
  ReportBundle bundle;
  bundle.experiment = cfg.experiment;
  bundle.seed = cfg.seed;
  for (std::size_t i : order) {
    for (auto& r : pieces[i].reports) bundle.reports.push_back(std::move(r));
    for (auto& f : pieces[i].files) bundle.files.push_back(std::move(f));
  }
  return bundle;
}

// ---- helpers ----

double tol_or(const RunConfig& cfg, double fallback) { return cfg.tolerance.value_or(fallback); }

std::vector<std::string> cases_or(const RunConfig& cfg, std::vector<std::string> defaults) {
  if (cfg.case_id) return {*cfg.case_id};
  return defaults;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::vector<double> expanded(const std::vector<FocalRoot>& roots) {
  std::vector<double> out;
  for (const auto& r : roots)
    for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.distance);
  return out;
}

// Largest |a_k − b_k| between two lists, +inf if their lengths differ.
double list_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double g = 0;
  for (std::size_t k = 0; k < a.size(); ++k) g = std::max(g, std::fabs(a[k] - b[k]));
  return g;
}

Vec random_weights(int n, Rng& rng) {
  std::normal_distribution<double> nd;
  Vec w(n);
  for (int i = 0; i < n; ++i) w(i) = nd(rng);
  return w;
}

// True iff f is a nonzero rational multiple of g.
bool is_multiple_of(const PolyFunction& f, const PolyFunction& g) {
  if (f.is_zero() || g.is_zero()) return false;
  const Rational c = l2_inner(f, g) / l2_inner(g, g);
  return (f - g * c).is_zero();
}

Subalgebra resolve_algebra(const RunConfig& cfg, SpacePtr& space) {
  std::vector<std::string> gens = cfg.algebra;
  std::string space_id = cfg.space.value_or("s2");
  if (gens.size() == 1) {
    for (const auto& a : catalog_algebras())
      if (a.name == gens.front()) {
        gens = a.generators;
        space_id = a.space;
      }
  }
  space = make_space(space_id);
  return Subalgebra::parse(space, gens);
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

const std::vector<std::string> kHopfGenerators = {"x1^2 + x2^2 - x3^2 - x4^2", "2 x1 x3 + 2 x2 x4",
                                                  "2 x1 x4 - 2 x2 x3"};

// ---- criterion 1 ----

std::vector<Job> euler_jobs(const RunConfig& cfg) {
  std::vector<double> phis = {kPi / 6, kPi / 4, kPi / 3, 1.0};
  if (cfg.phi) phis = {*cfg.phi};
  const int N = cfg.terms.value_or(2000);
  const double tol = tol_or(cfg, 1e-8);
  std::vector<Job> jobs;
  jobs.push_back({"euler", "euler_series", [=, seed = cfg.seed](Rng&) {
                    Piece piece;
                    std::vector<std::vector<double>> rows;
                    for (double phi : phis) {
                      const EulerSeries e = euler_series(phi, N);
                      const bool pass = e.residual_raw <= 1e-3 && e.residual_accelerated <= tol;
                      piece.reports.push_back(make_report(
                          "euler", "euler_series", N, e.residual_accelerated, tol, pass, seed,
                          Json{{"phi", phi},
                               {"cot_phi", 1 / std::tan(phi)},
                               {"partial", e.partial},
                               {"accelerated", e.accelerated},
                               {"residual_raw", e.residual_raw},
                               {"residual_raw_tolerance", 1e-3},
                               {"residual_accelerated", e.residual_accelerated}}));
                      rows.push_back({phi, e.residual_raw, e.residual_accelerated});
                    }
                    piece.files.push_back(
                        {"data/euler.dat", data_table({"phi", "residual_raw", "residual_accelerated"}, rows)});
                    return piece;
                  }});
  return jobs;
}

// ---- criteria 2 and 3 ----

struct TraceCase {
  std::string case_id;
  std::string submetry;
  double phi;
  double expected;       // closed-form trace (NaN: none)
  double tolerance;      // accelerated vs direct
  bool check_spectrum;   // latitude only: compare with {φ + kπ} ∪ {φ − (k+1)π}
};

Piece trace_case(const TraceCase& tc, double T, int quadrature, std::uint64_t seed, Rng& rng) {
  const auto sigma = make_submetry(tc.submetry);
  AmbientPoint p;
  Vec weights;
  if (tc.submetry == "s2-latitude") {
    p = s2_point(std::cos(tc.phi), 0.3);
    weights = Vec::Ones(1);
  } else if (tc.submetry == "s3-clifford") {
    // Toward the core circle in the (x1, x2) plane.
    p = clifford_point(tc.phi, 0.2, 0.5);
    weights = Vec::Ones(1);
  } else {
    p = sigma->sample_regular(rng);
    weights = random_weights(static_cast<int>(sigma->quotient_map().size()), rng);
  }
  const FiberChart chart = sigma->fiber_at(p, quadrature);
  const Vec v = horizontal_direction(*sigma, chart, p, weights);
  const double direct = shape_operator(chart, p, v).trace();
  const FocalSpectrum spec = focal_spectrum(chart, p, v, T);
  const TraceEstimate est = trace_from_focal(spec);

  bool pass = std::fabs(est.accelerated - direct) <= tc.tolerance;
  const double target = std::isnan(tc.expected) ? direct : tc.expected;
  const double direct_error = std::fabs(direct - target);
  pass = pass && direct_error <= 1e-8;
  Json r = make_trace_report(tc.case_id, tc.phi, direct, est.raw, est.accelerated, est.tail_bound, tc.tolerance, pass,
                             seed);
  r["expected"] = json_number(tc.expected);
  r["pairs"] = est.pairs;
  r["window"] = T;
  if (tc.check_spectrum) {
    std::vector<double> pos, neg;
    for (int k = 0; tc.phi + k * kPi <= T - 1e-6; ++k) pos.push_back(tc.phi + k * kPi);
    for (int k = 0; tc.phi - (k + 1) * kPi >= -T + 1e-6; ++k) neg.push_back(tc.phi - (k + 1) * kPi);
    const double gap = std::max(list_gap(expanded(spec.positive), pos), list_gap(expanded(spec.negative), neg));
    r["spectrum_error"] = json_number(gap);
    r["spectrum_tolerance"] = 1e-8;
    r["pass"] = pass && gap <= 1e-8;
  }
  if (!spec.warnings.empty()) r["warnings"] = spec.warnings;
  Piece piece;
  piece.reports.push_back(r);
  piece.files.push_back({"spectra/" + tc.case_id + "_phi_" + fmt(tc.phi) + ".csv", spectrum_csv(spec)});
  return piece;
}

std::vector<Job> trace_jobs(const std::vector<TraceCase>& cases, const RunConfig& cfg) {
  std::vector<Job> jobs;
  for (const auto& tc : cases)
    jobs.push_back({tc.case_id, "trace", [tc, T = cfg.window, q = cfg.quadrature, seed = cfg.seed](Rng& rng) {
                      return trace_case(tc, T, q, seed, rng);
                    }});
  return jobs;
}

Piece trace_table(const std::vector<Piece>& pieces, const std::string& path) {
  std::vector<std::vector<double>> rows;
  for (const auto& pc : pieces)
    for (const auto& r : pc.reports)
      if (r.contains("trace_direct") && r["phi"].is_number())
        rows.push_back({r["phi"].get<double>(), r["trace_direct"].get<double>(),
                        r["trace_series_accel"].is_number() ? r["trace_series_accel"].get<double>() : kNaN,
                        r["trace_series_raw"].is_number() ? r["trace_series_raw"].get<double>() : kNaN});
  Piece p;
  if (!rows.empty())
    p.files.push_back({path, data_table({"phi", "trace_direct", "trace_series_accel", "trace_series_raw"}, rows)});
  return p;
}

std::vector<TraceCase> latitude_trace_cases(const RunConfig& cfg) {
  std::vector<double> phis;
  if (cfg.phi) {
    phis = {*cfg.phi};
  } else {
    for (int i = 0; i < 20; ++i) phis.push_back(0.1 + (kPi - 0.2) * (i + 0.5) / 20);
  }
  std::vector<TraceCase> out;
  for (double phi : phis)
    out.push_back({"s2-latitude", "s2-latitude", phi, 1 / std::tan(phi), tol_or(cfg, 1e-6), true});
  return out;
}

std::vector<TraceCase> clifford_trace_cases(const RunConfig& cfg) {
  std::vector<TraceCase> out;
  const auto cases = cases_or(cfg, {"s3-clifford", "s3-hopf"});
  for (const auto& c : cases) {
    if (c == "s3-clifford") {
      std::vector<double> phis;
      if (cfg.phi) {
        phis = {*cfg.phi};
      } else {
        for (int i = 0; i < 12; ++i) phis.push_back(0.1 + (kPi / 2 - 0.2) * (i + 0.5) / 12);
        phis.push_back(kPi / 4);
      }
      for (double phi : phis) {
        const bool minimal = std::fabs(phi - kPi / 4) < 1e-15;
        out.push_back({"s3-clifford", "s3-clifford", phi, 1 / std::tan(phi) - std::tan(phi),
                       tol_or(cfg, minimal ? 1e-8 : 1e-6), false});
      }
    } else if (c == "s3-hopf") {
      for (int k = 0; k < 4; ++k) out.push_back({"s3-hopf", "s3-hopf", kNaN, 0.0, tol_or(cfg, 1e-8), false});
    } else {
      throw ConfigError("clifford-trace has no case " + c);
    }
  }
  return out;
}

// ---- criterion 4 ----

std::vector<Job> basic_focal_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  const double tol = tol_or(cfg, 1e-8);
  for (const auto& c : cases_or(cfg, {"s2-latitude", "s3-hopf"})) {
    const auto sigma = make_submetry(c);
    for (int k = 0; k < 4; ++k) {
      jobs.push_back({c, "basic_focal", [sigma, c, tol, T = cfg.window, seed = cfg.seed](Rng& rng) {
                        const AmbientPoint p1 = sigma->sample_regular(rng);
                        const FiberChart chart = sigma->fiber_at(p1);
                        // A second point of the same fiber, away from p1.
                        const auto params = chart.spread_parameters(5);
                        const auto [patch, u] = params[3];
                        const AmbientPoint p2 = chart.point(patch, u);
                        const Vec w = random_weights(static_cast<int>(sigma->quotient_map().size()), rng);
                        const Vec v1 = horizontal_direction(*sigma, chart, p1, w);
                        const Vec v2 = horizontal_direction(*sigma, chart, p2, w);
                        const FocalDiff d = basic_focal_check(*sigma, p1, v1, p2, v2, T);
                        Piece piece;
                        piece.reports.push_back(make_report(c, "basic_focal", d.count1 + d.count2, d.distance, tol,
                                                            d.count1 == d.count2 && d.distance <= tol, seed,
                                                            Json{{"count1", d.count1},
                                                                 {"count2", d.count2},
                                                                 {"window", T},
                                                                 {"leaf_gap", distance(sigma->space(), p1, p2)}}));
                        return piece;
                      }});
    }
  }
  return jobs;
}

// ---- criterion 5 ----

std::vector<Job> basic_mean_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  const double tol = tol_or(cfg, 1e-6);
  const int samples = cfg.samples.value_or(100);
  for (const auto& c : cases_or(cfg, {"s2-latitude", "s2-fold", "s3-clifford", "s3-hopf"})) {
    const auto sigma = make_submetry(c);
    for (int k = 0; k < 3; ++k) {
      jobs.push_back({c, "basic_mean_curvature", [sigma, c, tol, samples, seed = cfg.seed](Rng& rng) {
                        const AmbientPoint p = sigma->sample_regular(rng);
                        const MeanCurvatureReport m = basic_mean_curvature_report(*sigma, p, samples);
                        double hmax = 0;
                        for (const auto& h : m.H) hmax = std::max(hmax, h.norm());
                        Json push = Json::array();
                        for (Eigen::Index i = 0; i < m.pushforward.front().size(); ++i)
                          push.push_back(m.pushforward.front()(i));
                        const Vec q = sigma->quotient_values(p);
                        Piece piece;
                        piece.reports.push_back(make_report(
                            c, "basic_mean_curvature", static_cast<int>(m.points.size()), m.spread, tol,
                            m.spread <= tol, seed,
                            Json{{"quotient_values", std::vector<double>(q.begin(), q.end())},
                                 {"max_norm_H", hmax},
                                 {"pushforward", push}}));
                        return piece;
                      }});
    }
  }
  return jobs;
}

// ---- criterion 6 ----

std::vector<Job> avg_commute_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  for (const auto& c : cases_or(cfg, {"s2-latitude", "s2-fold", "s3-hopf"})) {
    const auto sigma = make_submetry(c);
    const bool exact = sigma->has_exact_average();
    const int degree = cfg.degree.value_or(6);
    const int grid = cfg.samples.value_or(500);
    const double tol = tol_or(cfg, exact ? 0.0 : 1e-8);
    jobs.push_back({c, "average_commutes_laplacian", [=, seed = cfg.seed](Rng& rng) {
                      const auto pts = sample_grid(*sigma, grid, rng());
                      const auto& space = sigma->space_ptr();
                      int tested = 0, nonzero = 0;
                      double worst = 0, fit = 0;
                      std::string worst_f;
                      for (const auto& m : monomials_up_to(space->ambient_dim(), degree)) {
                        const PolyFunction f = reduce_canonical(space, Polynomial::monomial(space->ambient_dim(), m));
                        const CommutatorReport r = commutator_residual(f, *sigma, pts);
                        ++tested;
                        if (r.exact && !r.exact_zero) ++nonzero;
                        fit = std::max(fit, r.fit_residual);
                        if (r.residual > worst || worst_f.empty()) {
                          worst = std::max(worst, r.residual);
                          worst_f = f.to_string();
                        }
                      }
                      const bool pass = exact ? nonzero == 0 : worst <= tol;
                      Piece piece;
                      piece.reports.push_back(make_report(c, "average_commutes_laplacian", tested, worst, tol, pass,
                                                          seed,
                                                          Json{{"backend", exact ? "exact" : "numeric"},
                                                               {"max_degree", degree},
                                                               {"exact_zero", exact && nonzero == 0},
                                                               {"nonzero_identities", nonzero},
                                                               {"grid", exact ? 0 : grid},
                                                               {"fit_residual", fit},
                                                               {"worst_function", worst_f}}));
                      return piece;
                    }});
  }
  return jobs;
}

// ---- criterion 7 ----

std::vector<Job> reynolds_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  const int degree = cfg.degree.value_or(4);
  const std::vector<std::pair<std::string, std::string>> algebras = {{"s2-zonal", "z"}, {"s2-even-zonal", "z^2"}};
  for (const auto& [name, gen] : algebras) {
    jobs.push_back({name, "reynolds_identity", [=, name = name, gen = gen, seed = cfg.seed](Rng&) {
                      const auto s2 = make_space("s2");
                      const Subalgebra A = Subalgebra::parse(s2, {gen});
                      const Rational cutoff(2 * degree * (2 * degree + 1));
                      const ReynoldsOperator R(A, cutoff);
                      const auto abasis = A.basis(degree);
                      const auto bbasis = monomial_basis(s2, degree);
                      int pairs = 0, failures = 0, idem_fail = 0, fix_fail = 0, adj_fail = 0;
                      for (const auto& b : bbasis) {
                        const PolyFunction Rb = R(b);
                        if (!(R(Rb) == Rb)) ++idem_fail;
                        for (const auto& a : abasis) {
                          ++pairs;
                          if (!(R(a * b) == a * Rb)) ++failures;
                        }
                        for (const auto& c : bbasis)
                          if (l2_inner(Rb, c) != l2_inner(b, R(c))) ++adj_fail;
                      }
                      for (const auto& a : abasis)
                        if (!(R(a) == a)) ++fix_fail;
                      const bool pass = failures == 0 && idem_fail == 0 && fix_fail == 0 && adj_fail == 0;
                      Piece piece;
                      piece.reports.push_back(make_report(name, "reynolds_identity", pairs, failures, 0.0, pass, seed,
                                                          Json{{"generators", gen},
                                                               {"degree", degree},
                                                               {"eigen_cutoff", rational_to_string(cutoff)},
                                                               {"product_failures", failures},
                                                               {"idempotence_failures", idem_fail},
                                                               {"self_adjoint_failures", adj_fail},
                                                               {"fixes_algebra_failures", fix_fail}}));
                      return piece;
                    }});
  }
  jobs.push_back({"s2-zonal", "reynolds_vs_average", [seed = cfg.seed](Rng&) {
                    const auto lat = make_submetry("s2-latitude");
                    const auto& s2 = lat->space_ptr();
                    const Subalgebra A = Subalgebra::parse(s2, {"z"});
                    const PolyFunction x2 = PolyFunction::parse(s2, "x^2");
                    const PolyFunction r = reynolds(A, x2, Rational(6));
                    const PolyFunction av = average_function(x2, *lat);
                    const PolyFunction expect = PolyFunction::parse(s2, "1/2 - 1/2 z^2");
                    const bool pass = r == expect && av == expect;
                    Piece piece;
                    piece.reports.push_back(make_report("s2-zonal", "reynolds_vs_average", 1, pass ? 0.0 : 1.0, 0.0,
                                                        pass, seed,
                                                        Json{{"reynolds_x2", r.to_string()},
                                                             {"average_x2", av.to_string()},
                                                             {"expected", expect.to_string()}}));
                    return piece;
                  }});
  return jobs;
}

// ---- criterion 8 ----

Json closure_details(const Subalgebra& A, const ClosureCertificate& cert) {
  Json d{{"summary", cert.summary()}, {"degree_bound", cert.degree_bound}, {"closed", cert.closed}};
  int bad = 0;
  for (const auto& w : cert.witnesses)
    if (!(expand_witness(A, cert, w) == laplace_beltrami(A.generators()[static_cast<std::size_t>(w.generator)])))
      ++bad;
  d["witness_failures"] = bad;
  if (cert.residual) d["residual"] = cert.residual->to_string();
  return d;
}

std::vector<Job> closure_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  const int bound = cfg.degree.value_or(default_tolerances().degree_cap);
  if (!cfg.algebra.empty()) {
    jobs.push_back({join(cfg.algebra, "; "), "laplacian_closure", [cfg, bound](Rng&) {
                      SpacePtr space;
                      const Subalgebra A = resolve_algebra(cfg, space);
                      const ClosureCertificate cert = check_laplacian_closed(A, bound);
                      Json d = closure_details(A, cert);
                      d["space"] = space->id();
                      Piece piece;
                      piece.reports.push_back(make_report(join(cfg.algebra, "; "), "laplacian_closure", bound,
                                                          cert.closed ? 0.0 : 1.0, 0.0,
                                                          cert.closed && d["witness_failures"] == 0, cfg.seed, d));
                      return piece;
                    }});
    return jobs;
  }
  struct Expect {
    std::string name, space;
    std::vector<std::string> gens;
    bool closed;
  };
  const std::vector<Expect> expect = {{"s2-zonal", "s2", {"z"}, true},
                                      {"s2-even-zonal", "s2", {"z^2"}, true},
                                      {"s3-hopf", "s3", kHopfGenerators, true},
                                      {"s2-cubic", "s2", {"z^3"}, false}};
  for (const auto& e : expect) {
    jobs.push_back({e.name, "laplacian_closure", [e, bound, seed = cfg.seed](Rng&) {
                      const auto space = make_space(e.space);
                      const Subalgebra A = Subalgebra::parse(space, e.gens);
                      const ClosureCertificate cert = check_laplacian_closed(A, bound);
                      Json d = closure_details(A, cert);
                      d["expected_closed"] = e.closed;
                      bool pass = cert.closed == e.closed && d["witness_failures"] == 0;
                      if (!e.closed) {
                        // The obstruction must be the linear term of Δ(z³).
                        const bool names_z =
                            cert.residual && is_multiple_of(*cert.residual, PolyFunction::coordinate(space, 2));
                        d["residual_names_z"] = names_z;
                        pass = pass && names_z;
                      }
                      Piece piece;
                      piece.reports.push_back(
                          make_report(e.name, "laplacian_closure", bound, pass ? 0.0 : 1.0, 0.0, pass, seed, d));
                      return piece;
                    }});
  }
  jobs.push_back({"s2-even-zonal", "field_of_fractions", [seed = cfg.seed](Rng&) {
                    const auto s2 = make_space("s2");
                    const Subalgebra even = Subalgebra::parse(s2, {"z^2"});
                    const Subalgebra zonal = Subalgebra::parse(s2, {"z"});
                    const auto z = [&](int k) { return PolyFunction::coordinate(s2, 2).pow(k); };
                    const bool pass = !even.contains(z(1)) && !even.contains(z(3)) && even.contains(z(2)) &&
                                      even.contains(z(4)) && zonal.contains(z(1)) && zonal.contains(z(3));
                    Piece piece;
                    piece.reports.push_back(make_report(
                        "s2-even-zonal", "field_of_fractions", 6, pass ? 0.0 : 1.0, 0.0, pass, seed,
                        Json{{"z_in_even", even.contains(z(1))},
                             {"z3_in_even", even.contains(z(3))},
                             {"z2_in_even", even.contains(z(2))},
                             {"z_in_zonal", zonal.contains(z(1))}}));
                    return piece;
                  }});
  return jobs;
}

Json maximality_details(const MaximalityReport& m) {
  Json entries = Json::array();
  for (const auto& e : m.entries) {
    Json out = Json::array();
    for (const auto& f : e.outside) out.push_back(f.to_string());
    entries.push_back(Json{{"lambda", rational_to_string(e.lambda)},
                           {"dim_eigenspace", e.dim_eigenspace},
                           {"dim_algebra", e.dim_algebra},
                           {"dim_basic", e.dim_basic},
                           {"fit_residual", e.fit_residual},
                           {"outside", out}});
  }
  Json d{{"agree", m.agree}, {"entries", entries}};
  if (m.first_mismatch) d["first_mismatch"] = rational_to_string(*m.first_mismatch);
  return d;
}

std::vector<Job> maximality_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  const Rational cutoff = rationalize(cfg.cutoff.value_or(30.0));
  if (!cfg.algebra.empty()) {
    if (!cfg.submetry) throw ConfigError("maximality with an explicit algebra needs --submetry");
    jobs.push_back({join(cfg.algebra, "; "), "maximality_probe", [cfg, cutoff](Rng&) {
                      SpacePtr space;
                      const Subalgebra A0 = resolve_algebra(cfg, space);
                      const auto sigma = make_submetry(*cfg.submetry);
                      if (!(sigma->space() == *space)) throw ConfigError("algebra and submetry live on different spaces");
                      const Subalgebra A(sigma->space_ptr(), A0.generators());
                      const MaximalityReport m = maximality_probe(A, *sigma, cutoff, cfg.seed);
                      Piece piece;
                      piece.reports.push_back(make_report(join(cfg.algebra, "; "), "maximality_probe",
                                                          static_cast<int>(m.entries.size()), m.agree ? 0.0 : 1.0,
                                                          default_tolerances().rank_threshold, m.agree, cfg.seed,
                                                          maximality_details(m)));
                      return piece;
                    }});
    return jobs;
  }
  struct Expect {
    std::string name, gen, submetry;
    bool agree;
  };
  const std::vector<Expect> expect = {{"s2-zonal", "z", "s2-latitude", true},
                                      {"s2-even-zonal", "z^2", "s2-fold", true},
                                      {"s2-cubic", "z^3", "s2-latitude", false}};
  for (const auto& e : expect) {
    jobs.push_back({e.name, "maximality_probe", [e, cutoff, seed = cfg.seed](Rng&) {
                      const auto sigma = make_submetry(e.submetry);
                      const Subalgebra A = Subalgebra::parse(sigma->space_ptr(), {e.gen});
                      const MaximalityReport m = maximality_probe(A, *sigma, cutoff, seed);
                      Json d = maximality_details(m);
                      d["submetry"] = e.submetry;
                      d["expected_agree"] = e.agree;
                      bool pass = m.agree == e.agree;
                      if (!e.agree) {
                        // z must appear as a basic function outside A at λ = 2.
                        const PolyFunction z = PolyFunction::coordinate(sigma->space_ptr(), 2);
                        bool witness = false;
                        for (const auto& ent : m.entries)
                          if (ent.lambda == Rational(2))
                            for (const auto& f : ent.outside) witness = witness || is_multiple_of(f, z);
                        d["z_outside_at_lambda_2"] = witness;
                        pass = pass && m.first_mismatch && *m.first_mismatch == Rational(2) && witness;
                      }
                      Piece piece;
                      piece.reports.push_back(make_report(e.name, "maximality_probe",
                                                          static_cast<int>(m.entries.size()), pass ? 0.0 : 1.0,
                                                          default_tolerances().rank_threshold, pass, seed, d));
                      return piece;
                    }});
  }
  return jobs;
}

// ---- criterion 9 ----

std::vector<Job> quotient_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  const int samples = cfg.samples.value_or(40);
  for (const std::string c : {"s2-latitude", "s2-fold"}) {
    jobs.push_back({c, "gram_constant_on_fibers", [c, samples, seed = cfg.seed](Rng& rng) {
                      const auto sigma = make_submetry(c);
                      const auto& rho = sigma->quotient_map();
                      const auto gram = gram_gradients(rho);
                      const PolyFunction& g = gram[0][0];
                      const bool exact = average_function(g, *sigma) == g;
                      const InducedMetricReport im =
                          induced_metric_check(rho, *sigma, sigma->sample_regular(rng), samples);
                      Piece piece;
                      piece.reports.push_back(make_report(c, "gram_constant_on_fibers", samples, im.spread, 1e-10,
                                                          exact && im.spread <= 1e-10, seed,
                                                          Json{{"gram", g.to_string()}, {"exact_basic", exact}}));
                      return piece;
                    }});
  }
  jobs.push_back({"s3-hopf", "gram_constant_on_fibers", [samples, seed = cfg.seed](Rng& rng) {
                    const auto sigma = make_submetry("s3-hopf");
                    const auto& rho = sigma->quotient_map();
                    const Subalgebra A(sigma->space_ptr(), rho);
                    const auto gram = gram_gradients(rho);
                    double spread = 0;
                    for (int k = 0; k < 3; ++k)
                      spread = std::max(spread,
                                        induced_metric_check(rho, *sigma, sigma->sample_regular(rng), samples).spread);
                    // Numeric fiber averages of each entry, rationalized, must
                    // reproduce the entry and lie in the algebra.
                    bool members = true;
                    double rat = 0;
                    Json entries = Json::array();
                    for (std::size_t i = 0; i < rho.size(); ++i)
                      for (std::size_t j = i; j < rho.size(); ++j) {
                        const NumericAverage na = average_function_numeric(gram[i][j], *sigma, 80, rng());
                        const bool ok = na.projected == gram[i][j] && A.contains(na.projected);
                        members = members && ok;
                        rat = std::max(rat, na.rationalization_error);
                        entries.push_back(Json{{"entry", std::to_string(i + 1) + std::to_string(j + 1)},
                                               {"rationalized", na.projected.to_string()},
                                               {"in_algebra", ok}});
                      }
                    Piece piece;
                    piece.reports.push_back(make_report("s3-hopf", "gram_constant_on_fibers", 3 * samples, spread,
                                                        1e-10, spread <= 1e-10 && members, seed,
                                                        Json{{"entries", entries}, {"rationalization_error", rat}}));
                    return piece;
                  }});
  struct LengthCase {
    std::string c;
    double expected;
  };
  for (const auto& lc : {LengthCase{"s2-latitude", kPi}, LengthCase{"s2-fold", kPi / 2},
                         LengthCase{"s3-clifford", kPi / 2}}) {
    jobs.push_back({lc.c, "quotient_length", [lc, seed = cfg.seed](Rng&) {
                      const auto sigma = make_submetry(lc.c);
                      const double L = quotient_length(sigma->quotient_map().front(), *sigma);
                      const double err = std::fabs(L - lc.expected);
                      Piece piece;
                      piece.reports.push_back(make_report(lc.c, "quotient_length", 1, err, 1e-10, err <= 1e-10, seed,
                                                          Json{{"length", L}, {"expected", lc.expected}}));
                      return piece;
                    }});
  }
  for (const std::string c : {"s2-latitude", "s2-fold", "s3-clifford", "s3-hopf", "t2-circles"}) {
    jobs.push_back({c, "regular_rank_region", [c, seed = cfg.seed](Rng& rng) {
                      const auto sigma = make_submetry(c);
                      std::vector<AmbientPoint> pts;
                      for (int k = 0; k < 50; ++k) pts.push_back(sigma->sample_regular(rng));
                      const RankRegion rr = regular_rank_region(sigma->quotient_map(), pts);
                      const int maximal = static_cast<int>(std::count(rr.maximal.begin(), rr.maximal.end(), true));
                      Piece piece;
                      piece.reports.push_back(make_report(c, "regular_rank_region", 50, 50 - maximal, 0.0,
                                                          maximal == 50 && rr.m == sigma->space().intrinsic_dim() -
                                                                                       sigma->fiber_dim(),
                                                          seed, Json{{"max_rank", rr.m}}));
                      return piece;
                    }});
  }
  for (const std::string c : {"s2-latitude", "s3-hopf"}) {
    jobs.push_back({c, "equidistance", [c, samples, seed = cfg.seed](Rng& rng) {
                      const auto sigma = make_submetry(c);
                      double spread = 0;
                      Json pairs = Json::array();
                      for (int k = 0; k < 4; ++k) {
                        const AmbientPoint a = sigma->sample_regular(rng), b = sigma->sample_regular(rng);
                        const EquidistanceReport e = equidistance_check(*sigma, a, b, samples);
                        spread = std::max(spread, e.spread());
                        pairs.push_back(Json{{"min", e.min}, {"max", e.max}, {"leaf_distance", sigma->leaf_distance(a, b)}});
                      }
                      Piece piece;
                      piece.reports.push_back(
                          make_report(c, "equidistance", 4 * samples, spread, 1e-8, spread <= 1e-8, seed,
                                      Json{{"pairs", pairs}}));
                      return piece;
                    }});
  }
  return jobs;
}

// ---- criterion 10 ----

std::vector<Job> separation_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  const int samples = cfg.samples.value_or(100);
  const double tol = tol_or(cfg, 1e-10);
  for (const std::string c : {"s2-latitude", "s2-fold", "s3-clifford", "s3-hopf", "t2-circles"}) {
    jobs.push_back({c, "separation", [=, seed = cfg.seed](Rng& rng) {
                      const auto sigma = make_submetry(c);
                      const SeparationReport s = verify_separation(sigma->quotient_map(), *sigma, samples, tol, rng());
                      Piece piece;
                      piece.reports.push_back(make_report(c, "separation", s.pairs_tested, s.margin, tol,
                                                          s.separates && s.margin > tol, seed,
                                                          Json{{"fiber_constancy", s.fiber_constancy}}));
                      return piece;
                    }});
  }
  jobs.push_back({"s2-latitude", "separation_negative", [=, seed = cfg.seed](Rng& rng) {
                    const auto sigma = make_submetry("s2-latitude");
                    const PolyFunction z2 = PolyFunction::parse(sigma->space_ptr(), "z^2");
                    const SeparationReport s = verify_separation({z2}, *sigma, samples, tol, rng());
                    Json d{{"separates", s.separates}};
                    bool antipodal = false;
                    if (s.violation) {
                      const double zp = s.violation->first(2), zq = s.violation->second(2);
                      antipodal = std::fabs(zp + zq) <= 1e-8 && std::fabs(zp) > default_tolerances().min_leaf_gap;
                      d["witness_z"] = {zp, zq};
                    }
                    d["antipodal_latitude_witness"] = antipodal;
                    Piece piece;
                    piece.reports.push_back(make_report("s2-latitude", "separation_negative", s.pairs_tested,
                                                        s.margin, tol, !s.separates && antipodal, seed, d));
                    return piece;
                  }});
  return jobs;
}

// ---- criterion 11 ----

Vec random_tangent(const SpaceModel& space, const AmbientPoint& p, Rng& rng) {
  return space.random_unit_tangent(p, rng);
}

std::vector<Job> hygiene_jobs(const RunConfig& cfg) {
  std::vector<Job> jobs;
  const int rays = cfg.samples.value_or(50);
  const double ode_tol = tol_or(cfg, 1e-9);
  const std::vector<std::string> spaces = {"s2", "s3", "s4", "t2", "s2xs2"};
  for (int k = 0; k < rays; ++k) {
    const std::string sid = spaces[static_cast<std::size_t>(k) % spaces.size()];
    jobs.push_back({"jacobi-" + sid, "ode_vs_closed_form", [=, seed = cfg.seed](Rng& rng) {
                      const auto space = make_space(sid);
                      const AmbientPoint p = space->random_point(rng);
                      const Vec v = random_tangent(*space, p, rng);
                      const int m = space->intrinsic_dim() - 1;
                      JacobiSystem J0;
                      J0.value = Mat::Identity(m, m);
                      J0.derivative = Mat::Zero(m, m);
                      std::normal_distribution<double> nd;
                      for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j) J0.derivative(i, j) = nd(rng);
                      const double T = 10.0;
                      const auto cf = jacobi_fundamental(space, {p, v}, J0, T, JacobiBackend::ClosedForm);
                      const auto ode = jacobi_fundamental(space, {p, v}, J0, T, JacobiBackend::Ode);
                      double err = 0, det_err = 0;
                      for (int i = -40; i <= 40; ++i) {
                        const double t = T * i / 40.0;
                        const Mat a = cf->value(t), b = ode->value(t);
                        err = std::max(err, (a - b).cwiseAbs().maxCoeff());
                        err = std::max(err, (cf->derivative(t) - ode->derivative(t)).cwiseAbs().maxCoeff());
                        det_err = std::max(det_err, std::fabs(a.determinant() - b.determinant()));
                      }
                      Piece piece;
                      piece.reports.push_back(make_report("jacobi-" + sid, "ode_vs_closed_form", 81, err, ode_tol,
                                                          err <= ode_tol && det_err <= ode_tol, seed,
                                                          Json{{"det_error", det_err}, {"window", T}}));
                      return piece;
                    }});
  }
  for (const std::string sid : {"s2", "s3", "s4", "t2", "s2xs2"}) {
    jobs.push_back({"gradient-" + sid, "gradient_vs_fd", [sid, seed = cfg.seed](Rng& rng) {
                      const auto space = make_space(sid);
                      const auto monos = monomials_up_to(space->ambient_dim(), 4);
                      std::uniform_int_distribution<std::size_t> pick(0, monos.size() - 1);
                      std::uniform_int_distribution<int> coef(-5, 5);
                      double worst = 0;
                      const int trials = 40;
                      for (int k = 0; k < trials; ++k) {
                        Polynomial poly(space->ambient_dim());
                        for (int t = 0; t < 4; ++t)
                          poly += Polynomial::monomial(space->ambient_dim(), monos[pick(rng)], Rational(coef(rng)));
                        const PolyFunction f = reduce_canonical(space, poly);
                        const AmbientPoint p = space->random_point(rng);
                        const Vec v = random_tangent(*space, p, rng);
                        const double exact = gradient(f).evaluate(p).dot(v);
                        // Central differences along the geodesic, one Richardson step.
                        auto fd = [&](double h) {
                          return (f.evaluate(geodesic_eval(*space, p, v, h)) -
                                  f.evaluate(geodesic_eval(*space, p, v, -h))) /
                                 (2 * h);
                        };
                        const double h = 1e-3;
                        const double approx = (4 * fd(h / 2) - fd(h)) / 3;
                        worst = std::max(worst, std::fabs(exact - approx) / std::max(1.0, std::fabs(exact)));
                      }
                      Piece piece;
                      piece.reports.push_back(make_report("gradient-" + sid, "gradient_vs_fd", trials, worst, 1e-6,
                                                          worst <= 1e-6, seed));
                      return piece;
                    }});
  }
  const int max_degree = cfg.degree.value_or(8);
  for (const std::string sid : {"s2", "s3", "s4"}) {
    jobs.push_back({"eigen-" + sid, "eigen_identities", [sid, max_degree, seed = cfg.seed](Rng&) {
                      const auto space = make_space(sid);
                      const int n = space->intrinsic_dim();
                      int checked = 0, failures = 0, dim_failures = 0;
                      auto binom = [](int a, int b) {
                        if (b < 0 || a < b) return 0L;
                        long r = 1;
                        for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
                        return r;
                      };
                      for (int k = 0; k <= max_degree; ++k) {
                        const Rational lambda = sphere_eigenvalue(k, n);
                        const auto basis = eigenspace_basis(space, lambda);
                        // Harmonic polynomials of degree k in n + 1 variables.
                        const long dim = binom(n + k, n) - binom(n + k - 2, n);
                        if (static_cast<long>(basis.size()) != dim) ++dim_failures;
                        for (const auto& b : basis) {
                          ++checked;
                          if (!(laplace_beltrami(b) == b * lambda)) ++failures;
                        }
                      }
                      Piece piece;
                      piece.reports.push_back(make_report("eigen-" + sid, "eigen_identities", checked, failures, 0.0,
                                                          failures == 0 && dim_failures == 0, seed,
                                                          Json{{"max_degree", max_degree},
                                                               {"dimension_failures", dim_failures}}));
                      return piece;
                    }});
  }
  return jobs;
}

// ---- registry ----

struct Experiment {
  ExperimentInfo info;
  std::function<std::vector<Job>(const RunConfig&)> jobs;
  std::string table;  // data file assembled from trace reports, if any
};

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = {
      {{"euler-identity", "symmetric cot series, raw and digamma-accelerated"}, euler_jobs, ""},
      {{"latitude-trace", "focal spectra and series trace on S^2 latitude circles"},
       [](const RunConfig& c) { return trace_jobs(latitude_trace_cases(c), c); }, "data/latitude_trace.dat"},
      {{"clifford-trace", "series trace on Clifford tori and Hopf fibers"},
       [](const RunConfig& c) { return trace_jobs(clifford_trace_cases(c), c); }, "data/clifford_trace.dat"},
      {{"basic-focal", "focal spectra agree at matched points of one fiber"}, basic_focal_jobs, ""},
      {{"basic-mean", "pushed-forward mean curvature is constant on fibers"}, basic_mean_jobs, ""},
      {{"avg-commute", "fiber averaging commutes with the Laplacian"}, avg_commute_jobs, ""},
      {{"reynolds", "Reynolds identity, idempotence, agreement with averaging"}, reynolds_jobs, ""},
      {{"closure", "Laplacian closure certificates"}, closure_jobs, ""},
      {{"maximality", "basic eigenfunctions versus the algebra, per eigenvalue"}, maximality_jobs, ""},
      {{"quotient-construction", "Gram of gradients, quotient length, rank region, equidistance"}, quotient_jobs, ""},
      {{"separation", "quotient coordinates separate fibers"}, separation_jobs, ""},
      {{"hygiene", "Jacobi backends, gradients, eigenvalue identities"}, hygiene_jobs, ""},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"case",    "space",      "algebra",  "submetry", "tolerance",
                                                "T",       "samples",    "quadrature", "degree", "phi",
                                                "N",       "cutoff",     "seed",     "output"};
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "case") cfg.case_id = value;
  else if (key == "space") cfg.space = value;
  else if (key == "algebra") cfg.algebra = split_list(value);
  else if (key == "submetry") cfg.submetry = value;
  else if (key == "tolerance") cfg.tolerance = parse_double(key, value);
  else if (key == "T") cfg.window = parse_double(key, value);
  else if (key == "samples") cfg.samples = static_cast<int>(parse_integer(key, value));
  else if (key == "quadrature") cfg.quadrature = static_cast<int>(parse_integer(key, value));
  else if (key == "degree") cfg.degree = static_cast<int>(parse_integer(key, value));
  else if (key == "phi") cfg.phi = parse_double(key, value);
  else if (key == "N") cfg.terms = static_cast<int>(parse_integer(key, value));
  else if (key == "cutoff") cfg.cutoff = parse_double(key, value);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
  else if (key == "output") cfg.output = value;
  else throw ConfigError("unknown setting '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& file) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(file.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  for (const std::string& section : std::vector<std::string>{"defaults", cfg.experiment}) {
    const auto node = tree.get_child_optional(section);
    if (!node) continue;
    for (const auto& [key, value] : *node) apply_setting(cfg, key, value.get_value<std::string>());
  }
}

void validate(const RunConfig& cfg) {
  const auto& reg = registry();
  if (std::none_of(reg.begin(), reg.end(), [&](const Experiment& e) { return e.info.name == cfg.experiment; }))
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  const auto ids = submetry_ids();
  for (const auto* id : {&cfg.case_id, &cfg.submetry}) {
    if (*id && std::find(ids.begin(), ids.end(), **id) == ids.end()) {
      // Algebra experiments name their cases after catalog algebras.
      const auto& al = catalog_algebras();
      if (id == &cfg.submetry ||
          std::none_of(al.begin(), al.end(), [&](const NamedAlgebra& a) { return a.name == **id; }))
        throw ConfigError("unknown catalog id '" + **id + "'");
    }
  }
  if (cfg.space) {
    const auto sp = SpaceModel::catalog_ids();
    if (std::find(sp.begin(), sp.end(), *cfg.space) == sp.end()) throw ConfigError("unknown space '" + *cfg.space + "'");
  }
  if (cfg.tolerance && !(*cfg.tolerance > 0)) throw ConfigError("tolerance must be positive");
  if (!(cfg.window > 0)) throw ConfigError("window T must be positive");
  if (cfg.samples && *cfg.samples <= 0) throw ConfigError("samples must be positive");
  if (cfg.quadrature < 0) throw ConfigError("quadrature order must be non-negative");
  if (cfg.degree && (*cfg.degree < 0 || *cfg.degree > default_tolerances().degree_cap))
    throw ConfigError("degree outside [0, " + std::to_string(default_tolerances().degree_cap) + "]");
  if (cfg.terms && *cfg.terms <= 0) throw ConfigError("N must be positive");
  if (cfg.cutoff && !(*cfg.cutoff >= 0)) throw ConfigError("cutoff must be non-negative");
}

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> out = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return out;
}

const std::vector<NamedAlgebra>& catalog_algebras() {
  static const std::vector<NamedAlgebra> a = {
      {"s2-zonal", "s2", {"z"}},
      {"s2-even-zonal", "s2", {"z^2"}},
      {"s2-cubic", "s2", {"z^3"}},
      {"s3-hopf", "s3", kHopfGenerators},
      {"s3-clifford", "s3", {"x1^2 + x2^2 - x3^2 - x4^2"}},
      {"t2-circles", "t2", {"x1", "x2"}},
  };
  return a;
}

std::string catalog_list() {
  std::ostringstream out;
  out << "spaces:\n";
  for (const auto& id : SpaceModel::catalog_ids()) {
    const auto s = make_space(id);
    out << "  " << id << "  (dim " << s->intrinsic_dim() << ", ambient R^" << s->ambient_dim() << ")\n";
  }
  out << "submetries:\n";
  for (const auto& id : submetry_ids()) {
    const auto s = make_submetry(id);
    std::vector<std::string> rho;
    for (const auto& r : s->quotient_map()) rho.push_back(r.to_string());
    out << "  " << id << ": rho = (" << join(rho, ", ") << "); fibers of dim " << s->fiber_dim()
        << "; regular set: " << s->regular_set_description() << "\n";
  }
  out << "algebras:\n";
  for (const auto& a : catalog_algebras()) out << "  " << a.name << ": " << join(a.generators, ", ") << "  [" << a.space << "]\n";
  out << "experiments:\n";
  for (const auto& e : experiments()) out << "  " << e.name << "  " << e.summary << "\n";
  return out.str();
}

ReportBundle run_case(const RunConfig& cfg) {
  validate(cfg);
  const auto& reg = registry();
  const auto it =
      std::find_if(reg.begin(), reg.end(), [&](const Experiment& e) { return e.info.name == cfg.experiment; });
  const std::vector<Job> jobs = it->jobs(cfg);
  std::vector<Piece> pieces = run_pool(jobs, cfg.seed);
  Piece table;
  if (!it->table.empty()) table = trace_table(pieces, it->table);
  ReportBundle bundle = merge(cfg, jobs, std::move(pieces));
  for (auto& f : table.files) bundle.files.push_back(std::move(f));
  if (cfg.output) bundle.write(*cfg.output);
  return bundle;
}

}  // namespace lapfol
