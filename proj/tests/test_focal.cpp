#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lapfol/errors.hpp"
#include "lapfol/focal.hpp"
#include "lapfol/submetry.hpp"

using namespace lapfol;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> expand(const std::vector<FocalRoot>& roots) {
  std::vector<double> out;
  for (const auto& r : roots)
    for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.distance);
  std::sort(out.begin(), out.end());
  return out;
}

// {a + kπ} inside (0, T], and the mirror set {a − (k+1)π} inside [−T, 0).
std::vector<double> lattice(std::initializer_list<double> offsets, double T, int sign) {
  std::vector<double> out;
  for (double a : offsets)
    for (int k = -50; k <= 50; ++k) {
      const double x = a + k * kPi;
      if (sign > 0 ? (x > 1e-9 && x <= T) : (x < -1e-9 && x >= -T)) out.push_back(x);
    }
  std::sort(out.begin(), out.end());
  return out;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double g = 0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::fabs(a[i] - b[i]));
  return g;
}

struct Ray {
  FiberChart chart;
  AmbientPoint p;
  Vec v;
};

Ray latitude_ray(double phi) {
  const auto lat = make_submetry("s2-latitude");
  const AmbientPoint p = s2_point(std::cos(phi), 0.3);
  FiberChart chart = lat->fiber_at(p);
  const Vec v = horizontal_direction(*lat, chart, p, Vec::Ones(1));
  return {std::move(chart), p, v};
}

Ray clifford_ray(double phi) {
  const auto cl = make_submetry("s3-clifford");
  const AmbientPoint p = clifford_point(phi, 0.2, 0.5);
  FiberChart chart = cl->fiber_at(p);
  const Vec v = horizontal_direction(*cl, chart, p, Vec::Ones(1));
  return {std::move(chart), p, v};
}

Ray hopf_ray(Rng& rng) {
  const auto hopf = make_submetry("s3-hopf");
  const AmbientPoint p = hopf->sample_regular(rng);
  FiberChart chart = hopf->fiber_at(p);
  std::normal_distribution<double> n01;
  const Vec w = Vec::NullaryExpr(3, [&] { return n01(rng); });
  const Vec v = horizontal_direction(*hopf, chart, p, w);
  return {std::move(chart), p, v};
}

// A single point of S³ viewed as a 0-dimensional fiber: both normal
// Jacobi fields are sin t, so every focal root has multiplicity 2.
Ray point_fiber_ray(Rng& rng) {
  const auto s3 = make_space("s3");
  const AmbientPoint p = s3->random_point(rng);
  ChartPatch patch;
  patch.map = [p](const Vec&) { return p; };
  FiberChart chart(s3, 0, {patch}, 0, 1.0, true);
  return {std::move(chart), p, s3->random_unit_tangent(p, rng)};
}

}  // namespace

TEST_CASE("Jacobi fundamental solution examples") {
  Rng rng(51);
  for (auto backend : {JacobiBackend::ClosedForm, JacobiBackend::Ode}) {
    const auto s3 = make_space("s3");
    const AmbientPoint p = s3->random_point(rng);
    const GeodesicRay ray{p, s3->random_unit_tangent(p, rng)};
    const Mat I = Mat::Identity(2, 2), Z = Mat::Zero(2, 2);
    const auto C = jacobi_fundamental(s3, ray, {I, Z, {0, 1}}, 10, backend);
    const auto S = jacobi_fundamental(s3, ray, {Z, I, {0, 1}}, 10, backend);
    for (double t : {-9.0, -2.5, 0.0, 1.0, 4.2, 10.0}) {
      CHECK((C->value(t) - std::cos(t) * I).norm() < 1e-10);
      CHECK((C->derivative(t) + std::sin(t) * I).norm() < 1e-10);
      CHECK((S->value(t) - std::sin(t) * I).norm() < 1e-10);
    }
    const auto t2 = make_space("t2");
    const AmbientPoint q = t2->random_point(rng);
    const auto L = jacobi_fundamental(t2, {q, t2->random_unit_tangent(q, rng)}, {Mat::Zero(1, 1), Mat::Ones(1, 1), {0}},
                                      10, backend);
    CHECK(std::fabs(L->value(3.5)(0, 0) - 3.5) < 1e-10);
    if (backend == JacobiBackend::Ode) CHECK_THROWS_AS(L->value(10.5), DomainError);
  }
  const auto s2 = make_space("s2");
  CHECK_THROWS_AS(jacobi_fundamental(s2, {s2_point(0, 0), Vec::Unit(3, 2)}, {Mat::Zero(2, 2), Mat::Zero(2, 2), {}}, 1),
                  PreconditionError);
}

TEST_CASE("ODE and closed-form Jacobi fields agree on 50 rays") {
  Rng rng(52);
  const std::vector<std::string> ids = {"s2", "s3", "s4", "t2", "s2xs2"};
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(-10 + 0.5 * i);
  for (int k = 0; k < 50; ++k) {
    const auto s = make_space(ids[static_cast<std::size_t>(k) % ids.size()]);
    const AmbientPoint p = s->random_point(rng);
    const GeodesicRay ray{p, s->random_unit_tangent(p, rng)};
    const int m = s->intrinsic_dim() - 1;
    JacobiSystem J0{Mat::Random(m, m), Mat::Random(m, m), {}};
    for (int j = 0; j < m; ++j) J0.family.push_back(j);
    const auto C = jacobi_fundamental(s, ray, J0, 10);
    const auto O = jacobi_fundamental(s, ray, J0, 10, JacobiBackend::Ode);
    double err = 0;
    for (double t : times) {
      err = std::max(err, (C->value(t) - O->value(t)).cwiseAbs().maxCoeff());
      err = std::max(err, (C->derivative(t) - O->derivative(t)).cwiseAbs().maxCoeff());
      err = std::max(err, std::fabs(C->value(t).determinant() - O->value(t).determinant()));
    }
    CHECK(err < 1e-9);
    CHECK(wronskian_drift(*O, times) < 1e-9);
    CHECK(wronskian_drift(*C, times) < 1e-12);
  }
}

TEST_CASE("shape operator examples") {
  for (double phi : {0.4, 1.2, 2.5}) {
    const Ray r = latitude_ray(phi);
    const ShapeOperator S = shape_operator(r.chart, r.p, r.v);
    REQUIRE(S.matrix.rows() == 1);
    CHECK(std::fabs(S.matrix(0, 0)) == doctest::Approx(std::fabs(std::cos(phi) / std::sin(phi))).epsilon(1e-12));
    CHECK(S.trace() == doctest::Approx(mean_curvature(r.chart, r.p).dot(r.v)).epsilon(1e-12));
  }
  Rng rng(53);
  const Ray h = hopf_ray(rng);
  CHECK(shape_operator(h.chart, h.p, h.v).matrix.norm() < 1e-12);

  for (double phi : {0.3, kPi / 4, 1.1}) {
    const Ray r = clifford_ray(phi);
    const ShapeOperator S = shape_operator(r.chart, r.p, r.v);
    CHECK(S.symmetry_residual() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat> es(S.matrix);
    std::vector<double> got = {es.eigenvalues()(0), es.eigenvalues()(1)};
    std::vector<double> want = {1 / std::tan(phi), -std::tan(phi)};
    std::sort(want.begin(), want.end());
    std::vector<double> flipped = {-want[1], -want[0]};
    CHECK(std::min(max_gap(got, want), max_gap(got, flipped)) < 1e-12);
    const ShapeOperator F = shape_operator(r.chart, r.p, r.v, true);
    CHECK((F.matrix - S.matrix).norm() < 1e-6);
  }
}

TEST_CASE("normal direction is validated") {
  const Ray r = latitude_ray(1.0);
  const Vec tangent = fiber_tangent_frame(r.chart.jet(0, r.chart.locate(r.p).second)).col(0);
  CHECK_THROWS_AS(focal_spectrum(r.chart, r.p, tangent, 5), DomainError);
  CHECK_THROWS_AS(focal_spectrum(r.chart, r.p, r.v, 0), ConfigError);
  const auto lat = make_submetry("s2-latitude");
  CHECK_THROWS_AS(horizontal_direction(*lat, r.chart, r.p, Vec::Zero(1)), DomainError);
}

TEST_CASE("focal spectra examples") {
  for (double phi : {0.3, 1.0, 2.0}) {
    const Ray r = latitude_ray(phi);
    const FocalSpectrum s = focal_spectrum(r.chart, r.p, r.v, 20);
    CHECK(max_gap(expand(s.positive), lattice({phi}, 20, 1)) < 1e-8);
    CHECK(max_gap(expand(s.negative), lattice({phi}, 20, -1)) < 1e-8);
    for (const auto& x : s.positive) CHECK(x.multiplicity == 1);
    REQUIRE_FALSE(s.tail.empty());
    for (const auto& t : s.tail) CHECK(t.b == doctest::Approx(kPi).epsilon(1e-8));
    const std::string csv = spectrum_csv(s);
    CHECK(csv.rfind("signed_distance,multiplicity,family_id\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long>(s.positive.size() + s.negative.size() + 1));
  }
  Rng rng(54);
  {
    const Ray h = hopf_ray(rng);
    const FocalSpectrum s = focal_spectrum(h.chart, h.p, h.v, 10);
    CHECK(max_gap(expand(s.positive), lattice({0.0, kPi / 2}, 10, 1)) < 1e-8);
    CHECK(max_gap(expand(s.negative), lattice({0.0, kPi / 2}, 10, -1)) < 1e-8);
    CHECK(s.positive.size() == 6);
  }
  for (double phi : {0.3, kPi / 4, 1.2}) {
    const Ray r = clifford_ray(phi);
    const FocalSpectrum s = focal_spectrum(r.chart, r.p, r.v, 20);
    CHECK(max_gap(expand(s.positive), lattice({phi, phi + kPi / 2}, 20, 1)) < 1e-8);
    CHECK(max_gap(expand(s.negative), lattice({phi, phi + kPi / 2}, 20, -1)) < 1e-8);
    // Each tangent family shows up with its own period-π progression; the
    // window may cut one family a root earlier than the other.
    std::vector<int> fam;
    for (const auto& x : s.positive) fam.insert(fam.end(), x.families.begin(), x.families.end());
    CHECK(std::abs(std::count(fam.begin(), fam.end(), 0) - std::count(fam.begin(), fam.end(), 1)) <= 1);
  }
}

TEST_CASE("ODE backend reproduces the closed-form spectrum") {
  const Ray r = clifford_ray(0.7);
  const FocalSpectrum a = focal_spectrum(r.chart, r.p, r.v, 12);
  const FocalSpectrum b = focal_spectrum(r.chart, r.p, r.v, 12, {JacobiBackend::Ode, true});
  CHECK(max_gap(expand(a.positive), expand(b.positive)) < 1e-8);
  CHECK(max_gap(expand(a.negative), expand(b.negative)) < 1e-8);
}

TEST_CASE("multiplicity equals the order of the determinant zero") {
  Rng rng(55);
  std::vector<Ray> rays = {latitude_ray(0.8), clifford_ray(0.5), hopf_ray(rng), point_fiber_ray(rng)};
  for (const auto& r : rays) {
    const FocalSpectrum s = focal_spectrum(r.chart, r.p, r.v, 8, {JacobiBackend::ClosedForm, false});
    const auto E = jacobi_fundamental(r.chart.space_ptr(), {r.p, r.v}, l_jacobi_system(r.chart, r.p, r.v), 9);
    REQUIRE_FALSE(s.positive.empty());
    for (const auto& root : s.positive) {
      const double h = 1e-3;
      const double d1 = std::fabs(E->value(root.distance + h).determinant());
      const double d2 = std::fabs(E->value(root.distance + 2 * h).determinant());
      CHECK(std::log2(d2 / d1) == doctest::Approx(root.multiplicity).epsilon(0.05));
      CHECK(static_cast<int>(root.families.size()) == root.multiplicity);
    }
  }
  const Ray pf = point_fiber_ray(rng);
  const FocalSpectrum s = focal_spectrum(pf.chart, pf.p, pf.v, 10, {JacobiBackend::ClosedForm, false});
  REQUIRE(s.positive.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(s.positive[k].multiplicity == 2);
    CHECK(std::fabs(s.positive[k].distance - (k + 1) * kPi) < 1e-10);
  }
}

TEST_CASE("root count grows linearly with the window") {
  Rng rng(56);
  const Ray lat = latitude_ray(1.3);
  const Ray hopf = hopf_ray(rng);
  for (double T : {10.0, 20.0, 40.0}) {
    std::vector<std::string> w;
    const int n1 = static_cast<int>(focal_roots(lat.chart, lat.p, lat.v, T, JacobiBackend::ClosedForm, w).size());
    CHECK(std::abs(n1 - T / kPi) <= 1);
    int n2 = 0;
    for (const auto& r : focal_roots(hopf.chart, hopf.p, hopf.v, T, JacobiBackend::ClosedForm, w)) n2 += r.multiplicity;
    CHECK(std::abs(n2 - 2 * T / kPi) <= 2);
  }
}

TEST_CASE("trace examples") {
  for (double phi : {0.2, 0.9, 1.6, 2.9}) {
    const Ray r = latitude_ray(phi);
    const TraceEstimate t = trace_from_focal(focal_spectrum(r.chart, r.p, r.v, 20));
    CHECK(std::fabs(t.accelerated - std::cos(phi) / std::sin(phi)) < 1e-6);
    CHECK(t.pairs >= 6);
    CHECK(std::fabs(t.raw - std::cos(phi) / std::sin(phi)) < 0.1);
  }
  for (double phi : {0.3, 1.0}) {
    const Ray r = clifford_ray(phi);
    const TraceEstimate t = trace_from_focal(focal_spectrum(r.chart, r.p, r.v, 20));
    CHECK(std::fabs(t.accelerated - (1 / std::tan(phi) - std::tan(phi))) < 1e-6);
  }
  Rng rng(57);
  const Ray h = hopf_ray(rng);
  CHECK(std::fabs(trace_from_focal(focal_spectrum(h.chart, h.p, h.v, 20)).accelerated) < 1e-8);

  const Ray small = latitude_ray(1.0);
  CHECK_THROWS_AS(trace_from_focal(focal_spectrum(small.chart, small.p, small.v, 5)), PreconditionError);
  CHECK_THROWS_AS(trace_from_focal(focal_spectrum(small.chart, small.p, small.v, 20, {JacobiBackend::ClosedForm, false})),
                  TailModelError);
}

TEST_CASE("pairing robustness: an unpaired negative term does not move the accelerated sum") {
  Rng rng(58);
  std::vector<Ray> rays = {latitude_ray(0.7), latitude_ray(2.2), clifford_ray(0.4), hopf_ray(rng)};
  for (const auto& r : rays) {
    const FocalSpectrum s = focal_spectrum(r.chart, r.p, r.v, 25);
    const TraceEstimate a = trace_from_focal(s), b = trace_from_focal(s, 1);
    CHECK(std::fabs(a.accelerated - b.accelerated) < 1e-8);
    CHECK(std::fabs(a.raw - b.raw) > 1e-3);
  }
}

TEST_CASE("Euler series") {
  Rng rng(59);
  std::uniform_real_distribution<double> u(0.05, kPi - 0.05);
  for (int k = 0; k < 50; ++k) {
    const EulerSeries e = euler_series(u(rng), 2000);
    CHECK(e.residual_raw <= 1e-3);
    CHECK(e.residual_accelerated <= 1e-8);
  }
  CHECK(std::fabs(euler_series(kPi / 2, 100).accelerated) < 1e-12);
  CHECK(euler_series(kPi / 4, 0).partial == doctest::Approx(4 / kPi));
  CHECK_THROWS_AS(euler_series(0.0, 10), DomainError);
  CHECK_THROWS_AS(euler_series(kPi, 10), DomainError);
  CHECK_THROWS_AS(euler_series(1.0, -1), ConfigError);
}

TEST_CASE("focal data are basic") {
  Rng rng(60);
  const auto lat = make_submetry("s2-latitude");
  const AmbientPoint p1 = s2_point(0.4, 0.1), p2 = s2_point(0.4, 2.9);
  const FiberChart chart = lat->fiber_at(p1);
  const Vec v1 = horizontal_direction(*lat, chart, p1, Vec::Ones(1));
  const Vec v2 = horizontal_direction(*lat, chart, p2, Vec::Ones(1));
  const FocalDiff d = basic_focal_check(*lat, p1, v1, p2, v2, 20);
  CHECK(d.distance < 1e-8);
  CHECK(d.count1 == d.count2);
  CHECK(basic_focal_check(*lat, p1, v1, p1, v1, 20).distance == 0);
  CHECK_THROWS_AS(basic_focal_check(*lat, p1, v1, p2, Vec(-v2), 20), PreconditionError);
  CHECK_THROWS_AS(basic_focal_check(*lat, s2_point(1, 0), Vec::Unit(3, 0), s2_point(1, 0), Vec::Unit(3, 0), 20),
                  PreconditionError);

  const auto hopf = make_submetry("s3-hopf");
  for (int k = 0; k < 4; ++k) {
    const AmbientPoint q1 = hopf->sample_regular(rng);
    const FiberChart c = hopf->fiber_at(q1);
    const auto spread = c.spread_parameters(5);
    const AmbientPoint q2 = c.point(spread[3].first, spread[3].second);
    std::normal_distribution<double> n01;
    const Vec w = Vec::NullaryExpr(3, [&] { return n01(rng); });
    const FocalDiff h = basic_focal_check(*hopf, q1, horizontal_direction(*hopf, c, q1, w), q2,
                                          horizontal_direction(*hopf, c, q2, w), 20);
    CHECK(h.distance < 1e-8);
  }
}
