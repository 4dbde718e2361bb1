#include <doctest.h>

#include <omp.h>

#include "lapfol/focal.hpp"
#include "lapfol/kernels.hpp"
#include "lapfol/submetry.hpp"

using namespace lapfol;

// The machine running the suite may have a single core; force a team so the
// parallel path really splits the work.
struct ForceThreads {
  ForceThreads() { omp_set_num_threads(4); }
} const force_threads;

TEST_CASE("fiber_averages: serial and parallel agree bit for bit") {
  for (const auto& id : submetry_ids()) {
    const auto sigma = make_submetry(id);
    const auto pts = sample_grid(*sigma, 300);
    const NumericPolynomial f =
        reduce_canonical(sigma->space_ptr(), Polynomial::parse("x1^3 x2 - 2 x2^2 + x1 x3 + 1/7", sigma->space().ambient_dim()))
            .compiled();
    const auto a = fiber_averages(*sigma, f, pts, 12, Exec::Serial);
    const auto b = fiber_averages(*sigma, f, pts, 12, Exec::Parallel);
    CHECK(a == b);
    // And each entry is the chart quadrature through that point.
    for (std::size_t i = 0; i < pts.size(); i += 37) CHECK(a[i] == average(f, sigma->fiber_at(pts[i], 12)));
  }
}

TEST_CASE("evaluate_basis: serial and parallel agree bit for bit") {
  const auto s3 = make_space("s3");
  std::vector<NumericPolynomial> basis;
  for (const auto& f : monomial_basis(s3, 4)) basis.push_back(f.compiled());
  const auto pts = sample_grid(*make_submetry("s3-hopf"), 400);
  const Mat a = evaluate_basis(basis, pts, Exec::Serial);
  const Mat b = evaluate_basis(basis, pts, Exec::Parallel);
  REQUIRE(a.rows() == 400);
  REQUIRE(a.cols() == static_cast<Eigen::Index>(basis.size()));
  CHECK((a.array() == b.array()).all());
  CHECK(a(17, 3) == basis[3](std::span<const double>(pts[17].data(), 4)));
}

TEST_CASE("det_scan: serial and parallel agree bit for bit") {
  const auto cl = make_submetry("s3-clifford");
  const AmbientPoint p = clifford_point(0.4, 0.1, 0.2);
  const FiberChart chart = cl->fiber_at(p);
  const Vec v = horizontal_direction(*cl, chart, p, Vec::Ones(1));
  for (auto backend : {JacobiBackend::ClosedForm, JacobiBackend::Ode}) {
    const auto E = jacobi_fundamental(cl->space_ptr(), {p, v}, l_jacobi_system(chart, p, v), 10.0, backend);
    std::vector<double> ts;
    for (int i = 0; i <= 1000; ++i) ts.push_back(0.01 * i);
    const auto f = [&](double t) { return E->value(t); };
    const DetScan a = det_scan(f, ts, Exec::Serial), b = det_scan(f, ts, Exec::Parallel);
    CHECK(a.det == b.det);
    CHECK(a.smin == b.smin);
    CHECK(a.det[250] == E->value(ts[250]).determinant());
  }
}

TEST_CASE("map_points: serial and parallel agree bit for bit") {
  const auto lat = make_submetry("s2-latitude");
  const auto pts = sample_grid(*lat, 500);
  const auto f = [](const AmbientPoint& x) { return std::sin(x(0)) * std::exp(x(2)); };
  CHECK(map_points(f, pts, Exec::Serial) == map_points(f, pts, Exec::Parallel));
}

TEST_CASE("sample_grid is reproducible") {
  const auto hopf = make_submetry("s3-hopf");
  const auto a = sample_grid(*hopf, 50, 7), b = sample_grid(*hopf, 50, 7), c = sample_grid(*hopf, 50, 8);
  bool same = true, differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && (a[i].array() == b[i].array()).all();
    differ = differ || !(a[i].array() == c[i].array()).all();
  }
  CHECK(same);
  CHECK(differ);
}
