#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lapfol/errors.hpp"
#include "lapfol/focal.hpp"
#include "lapfol/spaces.hpp"

using namespace lapfol;

namespace {

constexpr double kPi = std::numbers::pi;

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Unit tangent at p orthogonal to v.
Vec orthogonal_tangent(const SpaceModel& s, const AmbientPoint& p, const Vec& v, Rng& rng) {
  for (;;) {
    Vec w = s.random_unit_tangent(p, rng);
    w -= v * v.dot(w);
    if (w.norm() > 1e-3) return w.normalized();
  }
}

}  // namespace

TEST_CASE("tangent_project examples") {
  const auto s2 = make_space("s2");
  CHECK((tangent_project(*s2, vec({0, 0, 1}), vec({1, 0, 5})).vec - vec({1, 0, 0})).norm() < 1e-15);
  CHECK(tangent_project(*s2, vec({0, 0, 1}), vec({0, 0, 3})).vec.norm() < 1e-15);
  const auto t2 = make_space("t2");
  CHECK((tangent_project(*t2, vec({1, 0, 1, 0}), vec({1, 1, 0, 1})).vec - vec({0, 1, 0, 1})).norm() < 1e-15);
  CHECK_THROWS_AS(tangent_project(*s2, vec({0, 0, 2}), vec({1, 0, 0})), DomainError);
}

TEST_CASE("tangent_project is idempotent") {
  Rng rng(1);
  for (const auto& id : SpaceModel::catalog_ids()) {
    const auto s = make_space(id);
    const AmbientPoint p = s->random_point(rng);
    Vec w = Vec::Random(s->ambient_dim());
    const Vec once = tangent_project(*s, p, w).vec;
    CHECK((tangent_project(*s, p, once).vec - once).norm() < 1e-14);
  }
}

TEST_CASE("geodesic examples") {
  const auto s2 = make_space("s2");
  CHECK((geodesic_eval(*s2, vec({0, 0, 1}), vec({1, 0, 0}), kPi / 2) - vec({1, 0, 0})).norm() < 1e-15);
  Rng rng(2);
  const AmbientPoint p = s2->random_point(rng);
  const Vec v = s2->random_unit_tangent(p, rng);
  CHECK((geodesic_eval(*s2, p, v, 2 * kPi) - p).norm() < 1e-14);
  CHECK_THROWS_AS(geodesic_eval(*s2, p, 2 * v, 1.0), DomainError);

  const auto ss = make_space("s2xs2");
  const AmbientPoint q = ss->random_point(rng);
  Vec u(6);
  u.head(3) = s2->random_unit_tangent(q.head(3), rng) / std::sqrt(2.0);
  u.tail(3) = s2->random_unit_tangent(q.tail(3), rng) / std::sqrt(2.0);
  CHECK((geodesic_eval(*ss, q, u, std::sqrt(2.0) * kPi) + q).norm() < 1e-14);
}

TEST_CASE("distance examples") {
  const auto s2 = make_space("s2");
  CHECK(distance(*s2, vec({0, 0, 1}), vec({0, 0, -1})) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(distance(*s2, vec({0, 0, 1}), vec({1, 0, 0})) == doctest::Approx(kPi / 2).epsilon(1e-15));
  const auto t2 = make_space("t2");
  CHECK(distance(*t2, vec({1, 0, 1, 0}), vec({0, -1, 1, 0})) == doctest::Approx(kPi / 2).epsilon(1e-15));
}

TEST_CASE("geodesic semigroup and distance along geodesics") {
  Rng rng(3);
  for (const auto& id : SpaceModel::catalog_ids()) {
    const auto s = make_space(id);
    for (int k = 0; k < 20; ++k) {
      const AmbientPoint p = s->random_point(rng);
      const Vec v = s->random_unit_tangent(p, rng);
      std::uniform_real_distribution<double> ud(-3, 3);
      const double t = ud(rng), r = ud(rng);
      const AmbientPoint mid = geodesic_eval(*s, p, v, t);
      const Vec vt = geodesic_velocity(*s, p, v, t);
      CHECK((geodesic_eval(*s, mid, vt, r) - geodesic_eval(*s, p, v, t + r)).norm() < 1e-12);
      // Below the injectivity radius of every factor.
      const double d = std::fabs(t) * 0.9;
      CHECK(std::fabs(distance(*s, p, geodesic_eval(*s, p, v, d)) - d) < 1e-10);
    }
  }
}

TEST_CASE("normal frames are orthonormal, normal to the velocity and parallel") {
  Rng rng(4);
  for (const auto& id : SpaceModel::catalog_ids()) {
    const auto s = make_space(id);
    const AmbientPoint p = s->random_point(rng);
    const Vec v = s->random_unit_tangent(p, rng);
    const GeodesicRay ray{p, v};
    for (double t : {0.0, 0.7, 2.5, -1.3}) {
      const Mat F = normal_frame(*s, ray, t);
      CHECK(F.cols() == s->intrinsic_dim() - 1);
      if (F.cols() == 0) continue;  // t1: no normal directions
      CHECK((F.transpose() * F - Mat::Identity(F.cols(), F.cols())).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((F.transpose() * geodesic_velocity(*s, p, v, t)).cwiseAbs().maxCoeff() < 1e-12);
      // Parallel: the covariant derivative is the tangential part of the ambient derivative.
      const double h = 1e-5;
      const Mat dF = (normal_frame(*s, ray, t + h) - normal_frame(*s, ray, t - h)) / (2 * h);
      const AmbientPoint c = geodesic_eval(*s, p, v, t);
      for (Eigen::Index j = 0; j < F.cols(); ++j) CHECK(tangent_project(*s, c, dF.col(j)).vec.norm() < 1e-8);
    }
  }
}

TEST_CASE("curvature operator examples") {
  Rng rng(5);
  const auto s3 = make_space("s3");
  const AmbientPoint p = s3->random_point(rng);
  const Vec v = s3->random_unit_tangent(p, rng);
  CHECK((curvature_along(*s3, {p, v}, 0.4) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  const auto t2 = make_space("t2");
  const AmbientPoint q = t2->random_point(rng);
  CHECK(curvature_along(*t2, {q, t2->random_unit_tangent(q, rng)}, 1.1).cwiseAbs().maxCoeff() < 1e-12);

  const auto ss = make_space("s2xs2");
  const AmbientPoint x = ss->random_point(rng);
  const double a = 0.6, b = 0.8;
  Vec u(6);
  u.head(3) = a * make_space("s2")->random_unit_tangent(x.head(3), rng);
  u.tail(3) = b * make_space("s2")->random_unit_tangent(x.tail(3), rng);
  const Mat K = curvature_along(*ss, {x, u}, 0.3);
  Eigen::SelfAdjointEigenSolver<Mat> es(K);
  const Vec ev = es.eigenvalues();
  CHECK(std::fabs(ev(0)) < 1e-12);
  CHECK(std::fabs(ev(1) - a * a) < 1e-12);
  CHECK(std::fabs(ev(2) - b * b) < 1e-12);
}

// Finite-difference Jacobi oracle: J(t) = ∂_s exp_p(t(cos s v + sin s w)) at
// s = 0 solves J'' + R(J, c')c' = 0 with J(0) = 0, J'(0) = w.
TEST_CASE("curvature and closed-form Jacobi fields agree with a geodesic-variation oracle") {
  Rng rng(6);
  for (const auto& id : {"s2", "s3", "s4", "t2", "s2xs2"}) {
    const auto s = make_space(id);
    for (int trial = 0; trial < 5; ++trial) {
      const AmbientPoint p = s->random_point(rng);
      const Vec v = s->random_unit_tangent(p, rng);
      const Vec w = orthogonal_tangent(*s, p, v, rng);
      const GeodesicRay ray{p, v};
      auto J = [&](double t) -> Vec {
        const double e = 1e-4;
        auto at = [&](double sh) {
          return geodesic_eval(*s, p, Vec(std::cos(sh) * v + std::sin(sh) * w), t);
        };
        const Vec d1 = (at(e) - at(-e)) / (2 * e), d2 = (at(e / 2) - at(-e / 2)) / e;
        return (4 * d2 - d1) / 3;
      };
      const Mat F0 = normal_frame(*s, ray, 0);
      const int m = s->intrinsic_dim() - 1;
      JacobiSystem J0{Mat::Zero(m, m), Mat::Identity(m, m), {}};
      const auto E = jacobi_fundamental(s, ray, J0, 5.0);
      const Vec w0 = F0.transpose() * w;
      for (double t : {0.5, 1.7, 3.9}) {
        const Mat F = normal_frame(*s, ray, t);
        const Vec coords = F.transpose() * J(t);
        CHECK((coords - E->value(t) * w0).norm() < 1e-6);
        // Second difference in t against −K J.
        const double h = 1e-3;
        const Vec jpp =
            (normal_frame(*s, ray, t + h).transpose() * J(t + h) - 2 * coords +
             normal_frame(*s, ray, t - h).transpose() * J(t - h)) /
            (h * h);
        CHECK((jpp + curvature_along(*s, ray, t) * coords).norm() < 1e-4);
      }
    }
  }
}

TEST_CASE("catalog ids") {
  CHECK_THROWS_AS(SpaceModel::from_id("s9"), ConfigError);
  const auto t2 = make_space("t2");
  CHECK(t2->intrinsic_dim() + t2->codim() == t2->ambient_dim());
  Rng rng(7);
  for (const auto& id : SpaceModel::catalog_ids()) {
    const auto s = make_space(id);
    CHECK(s->embedding_residual(s->random_point(rng)) < 1e-14);
  }
}
