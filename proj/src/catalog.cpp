#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "lapfol/errors.hpp"
#include "lapfol/submetry.hpp"

namespace lapfol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleTol = 1e-12;
constexpr double kRegularMargin = 1e-9;

double clamp1(double x) { return std::clamp(x, -1.0, 1.0); }

double wrapped(double a) {
  a = std::fmod(std::fabs(a), 2 * kPi);
  return std::min(a, 2 * kPi - a);
}

PolyFunction parse_on(const SpacePtr& s, const char* text) { return PolyFunction::parse(s, text); }

// Average of a polynomial over circles in the given coordinate planes, all
// other coordinates held fixed: x_i^a x_j^b ↦ m(a, b) (x_i² + x_j²)^{(a+b)/2}.
Polynomial average_over_planes(const Polynomial& p, const std::vector<std::pair<int, int>>& planes) {
  const int n = p.nvars();
  Polynomial out(n);
  for (const auto& [m, c] : p.terms()) {
    Polynomial term = Polynomial::constant(n, c);
    Monomial rest = m;
    bool zero = false;
    for (const auto& [i, j] : planes) {
      const int a = m.exponent(i), b = m.exponent(j);
      rest = rest.with_exponent(i, 0).with_exponent(j, 0);
      if (a % 2 || b % 2) {
        zero = true;
        break;
      }
      const int e[2] = {a, b};
      Polynomial r2 = Polynomial::monomial(n, Monomial::variable(i, 2)) + Polynomial::monomial(n, Monomial::variable(j, 2));
      term = term * r2.pow((a + b) / 2) * sphere_moment(1, e);
    }
    if (zero) continue;
    out += term * Polynomial::monomial(n, rest);
  }
  return out;
}

Polynomial reflect(const Polynomial& p, int i) {
  Polynomial out(p.nvars());
  for (const auto& [m, c] : p.terms()) out.add_term(m, m.exponent(i) % 2 ? Rational(-c) : c);
  return out;
}

FiberChart point_fiber(const SpacePtr& space, std::vector<AmbientPoint> points) {
  std::vector<ChartPatch> patches;
  for (auto& q : points) {
    ChartPatch pt;
    pt.map = [q](const Vec&) { return q; };
    patches.push_back(std::move(pt));
  }
  return FiberChart(space, 0, std::move(patches), 0, static_cast<double>(points.size()), true);
}

// ---- S² latitude circles, ρ = z ----

class Latitude : public SubmetrySpec {
 public:
  Latitude() {
    space_ = make_space("s2");
    rho_ = {parse_on(space_, "z")};
  }
  std::string id() const override { return "s2-latitude"; }
  std::string regular_set_description() const override { return "|z| < 1 (poles are point fibers)"; }
  int fiber_dim() const override { return 1; }

  FiberChart fiber_at(const AmbientPoint& p, int q) const override {
    const double r = std::hypot(p(0), p(1));
    if (r < kPoleTol) return point_fiber(space_, {p});
    const double phase = std::atan2(p(1), p(0));
    return FiberChart(space_, 1, {rotation_patch(p, {{0, 1, r, phase, 0}}, 1)}, q, 2 * kPi * r);
  }
  bool is_regular(const AmbientPoint& p) const override { return std::fabs(p(2)) < 1 - kRegularMargin; }
  double leaf_distance(const AmbientPoint& p, const AmbientPoint& q) const override {
    return std::fabs(std::acos(clamp1(p(2))) - std::acos(clamp1(q(2))));
  }
  std::vector<AmbientPoint> companion_points(const AmbientPoint& p) const override {
    AmbientPoint r = p;
    r(2) = -r(2);
    return {r, AmbientPoint(-p)};
  }
  bool has_exact_average() const override { return true; }
  PolyFunction exact_average(const PolyFunction& f) const override {
    return reduce_canonical(space_, average_over_planes(f.ambient(), {{0, 1}}));
  }
  std::optional<Transversal> transversal() const override {
    return Transversal{-1.0, 1.0, [](double x) { return s2_point(x, 0.0); }};
  }
};

// ---- S² fold: fibers {z = ±a}, ρ = z² ----

class Fold : public SubmetrySpec {
 public:
  Fold() {
    space_ = make_space("s2");
    rho_ = {parse_on(space_, "z^2")};
  }
  std::string id() const override { return "s2-fold"; }
  std::string regular_set_description() const override {
    return "0 < |z| < 1 (the equator and the pole pair are singular fibers)";
  }
  int fiber_dim() const override { return 1; }

  FiberChart fiber_at(const AmbientPoint& p, int q) const override {
    const double r = std::hypot(p(0), p(1));
    AmbientPoint mirror = p;
    mirror(2) = -p(2);
    if (r < kPoleTol) return point_fiber(space_, {p, mirror});
    const double phase = std::atan2(p(1), p(0));
    if (std::fabs(p(2)) < kPoleTol)
      return FiberChart(space_, 1, {rotation_patch(p, {{0, 1, r, phase, 0}}, 1)}, q, 2 * kPi * r, true);
    return FiberChart(space_, 1,
                      {rotation_patch(p, {{0, 1, r, phase, 0}}, 1), rotation_patch(mirror, {{0, 1, r, phase, 0}}, 1)},
                      q, 4 * kPi * r);
  }
  bool is_regular(const AmbientPoint& p) const override {
    const double z = std::fabs(p(2));
    return z > kRegularMargin && z < 1 - kRegularMargin;
  }
  double leaf_distance(const AmbientPoint& p, const AmbientPoint& q) const override {
    return std::fabs(std::acos(clamp1(std::fabs(p(2)))) - std::acos(clamp1(std::fabs(q(2)))));
  }
  std::vector<AmbientPoint> companion_points(const AmbientPoint& p) const override {
    AmbientPoint r = p;
    r(2) = -r(2);
    return {r, AmbientPoint(-p)};
  }
  bool has_exact_average() const override { return true; }
  PolyFunction exact_average(const PolyFunction& f) const override {
    Polynomial lat = average_over_planes(f.ambient(), {{0, 1}});
    return reduce_canonical(space_, (lat + reflect(lat, 2)) * Rational(1, 2));
  }
  std::optional<Transversal> transversal() const override {
    return Transversal{0.0, 1.0, [](double x) { return s2_point(std::sqrt(std::max(x, 0.0)), 0.0); }};
  }
};

// ---- S³ Hopf fibration, ρ = (h1, h2, h3) ----

class Hopf : public SubmetrySpec {
 public:
  Hopf() {
    space_ = make_space("s3");
    rho_ = {parse_on(space_, "x1^2 + x2^2 - x3^2 - x4^2"), parse_on(space_, "2 x1 x3 + 2 x2 x4"),
            parse_on(space_, "2 x1 x4 - 2 x2 x3")};
  }
  std::string id() const override { return "s3-hopf"; }
  std::string regular_set_description() const override { return "all of S^3 (every fiber is a great circle)"; }
  int fiber_dim() const override { return 1; }

  FiberChart fiber_at(const AmbientPoint& p, int q) const override {
    const double r1 = std::hypot(p(0), p(1)), r2 = std::hypot(p(2), p(3));
    std::vector<RotationPlane> planes;
    if (r1 > 0) planes.push_back({0, 1, r1, std::atan2(p(1), p(0)), 0});
    if (r2 > 0) planes.push_back({2, 3, r2, std::atan2(p(3), p(2)), 0});
    return FiberChart(space_, 1, {rotation_patch(p, planes, 1)}, q, 2 * kPi);
  }
  bool is_regular(const AmbientPoint&) const override { return true; }
  double leaf_distance(const AmbientPoint& p, const AmbientPoint& q) const override {
    const Vec a = quotient_values(p), b = quotient_values(q);
    return 0.5 * std::acos(clamp1(a.dot(b) / (a.norm() * b.norm())));
  }
  std::vector<AmbientPoint> companion_points(const AmbientPoint& p) const override {
    AmbientPoint c = p;
    c(1) = -c(1);
    c(3) = -c(3);
    AmbientPoint s(4);
    s << p(2), p(3), p(0), p(1);
    return {c, s};
  }
};

// ---- S³ Clifford tori, ρ = h1 ----

class Clifford : public SubmetrySpec {
 public:
  Clifford() {
    space_ = make_space("s3");
    rho_ = {parse_on(space_, "x1^2 + x2^2 - x3^2 - x4^2")};
  }
  std::string id() const override { return "s3-clifford"; }
  std::string regular_set_description() const override {
    return "0 < phi < pi/2 (the two core circles are singular fibers)";
  }
  int fiber_dim() const override { return 2; }

  FiberChart fiber_at(const AmbientPoint& p, int q) const override {
    const double ru = std::hypot(p(0), p(1)), rw = std::hypot(p(2), p(3));
    if (rw < kPoleTol)
      return FiberChart(space_, 1, {rotation_patch(p, {{0, 1, ru, std::atan2(p(1), p(0)), 0}}, 1)}, q, 2 * kPi * ru,
                        true);
    if (ru < kPoleTol)
      return FiberChart(space_, 1, {rotation_patch(p, {{2, 3, rw, std::atan2(p(3), p(2)), 0}}, 1)}, q, 2 * kPi * rw,
                        true);
    return FiberChart(space_, 2,
                      {rotation_patch(p, {{0, 1, ru, std::atan2(p(1), p(0)), 0}, {2, 3, rw, std::atan2(p(3), p(2)), 1}},
                                      2)},
                      q, 4 * kPi * kPi * ru * rw);
  }
  bool is_regular(const AmbientPoint& p) const override {
    return std::hypot(p(0), p(1)) > kRegularMargin && std::hypot(p(2), p(3)) > kRegularMargin;
  }
  double leaf_distance(const AmbientPoint& p, const AmbientPoint& q) const override {
    auto phi = [](const AmbientPoint& x) { return std::atan2(std::hypot(x(2), x(3)), std::hypot(x(0), x(1))); };
    return std::fabs(phi(p) - phi(q));
  }
  std::vector<AmbientPoint> companion_points(const AmbientPoint& p) const override {
    AmbientPoint s(4);
    s << p(2), p(3), p(0), p(1);
    return {s, AmbientPoint(-p)};
  }
  bool has_exact_average() const override { return true; }
  PolyFunction exact_average(const PolyFunction& f) const override {
    return reduce_canonical(space_, average_over_planes(f.ambient(), {{0, 1}, {2, 3}}));
  }
  std::optional<Transversal> transversal() const override {
    return Transversal{-1.0, 1.0, [](double x) { return clifford_point(0.5 * std::acos(clamp1(x)), 0, 0); }};
  }
};

// ---- T² parallel circles, ρ = (c1, s1) ----

class TorusCircles : public SubmetrySpec {
 public:
  TorusCircles() {
    space_ = make_space("t2");
    rho_ = {parse_on(space_, "c1"), parse_on(space_, "s1")};
  }
  std::string id() const override { return "t2-circles"; }
  std::string regular_set_description() const override { return "all of T^2"; }
  int fiber_dim() const override { return 1; }

  FiberChart fiber_at(const AmbientPoint& p, int q) const override {
    return FiberChart(space_, 1, {rotation_patch(p, {{2, 3, 1.0, std::atan2(p(3), p(2)), 0}}, 1)}, q, 2 * kPi);
  }
  bool is_regular(const AmbientPoint&) const override { return true; }
  double leaf_distance(const AmbientPoint& p, const AmbientPoint& q) const override {
    return wrapped(std::atan2(p(1), p(0)) - std::atan2(q(1), q(0)));
  }
  std::vector<AmbientPoint> companion_points(const AmbientPoint& p) const override {
    AmbientPoint r = p;
    r(1) = -r(1);
    return {r};
  }
  bool has_exact_average() const override { return true; }
  PolyFunction exact_average(const PolyFunction& f) const override {
    return reduce_canonical(space_, average_over_planes(f.ambient(), {{2, 3}}));
  }
};

}  // namespace

AmbientPoint s2_point(double z, double theta) {
  const double r = std::sqrt(std::max(0.0, 1 - z * z));
  AmbientPoint p(3);
  p << r * std::cos(theta), r * std::sin(theta), z;
  return p;
}

AmbientPoint clifford_point(double phi, double alpha, double beta) {
  AmbientPoint p(4);
  p << std::cos(phi) * std::cos(alpha), std::cos(phi) * std::sin(alpha), std::sin(phi) * std::cos(beta),
      std::sin(phi) * std::sin(beta);
  return p;
}

AmbientPoint hopf_point(const Vec& u, double t) {
  // h2 − i h3 = 2 z1 conj(z2) with z1 = x1 + i x2, z2 = x3 + i x4.
  const Vec w = u / u.norm();
  std::complex<double> z1, z2;
  const double a = std::sqrt(std::max(0.0, (1 + w(0)) / 2));
  if (a > 1e-12) {
    z1 = a;
    z2 = std::complex<double>(w(1), w(2)) / (2 * a);
  } else {
    z1 = 0;
    z2 = 1;
  }
  const std::complex<double> e = std::polar(1.0, t);
  z1 *= e;
  z2 *= e;
  AmbientPoint p(4);
  p << z1.real(), z1.imag(), z2.real(), z2.imag();
  return p / p.norm();
}

SubmetryPtr make_submetry(std::string_view id) {
  if (id == "s2-latitude") return std::make_shared<Latitude>();
  if (id == "s2-fold") return std::make_shared<Fold>();
  if (id == "s3-hopf") return std::make_shared<Hopf>();
  if (id == "s3-clifford") return std::make_shared<Clifford>();
  if (id == "t2-circles") return std::make_shared<TorusCircles>();
  throw ConfigError("unknown submetry id '" + std::string(id) + "'");
}

std::vector<std::string> submetry_ids() {
  return {"s2-fold", "s2-latitude", "s3-clifford", "s3-hopf", "t2-circles"};
}

}  // namespace lapfol
