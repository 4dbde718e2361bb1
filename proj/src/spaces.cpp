#include "lapfol/spaces.hpp"

#include <cmath>
#include <sstream>

#include "lapfol/errors.hpp"

namespace lapfol {

namespace {

constexpr double kStaticSpeed = 1e-15;

void require_on_space(const SpaceModel& space, const AmbientPoint& p) {
  if (p.size() != space.ambient_dim()) {
    throw DomainError("point has " + std::to_string(p.size()) + " coordinates, " + space.id() +
                      " expects " + std::to_string(space.ambient_dim()));
  }
  if (!space.contains(p)) {
    std::ostringstream os;
    os << "point off " << space.id() << " (embedding residual " << space.embedding_residual(p) << ")";
    throw DomainError(os.str());
  }
}

void require_unit_tangent(const SpaceModel& space, const AmbientPoint& p, const Vec& v) {
  const auto& tol = default_tolerances();
  if (v.size() != space.ambient_dim()) throw DomainError("direction has wrong dimension");
  if (std::abs(v.norm() - 1.0) > tol.unit_speed) {
    std::ostringstream os;
    os << "geodesic direction is not unit (|v| = " << v.norm() << ")";
    throw DomainError(os.str());
  }
  for (const auto& f : space.factors()) {
    double radial = p.segment(f.offset, f.ambient()).dot(v.segment(f.offset, f.ambient()));
    if (std::abs(radial) > tol.tangency) throw DomainError("geodesic direction is not tangent");
  }
}

}  // namespace

SpaceModel SpaceModel::sphere(int n) {
  if (n < 1) throw ConfigError("sphere dimension must be positive");
  SpaceModel s;
  s.id_ = n == 1 ? "t1" : "s" + std::to_string(n);
  s.factors_.push_back({n, 0});
  s.ambient_ = n + 1;
  s.intrinsic_ = n;
  return s;
}

SpaceModel SpaceModel::torus(int m) {
  if (m < 1) throw ConfigError("torus dimension must be positive");
  SpaceModel s;
  s.id_ = "t" + std::to_string(m);
  for (int i = 0; i < m; ++i) s.factors_.push_back({1, 2 * i});
  s.ambient_ = 2 * m;
  s.intrinsic_ = m;
  return s;
}

SpaceModel SpaceModel::product(const SpaceModel& a, const SpaceModel& b) {
  SpaceModel s;
  s.id_ = a.id_ + "x" + b.id_;
  s.factors_ = a.factors_;
  for (auto f : b.factors_) {
    f.offset += a.ambient_;
    s.factors_.push_back(f);
  }
  s.ambient_ = a.ambient_ + b.ambient_;
  s.intrinsic_ = a.intrinsic_ + b.intrinsic_;
  return s;
}

SpaceModel SpaceModel::from_id(std::string_view id) {
  if (id == "s2") return sphere(2);
  if (id == "s3") return sphere(3);
  if (id == "s4") return sphere(4);
  if (id == "t1") return torus(1);
  if (id == "t2") return torus(2);
  if (id == "s2xs2") return product(sphere(2), sphere(2));
  throw ConfigError("unknown space id '" + std::string(id) + "'");
}

std::vector<std::string> SpaceModel::catalog_ids() { return {"s2", "s3", "s4", "t1", "t2", "s2xs2"}; }

SpacePtr make_space(std::string_view id) { return std::make_shared<const SpaceModel>(SpaceModel::from_id(id)); }

int SpaceModel::factor_of_coordinate(int i) const {
  for (std::size_t b = 0; b < factors_.size(); ++b) {
    if (i >= factors_[b].offset && i < factors_[b].offset + factors_[b].ambient()) return static_cast<int>(b);
  }
  throw DomainError("coordinate index out of range");
}

double SpaceModel::embedding_residual(const AmbientPoint& p) const {
  double r = 0.0;
  for (const auto& f : factors_) r = std::max(r, std::abs(p.segment(f.offset, f.ambient()).squaredNorm() - 1.0));
  return r;
}

bool SpaceModel::contains(const AmbientPoint& p, double tol) const {
  return p.size() == ambient_ && embedding_residual(p) <= tol;
}

AmbientPoint SpaceModel::random_point(Rng& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  AmbientPoint p(ambient_);
  for (const auto& f : factors_) {
    Vec x(f.ambient());
    do {
      for (int i = 0; i < f.ambient(); ++i) x[i] = gauss(rng);
    } while (x.norm() < 1e-6);
    p.segment(f.offset, f.ambient()) = x.normalized();
  }
  return p;
}

Vec SpaceModel::random_unit_tangent(const AmbientPoint& p, Rng& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Vec w(ambient_);
    for (int i = 0; i < ambient_; ++i) w[i] = gauss(rng);
    Vec t = tangent_project(*this, p, w).vec;
    if (t.norm() > 1e-6) return t.normalized();
  }
}

TangentVector tangent_project(const SpaceModel& space, const AmbientPoint& p, const Vec& w) {
  require_on_space(space, p);
  if (w.size() != space.ambient_dim()) throw DomainError("vector has wrong dimension");
  Vec out = w;
  for (const auto& f : space.factors()) {
    auto pb = p.segment(f.offset, f.ambient());
    auto ob = out.segment(f.offset, f.ambient());
    // p_b is unit only up to rounding; divide by its squared norm so the
    // projection is exactly idempotent in exact arithmetic.
    ob -= (pb.dot(ob) / pb.squaredNorm()) * pb;
  }
  return {p, out};
}

AmbientPoint geodesic_eval(const SpaceModel& space, const AmbientPoint& p, const Vec& v, double t) {
  require_on_space(space, p);
  require_unit_tangent(space, p, v);
  AmbientPoint out(p.size());
  for (const auto& f : space.factors()) {
    auto pb = p.segment(f.offset, f.ambient());
    auto vb = v.segment(f.offset, f.ambient());
    double s = vb.norm();
    if (s < kStaticSpeed) {
      out.segment(f.offset, f.ambient()) = pb;
    } else {
      out.segment(f.offset, f.ambient()) = std::cos(s * t) * pb + (std::sin(s * t) / s) * vb;
    }
  }
  return out;
}

Vec geodesic_velocity(const SpaceModel& space, const AmbientPoint& p, const Vec& v, double t) {
  require_on_space(space, p);
  require_unit_tangent(space, p, v);
  Vec out(p.size());
  for (const auto& f : space.factors()) {
    auto pb = p.segment(f.offset, f.ambient());
    auto vb = v.segment(f.offset, f.ambient());
    double s = vb.norm();
    if (s < kStaticSpeed) {
      out.segment(f.offset, f.ambient()) = vb;
    } else {
      out.segment(f.offset, f.ambient()) = -s * std::sin(s * t) * pb + std::cos(s * t) * vb;
    }
  }
  return out;
}

double distance(const SpaceModel& space, const AmbientPoint& p, const AmbientPoint& q) {
  require_on_space(space, p);
  require_on_space(space, q);
  double sum = 0.0;
  for (const auto& f : space.factors()) {
    auto pb = p.segment(f.offset, f.ambient());
    auto qb = q.segment(f.offset, f.ambient());
    double angle = 2.0 * std::atan2((pb - qb).norm(), (pb + qb).norm());
    sum += angle * angle;
  }
  return std::sqrt(sum);
}

Mat orthonormal_complement(const Mat& given, int n) {
  std::vector<Vec> basis;
  auto add = [&](Vec x) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) x -= b.dot(x) * b;
    }
    double nrm = x.norm();
    if (nrm > 1e-6) {
      basis.push_back(x / nrm);
      return true;
    }
    return false;
  };
  for (int j = 0; j < given.cols(); ++j) add(given.col(j));
  const std::size_t first = basis.size();
  for (int i = 0; i < n && static_cast<int>(basis.size()) < n; ++i) add(Vec::Unit(n, i));
  Mat out(n, static_cast<int>(basis.size() - first));
  for (std::size_t j = first; j < basis.size(); ++j) out.col(static_cast<int>(j - first)) = basis[j];
  return out;
}

Mat normal_frame(const SpaceModel& space, const GeodesicRay& ray, double t) {
  require_on_space(space, ray.p);
  require_unit_tangent(space, ray.p, ray.v);
  const int n = space.ambient_dim();
  std::vector<Vec> cols;
  std::vector<int> moving;
  std::vector<double> speeds;
  for (std::size_t b = 0; b < space.factors().size(); ++b) {
    const auto& f = space.factors()[b];
    Vec pb = ray.p.segment(f.offset, f.ambient());
    Vec vb = ray.v.segment(f.offset, f.ambient());
    double s = vb.norm();
    Mat span_given(f.ambient(), s < kStaticSpeed ? 1 : 2);
    span_given.col(0) = pb;
    if (s >= kStaticSpeed) {
      span_given.col(1) = vb / s;
      moving.push_back(static_cast<int>(b));
      speeds.push_back(s);
    }
    // Directions orthogonal to p_b and the factor velocity stay fixed along
    // a great circle, and the whole tangent space is fixed on a static factor.
    Mat comp = orthonormal_complement(span_given, f.ambient());
    for (int j = 0; j < comp.cols(); ++j) {
      Vec c = Vec::Zero(n);
      c.segment(f.offset, f.ambient()) = comp.col(j);
      cols.push_back(c);
    }
  }
  if (moving.size() > 1) {
    Mat sv(static_cast<int>(moving.size()), 1);
    for (std::size_t i = 0; i < moving.size(); ++i) sv(static_cast<int>(i), 0) = speeds[i];
    Mat mix = orthonormal_complement(sv, static_cast<int>(moving.size()));
    for (int j = 0; j < mix.cols(); ++j) {
      Vec c = Vec::Zero(n);
      for (std::size_t i = 0; i < moving.size(); ++i) {
        const auto& f = space.factors()[moving[i]];
        double s = speeds[i];
        Vec pb = ray.p.segment(f.offset, f.ambient());
        Vec ub = ray.v.segment(f.offset, f.ambient()) / s;
        c.segment(f.offset, f.ambient()) = mix(static_cast<int>(i), j) * (-std::sin(s * t) * pb + std::cos(s * t) * ub);
      }
      cols.push_back(c);
    }
  }
  Mat frame(n, static_cast<int>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) frame.col(static_cast<int>(j)) = cols[j];
  return frame;
}

Vec riemann(const SpaceModel& space, const AmbientPoint& p, const Vec& x, const Vec& y, const Vec& z) {
  (void)p;
  Vec out = Vec::Zero(space.ambient_dim());
  for (const auto& f : space.factors()) {
    auto xb = x.segment(f.offset, f.ambient());
    auto yb = y.segment(f.offset, f.ambient());
    auto zb = z.segment(f.offset, f.ambient());
    out.segment(f.offset, f.ambient()) = yb.dot(zb) * xb - xb.dot(zb) * yb;
  }
  return out;
}

Mat curvature_along(const SpaceModel& space, const GeodesicRay& ray, double t) {
  Mat frame = normal_frame(space, ray, t);
  AmbientPoint c = geodesic_eval(space, ray.p, ray.v, t);
  Vec dc = geodesic_velocity(space, ray.p, ray.v, t);
  const int k = static_cast<int>(frame.cols());
  Mat r(k, k);
  for (int j = 0; j < k; ++j) {
    Vec rj = riemann(space, c, frame.col(j), dc, dc);
    for (int i = 0; i < k; ++i) r(i, j) = frame.col(i).dot(rj);
  }
  return 0.5 * (r + r.transpose());
}

}  // namespace lapfol
