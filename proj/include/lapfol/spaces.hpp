#pragma once

#include <Eigen/Dense>

#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lapfol/config.hpp"

namespace lapfol {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// A point of the catalog space given by its ambient coordinates.
using AmbientPoint = Vec;

/// Tangent vector together with its base point, both ambient.
struct TangentVector {
  AmbientPoint base;
  Vec vec;
};

/// One round unit-sphere factor S^dim occupying ambient coordinates
/// [offset, offset + dim + 1). Circles are S^1 factors.
struct SphereFactor {
  int dim = 0;
  int offset = 0;
  int ambient() const { return dim + 1; }
};

/// A product of unit spheres (flat tori are products of S^1 factors) embedded
/// in Euclidean space block by block.
class SpaceModel {
 public:
  static SpaceModel sphere(int n);
  static SpaceModel torus(int m);
  static SpaceModel product(const SpaceModel& a, const SpaceModel& b);

  /// "s2", "s3", "s4", "t1", "t2", "s2xs2". Throws ConfigError otherwise.
  static SpaceModel from_id(std::string_view id);
  static std::vector<std::string> catalog_ids();

  const std::string& id() const { return id_; }
  int ambient_dim() const { return ambient_; }
  int intrinsic_dim() const { return intrinsic_; }
  int codim() const { return ambient_ - intrinsic_; }
  std::span<const SphereFactor> factors() const { return factors_; }
  int factor_of_coordinate(int i) const;

  /// max over factors of |‖p_b‖² − 1|.
  double embedding_residual(const AmbientPoint& p) const;
  bool contains(const AmbientPoint& p, double tol = default_tolerances().on_space) const;

  AmbientPoint random_point(Rng& rng) const;
  /// Uniformly random unit tangent vector at p.
  Vec random_unit_tangent(const AmbientPoint& p, Rng& rng) const;

  bool operator==(const SpaceModel& o) const { return id_ == o.id_; }

 private:
  std::string id_;
  int ambient_ = 0;
  int intrinsic_ = 0;
  std::vector<SphereFactor> factors_;
};

using SpacePtr = std::shared_ptr<const SpaceModel>;
SpacePtr make_space(std::string_view id);

/// Unit-speed geodesic ray c(t) = geodesic_eval(space, p, v, t).
struct GeodesicRay {
  AmbientPoint p;
  Vec v;
};

/// Orthogonal projection of w onto T_pM. Throws DomainError when p is off
/// the space.
TangentVector tangent_project(const SpaceModel& space, const AmbientPoint& p, const Vec& w);

/// Per-factor rotation by arclength. Throws DomainError when ‖v‖ != 1 or v
/// is not tangent at p.
AmbientPoint geodesic_eval(const SpaceModel& space, const AmbientPoint& p, const Vec& v, double t);
/// Velocity c'(t) of the same geodesic; it is the parallel transport of v.
Vec geodesic_velocity(const SpaceModel& space, const AmbientPoint& p, const Vec& v, double t);

double distance(const SpaceModel& space, const AmbientPoint& p, const AmbientPoint& q);

/// Parallel orthonormal basis of {c'(t)}^⊥ ∩ T_{c(t)}M as columns
/// (ambient_dim × (intrinsic_dim − 1)).
Mat normal_frame(const SpaceModel& space, const GeodesicRay& ray, double t);

/// The operator J ↦ R(J, c')c' in the basis returned by normal_frame.
Mat curvature_along(const SpaceModel& space, const GeodesicRay& ray, double t);

/// Riemann tensor R(x, y)z of the product metric, all arguments tangent at p.
Vec riemann(const SpaceModel& space, const AmbientPoint& p, const Vec& x, const Vec& y, const Vec& z);

/// Orthonormal completion: columns spanning the orthogonal complement of
/// span(given) in R^n, built deterministically from the standard basis.
Mat orthonormal_complement(const Mat& given, int n);

}  // namespace lapfol
