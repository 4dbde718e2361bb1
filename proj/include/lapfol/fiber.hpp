#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lapfol/polyfun.hpp"
#include "lapfol/spaces.hpp"

namespace lapfol {

/// Point, first derivatives (ambient × dim) and second derivatives
/// (index a * dim + b) of a chart at one parameter value.
struct ChartJet {
  Vec x;
  Mat d1;
  std::vector<Vec> d2;
};

/// One connected component of a fiber with its parameterization over
/// [0, 2π)^dim (all catalog fibers are points, circles or tori).
struct ChartPatch {
  std::function<Vec(const Vec& u)> map;
  std::function<ChartJet(const Vec& u)> jet;           // empty: finite differences
  std::function<Vec(const AmbientPoint& p)> inverse;   // empty: nearest node + refinement
};

/// A plane (i, j) in which a fiber component is a circle of the given radius,
/// rotating with parameter `param` from angle `phase`.
struct RotationPlane {
  int i = 0;
  int j = 1;
  double radius = 1.0;
  double phase = 0.0;
  int param = 0;
};

/// Closed-form patch: fixed coordinates of `base` plus rotating planes.
ChartPatch rotation_patch(const AmbientPoint& base, std::vector<RotationPlane> planes, int dim);

/// A parameterized fiber L_p: all components, a trapezoid quadrature exact
/// for trigonometric degree ≤ quadrature_order on each circle factor, and the
/// induced-volume weights.
class FiberChart {
 public:
  struct Node {
    int patch;
    Vec u;
    AmbientPoint x;
    double weight;  // induced volume element × parameter cell size
  };

  FiberChart(SpacePtr space, int dim, std::vector<ChartPatch> patches, int quadrature_order,
             std::optional<double> closed_form_volume = std::nullopt, bool singular = false);

  const SpaceModel& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  int dim() const { return dim_; }
  int patch_count() const { return static_cast<int>(patches_.size()); }
  int quadrature_order() const { return order_; }
  bool singular() const { return singular_; }

  AmbientPoint point(int patch, const Vec& u) const;
  ChartJet jet(int patch, const Vec& u) const;
  /// Central differences with Richardson refinement, step h.
  ChartJet jet_fd(int patch, const Vec& u, double h) const;
  bool has_analytic_jet(int patch) const { return static_cast<bool>(patches_[patch].jet); }

  const std::vector<Node>& nodes() const { return nodes_; }
  double volume() const { return volume_; }
  std::optional<double> closed_form_volume() const { return closed_volume_; }

  /// Patch and parameter of a point on the fiber.
  std::pair<int, Vec> locate(const AmbientPoint& p) const;
  /// `count` points spread evenly over the fiber (all patches).
  std::vector<std::pair<int, Vec>> spread_parameters(int count) const;

 private:
  SpacePtr space_;
  int dim_;
  std::vector<ChartPatch> patches_;
  int order_;
  std::optional<double> closed_volume_;
  bool singular_;
  std::vector<Node> nodes_;
  double volume_ = 0.0;
};

/// Volume-weighted fiber average by quadrature. Throws PreconditionError when
/// the polynomial degree exceeds the quadrature order (exactness not claimable).
double average(const PolyFunction& f, const FiberChart& chart);
double average(const NumericPolynomial& f, const FiberChart& chart);
double average(const std::function<double(const AmbientPoint&)>& f, const FiberChart& chart);

/// Mean curvature vector (trace of the second fundamental form) of the fiber
/// at a chart parameter. Zero for 0-dimensional fibers.
Vec mean_curvature(const FiberChart& chart, int patch, const Vec& u, bool finite_differences = false);
Vec mean_curvature(const FiberChart& chart, const AmbientPoint& p);

/// Orthonormal basis of T_pL (columns) from the chart jet.
Mat fiber_tangent_frame(const ChartJet& jet);

}  // namespace lapfol
