#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lapfol/fiber.hpp"
#include "lapfol/polyfun.hpp"

namespace lapfol {

/// Curve crossing every fiber of a 1-dimensional leaf space once:
/// point_at(x) is a point with ρ₁ = x, for x in [lo, hi].
struct Transversal {
  double lo = 0.0;
  double hi = 0.0;
  std::function<AmbientPoint(double)> point_at;
};

/// A catalog manifold submetry: a partition of the space into fibers, each
/// given by an explicit chart, together with polynomial quotient coordinates
/// whose level sets are the fibers.
class SubmetrySpec {
 public:
  virtual ~SubmetrySpec() = default;

  virtual std::string id() const = 0;
  const SpacePtr& space_ptr() const { return space_; }
  const SpaceModel& space() const { return *space_; }
  const std::vector<PolyFunction>& quotient_map() const { return rho_; }
  virtual std::string regular_set_description() const = 0;
  virtual int fiber_dim() const = 0;

  virtual FiberChart fiber_at(const AmbientPoint& p, int quadrature_order = 24) const = 0;
  virtual bool is_regular(const AmbientPoint& p) const = 0;
  /// Closed-form distance between the fibers through p and q.
  virtual double leaf_distance(const AmbientPoint& p, const AmbientPoint& q) const = 0;
  /// Point reflections that map fibers to fibers of a coarser partition
  /// (used as adversarial candidates when testing separation).
  virtual std::vector<AmbientPoint> companion_points(const AmbientPoint& p) const;

  virtual bool has_exact_average() const { return false; }
  virtual PolyFunction exact_average(const PolyFunction& f) const;
  virtual std::optional<Transversal> transversal() const { return std::nullopt; }

  /// Uniform sample from the regular set.
  AmbientPoint sample_regular(Rng& rng) const;
  Vec quotient_values(const AmbientPoint& p) const;

 protected:
  SpacePtr space_;
  std::vector<PolyFunction> rho_;
};

using SubmetryPtr = std::shared_ptr<const SubmetrySpec>;

/// "s2-latitude", "s2-fold", "s3-hopf", "s3-clifford", "t2-circles".
SubmetryPtr make_submetry(std::string_view id);
std::vector<std::string> submetry_ids();

/// Point of S² at height z with azimuth θ; point on a Clifford torus; these
/// helpers keep catalog fibers addressable from tests and experiments.
AmbientPoint s2_point(double z, double theta);
AmbientPoint clifford_point(double phi, double alpha, double beta);
/// Point of S³ in the Hopf fiber over u ∈ S² (h(p) = u), rotated by t.
AmbientPoint hopf_point(const Vec& u, double t);

// ---- averaging ----

struct NumericAverage {
  std::vector<AmbientPoint> points;
  std::vector<double> values;
  PolyFunction projected;   // rationalized E_λ-wise fit
  double fit_residual = 0;  // max |fit − values| over the points
  double rationalization_error = 0;
};

PolyFunction average_function(const PolyFunction& f, const SubmetrySpec& sigma);
NumericAverage average_function_numeric(const PolyFunction& f, const SubmetrySpec& sigma, int samples,
                                        std::uint64_t seed = kDefaultSeed);

struct CommutatorReport {
  bool exact = false;       // identity checked as PolyFunctions
  bool exact_zero = false;
  double residual = 0;      // sup over the grid
  double fit_residual = 0;  // numeric backend only
  int grid = 0;
};

CommutatorReport commutator_residual(const PolyFunction& f, const SubmetrySpec& sigma,
                                     const std::vector<AmbientPoint>& grid);
std::vector<AmbientPoint> sample_grid(const SubmetrySpec& sigma, int count, std::uint64_t seed = kDefaultSeed);

// ---- mean curvature ----

struct MeanCurvatureReport {
  std::vector<AmbientPoint> points;
  std::vector<Vec> H;
  std::vector<Vec> pushforward;
  double spread = 0;
};

MeanCurvatureReport basic_mean_curvature_report(const SubmetrySpec& sigma, const AmbientPoint& fiber_point,
                                                int samples);

// ---- the construction from an algebra ----

struct RankRegion {
  int m = 0;
  std::vector<int> ranks;
  std::vector<bool> maximal;
};

RankRegion regular_rank_region(const std::vector<PolyFunction>& rho, const std::vector<AmbientPoint>& samples);

struct InducedMetricReport {
  std::vector<AmbientPoint> points;
  std::vector<Mat> gram;
  double spread = 0;                     // max entrywise deviation across the fiber
  std::optional<double> quotient_length;  // 1-dimensional quotients only
};

InducedMetricReport induced_metric_check(const std::vector<PolyFunction>& rho, const SubmetrySpec& sigma,
                                         const AmbientPoint& fiber_point, int samples);

/// ∫ sqrt(b) over the transversal range, with b = 1/⟨∇ρ₁,∇ρ₁⟩.
double quotient_length(const PolyFunction& rho, const SubmetrySpec& sigma);

struct EquidistanceReport {
  double min = 0;
  double max = 0;
  double spread() const { return max - min; }
};

double distance_to_fiber(const FiberChart& chart, const AmbientPoint& x);
EquidistanceReport equidistance_check(const SubmetrySpec& sigma, const AmbientPoint& fiber1,
                                      const AmbientPoint& fiber2, int samples);

/// Max over samples of the spread of each ρ_i along the fiber through the sample.
double fiber_constancy(const std::vector<PolyFunction>& rho, const SubmetrySpec& sigma,
                       const std::vector<AmbientPoint>& samples, int per_fiber = 16);

/// Continued-fraction rationalization with denominator bound.
Rational rationalize(double x, long max_denominator = 1000000);

}  // namespace lapfol
