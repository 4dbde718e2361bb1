#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lapfol/fiber.hpp"
#include "lapfol/spaces.hpp"

namespace lapfol {

class SubmetrySpec;

// ---- Jacobi fields ----

/// Initial conditions of a family of Jacobi fields in the parallel frame
/// normal_frame(ray, 0): column j is the field with J(0) = value.col(j),
/// J'(0) = derivative.col(j). family[j] labels the column.
struct JacobiSystem {
  Mat value;
  Mat derivative;
  std::vector<int> family;
};

enum class JacobiBackend { ClosedForm, Ode };

/// Fundamental solution E(t) of J'' + K(t) J = 0 with E(0), E'(0) from J0,
/// valid on [−T, T].
class JacobiEvaluator {
 public:
  virtual ~JacobiEvaluator() = default;
  virtual Mat value(double t) const = 0;
  virtual Mat derivative(double t) const = 0;
  double window() const { return T_; }

 protected:
  double T_ = 0;
};

std::unique_ptr<JacobiEvaluator> jacobi_fundamental(SpacePtr space, const GeodesicRay& ray, const JacobiSystem& J0,
                                                    double T, JacobiBackend backend = JacobiBackend::ClosedForm);

/// Max over column pairs and times of |ω(J_a, J_b)(t) − ω(J_a, J_b)(0)| with
/// ω(X, Y) = ⟨X', Y⟩ − ⟨X, Y'⟩.
double wronskian_drift(const JacobiEvaluator& E, const std::vector<double>& times);

// ---- submanifold data ----

struct ShapeOperator {
  Mat matrix;         // in the orthonormal frame `tangent`
  Mat tangent;        // ambient × dim L
  double trace() const { return matrix.trace(); }
  double symmetry_residual() const { return (matrix - matrix.transpose()).cwiseAbs().maxCoeff(); }
};

/// A_v X = −(∇_X v)^T, from the chart's second derivatives: ⟨A_v X_a, X_b⟩ = ⟨X_ab, v⟩.
ShapeOperator shape_operator(const FiberChart& chart, const AmbientPoint& p, const Vec& v,
                             bool finite_differences = false);

/// The L-Jacobi family along the normal geodesic from p in direction v:
/// tangent columns J(0) = X, J'(0) = −A_v X for the eigenvectors of A_v, then
/// normal columns J(0) = 0, J'(0) = w for w ∈ ν_pL ∩ v^⊥.
JacobiSystem l_jacobi_system(const FiberChart& chart, const AmbientPoint& p, const Vec& v);

// ---- focal spectra ----

struct FocalRoot {
  double distance = 0;  // signed
  int multiplicity = 1;
  std::vector<int> families;
};

struct TailFit {
  int family = 0;
  int sign = 1;      // +1 positive side, −1 negative side (fit on |l|)
  double a = 0;      // |l_k| ≈ a + k b, k = 0, 1, ...
  double b = 0;
  double residual = 0;
  int count = 0;
};

struct FocalSpectrum {
  double window = 0;
  std::vector<FocalRoot> positive;  // ascending
  std::vector<FocalRoot> negative;  // descending (closest to 0 first)
  std::vector<TailFit> tail;
  std::vector<std::string> warnings;
  int total_multiplicity() const;
};

struct FocalOptions {
  JacobiBackend backend = JacobiBackend::ClosedForm;
  bool fit_tail = true;
};

FocalSpectrum focal_spectrum(const FiberChart& chart, const AmbientPoint& p, const Vec& v, double T,
                             const FocalOptions& opts = {});

/// Roots on (0, T] only, unsigned.
std::vector<FocalRoot> focal_roots(const FiberChart& chart, const AmbientPoint& p, const Vec& v, double T,
                                   JacobiBackend backend, std::vector<std::string>& warnings);

struct TraceEstimate {
  double raw = 0;
  double accelerated = 0;
  double tail = 0;
  double tail_bound = 0;
  int pairs = 0;
};

/// Pairs the k-th positive with the k-th negative focal distance (counted
/// with multiplicity). `extra_negative` adds that many unpaired negative terms
/// to the raw sum; the accelerated value accounts for them.
TraceEstimate trace_from_focal(const FocalSpectrum& spec, int extra_negative = 0);

struct EulerSeries {
  double partial = 0;
  double accelerated = 0;
  double residual_raw = 0;
  double residual_accelerated = 0;
};

/// Σ_{n=−N}^{N} 1/(φ + nπ) and its digamma-completed limit, against cot φ.
EulerSeries euler_series(double phi, int N);

struct FocalDiff {
  double distance = 0;  // max gap between sorted multiplicity-expanded lists; inf if counts differ
  int count1 = 0;
  int count2 = 0;
};

/// Spectra at (p1, v1) and (p2, v2) on the same regular fiber with dρ(v1) = dρ(v2).
FocalDiff basic_focal_check(const SubmetrySpec& sigma, const AmbientPoint& p1, const Vec& v1, const AmbientPoint& p2,
                            const Vec& v2, double T);

/// Unit normal at p moving toward larger values of the quotient coordinate i
/// (horizontal part of ∇ρ_i, normalized).
Vec horizontal_direction(const SubmetrySpec& sigma, const FiberChart& chart, const AmbientPoint& p,
                         const Vec& weights);

/// Spectrum as CSV rows: signed_distance, multiplicity, family_id.
std::string spectrum_csv(const FocalSpectrum& spec);

}  // namespace lapfol
