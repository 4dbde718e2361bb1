#pragma once

#include <functional>
#include <vector>

#include "lapfol/polynomial.hpp"
#include "lapfol/spaces.hpp"

namespace lapfol {

class SubmetrySpec;

/// Serial loops are the reference; Parallel runs the same per-item work
/// under OpenMP and writes each result to its own slot, so both produce
/// bit-identical output.
enum class Exec { Serial, Parallel };

/// Fiber average of f through each point (trapezoid quadrature of the given order).
std::vector<double> fiber_averages(const SubmetrySpec& sigma, const NumericPolynomial& f,
                                   const std::vector<AmbientPoint>& points, int order, Exec exec = Exec::Parallel);

/// Row i, column j: basis[j](points[i]).
Mat evaluate_basis(const std::vector<NumericPolynomial>& basis, const std::vector<AmbientPoint>& points,
                   Exec exec = Exec::Parallel);

/// det E(t) and the smallest singular value of E(t) on a grid of times.
struct DetScan {
  std::vector<double> det;
  std::vector<double> smin;
};
DetScan det_scan(const std::function<Mat(double)>& E, const std::vector<double>& ts, Exec exec = Exec::Parallel);

/// Applies f to every item; item results are independent.
std::vector<double> map_points(const std::function<double(const AmbientPoint&)>& f,
                               const std::vector<AmbientPoint>& points, Exec exec = Exec::Parallel);

}  // namespace lapfol
