#include "lapfol/kernels.hpp"

#include <exception>

#include "lapfol/fiber.hpp"
#include "lapfol/submetry.hpp"

namespace lapfol {

namespace {

// Runs body(i) for i in [0, n). Exceptions thrown inside the parallel region
// are captured and rethrown on the calling thread (first one wins).
template <class Body>
void for_each_index(long n, Exec exec, Body&& body) {
  if (exec == Exec::Serial) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(lapfol_kernel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<double> fiber_averages(const SubmetrySpec& sigma, const NumericPolynomial& f,
                                   const std::vector<AmbientPoint>& points, int order, Exec exec) {
  std::vector<double> out(points.size());
  for_each_index(static_cast<long>(points.size()), exec, [&](long i) {
    const FiberChart chart = sigma.fiber_at(points[static_cast<std::size_t>(i)], order);
    out[static_cast<std::size_t>(i)] = average(f, chart);
  });
  return out;
}

Mat evaluate_basis(const std::vector<NumericPolynomial>& basis, const std::vector<AmbientPoint>& points, Exec exec) {
  Mat out(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(basis.size()));
  for_each_index(static_cast<long>(points.size()), exec, [&](long i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < basis.size(); ++j)
      out(i, static_cast<Eigen::Index>(j)) = basis[j](std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  });
  return out;
}

DetScan det_scan(const std::function<Mat(double)>& E, const std::vector<double>& ts, Exec exec) {
  DetScan out{std::vector<double>(ts.size()), std::vector<double>(ts.size())};
  for_each_index(static_cast<long>(ts.size()), exec, [&](long i) {
    const Mat e = E(ts[static_cast<std::size_t>(i)]);
    out.det[static_cast<std::size_t>(i)] = e.determinant();
    Eigen::JacobiSVD<Mat> svd(e);
    out.smin[static_cast<std::size_t>(i)] = svd.singularValues()(svd.singularValues().size() - 1);
  });
  return out;
}

std::vector<double> map_points(const std::function<double(const AmbientPoint&)>& f,
                               const std::vector<AmbientPoint>& points, Exec exec) {
  std::vector<double> out(points.size());
  for_each_index(static_cast<long>(points.size()), exec,
                 [&](long i) { out[static_cast<std::size_t>(i)] = f(points[static_cast<std::size_t>(i)]); });
  return out;
}

}  // namespace lapfol
