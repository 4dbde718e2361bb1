#include "lapfol/fiber.hpp"

#include <cmath>
#include <numbers>

#include "lapfol/errors.hpp"

namespace lapfol {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

}  // namespace

ChartPatch rotation_patch(const AmbientPoint& base, std::vector<RotationPlane> planes, int dim) {
  ChartPatch patch;
  patch.map = [base, planes](const Vec& u) {
    Vec x = base;
    for (const auto& pl : planes) {
      const double a = pl.phase + u(pl.param);
      x(pl.i) = pl.radius * std::cos(a);
      x(pl.j) = pl.radius * std::sin(a);
    }
    return x;
  };
  patch.jet = [base, planes, dim](const Vec& u) {
    ChartJet jet;
    jet.x = base;
    const auto n = base.size();
    jet.d1 = Mat::Zero(n, dim);
    jet.d2.assign(static_cast<std::size_t>(dim * dim), Vec::Zero(n));
    for (const auto& pl : planes) {
      const double a = pl.phase + u(pl.param);
      const double c = pl.radius * std::cos(a), s = pl.radius * std::sin(a);
      jet.x(pl.i) = c;
      jet.x(pl.j) = s;
      jet.d1(pl.i, pl.param) = -s;
      jet.d1(pl.j, pl.param) = c;
      auto& dd = jet.d2[static_cast<std::size_t>(pl.param * dim + pl.param)];
      dd(pl.i) = -c;
      dd(pl.j) = -s;
    }
    return jet;
  };
  patch.inverse = [planes, dim](const AmbientPoint& p) {
    Vec u = Vec::Zero(dim);
    std::vector<bool> seen(static_cast<std::size_t>(dim), false);
    for (const auto& pl : planes) {
      if (seen[static_cast<std::size_t>(pl.param)] || pl.radius <= 0) continue;
      u(pl.param) = wrap_angle(std::atan2(p(pl.j), p(pl.i)) - pl.phase);
      seen[static_cast<std::size_t>(pl.param)] = true;
    }
    return u;
  };
  return patch;
}

FiberChart::FiberChart(SpacePtr space, int dim, std::vector<ChartPatch> patches, int quadrature_order,
                       std::optional<double> closed_form_volume, bool singular)
    : space_(std::move(space)),
      dim_(dim),
      patches_(std::move(patches)),
      order_(quadrature_order),
      closed_volume_(closed_form_volume),
      singular_(singular) {
  if (patches_.empty()) throw ConfigError("fiber chart without patches");
  if (order_ < 0) throw ConfigError("negative quadrature order");
  // Trapezoid rule with Q+1 nodes per circle factor integrates trigonometric
  // polynomials of degree ≤ Q exactly.
  const int per_axis = dim_ == 0 ? 1 : order_ + 1;
  long total = 1;
  for (int a = 0; a < dim_; ++a) total *= per_axis;
  const double cell = std::pow(kTwoPi / per_axis, dim_);
  for (int pi = 0; pi < patch_count(); ++pi) {
    for (long idx = 0; idx < total; ++idx) {
      Vec u(dim_);
      long r = idx;
      for (int a = 0; a < dim_; ++a) {
        u(a) = kTwoPi * static_cast<double>(r % per_axis) / per_axis;
        r /= per_axis;
      }
      double w = 1.0;
      AmbientPoint x;
      if (dim_ == 0) {
        x = patches_[pi].map(u);
      } else {
        ChartJet j = jet(pi, u);
        x = j.x;
        const Mat g = j.d1.transpose() * j.d1;
        w = std::sqrt(std::max(g.determinant(), 0.0)) * cell;
      }
      nodes_.push_back({pi, u, x, w});
      volume_ += w;
    }
  }
  for (const auto& nd : nodes_) {
    if (space_->embedding_residual(nd.x) > default_tolerances().on_space)
      throw DomainError("fiber chart leaves the space");
  }
}

AmbientPoint FiberChart::point(int patch, const Vec& u) const { return patches_.at(patch).map(u); }

ChartJet FiberChart::jet(int patch, const Vec& u) const {
  const auto& pt = patches_.at(patch);
  if (pt.jet) return pt.jet(u);
  return jet_fd(patch, u, default_tolerances().fd_step);
}

ChartJet FiberChart::jet_fd(int patch, const Vec& u, double h) const {
  const auto& f = patches_.at(patch).map;
  ChartJet jet;
  jet.x = f(u);
  const auto n = jet.x.size();
  jet.d1 = Mat::Zero(n, dim_);
  jet.d2.assign(static_cast<std::size_t>(dim_ * dim_), Vec::Zero(n));
  auto shifted = [&](int a, double da, int b, double db) {
    Vec v = u;
    v(a) += da;
    v(b) += db;
    return f(v);
  };
  for (int a = 0; a < dim_; ++a) {
    auto d1 = [&](double s) { return Vec((shifted(a, s, a, 0) - shifted(a, -s, a, 0)) / (2 * s)); };
    jet.d1.col(a) = (4 * d1(h / 2) - d1(h)) / 3;
    for (int b = a; b < dim_; ++b) {
      auto d2 = [&](double s) -> Vec {
        if (a == b) return (shifted(a, s, a, 0) - 2 * jet.x + shifted(a, -s, a, 0)) / (s * s);
        return (shifted(a, s, b, s) - shifted(a, s, b, -s) - shifted(a, -s, b, s) + shifted(a, -s, b, -s)) /
               (4 * s * s);
      };
      Vec v = (4 * d2(h / 2) - d2(h)) / 3;
      jet.d2[static_cast<std::size_t>(a * dim_ + b)] = v;
      jet.d2[static_cast<std::size_t>(b * dim_ + a)] = v;
    }
  }
  return jet;
}

std::pair<int, Vec> FiberChart::locate(const AmbientPoint& p) const {
  int best_patch = -1;
  Vec best_u;
  double best = std::numeric_limits<double>::infinity();
  for (int pi = 0; pi < patch_count(); ++pi) {
    Vec u;
    if (dim_ == 0) {
      u = Vec(0);
    } else if (patches_[pi].inverse) {
      u = patches_[pi].inverse(p);
    } else {
      double bd = std::numeric_limits<double>::infinity();
      for (const auto& nd : nodes_) {
        if (nd.patch != pi) continue;
        const double d = (nd.x - p).norm();
        if (d < bd) {
          bd = d;
          u = nd.u;
        }
      }
    }
    const double d = (patches_[pi].map(u) - p).norm();
    if (d < best) {
      best = d;
      best_patch = pi;
      best_u = u;
    }
  }
  if (best > 1e-8) throw DomainError("point is not on the fiber");
  return {best_patch, best_u};
}

std::vector<std::pair<int, Vec>> FiberChart::spread_parameters(int count) const {
  std::vector<std::pair<int, Vec>> out;
  if (count <= 0) return out;
  const int np = patch_count();
  for (int k = 0; k < count; ++k) {
    const int pi = k % np;
    const int local = k / np;
    const int local_count = (count - pi + np - 1) / np;
    Vec u(dim_);
    if (dim_ >= 1) {
      // Even spacing along the first parameter, golden-ratio rotation along the rest.
      u(0) = kTwoPi * local / std::max(local_count, 1);
      for (int a = 1; a < dim_; ++a)
        u(a) = wrap_angle(kTwoPi * local * std::numbers::phi * (a + 0.5));
    }
    out.emplace_back(pi, u);
  }
  return out;
}

double average(const std::function<double(const AmbientPoint&)>& f, const FiberChart& chart) {
  double s = 0.0;
  for (const auto& nd : chart.nodes()) s += nd.weight * f(nd.x);
  return s / chart.volume();
}

double average(const NumericPolynomial& f, const FiberChart& chart) {
  return average([&](const AmbientPoint& x) { return f(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))); }, chart);
}

double average(const PolyFunction& f, const FiberChart& chart) {
  // Along catalog fibers each coordinate is a trigonometric polynomial of
  // degree ≤ 1 in every parameter, so the ambient degree bounds the
  // trigonometric degree.
  if (f.degree() > chart.quadrature_order() && chart.dim() > 0)
    throw PreconditionError("quadrature order " + std::to_string(chart.quadrature_order()) +
                            " below polynomial degree " + std::to_string(f.degree()));
  return average(f.compiled(), chart);
}

Mat fiber_tangent_frame(const ChartJet& jet) {
  const auto k = jet.d1.cols();
  if (k == 0) return Mat(jet.x.size(), 0);
  Eigen::JacobiSVD<Mat> svd(jet.d1, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (s(k - 1) < 1e-10 * std::max(1.0, s(0))) throw DomainError("degenerate fiber parameterization");
  Eigen::HouseholderQR<Mat> qr(jet.d1);
  Mat q = qr.householderQ() * Mat::Identity(jet.x.size(), k);
  return q;
}

Vec mean_curvature(const FiberChart& chart, int patch, const Vec& u, bool finite_differences) {
  const int k = chart.dim();
  const ChartJet j = finite_differences ? chart.jet_fd(patch, u, default_tolerances().fd_step)
                                        : chart.jet(patch, u);
  const auto n = j.x.size();
  if (k == 0) return Vec::Zero(n);
  const Mat tf = fiber_tangent_frame(j);
  const Mat g = j.d1.transpose() * j.d1;
  const Mat ginv = g.inverse();
  Vec acc = Vec::Zero(n);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) acc += ginv(a, b) * j.d2[static_cast<std::size_t>(a * k + b)];
  // Second fundamental form: component normal to L but tangent to M.
  Vec h = tangent_project(chart.space(), j.x, acc).vec;
  h -= tf * (tf.transpose() * h);
  return h;
}

Vec mean_curvature(const FiberChart& chart, const AmbientPoint& p) {
  auto [patch, u] = chart.locate(p);
  return mean_curvature(chart, patch, u);
}

}  // namespace lapfol
