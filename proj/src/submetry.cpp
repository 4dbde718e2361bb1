#include "lapfol/submetry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lapfol/errors.hpp"
#include "lapfol/kernels.hpp"

namespace lapfol {

namespace {

std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

std::vector<NumericPolynomial> compile_all(const std::vector<PolyFunction>& fs) {
  std::vector<NumericPolynomial> out;
  for (const auto& f : fs) out.push_back(f.compiled());
  return out;
}

Mat gram_at(const std::vector<std::vector<NumericPolynomial>>& g, const Vec& x) {
  const auto k = static_cast<Eigen::Index>(g.size());
  Mat m(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](as_span(x));
  return m;
}

std::vector<std::vector<NumericPolynomial>> compiled_gram(const std::vector<PolyFunction>& rho) {
  auto g = gram_gradients(rho);
  std::vector<std::vector<NumericPolynomial>> out;
  for (auto& row : g) out.push_back(compile_all(row));
  return out;
}

int order_for(const PolyFunction& f) { return std::max(24, 2 * f.degree() + 2); }

}  // namespace

std::vector<AmbientPoint> SubmetrySpec::companion_points(const AmbientPoint& p) const { return {AmbientPoint(-p)}; }

PolyFunction SubmetrySpec::exact_average(const PolyFunction&) const {
  throw UnsupportedError("no exact averaging backend for " + id());
}

AmbientPoint SubmetrySpec::sample_regular(Rng& rng) const {
  for (int tries = 0; tries < 1000; ++tries) {
    AmbientPoint p = space_->random_point(rng);
    if (is_regular(p)) return p;
  }
  throw DomainError("could not sample a regular point of " + id());
}

Vec SubmetrySpec::quotient_values(const AmbientPoint& p) const {
  Vec v(static_cast<Eigen::Index>(rho_.size()));
  for (std::size_t i = 0; i < rho_.size(); ++i) v(static_cast<Eigen::Index>(i)) = rho_[i].evaluate(p);
  return v;
}

std::vector<AmbientPoint> sample_grid(const SubmetrySpec& sigma, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<AmbientPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(sigma.sample_regular(rng));
  return out;
}

Rational rationalize(double x, long max_denominator) {
  if (!std::isfinite(x)) throw DomainError("cannot rationalize a non-finite value");
  // Convergents h/k of the continued fraction of x.
  const bool neg = x < 0;
  double r = std::fabs(x);
  mpz_class h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const mpz_class ai(a);
    mpz_class h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_denominator) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double frac = r - a;
    if (frac < 1e-15 || std::fabs(std::fabs(x) - h1.get_d() / k1.get_d()) < 1e-15 * std::max(1.0, std::fabs(x)))
      break;
    r = 1.0 / frac;
  }
  Rational q(h1, k1);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

// ---- averaging ----

PolyFunction average_function(const PolyFunction& f, const SubmetrySpec& sigma) {
  if (!(f.space() == sigma.space())) throw PreconditionError("function and submetry live on different spaces");
  return sigma.exact_average(f);
}

NumericAverage average_function_numeric(const PolyFunction& f, const SubmetrySpec& sigma, int samples,
                                        std::uint64_t seed) {
  NumericAverage out{sample_grid(sigma, samples, seed), {}, PolyFunction(sigma.space_ptr()), 0, 0};
  out.values = fiber_averages(sigma, f.compiled(), out.points, order_for(f));
  std::vector<double> fitted(out.points.size(), 0.0);
  // Av maps E_λ into E_λ, so each component is fitted inside its own eigenspace.
  for (const auto& comp : f.components()) {
    const PolyFunction fl = PolyFunction::from_components(sigma.space_ptr(), {comp});
    const auto vals = fiber_averages(sigma, fl.compiled(), out.points, order_for(fl));
    const auto basis = eigenspace_basis(sigma.space_ptr(), comp.lambda);
    const Mat a = evaluate_basis(compile_all(basis), out.points);
    const Vec b = Eigen::Map<const Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    const Vec c = a.colPivHouseholderQr().solve(b);
    const Vec fit = a * c;
    for (std::size_t i = 0; i < fitted.size(); ++i) fitted[i] += fit(static_cast<Eigen::Index>(i));
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      const Rational q = rationalize(c(j));
      out.rationalization_error = std::max(out.rationalization_error, std::fabs(q.get_d() - c(j)));
      if (q != 0) out.projected += basis[static_cast<std::size_t>(j)] * q;
    }
  }
  for (std::size_t i = 0; i < fitted.size(); ++i)
    out.fit_residual = std::max(out.fit_residual, std::fabs(fitted[i] - out.values[i]));
  return out;
}

CommutatorReport commutator_residual(const PolyFunction& f, const SubmetrySpec& sigma,
                                     const std::vector<AmbientPoint>& grid) {
  CommutatorReport rep;
  rep.grid = static_cast<int>(grid.size());
  const PolyFunction lf = laplace_beltrami(f);
  if (sigma.has_exact_average()) {
    const PolyFunction diff = average_function(lf, sigma) - laplace_beltrami(average_function(f, sigma));
    rep.exact = true;
    rep.exact_zero = diff.is_zero();
    const auto nd = diff.compiled();
    for (const auto& p : grid) rep.residual = std::max(rep.residual, std::fabs(nd(as_span(p))));
    return rep;
  }
  // Av(Δf) by quadrature; Δ(Av f) by fitting Av f in ⊕_{λ ≤ λ_max(f)} E_λ
  // and applying the exact eigenvalues to the fitted coefficients.
  const auto lhs = fiber_averages(sigma, lf.compiled(), grid, order_for(lf));
  const auto avf = fiber_averages(sigma, f.compiled(), grid, order_for(f));
  std::vector<PolyFunction> basis;
  std::vector<double> lambdas;
  for (const auto& lam : eigenvalues_up_to(sigma.space(), f.max_eigenvalue())) {
    for (auto& e : eigenspace_basis(sigma.space_ptr(), lam)) {
      basis.push_back(std::move(e));
      lambdas.push_back(lam.get_d());
    }
  }
  const Mat a = evaluate_basis(compile_all(basis), grid);
  const Vec b = Eigen::Map<const Vec>(avf.data(), static_cast<Eigen::Index>(avf.size()));
  const Vec c = a.colPivHouseholderQr().solve(b);
  const Vec fit = a * c;
  Vec lc = c;
  for (Eigen::Index j = 0; j < c.size(); ++j) lc(j) *= lambdas[static_cast<std::size_t>(j)];
  const Vec rhs = a * lc;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    rep.fit_residual = std::max(rep.fit_residual, std::fabs(fit(ii) - b(ii)));
    rep.residual = std::max(rep.residual, std::fabs(lhs[i] - rhs(ii)));
  }
  return rep;
}

// ---- mean curvature ----

MeanCurvatureReport basic_mean_curvature_report(const SubmetrySpec& sigma, const AmbientPoint& fiber_point,
                                                int samples) {
  if (!sigma.is_regular(fiber_point)) throw PreconditionError("fiber is outside the regular set of " + sigma.id());
  const FiberChart chart = sigma.fiber_at(fiber_point);
  std::vector<GradientField> grads;
  for (const auto& r : sigma.quotient_map()) grads.push_back(gradient(r));
  MeanCurvatureReport rep;
  const auto params = chart.spread_parameters(samples);
  const auto k = static_cast<Eigen::Index>(grads.size());
  Vec lo = Vec::Constant(k, std::numeric_limits<double>::infinity());
  Vec hi = Vec::Constant(k, -std::numeric_limits<double>::infinity());
  for (const auto& [patch, u] : params) {
    const AmbientPoint x = chart.point(patch, u);
    if (!sigma.is_regular(x)) throw PreconditionError("fiber sample outside the regular set");
    const Vec h = mean_curvature(chart, patch, u);
    Vec push(k);
    for (Eigen::Index i = 0; i < k; ++i) push(i) = grads[static_cast<std::size_t>(i)].evaluate(x).dot(h);
    lo = lo.cwiseMin(push);
    hi = hi.cwiseMax(push);
    rep.points.push_back(x);
    rep.H.push_back(h);
    rep.pushforward.push_back(push);
  }
  rep.spread = rep.points.empty() ? 0.0 : (hi - lo).maxCoeff();
  return rep;
}

// ---- construction from an algebra ----

RankRegion regular_rank_region(const std::vector<PolyFunction>& rho, const std::vector<AmbientPoint>& samples) {
  RankRegion out;
  if (rho.empty()) {
    out.ranks.assign(samples.size(), 0);
    out.maximal.assign(samples.size(), true);
    return out;
  }
  const auto g = compiled_gram(rho);
  std::vector<Vec> sv;
  double scale = 1.0;
  for (const auto& p : samples) {
    Eigen::JacobiSVD<Mat> svd(gram_at(g, p));
    sv.push_back(svd.singularValues());
    scale = std::max(scale, svd.singularValues()(0));
  }
  const double thr = default_tolerances().rank_threshold * scale;
  for (const auto& s : sv) {
    const int r = static_cast<int>((s.array() > thr).count());
    out.ranks.push_back(r);
    out.m = std::max(out.m, r);
  }
  for (int r : out.ranks) out.maximal.push_back(r == out.m);
  return out;
}

InducedMetricReport induced_metric_check(const std::vector<PolyFunction>& rho, const SubmetrySpec& sigma,
                                         const AmbientPoint& fiber_point, int samples) {
  InducedMetricReport rep;
  const auto g = compiled_gram(rho);
  const FiberChart chart = sigma.fiber_at(fiber_point);
  for (const auto& [patch, u] : chart.spread_parameters(samples)) {
    const AmbientPoint x = chart.point(patch, u);
    rep.points.push_back(x);
    rep.gram.push_back(gram_at(g, x));
  }
  for (const auto& m : rep.gram) rep.spread = std::max(rep.spread, (m - rep.gram.front()).cwiseAbs().maxCoeff());
  if (rho.size() == 1 && sigma.transversal()) rep.quotient_length = quotient_length(rho.front(), sigma);
  return rep;
}

double quotient_length(const PolyFunction& rho, const SubmetrySpec& sigma) {
  const auto tr = sigma.transversal();
  if (!tr) throw UnsupportedError(sigma.id() + " has no 1-dimensional transversal");
  const auto g = compiled_gram({rho});
  const double lo = tr->lo, hi = tr->hi;
  // x = lo + (hi − lo)(1 − cos θ)/2 absorbs the inverse-square-root endpoint
  // behaviour of b at singular fibers.
  auto integrand = [&](double theta) {
    const double x = lo + (hi - lo) * (1 - std::cos(theta)) / 2;
    const double gg = g[0][0](as_span(tr->point_at(x)));
    if (gg <= 0) return 0.0;
    return (hi - lo) / 2 * std::sin(theta) / std::sqrt(gg);
  };
  // Near θ = 0, π the Gram entry carries absolute rounding O(ε), i.e. relative
  // noise ε/θ², which stalls adaptive refinement. The integrand is even in θ
  // about each endpoint, so the two caps use a + bθ² through two samples.
  constexpr double cap = 2e-3;
  const double pi = std::numbers::pi;
  auto end_cap = [&](auto f) {
    const double f1 = f(cap), f2 = f(2 * cap);
    const double b = (f2 - f1) / (3 * cap * cap), a = f1 - b * cap * cap;
    return a * cap + b * cap * cap * cap / 3;
  };
  double err = 0;
  const double mid = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, cap, pi - cap, 10, 1e-14,
                                                                                     &err);
  return mid + end_cap(integrand) + end_cap([&](double t) { return integrand(pi - t); });
}

double distance_to_fiber(const FiberChart& chart, const AmbientPoint& x) {
  const SpaceModel& space = chart.space();
  try {
    auto [patch, u] = chart.locate(x);
    return distance(space, x, chart.point(patch, u));
  } catch (const DomainError&) {
  }
  const FiberChart::Node* best = nullptr;
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& nd : chart.nodes()) {
    const double d = distance(space, x, nd.x);
    if (d < bd) {
      bd = d;
      best = &nd;
    }
  }
  if (chart.dim() == 0 || best == nullptr) return bd;
  // Coordinate-wise Brent (golden-section with parabolic steps) around the
  // best node, minimizing squared distance.
  Vec u = best->u;
  const double half = 2 * std::numbers::pi / (chart.quadrature_order() + 1);
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (int a = 0; a < chart.dim(); ++a) {
      auto f = [&](double s) {
        Vec v = u;
        v(a) = s;
        const double d = distance(space, x, chart.point(best->patch, v));
        return d * d;
      };
      auto r = boost::math::tools::brent_find_minima(f, u(a) - half, u(a) + half, 40);
      u(a) = r.first;
    }
  }
  return std::min(bd, distance(space, x, chart.point(best->patch, u)));
}

EquidistanceReport equidistance_check(const SubmetrySpec& sigma, const AmbientPoint& fiber1,
                                      const AmbientPoint& fiber2, int samples) {
  const FiberChart c1 = sigma.fiber_at(fiber1);
  const FiberChart c2 = sigma.fiber_at(fiber2);
  std::vector<AmbientPoint> pts;
  for (const auto& [patch, u] : c1.spread_parameters(samples)) pts.push_back(c1.point(patch, u));
  const auto d = map_points([&](const AmbientPoint& x) { return distance_to_fiber(c2, x); }, pts);
  EquidistanceReport rep;
  rep.min = *std::min_element(d.begin(), d.end());
  rep.max = *std::max_element(d.begin(), d.end());
  return rep;
}

double fiber_constancy(const std::vector<PolyFunction>& rho, const SubmetrySpec& sigma,
                       const std::vector<AmbientPoint>& samples, int per_fiber) {
  const auto fs = compile_all(rho);
  double worst = 0;
  for (const auto& p : samples) {
    const FiberChart chart = sigma.fiber_at(p);
    for (const auto& f : fs) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const auto& [patch, u] : chart.spread_parameters(per_fiber)) {
        const double v = f(as_span(chart.point(patch, u)));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      worst = std::max(worst, hi - lo);
    }
  }
  return worst;
}

}  // namespace lapfol
