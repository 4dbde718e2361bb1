#include "lapfol/focal.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "lapfol/errors.hpp"
#include "lapfol/kernels.hpp"
#include "lapfol/submetry.hpp"

namespace lapfol {

namespace {

constexpr double kPi = std::numbers::pi;

Mat radial_columns(const SpaceModel& space, const AmbientPoint& p) {
  Mat r = Mat::Zero(space.ambient_dim(), static_cast<Eigen::Index>(space.factors().size()));
  Eigen::Index c = 0;
  for (const auto& f : space.factors()) {
    r.col(c).segment(f.offset, f.ambient()) = p.segment(f.offset, f.ambient()).normalized();
    ++c;
  }
  return r;
}

void check_normal(const FiberChart& chart, const AmbientPoint& p, const Vec& v, const Mat& tangent) {
  if (std::fabs(v.norm() - 1) > 1e-10) throw DomainError("normal direction is not a unit vector");
  const Vec tv = tangent_project(chart.space(), p, v).vec;
  if ((tv - v).norm() > 1e-10) throw DomainError("direction is not tangent to the space");
  if (tangent.cols() > 0 && (tangent.transpose() * v).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("direction is not normal to the fiber");
}

// Orthogonal change of basis so that each kernel vector is dominated by a
// distinct column (row-reduced form of the kernel basis).
std::vector<int> kernel_families(const Mat& kernel, const std::vector<int>& family) {
  Mat m = kernel.transpose();
  std::vector<int> out;
  Eigen::Index row = 0;
  while (row < m.rows()) {
    Eigen::Index r, c;
    m.bottomRows(m.rows() - row).cwiseAbs().maxCoeff(&r, &c);
    r += row;
    m.row(row).swap(m.row(r));
    m.row(row) /= m(row, c);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != row) m.row(i) -= m(i, c) * m.row(row);
    out.push_back(family[static_cast<std::size_t>(c)]);
    ++row;
  }
  std::sort(out.begin(), out.end());
  return out;
}

JacobiSystem build_system(const FiberChart& chart, const AmbientPoint& p, const Vec& v, bool descending) {
  const SpaceModel& space = chart.space();
  const GeodesicRay ray{p, v};
  const Mat F0 = normal_frame(space, ray, 0.0);
  const auto m = F0.cols();
  JacobiSystem sys{Mat::Zero(m, m), Mat::Zero(m, m), {}};
  Eigen::Index col = 0;
  Mat tangent(space.ambient_dim(), 0);
  if (chart.dim() > 0) {
    const ShapeOperator S = shape_operator(chart, p, v);
    tangent = S.tangent;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S.matrix + S.matrix.transpose()));
    const auto k = es.eigenvalues().size();
    for (Eigen::Index a = 0; a < k; ++a) {
      // Family ids follow the eigenvalues of A_v for +v; the −v side sees the
      // negated operator, so its ascending order is reversed.
      const Eigen::Index idx = descending ? k - 1 - a : a;
      const Vec X = S.tangent * es.eigenvectors().col(idx);
      sys.value.col(col) = F0.transpose() * X;
      sys.derivative.col(col) = -es.eigenvalues()(idx) * (F0.transpose() * X);
      sys.family.push_back(static_cast<int>(a));
      ++col;
    }
  } else {
    check_normal(chart, p, v, tangent);
  }
  Mat given(space.ambient_dim(), tangent.cols() + 1 + static_cast<Eigen::Index>(space.factors().size()));
  given << tangent, v, radial_columns(space, p);
  const Mat W = orthonormal_complement(given, space.ambient_dim());
  if (col + W.cols() != m) throw DomainError("normal space has unexpected dimension");
  for (Eigen::Index j = 0; j < W.cols(); ++j) {
    sys.derivative.col(col) = F0.transpose() * W.col(j);
    sys.family.push_back(static_cast<int>(col));
    ++col;
  }
  return sys;
}

std::vector<FocalRoot> roots_on_side(const FiberChart& chart, const AmbientPoint& p, const Vec& v, double T,
                                     JacobiBackend backend, bool descending, std::vector<std::string>& warnings) {
  const auto& tol = default_tolerances();
  const JacobiSystem sys = build_system(chart, p, v, descending);
  const auto E = jacobi_fundamental(chart.space_ptr(), GeodesicRay{p, v}, sys, T, backend);
  auto det = [&](double t) { return E->value(t).determinant(); };
  auto smin = [&](double t) {
    Eigen::JacobiSVD<Mat> svd(E->value(t));
    return svd.singularValues()(svd.singularValues().size() - 1) / std::max(1.0, svd.singularValues()(0));
  };

  const double h = tol.scan_step;
  const int n = static_cast<int>(std::ceil(T / h - 1e-12));
  std::vector<double> ts;
  for (int j = 1; j <= n; ++j) ts.push_back(std::min(j * h, T));
  if (ts.empty()) return {};
  const DetScan scan = det_scan([&](double t) { return E->value(t); }, ts);

  struct Candidate {
    double t;
    bool odd;
  };
  std::vector<Candidate> cands;
  std::vector<bool> sign_change(ts.size(), false);
  for (std::size_t j = 1; j < ts.size(); ++j) {
    double a = ts[j - 1], b = ts[j];
    double fa = scan.det[j - 1], fb = scan.det[j];
    if (fa == 0) continue;  // handled as the right end of the previous interval
    if (fb != 0 && (fa > 0) == (fb > 0)) continue;
    sign_change[j - 1] = sign_change[j] = true;
    if (fb == 0) {
      cands.push_back({b, true});
      continue;
    }
    while (b - a > tol.root_bisection) {
      const double mid = 0.5 * (a + b);
      const double fm = det(mid);
      if (fm == 0) {
        a = b = mid;
        break;
      }
      if ((fm > 0) == (fa > 0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    cands.push_back({0.5 * (a + b), true});
  }
  // Even-multiplicity zeros leave no sign change: look for local minima of
  // the smallest singular value instead.
  std::vector<double> rel(ts.size());
  for (std::size_t j = 0; j < ts.size(); ++j) rel[j] = smin(ts[j]);
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double left = j > 0 ? rel[j - 1] : smin(ts[j] - h / 2);
    const double right = j + 1 < ts.size() ? rel[j + 1] : std::numeric_limits<double>::infinity();
    if (!(rel[j] <= left && rel[j] < right) || rel[j] > 0.25) continue;
    if (sign_change[j] || (j > 0 && sign_change[j - 1]) || (j + 1 < ts.size() && sign_change[j + 1])) continue;
    const double lo = std::max(ts[j] - h, 1e-12), hi = std::min(ts[j] + h, T);
    auto r = boost::math::tools::brent_find_minima(smin, lo, hi, 45);
    // The minimum of σ_min is a kink, so Brent stops near sqrt(eps). The
    // pairing u^T E(t) w with the singular vectors at that estimate crosses
    // zero transversally (E' is injective on the kernel), so bracket it.
    double t0 = r.first;
    {
      Eigen::JacobiSVD<Mat> svd(E->value(t0), Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Vec u = svd.matrixU().rightCols(1), w = svd.matrixV().rightCols(1);
      auto g = [&](double t) { return u.dot(E->value(t) * w); };
      const double a = std::max(t0 - 1e-4, 1e-12), b = std::min(t0 + 1e-4, T);
      if (g(a) * g(b) < 0) {
        std::uintmax_t iters = 100;
        const auto br = boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(50), iters);
        t0 = 0.5 * (br.first + br.second);
      }
    }
    if (smin(t0) <= tol.kernel_threshold) cands.push_back({t0, false});
  }

  std::vector<FocalRoot> roots;
  for (const auto& c : cands) {
    const Mat e = E->value(c.t);
    Eigen::JacobiSVD<Mat> svd(e, Eigen::ComputeFullV);
    const Vec s = svd.singularValues();
    const double thr = tol.kernel_threshold * std::max(1.0, s(0));
    int mult = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) <= thr) ++mult;
    if (mult == 0 || (mult % 2 == 1) != c.odd)
      throw MultiplicityAmbiguity("focal root near t = " + std::to_string(c.t) + " has kernel dimension " +
                                  std::to_string(mult) + " inconsistent with the determinant sign pattern");
    const Mat kern = svd.matrixV().rightCols(mult);
    roots.push_back({c.t, mult, kernel_families(kern, sys.family)});
    if (T - c.t < tol.window_edge) warnings.push_back("focal root within window-edge tolerance at " + std::to_string(c.t));
  }
  std::sort(roots.begin(), roots.end(), [](const FocalRoot& a, const FocalRoot& b) { return a.distance < b.distance; });
  std::vector<FocalRoot> merged;
  for (auto& r : roots) {
    if (!merged.empty() && r.distance - merged.back().distance <= tol.root_merge) {
      merged.back().multiplicity += r.multiplicity;
      merged.back().families.insert(merged.back().families.end(), r.families.begin(), r.families.end());
      continue;
    }
    merged.push_back(std::move(r));
  }
  return merged;
}

std::vector<double> expanded(const std::vector<FocalRoot>& roots) {
  std::vector<double> out;
  for (const auto& r : roots)
    for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.distance);
  return out;
}

std::vector<TailFit> fit_tails(const FocalSpectrum& spec) {
  std::vector<TailFit> fits;
  for (int sign : {1, -1}) {
    const auto& roots = sign > 0 ? spec.positive : spec.negative;
    std::map<int, std::vector<double>> fam;
    for (const auto& r : roots)
      for (int f : r.families) fam[f].push_back(std::fabs(r.distance));
    for (auto& [f, ls] : fam) {
      std::sort(ls.begin(), ls.end());
      if (ls.size() < 2) continue;
      // Outermost third of the window; at least the last two roots.
      std::vector<std::pair<double, double>> pts;
      for (std::size_t k = 0; k < ls.size(); ++k)
        if (ls[k] >= 2 * spec.window / 3) pts.emplace_back(static_cast<double>(k), ls[k]);
      if (pts.size() < 2) {
        pts.clear();
        for (std::size_t k = ls.size() >= 3 ? ls.size() - 3 : 0; k < ls.size(); ++k)
          pts.emplace_back(static_cast<double>(k), ls[k]);
      }
      Mat A(static_cast<Eigen::Index>(pts.size()), 2);
      Vec y(static_cast<Eigen::Index>(pts.size()));
      for (std::size_t i = 0; i < pts.size(); ++i) {
        A(static_cast<Eigen::Index>(i), 0) = 1;
        A(static_cast<Eigen::Index>(i), 1) = pts[i].first;
        y(static_cast<Eigen::Index>(i)) = pts[i].second;
      }
      const Vec c = A.colPivHouseholderQr().solve(y);
      TailFit t{f, sign, c(0), c(1), (A * c - y).cwiseAbs().maxCoeff(), static_cast<int>(ls.size())};
      fits.push_back(t);
    }
  }
  return fits;
}

}  // namespace

ShapeOperator shape_operator(const FiberChart& chart, const AmbientPoint& p, const Vec& v, bool finite_differences) {
  auto [patch, u] = chart.locate(p);
  const ChartJet j = finite_differences ? chart.jet_fd(patch, u, default_tolerances().fd_step) : chart.jet(patch, u);
  const Mat tf = fiber_tangent_frame(j);
  check_normal(chart, p, v, tf);
  const auto k = j.d1.cols();
  Mat II(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) II(a, b) = j.d2[static_cast<std::size_t>(a * k + b)].dot(v);
  // X_a = tf R; in the orthonormal frame the form becomes R^{-T} II R^{-1}.
  const Mat R = tf.transpose() * j.d1;
  const Mat Rinv = R.inverse();
  ShapeOperator S{Rinv.transpose() * II * Rinv, tf};
  return S;
}

JacobiSystem l_jacobi_system(const FiberChart& chart, const AmbientPoint& p, const Vec& v) {
  return build_system(chart, p, v, false);
}

int FocalSpectrum::total_multiplicity() const {
  int n = 0;
  for (const auto& r : positive) n += r.multiplicity;
  for (const auto& r : negative) n += r.multiplicity;
  return n;
}

std::vector<FocalRoot> focal_roots(const FiberChart& chart, const AmbientPoint& p, const Vec& v, double T,
                                   JacobiBackend backend, std::vector<std::string>& warnings) {
  return roots_on_side(chart, p, v, T, backend, false, warnings);
}

FocalSpectrum focal_spectrum(const FiberChart& chart, const AmbientPoint& p, const Vec& v, double T,
                             const FocalOptions& opts) {
  if (!(T > 0)) throw ConfigError("focal window must be positive");
  FocalSpectrum spec;
  spec.window = T;
  spec.positive = roots_on_side(chart, p, v, T, opts.backend, false, spec.warnings);
  // Negative side: the ray with direction −v, negated.
  spec.negative = roots_on_side(chart, p, Vec(-v), T, opts.backend, true, spec.warnings);
  for (auto& r : spec.negative) r.distance = -r.distance;
  if (opts.fit_tail) spec.tail = fit_tails(spec);
  return spec;
}

TraceEstimate trace_from_focal(const FocalSpectrum& spec, int extra_negative) {
  const auto& tol = default_tolerances();
  const std::vector<double> a = expanded(spec.positive);
  const std::vector<double> b = expanded(spec.negative);  // negative numbers, |b| ascending
  if (extra_negative < 0) throw ConfigError("extra_negative must be non-negative");
  const int K = static_cast<int>(std::min<std::size_t>(a.size(), b.size() >= static_cast<std::size_t>(extra_negative)
                                                                     ? b.size() - static_cast<std::size_t>(extra_negative)
                                                                     : 0));
  // Six pairs per family is what the default window T = 20 guarantees.
  if (K < 6) throw PreconditionError("focal window contains fewer than 6 pairs");
  TraceEstimate est;
  est.pairs = K;
  for (int k = 0; k < K; ++k) est.raw += 1 / a[static_cast<std::size_t>(k)] + 1 / b[static_cast<std::size_t>(k)];
  for (int k = K; k < K + extra_negative; ++k) est.raw += 1 / b[static_cast<std::size_t>(k)];

  if (spec.tail.empty()) throw TailModelError("no tail model fitted");
  double period = 0, worst = 0;
  int fplus = 0, fminus = 0;
  for (const auto& t : spec.tail) {
    period += t.b;
    worst = std::max(worst, t.residual);
    (t.sign > 0 ? fplus : fminus) += 1;
  }
  period /= static_cast<double>(spec.tail.size());
  if (worst > tol.tail_fit_residual)
    throw TailModelError("tail model unreliable: fit residual " + std::to_string(worst));
  for (const auto& t : spec.tail)
    if (std::fabs(t.b - period) > tol.tail_fit_residual)
      throw TailModelError("tail model unreliable: family periods disagree");
  if (fplus != fminus || fplus == 0) throw TailModelError("tail model unreliable: unequal family counts");
  const int F = fplus;
  if (a.size() < static_cast<std::size_t>(F) || b.size() < static_cast<std::size_t>(F))
    throw TailModelError("tail model unreliable: too few roots");

  // Continue both sides periodically: x_{k+F} = x_k ± period. Terms with
  // index ≥ K are summed explicitly up to a common aligned start, then each
  // residue class r contributes Σ_j 1/(A_r + j p) − 1/(B_r + j p)
  // = (ψ(B_r/p) − ψ(A_r/p))/p.
  auto term = [&](const std::vector<double>& xs, int k) {
    const int n = static_cast<int>(xs.size());
    if (k < n) return std::fabs(xs[static_cast<std::size_t>(k)]);
    const int base = n - F + (k - n) % F;
    return std::fabs(xs[static_cast<std::size_t>(base)]) + period * (1 + (k - n) / F);
  };
  const int start = static_cast<int>(std::max(a.size(), b.size())) + F;
  double tail = 0;
  for (int k = K; k < start; ++k) tail += 1 / term(a, k) - 1 / term(b, k);
  double closed = 0;
  for (int r = 0; r < F; ++r) {
    const double A = term(a, start + r), B = term(b, start + r);
    closed += (boost::math::digamma(B / period) - boost::math::digamma(A / period)) / period;
  }
  tail += closed;
  for (int k = K; k < K + extra_negative; ++k) tail -= 1 / b[static_cast<std::size_t>(k)];
  est.tail = tail;
  est.accelerated = est.raw + tail;
  // Perturbing every model term by the fit residual moves the tail by at most this.
  est.tail_bound = worst * 2.0 * F / (period * std::max(1e-300, term(a, K) - period)) +
                   worst * 2.0 * F / (period * std::max(1e-300, term(b, K) - period));
  return est;
}

EulerSeries euler_series(double phi, int N) {
  if (!(phi > 1e-12 && phi < kPi - 1e-12)) throw DomainError("phi must lie strictly between 0 and pi");
  if (N < 0) throw ConfigError("N must be non-negative");
  EulerSeries s;
  s.partial = 1 / phi;
  for (int n = 1; n <= N; ++n) s.partial += 1 / (phi + n * kPi) + 1 / (phi - n * kPi);
  const double x = phi / kPi;
  const double tail = (boost::math::digamma(N + 1 - x) - boost::math::digamma(N + 1 + x)) / kPi;
  s.accelerated = s.partial + tail;
  const double cot = std::cos(phi) / std::sin(phi);
  s.residual_raw = std::fabs(s.partial - cot);
  s.residual_accelerated = std::fabs(s.accelerated - cot);
  return s;
}

Vec horizontal_direction(const SubmetrySpec& sigma, const FiberChart& chart, const AmbientPoint& p,
                         const Vec& weights) {
  Vec w = Vec::Zero(p.size());
  const auto& rho = sigma.quotient_map();
  for (std::size_t i = 0; i < rho.size(); ++i) w += weights(static_cast<Eigen::Index>(i)) * gradient(rho[i]).evaluate(p);
  if (chart.dim() > 0) {
    auto [patch, u] = chart.locate(p);
    const Mat tf = fiber_tangent_frame(chart.jet(patch, u));
    w -= tf * (tf.transpose() * w);
  }
  const double n = w.norm();
  if (n < 1e-12) throw DomainError("no horizontal direction for these weights");
  return w / n;
}

FocalDiff basic_focal_check(const SubmetrySpec& sigma, const AmbientPoint& p1, const Vec& v1, const AmbientPoint& p2,
                            const Vec& v2, double T) {
  if (!sigma.is_regular(p1)) throw PreconditionError("fiber is not regular");
  for (const auto& r : sigma.quotient_map()) {
    const GradientField g = gradient(r);
    if (std::fabs(g.evaluate(p1).dot(v1) - g.evaluate(p2).dot(v2)) > 1e-10)
      throw PreconditionError("d rho(v1) != d rho(v2)");
  }
  const FiberChart chart = sigma.fiber_at(p1);
  chart.locate(p2);
  const FocalSpectrum s1 = focal_spectrum(chart, p1, v1, T, {JacobiBackend::ClosedForm, false});
  const FocalSpectrum s2 = focal_spectrum(chart, p2, v2, T, {JacobiBackend::ClosedForm, false});
  auto all = [](const FocalSpectrum& s) {
    std::vector<double> v = expanded(s.negative);
    const auto pp = expanded(s.positive);
    v.insert(v.end(), pp.begin(), pp.end());
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto a = all(s1), b = all(s2);
  FocalDiff d;
  d.count1 = static_cast<int>(a.size());
  d.count2 = static_cast<int>(b.size());
  if (a.size() != b.size()) {
    d.distance = std::numeric_limits<double>::infinity();
    return d;
  }
  for (std::size_t i = 0; i < a.size(); ++i) d.distance = std::max(d.distance, std::fabs(a[i] - b[i]));
  return d;
}

std::string spectrum_csv(const FocalSpectrum& spec) {
  std::ostringstream os;
  os << "signed_distance,multiplicity,family_id\n";
  auto row = [&](const FocalRoot& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.distance);
    os << buf << ',' << r.multiplicity << ',';
    for (std::size_t i = 0; i < r.families.size(); ++i) os << (i ? ";" : "") << r.families[i];
    os << '\n';
  };
  for (auto it = spec.negative.rbegin(); it != spec.negative.rend(); ++it) row(*it);
  for (const auto& r : spec.positive) row(r);
  return os.str();
}

}  // namespace lapfol
