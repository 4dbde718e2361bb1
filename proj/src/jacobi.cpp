#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>

#include "lapfol/errors.hpp"
#include "lapfol/focal.hpp"

namespace lapfol {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

// K is constant in the parallel frame for every catalog space, so
// E(t) = Q [C(t) Qᵀ Y0 + S(t) Qᵀ Y1] with K = Q diag(k) Qᵀ.
class ClosedFormEvaluator : public JacobiEvaluator {
 public:
  ClosedFormEvaluator(const Mat& K, const JacobiSystem& J0, double T) {
    T_ = T;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (K + K.transpose()));
    q_ = es.eigenvectors();
    k_ = es.eigenvalues();
    y0_ = q_.transpose() * J0.value;
    y1_ = q_.transpose() * J0.derivative;
  }

  Mat value(double t) const override {
    Mat out(y0_.rows(), y0_.cols());
    for (Eigen::Index i = 0; i < k_.size(); ++i) {
      auto [c, s, dc, ds] = coeffs(k_(i), t);
      (void)dc;
      (void)ds;
      out.row(i) = c * y0_.row(i) + s * y1_.row(i);
    }
    return q_ * out;
  }

  Mat derivative(double t) const override {
    Mat out(y0_.rows(), y0_.cols());
    for (Eigen::Index i = 0; i < k_.size(); ++i) {
      auto [c, s, dc, ds] = coeffs(k_(i), t);
      (void)c;
      (void)s;
      out.row(i) = dc * y0_.row(i) + ds * y1_.row(i);
    }
    return q_ * out;
  }

 private:
  struct Coeffs {
    double c, s, dc, ds;
  };
  static Coeffs coeffs(double k, double t) {
    if (std::fabs(k) < 1e-14) return {1.0, t, 0.0, 1.0};
    if (k > 0) {
      const double w = std::sqrt(k);
      return {std::cos(w * t), std::sin(w * t) / w, -w * std::sin(w * t), std::cos(w * t)};
    }
    const double w = std::sqrt(-k);
    return {std::cosh(w * t), std::sinh(w * t) / w, w * std::sinh(w * t), std::cosh(w * t)};
  }

  Mat q_;
  Vec k_;
  Mat y0_, y1_;
};

// Dormand–Prince 5(4) with step control; the solution at every accepted step
// is stored, and value(t) integrates from the nearest stored step toward 0.
class OdeEvaluator : public JacobiEvaluator {
 public:
  struct Rhs {
    const OdeEvaluator* self;
    void operator()(const State& x, State& dx, double t) const {
      const auto m = self->m_, n = self->n_;
      const Mat K = curvature_along(*self->space_, self->ray_, t);
      Eigen::Map<const Mat> y(x.data(), m, n), yp(x.data() + m * n, m, n);
      Eigen::Map<Mat>(dx.data(), m, n) = yp;
      Eigen::Map<Mat>(dx.data() + m * n, m, n) = -K * y;
    }
  };
  Rhs system() const { return Rhs{this}; }

  OdeEvaluator(SpacePtr space, const GeodesicRay& ray, const JacobiSystem& J0, double T)
      : space_(std::move(space)), ray_(ray), m_(J0.value.rows()), n_(J0.value.cols()) {
    T_ = T;
    const auto& tol = default_tolerances();
    abs_ = tol.ode_abs;
    rel_ = tol.ode_rel;
    State x0(static_cast<std::size_t>(2 * m_ * n_));
    Eigen::Map<Mat>(x0.data(), m_, n_) = J0.value;
    Eigen::Map<Mat>(x0.data() + m_ * n_, m_, n_) = J0.derivative;
    for (int side = 0; side < 2; ++side) {
      auto& times = side == 0 ? pos_t_ : neg_t_;
      auto& states = side == 0 ? pos_x_ : neg_x_;
      State x = x0;
      const double end = side == 0 ? T : -T;
      if (T == 0) {
        times.push_back(0);
        states.push_back(x);
        continue;
      }
      try {
        odeint::integrate_adaptive(odeint::make_controlled(abs_, rel_, odeint::runge_kutta_dopri5<State>()),
                                   system(), x, 0.0, end, side == 0 ? 1e-3 : -1e-3,
                                   [&](const State& s, double t) {
                                     times.push_back(t);
                                     states.push_back(s);
                                   });
      } catch (const std::exception& e) {
        throw IntegrationError(std::string("Jacobi integration failed: ") + e.what(),
                               std::numeric_limits<double>::infinity());
      }
    }
    // The symplectic pairing of solution columns is conserved; its drift
    // measures the accuracy actually achieved.
    std::vector<double> probe;
    for (std::size_t i = 0; i < pos_t_.size(); i += std::max<std::size_t>(1, pos_t_.size() / 16)) probe.push_back(pos_t_[i]);
    for (std::size_t i = 0; i < neg_t_.size(); i += std::max<std::size_t>(1, neg_t_.size() / 16)) probe.push_back(neg_t_[i]);
    probe.push_back(T);
    probe.push_back(-T);
    const double drift = wronskian_drift(*this, probe);
    if (drift > tol.wronskian) throw IntegrationError("Jacobi integration drift above tolerance", drift);
  }

  Mat value(double t) const override {
    State x = state_at(t);
    return Eigen::Map<const Mat>(x.data(), m_, n_);
  }
  Mat derivative(double t) const override {
    State x = state_at(t);
    return Eigen::Map<const Mat>(x.data() + m_ * n_, m_, n_);
  }

 private:
  State state_at(double t) const {
    if (std::fabs(t) > T_ * (1 + 1e-12) + 1e-12) throw DomainError("time outside the Jacobi window");
    const bool pos = t >= 0;
    const auto& times = pos ? pos_t_ : neg_t_;
    const auto& states = pos ? pos_x_ : neg_x_;
    // Last stored step not beyond t (times are monotone in |t|).
    std::size_t lo = 0, hi = times.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (std::fabs(times[mid]) <= std::fabs(t)) lo = mid; else hi = mid;
    }
    State x = states[lo];
    const double t0 = times[lo];
    if (t != t0) {
      odeint::integrate_adaptive(odeint::make_controlled(abs_, rel_, odeint::runge_kutta_dopri5<State>()), system(), x,
                                 t0, t, t - t0);
    }
    return x;
  }

  SpacePtr space_;
  GeodesicRay ray_;
  Eigen::Index m_, n_;
  double abs_ = 0, rel_ = 0;
  std::vector<double> pos_t_, neg_t_;
  std::vector<State> pos_x_, neg_x_;
};

}  // namespace

std::unique_ptr<JacobiEvaluator> jacobi_fundamental(SpacePtr space, const GeodesicRay& ray, const JacobiSystem& J0,
                                                    double T, JacobiBackend backend) {
  const auto m = space->intrinsic_dim() - 1;
  if (J0.value.rows() != m || J0.derivative.rows() != m || J0.value.cols() != J0.derivative.cols())
    throw PreconditionError("Jacobi initial data has the wrong shape");
  if (T < 0) throw ConfigError("negative Jacobi window");
  if (backend == JacobiBackend::ClosedForm)
    return std::make_unique<ClosedFormEvaluator>(curvature_along(*space, ray, 0.0), J0, T);
  return std::make_unique<OdeEvaluator>(std::move(space), ray, J0, T);
}

double wronskian_drift(const JacobiEvaluator& E, const std::vector<double>& times) {
  auto omega = [&](double t) -> Mat {
    const Mat y = E.value(t), yp = E.derivative(t);
    return yp.transpose() * y - y.transpose() * yp;
  };
  const Mat w0 = omega(0.0);
  double drift = 0;
  for (double t : times) drift = std::max(drift, (omega(t) - w0).cwiseAbs().maxCoeff());
  return drift;
}

}  // namespace lapfol
