#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lapfol/polynomial.hpp"
#include "lapfol/spaces.hpp"

namespace lapfol {

/// One Laplace–Beltrami eigencomponent: a multi-harmonic, multi-homogeneous
/// ambient polynomial whose restriction satisfies Δh = λh.
struct EigenComponent {
  Rational lambda;
  Polynomial poly;
  bool operator==(const EigenComponent& o) const { return lambda == o.lambda && poly == o.poly; }
};

/// An element of ℝ[M] on a catalog space, held in canonical form: the list
/// of its eigencomponents sorted by eigenvalue. Two ambient polynomials that
/// agree on M have identical canonical forms, so == is equality on M.
class PolyFunction {
 public:
  explicit PolyFunction(SpacePtr space);

  static PolyFunction constant(SpacePtr space, const Rational& c);
  /// Coordinate function x_{i+1} restricted to M.
  static PolyFunction coordinate(SpacePtr space, int i);
  static PolyFunction parse(SpacePtr space, std::string_view text);
  /// Trusted constructor; components must already be canonical.
  static PolyFunction from_components(SpacePtr space, std::vector<EigenComponent> components);

  const SpaceModel& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const std::vector<EigenComponent>& components() const { return components_; }

  bool is_zero() const { return components_.empty(); }
  bool is_constant() const;
  /// Largest ambient degree among the components; −1 for zero.
  int degree() const;
  Rational max_eigenvalue() const;
  /// The component with eigenvalue λ, or zero.
  PolyFunction component(const Rational& lambda) const;

  /// Σ of the components: the canonical ambient representative.
  Polynomial ambient() const;
  double evaluate(const Vec& p) const;
  NumericPolynomial compiled() const { return NumericPolynomial(ambient()); }

  PolyFunction& operator+=(const PolyFunction& o);
  PolyFunction& operator-=(const PolyFunction& o);
  PolyFunction& operator*=(const Rational& c);
  friend PolyFunction operator+(PolyFunction a, const PolyFunction& b) { return a += b; }
  friend PolyFunction operator-(PolyFunction a, const PolyFunction& b) { return a -= b; }
  friend PolyFunction operator*(PolyFunction a, const Rational& c) { return a *= c; }
  friend PolyFunction operator*(const Rational& c, PolyFunction a) { return a *= c; }
  friend PolyFunction operator*(const PolyFunction& a, const PolyFunction& b);
  PolyFunction pow(int e) const;
  bool operator==(const PolyFunction& o) const;

  std::string to_string() const { return ambient().to_string(); }
  /// "{(λ, h), ...}" listing of the canonical form.
  std::string canonical_string() const;

 private:
  void require_same_space(const PolyFunction& o) const;
  SpacePtr space_;
  std::vector<EigenComponent> components_;
};

/// Tangential gradient as ambient polynomials, one per ambient coordinate.
struct GradientField {
  SpacePtr space;
  std::vector<Polynomial> components;
  Vec evaluate(const Vec& p) const;
};

/// Eigenvalue of a degree-k spherical harmonic on the unit sphere S^n,
/// obtained from the radial decomposition Δ_ℝ = ∂_r² + (N−1)/r ∂_r − Δ_S/r².
Rational sphere_eigenvalue(int k, int n);

/// Splits a polynomial homogeneous of degree `degree` in the block
/// [offset, offset+len) as P = Σ_j r^{2j} H_{degree−2j} with each H harmonic
/// in the block. Returns (harmonic degree, H) pairs, highest degree first.
std::vector<std::pair<int, Polynomial>> harmonic_split(const Polynomial& p, int offset, int len, int degree);

PolyFunction reduce_canonical(const SpacePtr& space, const Polynomial& p);
PolyFunction laplace_beltrami(const PolyFunction& f);
/// Normalized so that ⟨1, 1⟩ = 1.
Rational l2_inner(const PolyFunction& f, const PolyFunction& g);
/// Normalized integral over M of an ambient polynomial (exact moments).
Rational integrate(const SpaceModel& space, const Polynomial& p);
Rational sphere_moment(int n, std::span<const int> exponents);
std::vector<EigenComponent> eigen_decompose(const PolyFunction& f);
/// Entry (i, j) is ⟨∇ρ_i, ∇ρ_j⟩ = ½(ρ_iΔρ_j + ρ_jΔρ_i − Δ(ρ_iρ_j)).
std::vector<std::vector<PolyFunction>> gram_gradients(std::span<const PolyFunction> rho);
GradientField gradient(const PolyFunction& f);

/// Distinct eigenvalues of Δ on the space up to `cutoff`, ascending.
std::vector<Rational> eigenvalues_up_to(const SpaceModel& space, const Rational& cutoff);
/// A basis of E_λ made of canonical PolyFunctions (empty if λ is not an eigenvalue).
std::vector<PolyFunction> eigenspace_basis(const SpacePtr& space, const Rational& lambda);
/// Monomials x^α of total degree ≤ d, reduced to PolyFunctions.
std::vector<PolyFunction> monomial_basis(const SpacePtr& space, int max_degree);
std::vector<Monomial> monomials_up_to(int nvars, int max_degree);
std::vector<Monomial> monomials_of_degree(int nvars, int degree, int offset = 0);

}  // namespace lapfol
