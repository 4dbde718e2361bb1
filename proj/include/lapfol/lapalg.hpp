#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lapfol/linalg_q.hpp"
#include "lapfol/polyfun.hpp"
#include "lapfol/submetry.hpp"

namespace lapfol {

/// Finitely generated subalgebra A ⊂ ℝ[M]. The span of generator monomials
/// of nominal degree ≤ d (Σ a_i deg g_i) is cached for every d ≤ cap as an
/// independent list of PolyFunctions; the lists are nested. Constants are
/// always included.
class Subalgebra {
 public:
  Subalgebra(SpacePtr space, std::vector<PolyFunction> generators, int cap = default_tolerances().degree_cap);
  static Subalgebra parse(SpacePtr space, const std::vector<std::string>& generators,
                          int cap = default_tolerances().degree_cap);

  const SpacePtr& space_ptr() const { return space_; }
  const std::vector<PolyFunction>& generators() const { return generators_; }
  int cap() const { return cap_; }

  /// Basis of the degree ≤ d filtration piece (a prefix of the full basis).
  std::vector<PolyFunction> basis(int d) const;
  int dimension(int d) const;
  /// Exponent vector (one per generator) that produced basis element k.
  const std::vector<int>& exponents(int k) const { return exps_.at(static_cast<std::size_t>(k)); }

  /// Coefficients over basis(d) expressing f, or nullopt.
  std::optional<std::vector<Rational>> express(const PolyFunction& f, int d) const;
  bool contains(const PolyFunction& f, int d) const { return express(f, d).has_value(); }
  bool contains(const PolyFunction& f) const { return contains(f, cap_); }
  /// f minus its reduction against basis(d); zero iff f lies in the span.
  PolyFunction residual(const PolyFunction& f, int d) const;

  /// Basis of (filtration piece d) ∩ E_λ.
  std::vector<PolyFunction> eigen_intersection(const Rational& lambda, int d) const;
  std::vector<PolyFunction> eigen_intersection(const Rational& lambda) const {
    return eigen_intersection(lambda, cap_);
  }

 private:
  SpacePtr space_;
  std::vector<PolyFunction> generators_;
  int cap_;
  std::vector<PolyFunction> basis_;        // ordered by nominal degree
  std::vector<std::vector<int>> exps_;
  std::vector<int> count_;                 // count_[d] = dim of piece d
  std::vector<EchelonBasis> echelon_;      // per degree, over basis(d)
};

struct ClosureWitness {
  int generator = 0;
  std::vector<Rational> coefficients;  // over A.basis(bound)
};

struct ClosureCertificate {
  bool closed = false;
  int degree_bound = 0;
  std::vector<ClosureWitness> witnesses;
  std::optional<int> counterexample;  // generator index
  std::optional<PolyFunction> residual;
  std::string summary() const;
};

/// Decides, generator by generator, whether Δg lies in the degree ≤ bound
/// piece. A failure means "not closed within bound" only.
ClosureCertificate check_laplacian_closed(const Subalgebra& A, int degree_bound);
/// Re-expands a witness; equals Δ(generator) when the certificate is valid.
PolyFunction expand_witness(const Subalgebra& A, const ClosureCertificate& cert, const ClosureWitness& w);

/// Eigenspace-wise exact L² projection onto A. Precomputes an orthogonal
/// basis of A ∩ E_λ for each eigenvalue up to the cutoff.
class ReynoldsOperator {
 public:
  ReynoldsOperator(const Subalgebra& A, const Rational& eigen_cutoff);
  PolyFunction operator()(const PolyFunction& f) const;
  const Rational& cutoff() const { return cutoff_; }
  int dimension(const Rational& lambda) const;

 private:
  SpacePtr space_;
  Rational cutoff_;
  std::map<Rational, std::vector<std::pair<PolyFunction, Rational>>> ortho_;  // (u, ⟨u,u⟩)
};

PolyFunction reynolds(const Subalgebra& A, const PolyFunction& f, const Rational& eigen_cutoff);

struct SeparationReport {
  bool separates = true;
  int pairs_tested = 0;
  double margin = 0;  // min over tested pairs of max_i |ρ_i(p) − ρ_i(q)|
  std::optional<std::pair<AmbientPoint, AmbientPoint>> violation;
  double fiber_constancy = 0;
};

/// Random pairs plus each catalog companion point of every sample; pairs on
/// the same fiber (closed-form leaf distance ≤ min_leaf_gap) are skipped.
SeparationReport verify_separation(const std::vector<PolyFunction>& rho, const SubmetrySpec& sigma, int samples,
                                   double tol, std::uint64_t seed = kDefaultSeed);

struct MaximalityEntry {
  Rational lambda;
  int dim_eigenspace = 0;
  int dim_algebra = 0;
  int dim_basic = 0;
  std::vector<double> singular_values;
  std::vector<PolyFunction> basic_basis;   // rationalized
  std::vector<PolyFunction> outside;       // rationalized basic functions not in A
  double fit_residual = 0;                 // least-squares fit of basic vectors from A ∩ E_λ
  bool agree = false;
};

struct MaximalityReport {
  std::vector<MaximalityEntry> entries;
  bool agree = true;
  std::optional<Rational> first_mismatch;
};

/// Compares A ∩ E_λ with the σ-basic part of E_λ for every λ ≤ cutoff.
MaximalityReport maximality_probe(const Subalgebra& A, const SubmetrySpec& sigma, const Rational& eigen_cutoff,
                                  std::uint64_t seed = kDefaultSeed);

}  // namespace lapfol
