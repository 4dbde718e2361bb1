#include "lapfol/lapalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "lapfol/errors.hpp"
#include "lapfol/kernels.hpp"

namespace lapfol {

// ---- Subalgebra ----

Subalgebra::Subalgebra(SpacePtr space, std::vector<PolyFunction> generators, int cap)
    : space_(std::move(space)), generators_(std::move(generators)), cap_(cap) {
  if (cap_ < 0 || cap_ > default_tolerances().degree_cap)
    throw ConfigError("filtration cap " + std::to_string(cap_) + " outside [0, " +
                      std::to_string(default_tolerances().degree_cap) + "]");
  std::vector<int> active, deg;
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (!(generators_[i].space() == *space_)) throw PreconditionError("generator on a different space");
    if (generators_[i].is_constant()) continue;
    active.push_back(static_cast<int>(i));
    deg.push_back(generators_[i].degree());
  }
  const int ng = static_cast<int>(generators_.size());

  // Exponent vectors over the non-constant generators with nominal degree ≤ cap.
  struct Candidate {
    int degree;
    std::vector<int> exps;
  };
  std::vector<Candidate> cands;
  std::vector<int> e(static_cast<std::size_t>(ng), 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int d) {
    if (k == active.size()) {
      cands.push_back({d, e});
      return;
    }
    const int g = active[k];
    for (int a = 0; d + a * deg[k] <= cap_; ++a) {
      e[static_cast<std::size_t>(g)] = a;
      rec(k + 1, d + a * deg[k]);
    }
    e[static_cast<std::size_t>(g)] = 0;
  };
  rec(0, 0);
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    return a.exps > b.exps;
  });

  std::map<std::vector<int>, PolyFunction> memo;
  memo.emplace(std::vector<int>(static_cast<std::size_t>(ng), 0), PolyFunction::constant(space_, 1));
  auto product = [&](const std::vector<int>& ex) -> const PolyFunction& {
    // Candidates come in increasing degree, so the parent (one factor less)
    // is already memoized.
    auto it = memo.find(ex);
    if (it != memo.end()) return it->second;
    std::vector<int> parent = ex;
    int last = ng - 1;
    while (parent[static_cast<std::size_t>(last)] == 0) --last;
    parent[static_cast<std::size_t>(last)] -= 1;
    PolyFunction v = memo.at(parent) * generators_[static_cast<std::size_t>(last)];
    return memo.emplace(ex, std::move(v)).first->second;
  };

  EchelonBasis ech;
  count_.assign(static_cast<std::size_t>(cap_ + 1), 0);
  std::size_t ci = 0;
  for (int d = 0; d <= cap_; ++d) {
    for (; ci < cands.size() && cands[ci].degree == d; ++ci) {
      const PolyFunction& v = product(cands[ci].exps);
      const SparseVec coords = coordinates(v);
      if (ech.reduce(coords).residual.empty()) continue;
      ech.insert(coords);
      basis_.push_back(v);
      exps_.push_back(cands[ci].exps);
    }
    count_[static_cast<std::size_t>(d)] = static_cast<int>(basis_.size());
    echelon_.push_back(ech);
  }
}

Subalgebra Subalgebra::parse(SpacePtr space, const std::vector<std::string>& generators, int cap) {
  std::vector<PolyFunction> gens;
  for (const auto& g : generators) gens.push_back(PolyFunction::parse(space, g));
  return Subalgebra(std::move(space), std::move(gens), cap);
}

int Subalgebra::dimension(int d) const {
  if (d < 0) return 0;
  if (d > cap_) throw ConfigError("degree " + std::to_string(d) + " above the filtration cap");
  return count_[static_cast<std::size_t>(d)];
}

std::vector<PolyFunction> Subalgebra::basis(int d) const {
  const int n = dimension(d);
  return {basis_.begin(), basis_.begin() + n};
}

std::optional<std::vector<Rational>> Subalgebra::express(const PolyFunction& f, int d) const {
  dimension(d);
  return echelon_[static_cast<std::size_t>(d)].express(coordinates(f));
}

PolyFunction Subalgebra::residual(const PolyFunction& f, int d) const {
  dimension(d);
  return from_coordinates(space_, echelon_[static_cast<std::size_t>(d)].reduce(coordinates(f)).residual);
}

std::vector<PolyFunction> Subalgebra::eigen_intersection(const Rational& lambda, int d) const {
  const int n = dimension(d);
  // Combinations whose components off E_λ cancel.
  std::vector<SparseVec> cols;
  for (int i = 0; i < n; ++i) {
    SparseVec c = coordinates(basis_[static_cast<std::size_t>(i)]);
    std::erase_if(c, [&](const auto& kv) { return kv.first.lambda == lambda; });
    cols.push_back(std::move(c));
  }
  std::vector<PolyFunction> out;
  EchelonBasis ech;
  for (const auto& k : kernel(cols)) {
    PolyFunction v(space_);
    for (int i = 0; i < n; ++i)
      if (k[static_cast<std::size_t>(i)] != 0)
        v += basis_[static_cast<std::size_t>(i)].component(lambda) * k[static_cast<std::size_t>(i)];
    if (v.is_zero()) continue;
    if (ech.insert(coordinates(v))) out.push_back(std::move(v));
  }
  return out;
}

// ---- closure ----

std::string ClosureCertificate::summary() const {
  std::ostringstream os;
  if (closed) {
    os << "closed within degree " << degree_bound;
  } else {
    os << "not closed within degree " << degree_bound << ": generator " << *counterexample
       << " has residual " << residual->to_string();
  }
  return os.str();
}

ClosureCertificate check_laplacian_closed(const Subalgebra& A, int degree_bound) {
  if (degree_bound > A.cap() || degree_bound > default_tolerances().degree_cap)
    throw ConfigError("degree bound " + std::to_string(degree_bound) + " exceeds the cap " + std::to_string(A.cap()));
  ClosureCertificate cert;
  cert.degree_bound = degree_bound;
  const auto& gens = A.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (gens[i].degree() > degree_bound)
      throw PreconditionError("generator degree above the bound " + std::to_string(degree_bound));
  }
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const PolyFunction lg = laplace_beltrami(gens[i]);
    auto w = A.express(lg, degree_bound);
    if (!w) {
      cert.closed = false;
      cert.counterexample = static_cast<int>(i);
      cert.residual = A.residual(lg, degree_bound);
      return cert;
    }
    cert.witnesses.push_back({static_cast<int>(i), std::move(*w)});
  }
  cert.closed = true;
  return cert;
}

PolyFunction expand_witness(const Subalgebra& A, const ClosureCertificate& cert, const ClosureWitness& w) {
  const auto b = A.basis(cert.degree_bound);
  PolyFunction out(A.space_ptr());
  for (std::size_t k = 0; k < w.coefficients.size() && k < b.size(); ++k)
    if (w.coefficients[k] != 0) out += b[k] * w.coefficients[k];
  return out;
}

// ---- Reynolds ----

ReynoldsOperator::ReynoldsOperator(const Subalgebra& A, const Rational& eigen_cutoff)
    : space_(A.space_ptr()), cutoff_(eigen_cutoff) {
  for (const auto& lam : eigenvalues_up_to(*space_, cutoff_)) {
    std::vector<std::pair<PolyFunction, Rational>> ortho;
    for (const auto& v : A.eigen_intersection(lam)) {
      PolyFunction u = v;
      for (const auto& [w, ww] : ortho) u -= w * (l2_inner(v, w) / ww);
      if (u.is_zero()) continue;
      Rational uu = l2_inner(u, u);
      ortho.emplace_back(std::move(u), std::move(uu));
    }
    ortho_.emplace(lam, std::move(ortho));
  }
}

int ReynoldsOperator::dimension(const Rational& lambda) const {
  auto it = ortho_.find(lambda);
  return it == ortho_.end() ? 0 : static_cast<int>(it->second.size());
}

PolyFunction ReynoldsOperator::operator()(const PolyFunction& f) const {
  PolyFunction out(space_);
  for (const auto& c : f.components()) {
    if (c.lambda > cutoff_)
      throw CutoffExceeded("component with eigenvalue " + rational_to_string(c.lambda) + " above cutoff " +
                           rational_to_string(cutoff_));
    auto it = ortho_.find(c.lambda);
    if (it == ortho_.end()) continue;
    const PolyFunction fc = PolyFunction::from_components(space_, {c});
    for (const auto& [u, uu] : it->second) out += u * (l2_inner(fc, u) / uu);
  }
  return out;
}

PolyFunction reynolds(const Subalgebra& A, const PolyFunction& f, const Rational& eigen_cutoff) {
  for (const auto& c : f.components())
    if (c.lambda > eigen_cutoff)
      throw CutoffExceeded("component with eigenvalue " + rational_to_string(c.lambda) + " above cutoff " +
                           rational_to_string(eigen_cutoff));
  return ReynoldsOperator(A, f.is_zero() ? Rational(0) : f.max_eigenvalue())(f);
}

// ---- separation ----

SeparationReport verify_separation(const std::vector<PolyFunction>& rho, const SubmetrySpec& sigma, int samples,
                                   double tol, std::uint64_t seed) {
  SeparationReport rep;
  const auto grid = sample_grid(sigma, samples, seed);
  std::vector<AmbientPoint> probe(grid.begin(), grid.begin() + std::min<std::ptrdiff_t>(grid.size(), 32));
  rep.fiber_constancy = fiber_constancy(rho, sigma, probe);
  if (rep.fiber_constancy > tol)
    throw NotBasicError("quotient candidate varies by " + std::to_string(rep.fiber_constancy) + " along a fiber of " +
                        sigma.id());

  std::vector<std::pair<AmbientPoint, AmbientPoint>> pairs;
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    pairs.emplace_back(grid[i], grid[(i + 1) % n]);
    pairs.emplace_back(grid[i], grid[(i + n / 2) % n]);
    for (auto& c : sigma.companion_points(grid[i])) pairs.emplace_back(grid[i], std::move(c));
  }
  rep.margin = std::numeric_limits<double>::infinity();
  for (const auto& [p, q] : pairs) {
    if (sigma.leaf_distance(p, q) <= default_tolerances().min_leaf_gap) continue;
    double sep = 0;
    for (const auto& r : rho) sep = std::max(sep, std::fabs(r.evaluate(p) - r.evaluate(q)));
    ++rep.pairs_tested;
    rep.margin = std::min(rep.margin, sep);
    if (sep <= tol && rep.separates) {
      rep.separates = false;
      rep.violation = std::make_pair(p, q);
    }
  }
  if (rep.pairs_tested == 0) rep.margin = 0;
  return rep;
}

// ---- maximality ----

namespace {

std::vector<NumericPolynomial> compile_all(const std::vector<PolyFunction>& fs) {
  std::vector<NumericPolynomial> out;
  for (const auto& f : fs) out.push_back(f.compiled());
  return out;
}

// Row-reduced echelon form with partial pivoting (rows are basis vectors).
Mat rref(Mat m, double eps) {
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index piv;
    const double best = m.col(col).segment(row, m.rows() - row).cwiseAbs().maxCoeff(&piv);
    if (best < eps) continue;
    piv += row;
    m.row(row).swap(m.row(piv));
    m.row(row) /= m(row, col);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (r != row) m.row(r) -= m(r, col) * m.row(row);
    ++row;
  }
  return m;
}

}  // namespace

MaximalityReport maximality_probe(const Subalgebra& A, const SubmetrySpec& sigma, const Rational& eigen_cutoff,
                                  std::uint64_t seed) {
  if (!(*A.space_ptr() == sigma.space())) throw PreconditionError("algebra and submetry live on different spaces");
  const auto& tol = default_tolerances();
  MaximalityReport rep;
  for (const auto& lam : eigenvalues_up_to(sigma.space(), eigen_cutoff)) {
    MaximalityEntry ent;
    ent.lambda = lam;
    const auto basis = eigenspace_basis(sigma.space_ptr(), lam);
    const auto m = static_cast<Eigen::Index>(basis.size());
    ent.dim_eigenspace = static_cast<int>(m);
    const auto inter = A.eigen_intersection(lam);
    ent.dim_algebra = static_cast<int>(inter.size());

    // L²-orthonormal coordinates on E_λ: e = φ Lᵀ with G = L Lᵀ.
    Mat g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        g(i, j) = l2_inner(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]).get_d();
    const Eigen::LLT<Mat> llt(g);
    const Mat L = llt.matrixL();
    const Mat Linvt = L.transpose().inverse();

    const int npts = static_cast<int>(std::max<Eigen::Index>(3 * m, 2 * m + 20));
    const auto pts = sample_grid(sigma, npts, seed);
    const auto nb = compile_all(basis);
    const Mat V = evaluate_basis(nb, pts);
    Mat W(V.rows(), m);
    int order = 24;
    for (const auto& b : basis) order = std::max(order, 2 * b.degree() + 2);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto av = fiber_averages(sigma, nb[static_cast<std::size_t>(i)], pts, order);
      W.col(i) = Eigen::Map<const Vec>(av.data(), static_cast<Eigen::Index>(av.size()));
    }
    const Mat C = V.colPivHouseholderQr().solve(W);
    const Mat P = L.transpose() * C * Linvt;
    Eigen::JacobiSVD<Mat> svd(P, Eigen::ComputeFullU);
    const Vec s = svd.singularValues();
    const double thr = tol.rank_threshold * std::max(1.0, s.size() ? s(0) : 0.0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      ent.singular_values.push_back(s(i));
      if (s(i) > thr / tol.rank_ambiguity_factor && s(i) < thr * tol.rank_ambiguity_factor)
        throw InconclusiveError("inconclusive at lambda = " + rational_to_string(lam));
      if (s(i) > thr) ++r;
    }
    ent.dim_basic = r;

    if (r > 0) {
      const Mat coeff = (Linvt * svd.matrixU().leftCols(r)).transpose();  // r × m over `basis`
      const Mat red = rref(coeff, 1e-9);
      for (Eigen::Index i = 0; i < r; ++i) {
        PolyFunction f(sigma.space_ptr());
        for (Eigen::Index j = 0; j < m; ++j) {
          const Rational q = rationalize(red(i, j));
          if (q != 0) f += basis[static_cast<std::size_t>(j)] * q;
        }
        ent.basic_basis.push_back(f);
        if (!A.contains(f)) ent.outside.push_back(f);
      }
      // Least-squares fit of each basic vector from A ∩ E_λ at the sample points.
      const Mat B = V * red.transpose();
      if (!inter.empty()) {
        const Mat Ai = evaluate_basis(compile_all(inter), pts);
        const Mat X = Ai.colPivHouseholderQr().solve(B);
        ent.fit_residual = (Ai * X - B).cwiseAbs().maxCoeff();
      } else {
        ent.fit_residual = B.cwiseAbs().maxCoeff();
      }
    }
    ent.agree = ent.dim_algebra == ent.dim_basic && ent.outside.empty();
    if (!ent.agree && rep.agree) {
      rep.agree = false;
      rep.first_mismatch = lam;
    }
    rep.entries.push_back(std::move(ent));
  }
  return rep;
}

}  // namespace lapfol
