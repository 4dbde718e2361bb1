#include "lapfol/polyfun.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "lapfol/errors.hpp"
#include "lapfol/linalg_q.hpp"

namespace lapfol {

namespace {

using DegreeTuple = std::vector<int>;

std::vector<int> block_degrees(const SpaceModel& space, const Monomial& m) {
  std::vector<int> d;
  d.reserve(space.factors().size());
  for (const auto& f : space.factors()) d.push_back(m.degree(f.offset, f.ambient()));
  return d;
}

Rational tuple_eigenvalue(const SpaceModel& space, const DegreeTuple& t) {
  Rational lambda = 0;
  for (std::size_t b = 0; b < t.size(); ++b) lambda += sphere_eigenvalue(t[b], space.factors()[b].dim);
  return lambda;
}

// All harmonic-degree tuples whose eigenvalue is at most cutoff.
std::vector<std::pair<DegreeTuple, Rational>> tuples_up_to(const SpaceModel& space, const Rational& cutoff) {
  std::vector<std::pair<DegreeTuple, Rational>> out;
  DegreeTuple cur(space.factors().size(), 0);
  std::function<void(std::size_t, Rational)> rec = [&](std::size_t b, Rational acc) {
    if (b == cur.size()) {
      out.emplace_back(cur, acc);
      return;
    }
    for (int k = 0;; ++k) {
      Rational l = acc + sphere_eigenvalue(k, space.factors()[b].dim);
      if (l > cutoff) break;
      cur[b] = k;
      rec(b + 1, l);
    }
    cur[b] = 0;
  };
  rec(0, 0);
  return out;
}

}  // namespace

Rational sphere_eigenvalue(int k, int n) {
  // For H harmonic and homogeneous of degree k in N = n + 1 variables,
  // Δ_ℝ H = ∂_r²H + (N−1)/r ∂_rH − (Δ_S H)/r² with ∂_r acting as k/r.
  // At r = 1: 0 = k(k−1) + (N−1)k − λ.
  const int big_n = n + 1;
  return Rational(k * (k - 1) + (big_n - 1) * k);
}

std::vector<std::pair<int, Polynomial>> harmonic_split(const Polynomial& p, int offset, int len, int degree) {
  std::vector<std::pair<int, Polynomial>> out;
  Polynomial cur = p;
  int k = degree;
  while (!cur.is_zero() && k >= 0) {
    // H = Σ_i (−1)^i r^{2i} Δ^i P / c_i,  c_i = 2^i i! Π_{m=1..i} (N + 2k − 2 − 2m),
    // and P − H = r² Q with Q = Σ_{i≥1} (−1)^{i+1} r^{2(i−1)} Δ^i P / c_i.
    Polynomial h = cur;
    Polynomial q(cur.nvars());
    Polynomial lap = cur;
    Rational c = 1;
    for (int i = 1; 2 * i <= k; ++i) {
      lap = lap.block_laplacian(offset, len);
      if (lap.is_zero()) break;
      c *= Rational(2 * i * (len + 2 * k - 2 - 2 * i));
      Polynomial term = lap;
      for (int j = 0; j < i - 1; ++j) term = term.times_block_r2(offset, len);
      Rational coeff = (i % 2 == 1 ? Rational(1) : Rational(-1)) / c;
      q += term * coeff;
      h -= term.times_block_r2(offset, len) * coeff;
    }
    if (!h.is_zero()) out.emplace_back(k, std::move(h));
    cur = std::move(q);
    k -= 2;
  }
  return out;
}

PolyFunction reduce_canonical(const SpacePtr& space, const Polynomial& p) {
  if (p.nvars() != space->ambient_dim()) throw DomainError("polynomial variable count does not match the space");
  std::map<DegreeTuple, Polynomial> parts;
  for (const auto& [m, c] : p.terms()) {
    auto key = block_degrees(*space, m);
    auto it = parts.try_emplace(key, Polynomial(p.nvars())).first;
    it->second.add_term(m, c);
  }
  const auto factors = space->factors();
  for (std::size_t b = 0; b < factors.size(); ++b) {
    std::map<DegreeTuple, Polynomial> next;
    for (const auto& [tuple, poly] : parts) {
      for (auto& [k, h] : harmonic_split(poly, factors[b].offset, factors[b].ambient(), tuple[b])) {
        DegreeTuple t = tuple;
        t[b] = k;
        auto it = next.try_emplace(t, Polynomial(p.nvars())).first;
        it->second += h;
      }
    }
    parts = std::move(next);
  }
  std::map<Rational, Polynomial> by_lambda;
  for (auto& [tuple, poly] : parts) {
    if (poly.is_zero()) continue;
    auto it = by_lambda.try_emplace(tuple_eigenvalue(*space, tuple), Polynomial(p.nvars())).first;
    it->second += poly;
  }
  std::vector<EigenComponent> comps;
  for (auto& [l, poly] : by_lambda) {
    if (!poly.is_zero()) comps.push_back({l, std::move(poly)});
  }
  return PolyFunction::from_components(space, std::move(comps));
}

PolyFunction::PolyFunction(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw DomainError("PolyFunction needs a space");
}

PolyFunction PolyFunction::constant(SpacePtr space, const Rational& c) {
  const int n = space->ambient_dim();
  PolyFunction f(std::move(space));
  if (c != 0) f.components_.push_back({0, Polynomial::constant(n, c)});
  return f;
}

PolyFunction PolyFunction::coordinate(SpacePtr space, int i) {
  const int n = space->ambient_dim();
  return reduce_canonical(space, Polynomial::variable(n, i));
}

PolyFunction PolyFunction::parse(SpacePtr space, std::string_view text) {
  const int n = space->ambient_dim();
  return reduce_canonical(space, Polynomial::parse(text, n));
}

PolyFunction PolyFunction::from_components(SpacePtr space, std::vector<EigenComponent> components) {
  PolyFunction f(std::move(space));
  f.components_ = std::move(components);
  return f;
}

bool PolyFunction::is_constant() const {
  return components_.empty() || (components_.size() == 1 && components_[0].lambda == 0);
}

int PolyFunction::degree() const {
  int d = -1;
  for (const auto& c : components_) d = std::max(d, c.poly.degree());
  return d;
}

Rational PolyFunction::max_eigenvalue() const { return components_.empty() ? Rational(0) : components_.back().lambda; }

PolyFunction PolyFunction::component(const Rational& lambda) const {
  PolyFunction out(space_);
  for (const auto& c : components_) {
    if (c.lambda == lambda) out.components_.push_back(c);
  }
  return out;
}

Polynomial PolyFunction::ambient() const {
  Polynomial p(space_->ambient_dim());
  for (const auto& c : components_) p += c.poly;
  return p;
}

double PolyFunction::evaluate(const Vec& p) const {
  return ambient().evaluate(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
}

void PolyFunction::require_same_space(const PolyFunction& o) const {
  if (!(*space_ == *o.space_)) throw PreconditionError("PolyFunctions live on different spaces");
}

PolyFunction& PolyFunction::operator+=(const PolyFunction& o) {
  require_same_space(o);
  std::map<Rational, Polynomial> acc;
  for (auto& c : components_) acc.emplace(c.lambda, std::move(c.poly));
  for (const auto& c : o.components_) {
    auto it = acc.try_emplace(c.lambda, Polynomial(space_->ambient_dim())).first;
    it->second += c.poly;
  }
  components_.clear();
  for (auto& [l, p] : acc) {
    if (!p.is_zero()) components_.push_back({l, std::move(p)});
  }
  return *this;
}

PolyFunction& PolyFunction::operator-=(const PolyFunction& o) { return *this += o * Rational(-1); }

PolyFunction& PolyFunction::operator*=(const Rational& c) {
  if (c == 0) {
    components_.clear();
    return *this;
  }
  for (auto& comp : components_) comp.poly *= c;
  return *this;
}

PolyFunction operator*(const PolyFunction& a, const PolyFunction& b) {
  a.require_same_space(b);
  if (a.is_zero() || b.is_zero()) return PolyFunction(a.space_);
  if (a.is_constant()) return b * a.components_[0].poly.coefficient(Monomial{});
  if (b.is_constant()) return a * b.components_[0].poly.coefficient(Monomial{});
  return reduce_canonical(a.space_, a.ambient() * b.ambient());
}

PolyFunction PolyFunction::pow(int e) const {
  PolyFunction result = constant(space_, 1);
  for (int i = 0; i < e; ++i) result = result * *this;
  return result;
}

bool PolyFunction::operator==(const PolyFunction& o) const {
  return *space_ == *o.space_ && components_ == o.components_;
}

std::string PolyFunction::canonical_string() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) os << ", ";
    os << "(" << rational_to_string(components_[i].lambda) << ", " << components_[i].poly.to_string() << ")";
  }
  os << "}";
  return os.str();
}

PolyFunction laplace_beltrami(const PolyFunction& f) {
  std::vector<EigenComponent> comps;
  for (const auto& c : f.components()) {
    if (c.lambda == 0) continue;
    comps.push_back({c.lambda, c.poly * c.lambda});
  }
  return PolyFunction::from_components(f.space_ptr(), std::move(comps));
}

namespace {

// (m − 1)!! for even m, with (−1)!! = 1.
mpz_class odd_double_factorial(int m) {
  mpz_class r = 1;
  for (int k = m - 1; k > 1; k -= 2) r *= k;
  return r;
}

}  // namespace

Rational sphere_moment(int n, std::span<const int> exponents) {
  // Normalized ∫_{S^n} x^α = Π (α_i − 1)!! / Π_{j=0}^{|α|/2 − 1} (N + 2j), N = n + 1;
  // zero as soon as one exponent is odd.
  int total = 0;
  mpz_class num = 1;
  for (int a : exponents) {
    if (a % 2) return 0;
    total += a;
    num *= odd_double_factorial(a);
  }
  mpz_class den = 1;
  for (int j = 0; j < total / 2; ++j) den *= n + 1 + 2 * j;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational integrate(const SpaceModel& space, const Polynomial& p) {
  Rational sum = 0;
  std::vector<int> exps;
  for (const auto& [m, c] : p.terms()) {
    Rational term = c;
    for (const auto& f : space.factors()) {
      exps.clear();
      for (int i = f.offset; i < f.offset + f.ambient(); ++i) exps.push_back(m.exponent(i));
      term *= sphere_moment(f.dim, exps);
      if (term == 0) break;
    }
    sum += term;
  }
  return sum;
}

Rational l2_inner(const PolyFunction& f, const PolyFunction& g) {
  if (!(f.space() == g.space())) throw PreconditionError("l2_inner of functions on different spaces");
  Rational sum = 0;
  auto it = g.components().begin();
  for (const auto& c : f.components()) {
    while (it != g.components().end() && it->lambda < c.lambda) ++it;
    if (it == g.components().end()) break;
    if (it->lambda == c.lambda) sum += integrate(f.space(), c.poly * it->poly);
  }
  return sum;
}

std::vector<EigenComponent> eigen_decompose(const PolyFunction& f) { return f.components(); }

std::vector<std::vector<PolyFunction>> gram_gradients(std::span<const PolyFunction> rho) {
  const std::size_t k = rho.size();
  std::vector<std::vector<PolyFunction>> g;
  if (k == 0) return g;
  for (const auto& r : rho) {
    if (!(r.space() == rho[0].space())) throw PreconditionError("gram_gradients needs a common space");
  }
  std::vector<PolyFunction> lap;
  for (const auto& r : rho) lap.push_back(laplace_beltrami(r));
  g.assign(k, std::vector<PolyFunction>(k, PolyFunction(rho[0].space_ptr())));
  const Rational half(1, 2);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      PolyFunction e = (rho[i] * lap[j] + rho[j] * lap[i] - laplace_beltrami(rho[i] * rho[j])) * half;
      g[i][j] = e;
      g[j][i] = e;
    }
  }
  return g;
}

GradientField gradient(const PolyFunction& f) {
  const auto& space = f.space();
  const int n = space.ambient_dim();
  Polynomial p = f.ambient();
  GradientField out{f.space_ptr(), std::vector<Polynomial>(n, Polynomial(n))};
  for (const auto& fac : space.factors()) {
    // ∇_b P − (x_b · ∇_b P) x_b is the tangential part on the unit sphere factor.
    Polynomial radial = p.block_euler(fac.offset, fac.ambient());
    for (int i = fac.offset; i < fac.offset + fac.ambient(); ++i) {
      out.components[i] = p.derivative(i) - radial * Polynomial::variable(n, i);
    }
  }
  return out;
}

Vec GradientField::evaluate(const Vec& p) const {
  Vec g(static_cast<int>(components.size()));
  std::span<const double> x(p.data(), static_cast<std::size_t>(p.size()));
  for (std::size_t i = 0; i < components.size(); ++i) g[static_cast<int>(i)] = components[i].evaluate(x);
  return g;
}

std::vector<Rational> eigenvalues_up_to(const SpaceModel& space, const Rational& cutoff) {
  std::vector<Rational> ls;
  for (const auto& [t, l] : tuples_up_to(space, cutoff)) ls.push_back(l);
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  return ls;
}

std::vector<Monomial> monomials_of_degree(int nvars, int degree, int offset) {
  std::vector<Monomial> out;
  std::function<void(int, int, Monomial)> rec = [&](int i, int left, Monomial m) {
    if (i == nvars - 1) {
      out.push_back(m.with_exponent(offset + i, left));
      return;
    }
    for (int e = left; e >= 0; --e) rec(i + 1, left - e, m.with_exponent(offset + i, e));
  };
  if (nvars == 0) {
    if (degree == 0) out.push_back(Monomial{});
    return out;
  }
  rec(0, degree, Monomial{});
  return out;
}

std::vector<Monomial> monomials_up_to(int nvars, int max_degree) {
  std::vector<Monomial> out;
  for (int d = 0; d <= max_degree; ++d) {
    auto md = monomials_of_degree(nvars, d);
    out.insert(out.end(), md.begin(), md.end());
  }
  return out;
}

std::vector<PolyFunction> monomial_basis(const SpacePtr& space, int max_degree) {
  std::vector<PolyFunction> out;
  const int n = space->ambient_dim();
  for (const auto& m : monomials_up_to(n, max_degree)) out.push_back(reduce_canonical(space, Polynomial::monomial(n, m)));
  return out;
}

std::vector<PolyFunction> eigenspace_basis(const SpacePtr& space, const Rational& lambda) {
  const int n = space->ambient_dim();
  const auto factors = space->factors();
  std::vector<PolyFunction> out;
  for (const auto& [tuple, l] : tuples_up_to(*space, lambda)) {
    if (l != lambda) continue;
    // Harmonic degree-k basis per factor, then tensor products.
    std::vector<std::vector<Polynomial>> per_block;
    for (std::size_t b = 0; b < factors.size(); ++b) {
      const auto& f = factors[b];
      EchelonBasis ech;
      std::vector<Polynomial> basis;
      for (const auto& m : monomials_of_degree(f.ambient(), tuple[b], f.offset)) {
        auto split = harmonic_split(Polynomial::monomial(n, m), f.offset, f.ambient(), tuple[b]);
        if (split.empty() || split.front().first != tuple[b]) continue;
        const Polynomial& h = split.front().second;
        SparseVec v;
        for (const auto& [mm, c] : h.terms()) v.emplace(CoordKey{0, mm}, c);
        if (ech.insert(v)) basis.push_back(h);
      }
      per_block.push_back(std::move(basis));
    }
    std::vector<Polynomial> prods{Polynomial::constant(n, 1)};
    for (const auto& block : per_block) {
      std::vector<Polynomial> next;
      for (const auto& a : prods) {
        for (const auto& h : block) next.push_back(a * h);
      }
      prods = std::move(next);
    }
    for (auto& p : prods) out.push_back(PolyFunction::from_components(space, {{lambda, std::move(p)}}));
  }
  return out;
}

}  // namespace lapfol
