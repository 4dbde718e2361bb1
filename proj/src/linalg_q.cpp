#include "lapfol/linalg_q.hpp"

namespace lapfol {

SparseVec coordinates(const PolyFunction& f) {
  SparseVec v;
  for (const auto& c : f.components()) {
    for (const auto& [m, q] : c.poly.terms()) v.emplace(CoordKey{c.lambda, m}, q);
  }
  return v;
}

PolyFunction from_coordinates(const SpacePtr& space, const SparseVec& v) {
  const int n = space->ambient_dim();
  std::vector<EigenComponent> comps;
  for (const auto& [key, q] : v) {
    if (q == 0) continue;
    if (comps.empty() || comps.back().lambda != key.lambda) comps.push_back({key.lambda, Polynomial(n)});
    comps.back().poly.add_term(key.mono, q);
  }
  std::erase_if(comps, [](const EigenComponent& c) { return c.poly.is_zero(); });
  return PolyFunction::from_components(space, std::move(comps));
}

void axpy(SparseVec& y, const Rational& a, const SparseVec& x) {
  if (a == 0) return;
  for (const auto& [k, v] : x) {
    auto [it, inserted] = y.try_emplace(k, 0);
    it->second += a * v;
    if (it->second == 0) y.erase(it);
  }
}

namespace {

void axpy_dense(std::vector<Rational>& y, const Rational& a, const std::vector<Rational>& x) {
  if (a == 0) return;
  if (y.size() < x.size()) y.resize(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace

EchelonBasis::Reduction EchelonBasis::reduce(const SparseVec& v) const {
  Reduction r{v, std::vector<Rational>(static_cast<std::size_t>(inserted_), 0)};
  for (const auto& row : rows_) {
    auto it = r.residual.find(row.pivot);
    if (it == r.residual.end()) continue;
    Rational c = it->second;
    axpy(r.residual, -c, row.row);
    // residual = v − Σ c_k row_k and row_k = Σ comb_k · inserted, so the
    // witness accumulates +c · comb_k.
    axpy_dense(r.combination, c, row.comb);
  }
  return r;
}

bool EchelonBasis::insert(const SparseVec& v) {
  Reduction r = reduce(v);
  const std::size_t idx = static_cast<std::size_t>(inserted_++);
  for (auto& row : rows_) row.comb.resize(static_cast<std::size_t>(inserted_), 0);
  if (r.residual.empty()) return false;
  // New row = (v − Σ c_k row_k) / lead, expressed over inserted vectors.
  std::vector<Rational> comb(static_cast<std::size_t>(inserted_), 0);
  for (std::size_t i = 0; i < r.combination.size(); ++i) comb[i] = -r.combination[i];
  comb[idx] += 1;
  // Pivot on the highest coordinate so that residuals of later queries keep
  // their low-eigenvalue, low-degree part.
  CoordKey pivot = r.residual.rbegin()->first;
  Rational lead = r.residual.rbegin()->second;
  Rational inv = 1 / lead;
  for (auto& [k, q] : r.residual) q *= inv;
  for (auto& q : comb) q *= inv;
  Row fresh{pivot, std::move(r.residual), std::move(comb)};
  for (auto& row : rows_) {
    auto it = row.row.find(pivot);
    if (it == row.row.end()) continue;
    Rational c = it->second;
    axpy(row.row, -c, fresh.row);
    axpy_dense(row.comb, -c, fresh.comb);
  }
  rows_.push_back(std::move(fresh));
  return true;
}

std::optional<std::vector<Rational>> EchelonBasis::express(const SparseVec& v) const {
  Reduction r = reduce(v);
  if (!r.residual.empty()) return std::nullopt;
  r.combination.resize(static_cast<std::size_t>(inserted_), 0);
  return r.combination;
}

std::vector<std::vector<Rational>> kernel(const std::vector<SparseVec>& columns) {
  // Insert columns one by one; a dependent column j gives the kernel vector
  // e_j − (its witness).
  EchelonBasis ech;
  std::vector<std::vector<Rational>> out;
  const std::size_t n = columns.size();
  for (std::size_t j = 0; j < n; ++j) {
    auto w = ech.express(columns[j]);
    if (w) {
      std::vector<Rational> k(n, 0);
      for (std::size_t i = 0; i < w->size(); ++i) k[i] = -(*w)[i];
      k[j] += 1;
      out.push_back(std::move(k));
    }
    ech.insert(columns[j]);
  }
  return out;
}

}  // namespace lapfol
