#pragma once

#include <map>
#include <optional>
#include <vector>

#include "lapfol/polyfun.hpp"

namespace lapfol {

/// Coordinate of a canonical PolyFunction: (eigenvalue, monomial).
struct CoordKey {
  Rational lambda;
  Monomial mono;
  bool operator<(const CoordKey& o) const {
    if (lambda != o.lambda) return lambda < o.lambda;
    return MonomialLess{}(mono, o.mono);
  }
};

using SparseVec = std::map<CoordKey, Rational>;

/// Canonical forms are unique, so linear relations among PolyFunctions are
/// linear relations among these coordinate vectors.
SparseVec coordinates(const PolyFunction& f);
PolyFunction from_coordinates(const SpacePtr& space, const SparseVec& v);

/// Incremental reduced row-echelon basis over ℚ. Every stored row keeps the
/// combination of inserted vectors it came from, so membership queries return
/// witnesses in terms of the inserted elements.
class EchelonBasis {
 public:
  struct Reduction {
    SparseVec residual;                 // zero iff the query is in the span
    std::vector<Rational> combination;  // coefficients over inserted vectors
  };

  /// Inserts v; returns true when v was independent of the current span.
  /// Dependent vectors are still counted as inserted (with index) so that
  /// witnesses refer to the caller's numbering.
  bool insert(const SparseVec& v);
  Reduction reduce(const SparseVec& v) const;
  std::optional<std::vector<Rational>> express(const SparseVec& v) const;

  int rank() const { return static_cast<int>(rows_.size()); }
  int inserted() const { return inserted_; }

 private:
  struct Row {
    CoordKey pivot;
    SparseVec row;
    std::vector<Rational> comb;
  };
  std::vector<Row> rows_;
  int inserted_ = 0;
};

void axpy(SparseVec& y, const Rational& a, const SparseVec& x);

/// Kernel of the linear map given by the columns (exact). Each returned
/// vector has one entry per column.
std::vector<std::vector<Rational>> kernel(const std::vector<SparseVec>& columns);

}  // namespace lapfol
