#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "odepth/lie.hpp"

namespace odepth {

/// Subspace of the truncated free Lie algebra in reduced echelon form over
/// Lyndon coordinates. Pivot order is degree ascending, then Lyndon order, so
/// a row's pivot degree is its leading degree and the rows of leading degree
/// >= j span exactly (S intersected with m^j).
class FilteredSubspace {
 public:
  explicit FilteredSubspace(TruncationContext ctx);

  const TruncationContext& context() const { return ctx_; }
  const LieBasis& lie_basis() const { return *basis_; }
  int dimension() const { return static_cast<int>(rows_.size()); }

  /// Inserts v; returns true iff the span grew. v must be a Lie element with
  /// zero constant term (DomainError otherwise).
  bool add(const NCSeries& v);
  bool add(SparseVector v);

  /// Remainder of v after elimination against the rows (zero iff v in span).
  SparseVector reduce(SparseVector v) const;
  bool contains(const SparseVector& v) const { return reduce(v).empty(); }
  bool contains(const NCSeries& v) const;

  /// Rows in pivot order.
  std::vector<SparseVector> rows() const;
  std::vector<NCSeries> basis() const;
  int leading_degree(const SparseVector& row) const { return basis_->degree_of(row.front().first); }

  /// Number of rows with leading degree exactly j.
  int leading_dimension(int j) const;
  /// Degree-j parts of the rows with leading degree j, as Lyndon coordinates.
  std::vector<SparseVector> leading_coords(int j) const;
  /// Degree-j parts of the rows with leading degree j.
  std::vector<NCSeries> leading_space(int j) const;

 private:
  TruncationContext ctx_;
  std::shared_ptr<const LieBasis> basis_;
  std::map<int, SparseVector> rows_;  // keyed by pivot
};

/// Returns the enlarged subspace and whether v was outside the old span.
std::pair<FilteredSubspace, bool> span_add(FilteredSubspace s, const NCSeries& v);
/// Basis of the degree-j leading space. Throws DomainError if j is outside 1..c.
std::vector<NCSeries> leading_space(const FilteredSubspace& s, int j);
/// span(b) is contained in span(a); all inputs homogeneous of one degree.
bool subspace_contains(std::span<const NCSeries> a, std::span<const NCSeries> b);

// Sparse vector helpers.
void axpy(SparseVector& y, const Rational& alpha, const SparseVector& x);
Rational entry(const SparseVector& v, int index);

// ---------------------------------------------------------------- lattices

using IntMatrix = std::vector<std::vector<Integer>>;

/// Row Hermite normal form with zero rows removed: pivots positive and
/// strictly increasing, entries above each pivot reduced into [0, pivot).
IntMatrix hnf(const IntMatrix& m);

struct SmithForm {
  IntMatrix diagonal;  // same shape as the input
  IntMatrix left;      // unimodular U
  IntMatrix right;     // unimodular V, U * M * V = diagonal
  /// Diagonal entries d_1 | d_2 | ..., including zeros.
  std::vector<Integer> divisors;
};

SmithForm snf(const IntMatrix& m);

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b);

/// Lattice generated by rows / denominator, in Lyndon coordinates of one degree.
struct GradedLattice {
  int degree = 1;
  IntMatrix rows;  // HNF
  Integer denominator = 1;

  /// Clears denominators with the exact lcm and stores the HNF.
  static GradedLattice from_rational(int degree, int dimension, const std::vector<std::vector<Rational>>& generators);
  int dimension() const { return ambient_; }
  int rank() const { return static_cast<int>(rows.size()); }
  int ambient_ = 0;
};

/// True iff every generator of `sub` is an integral combination of `sup`.
bool lattice_contains(const GradedLattice& sup, const GradedLattice& sub);

/// Prime-power elementary divisors (> 1) of the torsion of sup / sub along the
/// rational span of sub. Throws DomainError if sub leaves the rational span of
/// sup. If sub is not inside sup, the lattice sum sup + sub is used as the
/// ambient lattice.
std::vector<Integer> torsion_invariants(const GradedLattice& sub, const GradedLattice& sup);

}  // namespace odepth
