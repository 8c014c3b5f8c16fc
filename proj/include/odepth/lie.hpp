#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "odepth/ncseries.hpp"

namespace odepth {

/// Sparse rational vector, entries sorted by index, no explicit zeros.
using SparseVector = std::vector<std::pair<int, Rational>>;

/// All Lyndon words of length d over {1..n}, in lexicographic order.
std::vector<WordKey> lyndon_words(int n, int d);
/// Bracketing along the standard factorization w = uv (v the longest proper
/// Lyndon suffix). Throws DomainError if w is not Lyndon.
NCSeries lyndon_bracketing(WordKey w, TruncationContext ctx);

/// Lyndon basis of the free Lie algebra modulo m^(c+1). Global coordinate
/// indices run degree-ascending, then lexicographic within a degree; this is
/// the pivot order of all echelon forms built on top of it.
class LieBasis {
 public:
  explicit LieBasis(TruncationContext ctx);
  /// Shared, lazily built instance per context.
  static std::shared_ptr<const LieBasis> get(TruncationContext ctx);

  const TruncationContext& context() const { return ctx_; }
  int dimension() const { return static_cast<int>(words_.size()); }
  int dimension(int d) const { return offsets_[static_cast<std::size_t>(d) + 1] - offsets_[static_cast<std::size_t>(d)]; }
  int offset(int d) const { return offsets_[static_cast<std::size_t>(d)]; }
  WordKey word(int index) const { return words_[static_cast<std::size_t>(index)]; }
  int degree_of(int index) const { return words_[static_cast<std::size_t>(index)].length(); }
  const NCSeries& bracketing(int index) const { return brackets_[static_cast<std::size_t>(index)]; }
  /// Global indices of the standard factorization (u, v); {-1,-1} for letters.
  std::pair<int, int> factorization(int index) const { return factors_[static_cast<std::size_t>(index)]; }
  std::optional<int> index_of(WordKey w) const;

  /// Coordinates of a homogeneous Lie element of degree d (dense, length
  /// dimension(d)). Throws DomainError if x has other degrees or is not Lie.
  std::vector<Rational> coords(const NCSeries& x, int d) const;
  /// Coordinates of a Lie element with zero constant term, all degrees.
  SparseVector coords(const NCSeries& x) const;
  NCSeries to_series(const SparseVector& v) const;

 private:
  TruncationContext ctx_;
  std::vector<WordKey> words_;
  std::vector<int> offsets_;  // offsets_[d] = first index of degree d, size c+2
  std::vector<NCSeries> brackets_;
  std::vector<std::pair<int, int>> factors_;
};

/// Coordinates of x (homogeneous of degree d) in the Lyndon basis.
std::vector<Rational> lie_coords(const NCSeries& x, int d);

/// Left-normed bracketing operator D(X_a X_b ... X_z) = [...[X_a, X_b], ..., X_z].
NCSeries dynkin(const NCSeries& s);
/// True iff the constant term vanishes and every homogeneous part y of degree
/// d satisfies D(y) = d y.
bool is_primitive(const NCSeries& s);

/// A series that passed the primitivity test.
class LieElement {
 public:
  /// Throws DomainError if s is not primitive.
  explicit LieElement(NCSeries s);
  static LieElement zero(TruncationContext ctx) { return LieElement(NCSeries(ctx)); }

  const NCSeries& series() const { return series_; }
  const TruncationContext& context() const { return series_.context(); }
  /// Lyndon coordinates of the degree-d part, computed at construction.
  const std::vector<Rational>& coords(int d) const { return coords_.at(static_cast<std::size_t>(d - 1)); }

  friend bool operator==(const LieElement& a, const LieElement& b) { return a.series_ == b.series_; }

 private:
  NCSeries series_;
  std::vector<std::vector<Rational>> coords_;
};

/// log(exp(a) exp(b)).
LieElement bch(const LieElement& a, const LieElement& b);

}  // namespace odepth
