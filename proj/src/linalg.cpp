#include "odepth/linalg.hpp"

#include <algorithm>

#include "odepth/error.hpp"

namespace odepth {

// ---------------------------------------------------------------- sparse helpers

void axpy(SparseVector& y, const Rational& alpha, const SparseVector& x) {
  if (sgn(alpha) == 0 || x.empty()) return;
  SparseVector out;
  out.reserve(y.size() + x.size());
  auto iy = y.begin();
  auto ix = x.begin();
  while (iy != y.end() || ix != x.end()) {
    if (ix == x.end() || (iy != y.end() && iy->first < ix->first)) {
      out.push_back(std::move(*iy++));
    } else if (iy == y.end() || ix->first < iy->first) {
      out.emplace_back(ix->first, alpha * ix->second);
      ++ix;
    } else {
      Rational v = iy->second + alpha * ix->second;
      if (sgn(v) != 0) out.emplace_back(iy->first, std::move(v));
      ++iy;
      ++ix;
    }
  }
  y = std::move(out);
}

Rational entry(const SparseVector& v, int index) {
  auto it = std::lower_bound(v.begin(), v.end(), index, [](const auto& e, int i) { return e.first < i; });
  return (it != v.end() && it->first == index) ? it->second : Rational(0);
}

// ---------------------------------------------------------------- FilteredSubspace

FilteredSubspace::FilteredSubspace(TruncationContext ctx) : ctx_(ctx), basis_(LieBasis::get(ctx)) {}

SparseVector FilteredSubspace::reduce(SparseVector v) const {
  std::vector<std::pair<int, Rational>> hits;
  for (const auto& [i, c] : v)
    if (rows_.count(i)) hits.emplace_back(i, c);
  for (const auto& [i, c] : hits) axpy(v, -c, rows_.at(i));
  return v;
}

bool FilteredSubspace::contains(const NCSeries& v) const { return contains(basis_->coords(v)); }

bool FilteredSubspace::add(const NCSeries& v) {
  if (!(v.context() == ctx_)) throw ContextMismatch("subspace context differs");
  if (sgn(v.constant_term()) != 0) throw DomainError("span_add needs zero constant term");
  return add(basis_->coords(v));
}

bool FilteredSubspace::add(SparseVector v) {
  SparseVector r = reduce(std::move(v));
  if (r.empty()) return false;
  const int pivot = r.front().first;
  const Rational scale = 1 / r.front().second;
  for (auto& [i, c] : r) c *= scale;
  for (auto& [p, row] : rows_) {
    Rational f = entry(row, pivot);
    if (sgn(f) != 0) axpy(row, -f, r);
  }
  rows_.emplace(pivot, std::move(r));
  return true;
}

std::vector<SparseVector> FilteredSubspace::rows() const {
  std::vector<SparseVector> out;
  for (const auto& [p, row] : rows_) out.push_back(row);
  return out;
}

std::vector<NCSeries> FilteredSubspace::basis() const {
  std::vector<NCSeries> out;
  for (const auto& [p, row] : rows_) out.push_back(basis_->to_series(row));
  return out;
}

int FilteredSubspace::leading_dimension(int j) const {
  int n = 0;
  for (const auto& [p, row] : rows_)
    if (basis_->degree_of(p) == j) ++n;
  return n;
}

std::vector<SparseVector> FilteredSubspace::leading_coords(int j) const {
  if (j < 1 || j > ctx_.degree) throw DomainError("leading_space degree out of range");
  std::vector<SparseVector> out;
  const int lo = basis_->offset(j);
  const int hi = lo + basis_->dimension(j);
  for (auto it = rows_.lower_bound(lo); it != rows_.end() && it->first < hi; ++it) {
    SparseVector part;
    for (const auto& [i, c] : it->second)
      if (i < hi) part.emplace_back(i, c);
    out.push_back(std::move(part));
  }
  return out;
}

std::vector<NCSeries> FilteredSubspace::leading_space(int j) const {
  std::vector<NCSeries> out;
  for (const auto& v : leading_coords(j)) out.push_back(basis_->to_series(v));
  return out;
}

std::pair<FilteredSubspace, bool> span_add(FilteredSubspace s, const NCSeries& v) {
  bool grew = s.add(v);
  return {std::move(s), grew};
}

std::vector<NCSeries> leading_space(const FilteredSubspace& s, int j) { return s.leading_space(j); }

bool subspace_contains(std::span<const NCSeries> a, std::span<const NCSeries> b) {
  const NCSeries* ref = !a.empty() ? &a.front() : (!b.empty() ? &b.front() : nullptr);
  if (!ref) return true;
  int degree = -1;
  auto check = [&](const NCSeries& v) {
    if (!(v.context() == ref->context())) throw ContextMismatch("subspace_contains context differs");
    if (v.is_zero()) return;
    const int d = v.min_degree();
    if (!(v.homogeneous_part(d) == v)) throw DomainError("subspace_contains needs homogeneous vectors");
    if (degree == -1) degree = d;
    if (d != degree) throw DomainError("subspace_contains degree mismatch");
  };
  for (const auto& v : a) check(v);
  for (const auto& v : b) check(v);
  FilteredSubspace s(ref->context());
  for (const auto& v : a) s.add(v);
  return std::all_of(b.begin(), b.end(), [&](const NCSeries& v) { return s.contains(v); });
}

// ---------------------------------------------------------------- integer matrices

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) {
  if (a.empty()) return {};
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  IntMatrix out(n, std::vector<Integer>(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l)
      if (sgn(a[i][l]) != 0)
        for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
  return out;
}

namespace {

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

IntMatrix hnf(const IntMatrix& input) {
  IntMatrix m = input;
  if (m.empty()) return m;
  const std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    // Euclid on column c among rows r.. until a single nonzero remains.
    while (true) {
      std::size_t best = m.size();
      for (std::size_t i = r; i < m.size(); ++i)
        if (sgn(m[i][c]) != 0 && (best == m.size() || abs(m[i][c]) < abs(m[best][c]))) best = i;
      if (best == m.size()) break;
      std::swap(m[r], m[best]);
      bool done = true;
      for (std::size_t i = r + 1; i < m.size(); ++i) {
        if (sgn(m[i][c]) == 0) continue;
        Integer q = floor_div(m[i][c], m[r][c]);
        for (std::size_t j = c; j < cols; ++j) m[i][j] -= q * m[r][j];
        if (sgn(m[i][c]) != 0) done = false;
      }
      if (done) break;
    }
    if (sgn(m[r][c]) == 0) continue;
    if (sgn(m[r][c]) < 0)
      for (auto& x : m[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      Integer q = floor_div(m[i][c], m[r][c]);
      if (sgn(q) != 0)
        for (std::size_t j = c; j < cols; ++j) m[i][j] -= q * m[r][j];
    }
    ++r;
  }
  m.resize(r);
  return m;
}

SmithForm snf(const IntMatrix& input) {
  SmithForm f;
  const std::size_t rows = input.size();
  const std::size_t cols = rows ? input[0].size() : 0;
  IntMatrix& d = f.diagonal;
  d = input;
  f.left.assign(rows, std::vector<Integer>(rows, 0));
  f.right.assign(cols, std::vector<Integer>(cols, 0));
  for (std::size_t i = 0; i < rows; ++i) f.left[i][i] = 1;
  for (std::size_t i = 0; i < cols; ++i) f.right[i][i] = 1;

  auto swap_rows = [&](std::size_t a, std::size_t b) {
    std::swap(d[a], d[b]);
    std::swap(f.left[a], f.left[b]);
  };
  auto swap_cols = [&](std::size_t a, std::size_t b) {
    for (auto& row : d) std::swap(row[a], row[b]);
    for (auto& row : f.right) std::swap(row[a], row[b]);
  };
  // row_a -= q * row_b
  auto row_op = [&](std::size_t a, std::size_t b, const Integer& q) {
    for (std::size_t j = 0; j < cols; ++j) d[a][j] -= q * d[b][j];
    for (std::size_t j = 0; j < rows; ++j) f.left[a][j] -= q * f.left[b][j];
  };
  auto col_op = [&](std::size_t a, std::size_t b, const Integer& q) {
    for (std::size_t i = 0; i < rows; ++i) d[i][a] -= q * d[i][b];
    for (std::size_t i = 0; i < cols; ++i) f.right[i][a] -= q * f.right[i][b];
  };

  const std::size_t n = std::min(rows, cols);
  for (std::size_t t = 0; t < n; ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (sgn(d[i][j]) != 0 && (pi == rows || abs(d[i][j]) < abs(d[pi][pj]))) {
            pi = i;
            pj = j;
          }
      if (pi == rows) break;
      swap_rows(t, pi);
      swap_cols(t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (sgn(d[i][t]) == 0) continue;
        row_op(i, t, floor_div(d[i][t], d[t][t]));
        if (sgn(d[i][t]) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (sgn(d[t][j]) == 0) continue;
        col_op(j, t, floor_div(d[t][j], d[t][t]));
        if (sgn(d[t][j]) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold a non-multiple into the pivot row and repeat.
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (sgn(d[i][j]) != 0 && !mpz_divisible_p(d[i][j].get_mpz_t(), d[t][t].get_mpz_t())) {
            row_op(t, i, Integer(-1));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (sgn(d[t][t]) < 0) {
      for (std::size_t j = 0; j < cols; ++j) d[t][j] = -d[t][j];
      for (std::size_t j = 0; j < rows; ++j) f.left[t][j] = -f.left[t][j];
    }
  }
  for (std::size_t t = 0; t < n; ++t) f.divisors.push_back(d[t][t]);
  return f;
}

// ---------------------------------------------------------------- lattices

GradedLattice GradedLattice::from_rational(int degree, int dimension,
                                           const std::vector<std::vector<Rational>>& generators) {
  GradedLattice g;
  g.degree = degree;
  g.ambient_ = dimension;
  Integer den = 1;
  for (const auto& row : generators) {
    if (static_cast<int>(row.size()) != dimension) throw DomainError("lattice generator has wrong dimension");
    for (const auto& x : row) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  }
  IntMatrix m;
  for (const auto& row : generators) {
    std::vector<Integer> r;
    for (const auto& x : row) r.push_back(Integer(x.get_num() * (den / x.get_den())));
    m.push_back(std::move(r));
  }
  g.rows = hnf(m);
  g.denominator = den;
  return g;
}

namespace {

/// Rational coordinates of v in terms of the HNF rows (full row rank).
/// Returns false if v is outside their rational span.
bool solve_in_rows(const IntMatrix& rows, std::vector<Rational> v, std::vector<Rational>& coeffs) {
  coeffs.assign(rows.size(), 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t p = 0;
    while (sgn(rows[r][p]) == 0) ++p;
    if (sgn(v[p]) == 0) continue;
    Rational c = v[p] / Rational(rows[r][p]);
    coeffs[r] = c;
    for (std::size_t j = p; j < v.size(); ++j) v[j] -= c * Rational(rows[r][j]);
  }
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
}

std::vector<std::vector<Rational>> rational_rows(const GradedLattice& l) {
  std::vector<std::vector<Rational>> out;
  for (const auto& row : l.rows) {
    std::vector<Rational> r;
    for (const auto& x : row) {
      Rational q(x, l.denominator);
      q.canonicalize();
      r.push_back(q);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Integer> prime_power_split(Integer d) {
  std::vector<Integer> out;
  for (Integer p = 2; p * p <= d; ++p) {
    if (!mpz_divisible_p(d.get_mpz_t(), p.get_mpz_t())) continue;
    Integer q = 1;
    while (mpz_divisible_p(d.get_mpz_t(), p.get_mpz_t())) {
      d /= p;
      q *= p;
    }
    out.push_back(q);
  }
  if (d > 1) out.push_back(d);
  return out;
}

}  // namespace

bool lattice_contains(const GradedLattice& sup, const GradedLattice& sub) {
  if (sup.degree != sub.degree || sup.dimension() != sub.dimension()) throw DomainError("lattice degree mismatch");
  for (const auto& v : rational_rows(sub)) {
    // v = sum c_r sup_r with c integral.
    std::vector<Rational> c;
    std::vector<Rational> w = v;
    for (auto& x : w) x *= Rational(sup.denominator);
    if (!solve_in_rows(sup.rows, w, c)) return false;
    for (const auto& x : c)
      if (x.get_den() != 1) return false;
  }
  return true;
}

std::vector<Integer> torsion_invariants(const GradedLattice& sub, const GradedLattice& sup_in) {
  if (sub.degree != sup_in.degree || sub.dimension() != sup_in.dimension()) {
    throw DomainError("torsion_invariants needs lattices of the same degree");
  }
  GradedLattice sup = sup_in;
  if (!lattice_contains(sup, sub)) {
    auto gens = rational_rows(sup);
    for (auto& r : rational_rows(sub)) gens.push_back(std::move(r));
    GradedLattice sum = GradedLattice::from_rational(sup.degree, sup.dimension(), gens);
    // Leaving the rational span is an error, not a lattice mismatch.
    if (sum.rank() != sup.rank()) throw DomainError("sub lattice is not inside the rational span of sup");
    sup = sum;
  }
  IntMatrix coords;
  for (const auto& v : rational_rows(sub)) {
    std::vector<Rational> w = v;
    for (auto& x : w) x *= Rational(sup.denominator);
    std::vector<Rational> c;
    if (!solve_in_rows(sup.rows, w, c)) throw DomainError("sub lattice is not inside the rational span of sup");
    std::vector<Integer> row;
    for (const auto& x : c) row.push_back(x.get_num());
    coords.push_back(std::move(row));
  }
  std::vector<Integer> out;
  if (coords.empty()) return out;
  for (const auto& d : snf(coords).divisors) {
    if (d > 1)
      for (auto& q : prime_power_split(d)) out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace odepth
