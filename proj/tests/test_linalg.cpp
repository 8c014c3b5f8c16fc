#include <gtest/gtest.h>

#include <functional>
#include <map>
#include <random>

#include "odepth/error.hpp"
#include "odepth/linalg.hpp"

using namespace odepth;

namespace {

NCSeries X(TruncationContext ctx, int i) { return NCSeries::generator(ctx, i); }

// Dense rank over Q by plain Gaussian elimination, used as an independent oracle.
int dense_rank(std::vector<std::vector<Rational>> m) {
  int rank = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(m.size()); ++c) {
    std::size_t p = static_cast<std::size_t>(rank);
    while (p < m.size() && sgn(m[p][c]) == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[static_cast<std::size_t>(rank)]);
    auto& piv = m[static_cast<std::size_t>(rank)];
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == static_cast<std::size_t>(rank) || sgn(m[i][c]) == 0) continue;
      Rational f = m[i][c] / piv[c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * piv[j];
    }
    ++rank;
  }
  return rank;
}

// Word-coordinate vectors, independent of the Lyndon basis.
std::vector<Rational> dense(const NCSeries& s, const std::vector<WordKey>& words) {
  std::vector<Rational> v;
  for (auto w : words) v.push_back(s.coeff(w));
  return v;
}

std::vector<WordKey> all_words(int n, int c) {
  std::vector<WordKey> out;
  std::vector<std::vector<int>> level{{}};
  for (int d = 1; d <= c; ++d) {
    std::vector<std::vector<int>> next;
    for (const auto& w : level)
      for (int i = 1; i <= n; ++i) {
        auto u = w;
        u.push_back(i);
        out.push_back(WordKey::from_letters(u));
        next.push_back(u);
      }
    level = std::move(next);
  }
  return out;
}

Integer det(IntMatrix m) {
  std::vector<std::vector<Rational>> q;
  for (auto& r : m) {
    std::vector<Rational> row;
    for (auto& x : r) row.emplace_back(x);
    q.push_back(row);
  }
  Rational d = 1;
  const std::size_t n = q.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(q[p][c]) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(q[p], q[c]);
      d = -d;
    }
    d *= q[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      Rational f = q[i][c] / q[c][c];
      for (std::size_t j = c; j < n; ++j) q[i][j] -= f * q[c][j];
    }
  }
  return d.get_num();
}

// gcd of all k x k minors of m (determinantal divisor).
Integer minor_gcd(const IntMatrix& m, std::size_t k) {
  const std::size_t r = m.size(), c = m[0].size();
  Integer g = 0;
  std::vector<std::size_t> rs, cs;
  std::function<void(std::size_t)> pick_cols;
  std::function<void(std::size_t)> pick_rows = [&](std::size_t from) {
    if (rs.size() == k) {
      pick_cols(0);
      return;
    }
    for (std::size_t i = from; i < r; ++i) {
      rs.push_back(i);
      pick_rows(i + 1);
      rs.pop_back();
    }
  };
  pick_cols = [&](std::size_t from) {
    if (cs.size() == k) {
      IntMatrix sub;
      for (auto i : rs) {
        std::vector<Integer> row;
        for (auto j : cs) row.push_back(m[i][j]);
        sub.push_back(row);
      }
      Integer d = abs(det(sub));
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      return;
    }
    for (std::size_t j = from; j < c; ++j) {
      cs.push_back(j);
      pick_cols(j + 1);
      cs.pop_back();
    }
  };
  pick_rows(0);
  return g;
}

IntMatrix ints(std::initializer_list<std::initializer_list<long>> rows) {
  IntMatrix m;
  for (auto& r : rows) {
    std::vector<Integer> row;
    for (long x : r) row.emplace_back(x);
    m.push_back(row);
  }
  return m;
}

GradedLattice lattice(int dim, std::initializer_list<std::initializer_list<long>> rows) {
  std::vector<std::vector<Rational>> g;
  for (auto& r : rows) {
    std::vector<Rational> row;
    for (long x : r) row.emplace_back(x);
    g.push_back(row);
  }
  return GradedLattice::from_rational(1, dim, g);
}

std::vector<Integer> ilist(std::initializer_list<long> xs) {
  std::vector<Integer> v;
  for (long x : xs) v.emplace_back(x);
  return v;
}

}  // namespace

TEST(SpanAdd, Examples) {
  TruncationContext ctx(2, 3);
  FilteredSubspace s(ctx);
  bool grew;
  std::tie(s, grew) = span_add(s, X(ctx, 1));
  EXPECT_TRUE(grew);
  std::tie(s, grew) = span_add(s, X(ctx, 1));
  EXPECT_FALSE(grew);

  FilteredSubspace t(ctx);
  auto b = bracket(X(ctx, 1), X(ctx, 2));
  std::tie(t, grew) = span_add(t, X(ctx, 1) + b);
  EXPECT_TRUE(grew);
  std::tie(t, grew) = span_add(t, b);
  EXPECT_TRUE(grew);
  EXPECT_EQ(t.dimension(), 2);
  EXPECT_TRUE(t.contains(X(ctx, 1)));

  EXPECT_THROW(s.add(NCSeries::one(ctx)), DomainError);
  EXPECT_THROW(s.add(X(TruncationContext(2, 4), 1)), ContextMismatch);
}

TEST(LeadingSpace, Examples) {
  TruncationContext ctx(2, 3);
  auto b = bracket(X(ctx, 1), X(ctx, 2));
  FilteredSubspace s(ctx);
  s.add(X(ctx, 1));
  EXPECT_EQ(leading_space(s, 1), std::vector<NCSeries>{X(ctx, 1)});
  EXPECT_TRUE(leading_space(s, 2).empty());

  FilteredSubspace t(ctx);
  t.add(X(ctx, 1) + b);
  EXPECT_TRUE(leading_space(t, 2).empty());
  t.add(X(ctx, 1));
  EXPECT_EQ(leading_space(t, 2), std::vector<NCSeries>{b});

  EXPECT_THROW(leading_space(t, 0), DomainError);
  EXPECT_THROW(leading_space(t, 4), DomainError);
}

TEST(SubspaceContains, Examples) {
  TruncationContext ctx(2, 3);
  auto b = bracket(X(ctx, 1), X(ctx, 2));
  std::vector<NCSeries> a{X(ctx, 1), X(ctx, 2)};
  std::vector<NCSeries> sum{X(ctx, 1) + X(ctx, 2)};
  EXPECT_TRUE(subspace_contains(a, sum));
  std::vector<NCSeries> x1{X(ctx, 1)}, x2{X(ctx, 2)};
  EXPECT_FALSE(subspace_contains(x1, x2));
  std::vector<NCSeries> bb{b}, b2{b * Rational(2)};
  EXPECT_TRUE(subspace_contains(bb, b2));
  EXPECT_THROW(subspace_contains(x1, bb), DomainError);
}

// Rows of leading degree >= j span S intersected with m^j; checked against
// dim(S) + dim(L_{>=j}) - dim(S + L_{>=j}) in word coordinates.
TEST(FilteredSubspace, FiltrationMatchesBruteIntersection) {
  std::mt19937 rng(7);
  for (auto [n, c] : {std::pair{2, 4}, std::pair{3, 3}}) {
    TruncationContext ctx(n, c);
    auto basis = LieBasis::get(ctx);
    auto words = all_words(n, c);
    std::uniform_int_distribution<int> coef(-2, 2);
    std::bernoulli_distribution sparse(0.35);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<NCSeries> gens;
      FilteredSubspace s(ctx);
      std::uniform_int_distribution<int> count(1, 5);
      const int m = count(rng);
      for (int g = 0; g < m; ++g) {
        NCSeries v(ctx);
        for (int i = 0; i < basis->dimension(); ++i)
          if (sparse(rng)) v += basis->bracketing(i) * Rational(coef(rng));
        gens.push_back(v);
        s.add(v);
      }
      std::vector<std::vector<Rational>> sm;
      for (auto& g : gens) sm.push_back(dense(g, words));
      const int dim_s = dense_rank(sm);
      ASSERT_EQ(s.dimension(), dim_s);
      int total = 0;
      for (int j = 1; j <= c; ++j) total += static_cast<int>(leading_space(s, j).size());
      EXPECT_EQ(total, dim_s);
      for (int j = 1; j <= c; ++j) {
        std::vector<std::vector<Rational>> tail, both = sm;
        for (int i = basis->offset(j); i < basis->dimension(); ++i) {
          tail.push_back(dense(basis->bracketing(i), words));
          both.push_back(tail.back());
        }
        const int expect = dim_s + dense_rank(tail) - dense_rank(both);
        std::vector<std::vector<Rational>> filt;
        for (const auto& v : s.basis()) {
          if (v.min_degree() < j) continue;
          filt.push_back(dense(v, words));
          auto with = sm;
          with.push_back(filt.back());
          EXPECT_EQ(dense_rank(with), dim_s);
        }
        EXPECT_EQ(dense_rank(filt), expect) << "j=" << j;
        EXPECT_EQ(static_cast<int>(filt.size()), expect);
      }
    }
  }
}

TEST(Hnf, Examples) {
  auto id = ints({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  EXPECT_EQ(hnf(id), id);
  EXPECT_EQ(hnf(ints({{4, 6}, {6, 9}})), ints({{2, 3}}));
  EXPECT_EQ(hnf(ints({{2, 1}, {0, 3}, {4, 5}})), ints({{2, 1}, {0, 3}}));
  EXPECT_EQ(hnf(ints({{2, 4}, {0, 3}})), ints({{2, 1}, {0, 3}}));
}

TEST(Snf, Examples) {
  auto f = snf(ints({{2, 0}, {0, 3}}));
  EXPECT_EQ(f.diagonal, ints({{1, 0}, {0, 6}}));
  EXPECT_EQ(matmul(matmul(f.left, ints({{2, 0}, {0, 3}})), f.right), f.diagonal);
  EXPECT_EQ(abs(det(f.left)), 1);
  EXPECT_EQ(abs(det(f.right)), 1);
  EXPECT_EQ(snf(ints({{2, 0}, {0, 0}})).diagonal, ints({{2, 0}, {0, 0}}));
}

// Smith divisors agree with ratios of determinantal divisors; transforms are
// unimodular; hnf and snf are idempotent.
TEST(Snf, RandomAgainstDeterminantalDivisors) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> dim(1, 4), val(-6, 6);
  for (int trial = 0; trial < 60; ++trial) {
    const int r = dim(rng), c = dim(rng);
    IntMatrix m(static_cast<std::size_t>(r), std::vector<Integer>(static_cast<std::size_t>(c)));
    for (auto& row : m)
      for (auto& x : row) x = val(rng);
    auto f = snf(m);
    ASSERT_EQ(matmul(matmul(f.left, m), f.right), f.diagonal);
    EXPECT_EQ(abs(det(f.left)), 1);
    EXPECT_EQ(abs(det(f.right)), 1);
    Integer prev = 1;
    for (std::size_t k = 1; k <= f.divisors.size(); ++k) {
      Integer g = minor_gcd(m, k);
      Integer expected = (sgn(g) == 0) ? Integer(0) : Integer(g / prev);
      EXPECT_EQ(f.divisors[k - 1], expected) << "trial " << trial << " k " << k;
      if (sgn(g) != 0) prev = g;
      if (k >= 2 && sgn(f.divisors[k - 1]) != 0)
        EXPECT_TRUE(mpz_divisible_p(f.divisors[k - 1].get_mpz_t(), f.divisors[k - 2].get_mpz_t()));
    }
    EXPECT_EQ(snf(f.diagonal).diagonal, f.diagonal);
    auto h = hnf(m);
    EXPECT_EQ(hnf(h), h);
  }
}

TEST(Torsion, Examples) {
  EXPECT_EQ(torsion_invariants(lattice(1, {{2}}), lattice(1, {{1}})), ilist({2}));
  EXPECT_TRUE(torsion_invariants(lattice(2, {{1, 2}, {0, 5}}), lattice(2, {{1, 2}, {0, 5}})).empty());
  EXPECT_EQ(torsion_invariants(lattice(2, {{2, 0}, {0, 3}}), lattice(2, {{1, 0}, {0, 1}})), ilist({2, 3}));
  EXPECT_THROW(torsion_invariants(lattice(2, {{0, 1}}), lattice(2, {{1, 0}})), DomainError);
  // Restricted to the rational span of sub: the free direction does not count.
  EXPECT_EQ(torsion_invariants(lattice(2, {{4, 0}}), lattice(2, {{1, 0}, {0, 1}})), ilist({4}));
}

TEST(Lattice, RationalGeneratorsAndContainment) {
  std::vector<std::vector<Rational>> g{{Rational(1, 2), Rational(1, 3)}};
  auto l = GradedLattice::from_rational(2, 2, g);
  EXPECT_EQ(l.denominator, 6);
  EXPECT_EQ(l.rows, ints({{3, 2}}));
  auto twice = GradedLattice::from_rational(2, 2, {{Rational(1), Rational(2, 3)}});
  EXPECT_TRUE(lattice_contains(l, twice));
  EXPECT_FALSE(lattice_contains(twice, l));
  EXPECT_EQ(torsion_invariants(twice, l), ilist({2}));
}
