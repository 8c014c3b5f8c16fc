#include <gtest/gtest.h>

#include <random>

#include "odepth/error.hpp"
#include "odepth/lie.hpp"
#include "oracles.hpp"

using namespace odepth;
using odepth::testing::brute_lyndon;
using odepth::testing::random_word;
using odepth::testing::witt_count;

namespace {

NCSeries X(TruncationContext ctx, int i) { return NCSeries::generator(ctx, i); }

}  // namespace

TEST(Lyndon, SmallExamples) {
  auto d2 = lyndon_words(2, 2);
  ASSERT_EQ(d2.size(), 1u);
  EXPECT_EQ(d2[0], WordKey::from_letters({1, 2}));
  auto d3 = lyndon_words(2, 3);
  ASSERT_EQ(d3.size(), 2u);
  EXPECT_EQ(d3[0], WordKey::from_letters({1, 1, 2}));
  EXPECT_EQ(d3[1], WordKey::from_letters({1, 2, 2}));
  std::vector<std::size_t> counts;
  for (int d = 1; d <= 4; ++d) counts.push_back(lyndon_words(2, d).size());
  EXPECT_EQ(counts, (std::vector<std::size_t>{2, 1, 2, 3}));
}

TEST(Lyndon, MatchesBruteForceAndWitt) {
  for (int n = 1; n <= 4; ++n) {
    for (int d = 1; d <= 6; ++d) {
      auto fast = lyndon_words(n, d);
      auto slow = brute_lyndon(n, d);
      ASSERT_EQ(fast.size(), slow.size()) << n << "," << d;
      EXPECT_EQ(static_cast<long>(fast.size()), witt_count(n, d));
      for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_EQ(fast[i].letters(), slow[i]);
    }
  }
}

TEST(Lyndon, BracketingAndCoordsAreTriangular) {
  TruncationContext ctx(3, 5);
  auto basis = LieBasis::get(ctx);
  for (int i = 0; i < basis->dimension(); ++i) {
    const int d = basis->degree_of(i);
    const NCSeries& p = basis->bracketing(i);
    // Smallest word of P_w is w with coefficient 1.
    ASSERT_FALSE(p.is_zero());
    EXPECT_EQ(p.terms().begin()->first, basis->word(i));
    EXPECT_EQ(p.terms().begin()->second, 1);
    auto c = lie_coords(p, d);
    for (int j = 0; j < basis->dimension(d); ++j) EXPECT_EQ(c[static_cast<std::size_t>(j)], (j + basis->offset(d) == i) ? 1 : 0);
    EXPECT_EQ(lyndon_bracketing(basis->word(i), ctx), p);
  }
  EXPECT_THROW(lyndon_bracketing(WordKey::from_letters({2, 1}), ctx), DomainError);
}

TEST(Lie, CoordsExamples) {
  TruncationContext ctx(2, 3);
  auto c = lie_coords(bracket(X(ctx, 1), X(ctx, 2)), 2);
  EXPECT_EQ(c, (std::vector<Rational>{1}));
  EXPECT_THROW(lie_coords(X(ctx, 1) + bracket(X(ctx, 1), X(ctx, 2)), 2), DomainError);
  EXPECT_THROW(lie_coords(X(ctx, 1) * X(ctx, 2), 2), DomainError);
}

TEST(Lie, PrimitivityExamples) {
  TruncationContext ctx(2, 4);
  EXPECT_FALSE(is_primitive(X(ctx, 1) * X(ctx, 2)));
  EXPECT_TRUE(is_primitive(bracket(X(ctx, 1), X(ctx, 2))));
  EXPECT_FALSE(is_primitive(NCSeries::one(ctx)));
  EXPECT_TRUE(is_primitive(NCSeries(ctx)));
  std::mt19937 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    EXPECT_TRUE(is_primitive(log(magnus(random_word(rng, 2, 10), ctx))));
  }
  EXPECT_THROW(LieElement(X(ctx, 1) * X(ctx, 1)), DomainError);
}

TEST(Lie, CoordsRoundTripRandom) {
  TruncationContext ctx(3, 4);
  auto basis = LieBasis::get(ctx);
  std::mt19937 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    NCSeries l = log(magnus(random_word(rng, 3, 10), ctx));
    EXPECT_EQ(basis->to_series(basis->coords(l)), l);
  }
}

TEST(Lie, BchClosedForms) {
  TruncationContext c3(2, 3);
  LieElement a(X(c3, 1)), b(X(c3, 2));
  EXPECT_EQ(bch(a, LieElement::zero(c3)), a);
  NCSeries ab = bracket(X(c3, 1), X(c3, 2));
  NCSeries expect3 = X(c3, 1) + X(c3, 2) + ab * Rational(1, 2) +
                     (bracket(X(c3, 1), ab) + bracket(X(c3, 2), bracket(X(c3, 2), X(c3, 1)))) * Rational(1, 12);
  EXPECT_EQ(bch(a, b).series(), expect3);
  TruncationContext c2(2, 2);
  EXPECT_EQ(bch(LieElement(X(c2, 1)), LieElement(X(c2, 2))).series(),
            X(c2, 1) + X(c2, 2) + bracket(X(c2, 1), X(c2, 2)) * Rational(1, 2));
}

TEST(Lie, BchAssociative) {
  TruncationContext ctx(3, 4);
  std::mt19937 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    LieElement a(log(magnus(random_word(rng, 3, 5), ctx)));
    LieElement b(log(magnus(random_word(rng, 3, 5), ctx)));
    LieElement c(log(magnus(random_word(rng, 3, 5), ctx)));
    EXPECT_EQ(bch(a, bch(b, c)), bch(bch(a, b), c));
  }
}
