#include <gtest/gtest.h>

#include <random>

#include "odepth/error.hpp"
#include "odepth/word.hpp"
#include "oracles.hpp"

using namespace odepth;
using odepth::testing::naive_reduce;
using odepth::testing::random_raw;
using odepth::testing::random_word;

namespace {

std::vector<int> letters(const Word& w) { return {w.letters().begin(), w.letters().end()}; }

}  // namespace

TEST(Word, ReduceExamples) {
  EXPECT_EQ(letters(Word::reduce({1, -1, 2}, 2)), (std::vector<int>{2}));
  EXPECT_TRUE(Word::reduce({}, 2).is_identity());
  EXPECT_EQ(letters(Word::reduce({1, 2, -2, -1, 3}, 3)), (std::vector<int>{3}));
}

TEST(Word, ReduceRejectsBadLetters) {
  EXPECT_THROW(Word::reduce({0}, 2), InvalidLetter);
  EXPECT_THROW(Word::reduce({3}, 2), InvalidLetter);
  EXPECT_THROW(Word::reduce({-3}, 2), InvalidLetter);
}

TEST(Word, ReduceIsConfluentAndIdempotent) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    auto raw = random_raw(rng, 3, 20);
    Word w = Word::reduce(raw, 3);
    EXPECT_EQ(letters(w), naive_reduce(raw));
    EXPECT_EQ(Word::reduce(w.letters(), 3), w);
  }
}

TEST(Word, GroupLaw) {
  const Word a = Word::reduce({1}, 2);
  EXPECT_TRUE(mul(a, Word::reduce({-1}, 2)).is_identity());
  EXPECT_EQ(letters(inv(Word::reduce({1, 2}, 2))), (std::vector<int>{-2, -1}));
  EXPECT_EQ(letters(mul(Word::reduce({1, 2}, 3), Word::reduce({-2, 3}, 3))), (std::vector<int>{1, 3}));
  EXPECT_THROW(mul(Word(2), Word(3)), RankMismatch);
}

TEST(Word, GroupAxiomsOnRandomWords) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Word a = random_word(rng, 3, 10), b = random_word(rng, 3, 10), c = random_word(rng, 3, 10);
    EXPECT_EQ(mul(mul(a, b), c), mul(a, mul(b, c)));
    EXPECT_TRUE(mul(a, inv(a)).is_identity());
    EXPECT_TRUE(mul(inv(a), a).is_identity());
    EXPECT_EQ(inv(mul(a, b)), mul(inv(b), inv(a)));
  }
}

TEST(Word, Commutator) {
  const Word x1 = Word::generator(1, 2), x2 = Word::generator(2, 2);
  EXPECT_TRUE(comm(x1, x1).is_identity());
  EXPECT_EQ(letters(comm(x1, x2)), (std::vector<int>{-1, -2, 1, 2}));
  EXPECT_TRUE(comm(x1, Word(2)).is_identity());
}

TEST(Word, ApplyMap) {
  const int n = 2;
  GroupMap m(n, {Word::reduce({1, 2}, n), Word::reduce({2}, n)});
  EXPECT_EQ(letters(apply_map(m, Word::reduce({1, 1}, n))), (std::vector<int>{1, 2, 1, 2}));
  std::mt19937 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Word w = random_word(rng, n, 12);
    EXPECT_EQ(apply_map(GroupMap::identity(n), w), w);
    EXPECT_EQ(apply_map(m, inv(w)), inv(apply_map(m, w)));
  }
}

TEST(Word, ApplyMapIsHomomorphismAndComposes) {
  std::mt19937 rng(5);
  const int n = 3;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Word> im1, im2;
    for (int i = 0; i < n; ++i) {
      im1.push_back(random_word(rng, n, 4));
      im2.push_back(random_word(rng, n, 4));
    }
    GroupMap m1(n, im1), m2(n, im2);
    Word a = random_word(rng, n, 8), b = random_word(rng, n, 8);
    EXPECT_EQ(apply_map(m1, mul(a, b)), mul(apply_map(m1, a), apply_map(m1, b)));
    EXPECT_EQ(apply_map(compose_maps(m1, m2), a), apply_map(m1, apply_map(m2, a)));
  }
  EXPECT_THROW(GroupMap(2, {Word(2)}), RankMismatch);
}

TEST(Word, ConjugateMap) {
  std::mt19937 rng(9);
  const int n = 2;
  GroupMap m(n, {Word::reduce({1, 2}, n), Word::reduce({2}, n)});
  for (int trial = 0; trial < 50; ++trial) {
    Word s = random_word(rng, n, 5), w = random_word(rng, n, 8);
    // i_s(m(w)) == m'(i_s(w)).
    Word lhs = mul(mul(inv(s), apply_map(m, w)), s);
    Word rhs = apply_map(conjugate_map(m, s), mul(mul(inv(s), w), s));
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Word, NestedCommutator) {
  const Word x1 = Word::generator(1, 2), x2 = Word::generator(2, 2);
  std::vector<Word> one{x1};
  EXPECT_EQ(nested_commutator(1, one), x1);
  std::vector<Word> two{x1, x2};
  EXPECT_EQ(nested_commutator(2, two), comm(x1, x2));
  std::vector<Word> three{x1, x2, x1};
  EXPECT_EQ(nested_commutator(3, three), comm(comm(x1, x2), x1));
  EXPECT_THROW(nested_commutator(0, three), DomainError);
}
