#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "odepth/rational.hpp"
#include "odepth/word.hpp"

namespace odepth {

/// Series are kept modulo m^(degree+1), m the ideal generated by X_1..X_rank.
struct TruncationContext {
  int rank = 1;
  int degree = 1;

  TruncationContext() = default;
  TruncationContext(int rank, int degree);

  friend bool operator==(const TruncationContext&, const TruncationContext&) = default;
};

/// Positive word over the alphabet {1..16}, at most 15 letters, packed in a
/// single integer so that integer order is (length, lex) order.
class WordKey {
 public:
  static constexpr int kMaxLength = 15;
  static constexpr int kMaxLetter = 16;

  constexpr WordKey() = default;
  /// Letters are 1-based.
  static WordKey from_letters(std::span<const int> letters);
  static WordKey from_letters(std::initializer_list<int> letters) {
    return from_letters(std::span<const int>(letters.begin(), letters.size()));
  }
  static WordKey letter_key(int letter) { return from_letters({letter}); }

  int length() const { return static_cast<int>(bits_ >> 60); }
  /// 1-based letter at position i.
  int letter(int i) const { return static_cast<int>((bits_ >> (56 - 4 * i)) & 0xF) + 1; }
  std::vector<int> letters() const;
  WordKey concat(WordKey other) const;
  /// Letters [from, from+count).
  WordKey slice(int from, int count) const;
  WordKey reversed() const;
  std::uint64_t raw() const { return bits_; }

  friend constexpr auto operator<=>(WordKey, WordKey) = default;

 private:
  std::uint64_t bits_ = 0;
};

std::string to_string(WordKey w);

/// Truncated series in noncommuting X_1..X_n with exact rational coefficients.
/// Zero coefficients are never stored; iteration order is (length, lex).
class NCSeries {
 public:
  using Terms = std::map<WordKey, Rational>;

  explicit NCSeries(TruncationContext ctx) : ctx_(ctx) {}
  static NCSeries one(TruncationContext ctx);
  static NCSeries scalar(TruncationContext ctx, const Rational& c);
  /// X_i, 1-based.
  static NCSeries generator(TruncationContext ctx, int i);
  static NCSeries monomial(TruncationContext ctx, WordKey w, const Rational& c = 1);

  const TruncationContext& context() const { return ctx_; }
  const Terms& terms() const { return terms_; }
  Rational coeff(WordKey w) const;
  Rational constant_term() const { return coeff(WordKey{}); }
  /// Adds c to the coefficient of w; dropped if w is longer than the degree.
  void add_term(WordKey w, const Rational& c);

  bool is_zero() const { return terms_.empty(); }
  /// Smallest word length with a nonzero coefficient, or -1 for zero.
  int min_degree() const;
  NCSeries homogeneous_part(int d) const;
  /// Drops every term of length > d (d <= degree).
  NCSeries truncated_to(int d) const;
  /// Same coefficients re-read in a context of different degree.
  NCSeries with_context(TruncationContext ctx) const;

  NCSeries& operator+=(const NCSeries& o);
  NCSeries& operator-=(const NCSeries& o);
  NCSeries& operator*=(const Rational& c);

  friend bool operator==(const NCSeries& a, const NCSeries& b) {
    return a.ctx_ == b.ctx_ && a.terms_ == b.terms_;
  }

 private:
  TruncationContext ctx_;
  Terms terms_;
};

NCSeries operator+(NCSeries a, const NCSeries& b);
NCSeries operator-(NCSeries a, const NCSeries& b);
NCSeries operator-(NCSeries a);
NCSeries operator*(NCSeries a, const Rational& c);
NCSeries operator*(const Rational& c, NCSeries a);
/// Truncated product.
NCSeries operator*(const NCSeries& a, const NCSeries& b);

NCSeries mul(const NCSeries& a, const NCSeries& b);
NCSeries add(const NCSeries& a, const NCSeries& b);
NCSeries scale(const NCSeries& a, const Rational& c);
/// ab - ba.
NCSeries bracket(const NCSeries& a, const NCSeries& b);

/// Requires zero constant term.
NCSeries exp(const NCSeries& x);
/// Requires constant term 1.
NCSeries log(const NCSeries& s);
/// Multiplicative inverse; requires nonzero constant term.
NCSeries inverse(const NCSeries& s);
/// Antipode (reverse words, sign (-1)^length); equals the inverse on group-like series.
NCSeries antipode(const NCSeries& s);
/// Integer power of a series with constant term 1 (negative powers via inverse).
NCSeries power(const NCSeries& s, long e);

/// Magnus/Chen embedding of the free group: x_i -> exp(X_i).
NCSeries magnus(const Word& w, TruncationContext ctx);

/// Algebra endomorphism X_i -> images[i-1] (images with zero constant term).
NCSeries substitute(const NCSeries& s, std::span<const NCSeries> images);

/// Formal sum of all riffle shuffles of u and v (with multiplicity).
std::map<std::vector<int>, long> shuffle(std::span<const int> u, std::span<const int> v);

}  // namespace odepth
