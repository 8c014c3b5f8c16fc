#include "odepth/ncseries.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>

#include "odepth/error.hpp"

namespace odepth {

TruncationContext::TruncationContext(int rank_, int degree_) : rank(rank_), degree(degree_) {
  if (rank < 1 || rank > WordKey::kMaxLetter) throw DomainError("rank must be in 1..16");
  if (degree < 1 || degree > WordKey::kMaxLength) throw DomainError("degree must be in 1..15");
}

// ---------------------------------------------------------------- WordKey

WordKey WordKey::from_letters(std::span<const int> letters) {
  if (letters.size() > static_cast<std::size_t>(kMaxLength)) throw DomainError("word too long for key");
  WordKey k;
  k.bits_ = static_cast<std::uint64_t>(letters.size()) << 60;
  int pos = 0;
  for (int l : letters) {
    if (l < 1 || l > kMaxLetter) throw InvalidLetter("series letter out of range: " + std::to_string(l));
    k.bits_ |= static_cast<std::uint64_t>(l - 1) << (56 - 4 * pos);
    ++pos;
  }
  return k;
}

std::vector<int> WordKey::letters() const {
  std::vector<int> out(static_cast<std::size_t>(length()));
  for (int i = 0; i < length(); ++i) out[static_cast<std::size_t>(i)] = letter(i);
  return out;
}

WordKey WordKey::concat(WordKey other) const {
  const int la = length();
  const int lb = other.length();
  if (la + lb > kMaxLength) throw DomainError("word too long for key");
  constexpr std::uint64_t kBody = (std::uint64_t{1} << 60) - 1;
  WordKey k;
  k.bits_ = (static_cast<std::uint64_t>(la + lb) << 60) | (bits_ & kBody) | ((other.bits_ & kBody) >> (4 * la));
  return k;
}

WordKey WordKey::slice(int from, int count) const {
  constexpr std::uint64_t kBody = (std::uint64_t{1} << 60) - 1;
  std::uint64_t body = (bits_ & kBody) << (4 * from);
  body &= kBody;
  if (count < 15) body &= ~(kBody >> (4 * count)) & kBody;
  WordKey k;
  k.bits_ = (static_cast<std::uint64_t>(count) << 60) | body;
  return k;
}

WordKey WordKey::reversed() const {
  auto l = letters();
  std::reverse(l.begin(), l.end());
  return from_letters(l);
}

std::string to_string(WordKey w) {
  std::string s = "(";
  for (int i = 0; i < w.length(); ++i) {
    if (i) s += ",";
    s += std::to_string(w.letter(i));
  }
  return s + ")";
}

// ---------------------------------------------------------------- NCSeries

namespace {

void check_ctx(const NCSeries& a, const NCSeries& b) {
  if (!(a.context() == b.context())) throw ContextMismatch("series contexts differ");
}

}  // namespace

NCSeries NCSeries::one(TruncationContext ctx) { return scalar(ctx, 1); }

NCSeries NCSeries::scalar(TruncationContext ctx, const Rational& c) {
  NCSeries s(ctx);
  s.add_term(WordKey{}, c);
  return s;
}

NCSeries NCSeries::generator(TruncationContext ctx, int i) {
  if (i < 1 || i > ctx.rank) throw InvalidLetter("generator index out of range");
  return monomial(ctx, WordKey::letter_key(i));
}

NCSeries NCSeries::monomial(TruncationContext ctx, WordKey w, const Rational& c) {
  NCSeries s(ctx);
  s.add_term(w, c);
  return s;
}

Rational NCSeries::coeff(WordKey w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Rational(0) : it->second;
}

void NCSeries::add_term(WordKey w, const Rational& c) {
  if (w.length() > ctx_.degree || sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

int NCSeries::min_degree() const { return terms_.empty() ? -1 : terms_.begin()->first.length(); }

NCSeries NCSeries::homogeneous_part(int d) const {
  NCSeries out(ctx_);
  for (const auto& [w, c] : terms_)
    if (w.length() == d) out.terms_.emplace_hint(out.terms_.end(), w, c);
  return out;
}

NCSeries NCSeries::truncated_to(int d) const {
  NCSeries out(ctx_);
  for (const auto& [w, c] : terms_) {
    if (w.length() > d) break;
    out.terms_.emplace_hint(out.terms_.end(), w, c);
  }
  return out;
}

NCSeries NCSeries::with_context(TruncationContext ctx) const {
  if (ctx.rank != ctx_.rank) throw ContextMismatch("rank differs");
  NCSeries out(ctx);
  for (const auto& [w, c] : terms_) out.add_term(w, c);
  return out;
}

NCSeries& NCSeries::operator+=(const NCSeries& o) {
  check_ctx(*this, o);
  for (const auto& [w, c] : o.terms_) add_term(w, c);
  return *this;
}

NCSeries& NCSeries::operator-=(const NCSeries& o) {
  check_ctx(*this, o);
  for (const auto& [w, c] : o.terms_) add_term(w, -c);
  return *this;
}

NCSeries& NCSeries::operator*=(const Rational& c) {
  if (sgn(c) == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, v] : terms_) v *= c;
  return *this;
}

NCSeries operator+(NCSeries a, const NCSeries& b) { return a += b; }
NCSeries operator-(NCSeries a, const NCSeries& b) { return a -= b; }
NCSeries operator-(NCSeries a) { return a *= Rational(-1); }
NCSeries operator*(NCSeries a, const Rational& c) { return a *= c; }
NCSeries operator*(const Rational& c, NCSeries a) { return a *= c; }

NCSeries operator*(const NCSeries& a, const NCSeries& b) {
  check_ctx(a, b);
  const int c = a.context().degree;
  std::map<WordKey, Rational> acc;
  Rational prod;
  for (const auto& [wa, ca] : a.terms()) {
    const int room = c - wa.length();
    if (room < 0) break;
    for (const auto& [wb, cb] : b.terms()) {
      if (wb.length() > room) break;
      prod = ca * cb;
      auto [it, inserted] = acc.try_emplace(wa.concat(wb), prod);
      if (!inserted) it->second += prod;
    }
  }
  NCSeries out(a.context());
  for (auto& [w, v] : acc)
    if (sgn(v) != 0) out.add_term(w, v);
  return out;
}

NCSeries mul(const NCSeries& a, const NCSeries& b) { return a * b; }
NCSeries add(const NCSeries& a, const NCSeries& b) { return a + b; }
NCSeries scale(const NCSeries& a, const Rational& c) { return a * c; }
NCSeries bracket(const NCSeries& a, const NCSeries& b) { return a * b - b * a; }

NCSeries exp(const NCSeries& x) {
  if (sgn(x.constant_term()) != 0) throw DomainError("exp needs zero constant term");
  const auto ctx = x.context();
  NCSeries result = NCSeries::one(ctx);
  NCSeries term = NCSeries::one(ctx);
  for (int k = 1; k <= ctx.degree; ++k) {
    term = term * x;
    term *= Rational(1, k);
    if (term.is_zero()) break;
    result += term;
  }
  return result;
}

NCSeries log(const NCSeries& s) {
  if (s.constant_term() != 1) throw DomainError("log needs constant term 1");
  const auto ctx = s.context();
  NCSeries y = s - NCSeries::one(ctx);
  NCSeries result(ctx);
  NCSeries power = y;
  for (int k = 1; k <= ctx.degree && !power.is_zero(); ++k) {
    result += power * Rational(k % 2 == 1 ? 1 : -1, k);
    power = power * y;
  }
  return result;
}

NCSeries inverse(const NCSeries& s) {
  const Rational a0 = s.constant_term();
  if (sgn(a0) == 0) throw DomainError("inverse needs nonzero constant term");
  const auto ctx = s.context();
  const Rational a0_inv = 1 / a0;
  // s = a0 (1 + y), s^-1 = a0^-1 sum (-y)^k.
  NCSeries neg_y = NCSeries::one(ctx) - s * a0_inv;
  NCSeries result = NCSeries::one(ctx);
  NCSeries power = NCSeries::one(ctx);
  for (int k = 1; k <= ctx.degree; ++k) {
    power = power * neg_y;
    if (power.is_zero()) break;
    result += power;
  }
  return result * a0_inv;
}

NCSeries antipode(const NCSeries& s) {
  NCSeries out(s.context());
  for (const auto& [w, c] : s.terms()) out.add_term(w.reversed(), w.length() % 2 == 0 ? c : Rational(-c));
  return out;
}

NCSeries power(const NCSeries& s, long e) {
  NCSeries base = e < 0 ? inverse(s) : s;
  unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
  NCSeries result = NCSeries::one(s.context());
  while (n) {
    if (n & 1UL) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

NCSeries magnus(const Word& w, TruncationContext ctx) {
  if (w.rank() != ctx.rank) throw RankMismatch("word rank differs from context rank");
  NCSeries result = NCSeries::one(ctx);
  for (int l : w.letters()) {
    NCSeries factor = NCSeries::one(ctx);
    const int i = std::abs(l);
    Rational c = 1;
    std::vector<int> letters;
    for (int k = 1; k <= ctx.degree; ++k) {
      c /= k;
      if (l < 0) c = -c;
      letters.push_back(i);
      factor.add_term(WordKey::from_letters(letters), c);
    }
    result = result * factor;
  }
  return result;
}

NCSeries substitute(const NCSeries& s, std::span<const NCSeries> images) {
  const auto ctx = s.context();
  if (static_cast<int>(images.size()) != ctx.rank) throw RankMismatch("substitution needs one image per generator");
  for (const auto& img : images) {
    if (!(img.context() == ctx)) throw ContextMismatch("substitution image context differs");
    if (sgn(img.constant_term()) != 0) throw DomainError("substitution images need zero constant term");
  }
  // sub(s) = s_0 + sum_i img_i * sub(d_i s), d_i strips a leading X_i.
  std::function<NCSeries(const NCSeries&)> rec = [&](const NCSeries& t) {
    NCSeries out = NCSeries::scalar(ctx, t.constant_term());
    std::vector<NCSeries> tails(static_cast<std::size_t>(ctx.rank), NCSeries(ctx));
    for (const auto& [w, c] : t.terms()) {
      if (w.length() == 0) continue;
      tails[static_cast<std::size_t>(w.letter(0) - 1)].add_term(w.slice(1, w.length() - 1), c);
    }
    for (int i = 0; i < ctx.rank; ++i) {
      const auto& tail = tails[static_cast<std::size_t>(i)];
      if (tail.is_zero()) continue;
      out += images[static_cast<std::size_t>(i)] * rec(tail);
    }
    return out;
  };
  return rec(s);
}

std::map<std::vector<int>, long> shuffle(std::span<const int> u, std::span<const int> v) {
  std::map<std::vector<int>, long> out;
  if (u.empty() || v.empty()) {
    std::vector<int> w(u.begin(), u.end());
    w.insert(w.end(), v.begin(), v.end());
    out[w] = 1;
    return out;
  }
  for (auto& [w, m] : shuffle(u.subspan(1), v)) {
    std::vector<int> x{u[0]};
    x.insert(x.end(), w.begin(), w.end());
    out[x] += m;
  }
  for (auto& [w, m] : shuffle(u, v.subspan(1))) {
    std::vector<int> x{v[0]};
    x.insert(x.end(), w.begin(), w.end());
    out[x] += m;
  }
  return out;
}

}  // namespace odepth
