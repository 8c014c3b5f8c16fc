#include "odepth/lie.hpp"

#include <map>
#include <mutex>

#include "odepth/error.hpp"

namespace odepth {

namespace {

bool is_lyndon(const std::vector<int>& w) {
  const std::size_t n = w.size();
  if (n == 0) return false;
  for (std::size_t r = 1; r < n; ++r) {
    // Compare w with its rotation starting at r.
    for (std::size_t i = 0; i < n; ++i) {
      int a = w[i];
      int b = w[(i + r) % n];
      if (a < b) break;
      if (a > b) return false;
      if (i + 1 == n) return false;  // periodic
    }
  }
  return true;
}

/// Index of the start of the longest proper Lyndon suffix.
std::size_t standard_split(const std::vector<int>& w) {
  for (std::size_t s = 1; s < w.size(); ++s) {
    std::vector<int> suffix(w.begin() + static_cast<std::ptrdiff_t>(s), w.end());
    if (is_lyndon(suffix)) return s;
  }
  return w.size();
}

}  // namespace

std::vector<WordKey> lyndon_words(int n, int d) {
  // Duval's generation in lexicographic order.
  std::vector<WordKey> out;
  if (d < 1 || n < 1) return out;
  std::vector<int> w{1};
  while (!w.empty()) {
    if (static_cast<int>(w.size()) == d) out.push_back(WordKey::from_letters(w));
    const std::size_t m = w.size();
    while (static_cast<int>(w.size()) < d) w.push_back(w[w.size() - m]);
    while (!w.empty() && w.back() == n) w.pop_back();
    if (!w.empty()) ++w.back();
  }
  return out;
}

NCSeries lyndon_bracketing(WordKey w, TruncationContext ctx) {
  const auto letters = w.letters();
  if (!is_lyndon(letters)) throw DomainError("not a Lyndon word: " + to_string(w));
  if (letters.size() == 1) return NCSeries::generator(ctx, letters[0]);
  const std::size_t s = standard_split(letters);
  const WordKey u = w.slice(0, static_cast<int>(s));
  const WordKey v = w.slice(static_cast<int>(s), w.length() - static_cast<int>(s));
  return bracket(lyndon_bracketing(u, ctx), lyndon_bracketing(v, ctx));
}

// ---------------------------------------------------------------- LieBasis

LieBasis::LieBasis(TruncationContext ctx) : ctx_(ctx) {
  offsets_.assign(static_cast<std::size_t>(ctx.degree) + 2, 0);
  for (int d = 1; d <= ctx.degree; ++d) {
    offsets_[static_cast<std::size_t>(d)] = static_cast<int>(words_.size());
    for (WordKey w : lyndon_words(ctx.rank, d)) words_.push_back(w);
  }
  offsets_[static_cast<std::size_t>(ctx.degree) + 1] = static_cast<int>(words_.size());
  brackets_.reserve(words_.size());
  factors_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    const WordKey w = words_[i];
    if (w.length() == 1) {
      brackets_.push_back(NCSeries::generator(ctx, w.letter(0)));
      factors_.emplace_back(-1, -1);
      continue;
    }
    const auto letters = w.letters();
    const int s = static_cast<int>(standard_split(letters));
    const int iu = *index_of(w.slice(0, s));
    const int iv = *index_of(w.slice(s, w.length() - s));
    factors_.emplace_back(iu, iv);
    brackets_.push_back(bracket(brackets_[static_cast<std::size_t>(iu)], brackets_[static_cast<std::size_t>(iv)]));
  }
}

std::shared_ptr<const LieBasis> LieBasis::get(TruncationContext ctx) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const LieBasis>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{ctx.rank, ctx.degree}];
  if (!slot) slot = std::make_shared<const LieBasis>(ctx);
  return slot;
}

std::optional<int> LieBasis::index_of(WordKey w) const {
  const int d = w.length();
  if (d < 1 || d > ctx_.degree) return std::nullopt;
  auto first = words_.begin() + offsets_[static_cast<std::size_t>(d)];
  auto last = words_.begin() + offsets_[static_cast<std::size_t>(d) + 1];
  auto it = std::lower_bound(first, last, w);
  if (it == last || *it != w) return std::nullopt;
  return static_cast<int>(it - words_.begin());
}

std::vector<Rational> LieBasis::coords(const NCSeries& x, int d) const {
  if (d < 1 || d > ctx_.degree) throw DomainError("degree out of range");
  std::map<WordKey, Rational> work;
  for (const auto& [w, c] : x.terms()) {
    if (w.length() != d) throw DomainError("lie_coords needs a homogeneous element of degree " + std::to_string(d));
    work.emplace(w, c);
  }
  std::vector<Rational> out(static_cast<std::size_t>(dimension(d)));
  while (!work.empty()) {
    const auto [w, c] = *work.begin();
    auto idx = index_of(w);
    if (!idx) throw DomainError("not a Lie element (leading word " + to_string(w) + " is not Lyndon)");
    out[static_cast<std::size_t>(*idx - offset(d))] = c;
    for (const auto& [u, b] : bracketing(*idx).terms()) {
      auto [it, inserted] = work.try_emplace(u, -c * b);
      if (!inserted) {
        it->second -= c * b;
        if (sgn(it->second) == 0) work.erase(it);
      }
    }
  }
  return out;
}

SparseVector LieBasis::coords(const NCSeries& x) const {
  if (sgn(x.constant_term()) != 0) throw DomainError("Lie element needs zero constant term");
  SparseVector out;
  for (int d = 1; d <= ctx_.degree; ++d) {
    NCSeries part = x.homogeneous_part(d);
    if (part.is_zero()) continue;
    auto dense = coords(part, d);
    for (std::size_t i = 0; i < dense.size(); ++i)
      if (sgn(dense[i]) != 0) out.emplace_back(offset(d) + static_cast<int>(i), dense[i]);
  }
  return out;
}

NCSeries LieBasis::to_series(const SparseVector& v) const {
  NCSeries out(ctx_);
  for (const auto& [i, c] : v) {
    for (const auto& [w, b] : bracketing(i).terms()) out.add_term(w, c * b);
  }
  return out;
}

std::vector<Rational> lie_coords(const NCSeries& x, int d) { return LieBasis::get(x.context())->coords(x, d); }

// ---------------------------------------------------------------- Dynkin

NCSeries dynkin(const NCSeries& s) {
  const auto ctx = s.context();
  std::map<WordKey, NCSeries> memo;
  // D(w) for a word, built from D(prefix).
  auto word_image = [&](auto&& self, WordKey w) -> NCSeries {
    if (auto it = memo.find(w); it != memo.end()) return it->second;
    NCSeries r(ctx);
    if (w.length() == 1) {
      r = NCSeries::monomial(ctx, w);
    } else {
      const NCSeries prefix = self(self, w.slice(0, w.length() - 1));
      const WordKey last = w.slice(w.length() - 1, 1);
      for (const auto& [u, c] : prefix.terms()) {
        r.add_term(u.concat(last), c);
        r.add_term(last.concat(u), -c);
      }
    }
    memo.emplace(w, r);
    return r;
  };
  NCSeries out(ctx);
  for (const auto& [w, c] : s.terms()) {
    if (w.length() == 0) continue;
    out += word_image(word_image, w) * c;
  }
  return out;
}

bool is_primitive(const NCSeries& s) {
  if (sgn(s.constant_term()) != 0) return false;
  const NCSeries d = dynkin(s);
  for (int k = 1; k <= s.context().degree; ++k) {
    if (!(d.homogeneous_part(k) == s.homogeneous_part(k) * Rational(k))) return false;
  }
  return true;
}

// ---------------------------------------------------------------- LieElement

LieElement::LieElement(NCSeries s) : series_(std::move(s)) {
  if (!is_primitive(series_)) throw DomainError("series is not a Lie element");
  const auto basis = LieBasis::get(series_.context());
  for (int d = 1; d <= series_.context().degree; ++d) coords_.push_back(basis->coords(series_.homogeneous_part(d), d));
}

LieElement bch(const LieElement& a, const LieElement& b) {
  if (!(a.context() == b.context())) throw ContextMismatch("bch operands differ in context");
  return LieElement(log(exp(a.series()) * exp(b.series())));
}

}  // namespace odepth
