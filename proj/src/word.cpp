#include "odepth/word.hpp"

#include <algorithm>
#include <cstdlib>

#include "odepth/error.hpp"

namespace odepth {

namespace {

void check_rank(int a, int b) {
  if (a != b) {
    throw RankMismatch("word rank " + std::to_string(a) + " != " + std::to_string(b));
  }
}

}  // namespace

Word::Word(int rank) : rank_(rank) {
  if (rank < 1) throw InvalidLetter("rank must be positive");
}

Word Word::reduce(std::span<const int> raw, int rank) {
  Word w(rank);
  w.letters_.reserve(raw.size());
  for (int l : raw) {
    if (l == 0 || std::abs(l) > rank) {
      throw InvalidLetter("letter " + std::to_string(l) + " outside rank " + std::to_string(rank));
    }
    if (!w.letters_.empty() && w.letters_.back() == -l) {
      w.letters_.pop_back();
    } else {
      w.letters_.push_back(l);
    }
  }
  return w;
}

Word Word::generator(int i, int rank) { return reduce({i}, rank); }

std::string Word::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(letters_[i]);
  }
  return s + "]";
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
  if (auto c = a.letters_.size() <=> b.letters_.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                b.letters_.begin(), b.letters_.end());
}

Word mul(const Word& a, const Word& b) {
  check_rank(a.rank(), b.rank());
  auto la = a.letters();
  auto lb = b.letters();
  // Cancel the boundary, then concatenate.
  std::size_t i = la.size();
  std::size_t j = 0;
  while (i > 0 && j < lb.size() && la[i - 1] == -lb[j]) {
    --i;
    ++j;
  }
  std::vector<int> out(la.begin(), la.begin() + static_cast<std::ptrdiff_t>(i));
  out.insert(out.end(), lb.begin() + static_cast<std::ptrdiff_t>(j), lb.end());
  return Word::reduce(out, a.rank());
}

Word inv(const Word& a) {
  std::vector<int> out(a.letters().rbegin(), a.letters().rend());
  for (int& l : out) l = -l;
  return Word::reduce(out, a.rank());
}

Word comm(const Word& a, const Word& b) { return mul(mul(inv(a), inv(b)), mul(a, b)); }

Word power(const Word& a, long e) {
  Word base = e < 0 ? inv(a) : a;
  Word out(a.rank());
  for (long k = 0; k < std::labs(e); ++k) out = mul(out, base);
  return out;
}

GroupMap::GroupMap(int rank, std::vector<Word> images) : rank_(rank), images_(std::move(images)) {
  if (static_cast<int>(images_.size()) != rank_) {
    throw RankMismatch("group map needs " + std::to_string(rank_) + " images, got " +
                       std::to_string(images_.size()));
  }
  for (const auto& w : images_) check_rank(w.rank(), rank_);
}

GroupMap GroupMap::identity(int rank) {
  std::vector<Word> images;
  for (int i = 1; i <= rank; ++i) images.push_back(Word::generator(i, rank));
  return GroupMap(rank, std::move(images));
}

Word apply_map(const GroupMap& m, const Word& w) {
  check_rank(m.rank(), w.rank());
  Word out(w.rank());
  for (int l : w.letters()) {
    const Word& img = m.image(std::abs(l));
    out = mul(out, l > 0 ? img : inv(img));
  }
  return out;
}

GroupMap compose_maps(const GroupMap& m1, const GroupMap& m2) {
  check_rank(m1.rank(), m2.rank());
  std::vector<Word> images;
  images.reserve(m2.images().size());
  for (const auto& img : m2.images()) images.push_back(apply_map(m1, img));
  return GroupMap(m1.rank(), std::move(images));
}

GroupMap conjugate_map(const GroupMap& m, const Word& s) {
  check_rank(m.rank(), s.rank());
  const Word s_inv = inv(s);
  std::vector<Word> images;
  for (int i = 1; i <= m.rank(); ++i) {
    // i_s^-1(x_i) = s x_i s^-1, then m, then i_s.
    Word pre = mul(mul(s, Word::generator(i, m.rank())), s_inv);
    images.push_back(mul(mul(s_inv, apply_map(m, pre)), s));
  }
  return GroupMap(m.rank(), std::move(images));
}

Word nested_commutator(int depth, std::span<const Word> leaves) {
  if (depth < 1 || leaves.empty()) throw DomainError("nested_commutator needs depth >= 1 and a leaf");
  Word acc = leaves[0];
  for (int d = 1; d < depth; ++d) acc = comm(acc, leaves[static_cast<std::size_t>(d) % leaves.size()]);
  return acc;
}

}  // namespace odepth
