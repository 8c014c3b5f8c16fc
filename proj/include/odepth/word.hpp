#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace odepth {

/// Freely reduced word in the free group on x_1..x_rank. A letter +i stands
/// for x_i, -i for its inverse.
class Word {
 public:
  explicit Word(int rank = 1);

  /// Freely reduces `raw`. Throws InvalidLetter on 0 or |letter| > rank.
  static Word reduce(std::span<const int> raw, int rank);
  static Word reduce(std::initializer_list<int> raw, int rank) {
    return reduce(std::span<const int>(raw.begin(), raw.size()), rank);
  }
  static Word generator(int i, int rank);

  int rank() const { return rank_; }
  std::span<const int> letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool is_identity() const { return letters_.empty(); }

  std::string to_string() const;

  friend bool operator==(const Word&, const Word&) = default;
  /// Shortlex order: length first, then lexicographic on signed letters.
  friend std::strong_ordering operator<=>(const Word& a, const Word& b);

 private:
  int rank_;
  std::vector<int> letters_;
};

Word mul(const Word& a, const Word& b);
Word inv(const Word& a);
/// [a,b] = a^-1 b^-1 a b.
Word comm(const Word& a, const Word& b);
Word power(const Word& a, long e);

/// Endomorphism of the free group given by generator images.
class GroupMap {
 public:
  GroupMap(int rank, std::vector<Word> images);
  static GroupMap identity(int rank);

  int rank() const { return rank_; }
  const std::vector<Word>& images() const { return images_; }
  const Word& image(int generator) const { return images_.at(generator - 1); }

  friend bool operator==(const GroupMap&, const GroupMap&) = default;

 private:
  int rank_;
  std::vector<Word> images_;
};

Word apply_map(const GroupMap& m, const Word& w);
/// apply_map(compose_maps(m1, m2), w) == apply_map(m1, apply_map(m2, w)).
GroupMap compose_maps(const GroupMap& m1, const GroupMap& m2);
/// Inner automorphism w -> s^-1 w s, conjugated onto a map: returns
/// i_s . m . i_s^-1.
GroupMap conjugate_map(const GroupMap& m, const Word& s);

/// Left-nested commutator [[...[l0, l1], l2], ...] of depth c, cycling through
/// `leaves`. Depth 1 returns leaves[0].
Word nested_commutator(int depth, std::span<const Word> leaves);

}  // namespace odepth
