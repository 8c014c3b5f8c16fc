#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cstdlib>
#include <random>
#include <vector>

#include "odepth/word.hpp"

namespace odepth::testing {

/// Repeated single left-to-right passes cancelling the first adjacent
/// inverse pair, until no pair is left.
inline std::vector<int> naive_reduce(std::vector<int> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i] == -w[i + 1]) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        changed = true;
        break;
      }
    }
  }
  return w;
}

inline std::vector<int> random_raw(std::mt19937& rng, int rank, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> gen(1, rank);
  std::bernoulli_distribution sign(0.5);
  std::vector<int> w(static_cast<std::size_t>(len(rng)));
  for (int& l : w) l = sign(rng) ? gen(rng) : -gen(rng);
  return w;
}

inline Word random_word(std::mt19937& rng, int rank, int max_len) {
  return Word::reduce(random_raw(rng, rank, max_len), rank);
}

/// Brute-force Lyndon test: strictly smaller than every proper rotation.
inline bool brute_is_lyndon(const std::vector<int>& w) {
  for (std::size_t r = 1; r < w.size(); ++r) {
    std::vector<int> rot(w.begin() + static_cast<std::ptrdiff_t>(r), w.end());
    rot.insert(rot.end(), w.begin(), w.begin() + static_cast<std::ptrdiff_t>(r));
    if (!(w < rot)) return false;
  }
  return !w.empty();
}

/// All Lyndon words of length d over {1..n}, lex order, by enumeration.
inline std::vector<std::vector<int>> brute_lyndon(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> w(static_cast<std::size_t>(d), 1);
  while (true) {
    if (brute_is_lyndon(w)) out.push_back(w);
    int i = d - 1;
    while (i >= 0 && w[static_cast<std::size_t>(i)] == n) w[static_cast<std::size_t>(i--)] = 1;
    if (i < 0) break;
    ++w[static_cast<std::size_t>(i)];
  }
  return out;
}

/// Witt necklace formula (1/d) sum_{e|d} mu(e) n^(d/e).
inline long witt_count(int n, int d) {
  auto mobius = [](int m) {
    int r = 1;
    for (int p = 2; p * p <= m; ++p) {
      if (m % p == 0) {
        m /= p;
        if (m % p == 0) return 0;
        r = -r;
      }
    }
    return m > 1 ? -r : r;
  };
  long s = 0;
  for (int e = 1; e <= d; ++e) {
    if (d % e) continue;
    long p = 1;
    for (int k = 0; k < d / e; ++k) p *= n;
    s += mobius(e) * p;
  }
  return s / d;
}

}  // namespace odepth::testing
