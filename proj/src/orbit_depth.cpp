#include "odepth/orbit_depth.hpp"

#include <deque>
#include <set>

#include "odepth/error.hpp"

namespace odepth {

namespace {

constexpr std::size_t kMaxWitnessLength = 4096;

NCSeries log_magnus(const Word& w, TruncationContext ctx) { return log(magnus(w, ctx)); }

long necklace_count(int n, int d) {
  // (1/d) sum_{e | d} mu(e) n^(d/e)
  auto mobius = [](int m) {
    int r = 1;
    for (int p = 2; p * p <= m; ++p) {
      if (m % p) continue;
      m /= p;
      if (m % p == 0) return 0;
      r = -r;
    }
    return m > 1 ? -r : r;
  };
  long total = 0;
  for (int e = 1; e <= d; ++e) {
    if (d % e) continue;
    long p = 1;
    for (int i = 0; i < d / e; ++i) p *= n;
    total += mobius(e) * p;
  }
  return total / d;
}

void check_resources(int rank, int c) {
  long total = 0;
  for (int d = 1; d <= c; ++d) {
    total += necklace_count(rank, d);
    if (total > kMaxLieDimension) {
      throw ResourceLimit("Lie algebra dimension exceeds " + std::to_string(kMaxLieDimension) + " at rank " +
                          std::to_string(rank) + ", degree " + std::to_string(c));
    }
  }
}

std::vector<LinearMap> induced_maps(const ProblemInstance& inst, TruncationContext ctx) {
  std::vector<LinearMap> out;
  if (inst.uses_generators()) return out;
  for (const auto& m : inst.monodromy) out.push_back(induced_lie_map(m, ctx));
  return out;
}

FilteredSubspace close_span(FilteredSubspace s, std::deque<SparseVector> queue, const std::vector<LinearMap>& ops) {
  while (!queue.empty()) {
    SparseVector v = std::move(queue.front());
    queue.pop_front();
    for (const auto& op : ops) {
      SparseVector u = op(v);
      if (s.add(u)) queue.push_back(std::move(u));
    }
  }
  return s;
}

std::vector<LinearMap> with_ad(const std::vector<LinearMap>& maps, TruncationContext ctx) {
  std::vector<LinearMap> ops;
  for (int i = 1; i <= ctx.rank; ++i) ops.push_back(ad_generator(i, ctx));
  ops.insert(ops.end(), maps.begin(), maps.end());
  return ops;
}

}  // namespace

std::string to_string(DepthMode m) {
  switch (m) {
    case DepthMode::rational: return "rational";
    case DepthMode::integral: return "integral";
    case DepthMode::both: return "both";
  }
  return "both";
}

DepthMode parse_mode(const std::string& s) {
  if (s == "rational") return DepthMode::rational;
  if (s == "integral") return DepthMode::integral;
  if (s == "both") return DepthMode::both;
  throw DomainError("unknown mode '" + s + "'");
}

void ProblemInstance::validate() const {
  if (rank < 1 || rank > WordKey::kMaxLetter) throw DomainError("rank out of range");
  if (kmax < 2 || kmax + 1 > WordKey::kMaxLength) throw DomainError("kmax must lie in 2.." + std::to_string(WordKey::kMaxLength - 1));
  if (monodromy.empty() == orbit_generators.empty()) {
    throw DomainError("exactly one of monodromy and orbit_generators must be given");
  }
  for (const auto& m : monodromy)
    if (m.rank() != rank) throw RankMismatch("monodromy map rank differs from instance rank");
  for (const auto& w : orbit_generators)
    if (w.rank() != rank) throw RankMismatch("orbit generator rank differs from instance rank");
  if (!uses_generators() && gamma.rank() != rank) throw RankMismatch("gamma rank differs from instance rank");
}

SparseVector LinearMap::operator()(const SparseVector& v) const {
  SparseVector out;
  for (const auto& [i, c] : v) axpy(out, c, columns.at(static_cast<std::size_t>(i)));
  return out;
}

LinearMap induced_lie_map(const GroupMap& m, TruncationContext ctx) {
  if (m.rank() != ctx.rank) throw RankMismatch("map rank differs from context rank");
  auto basis = LieBasis::get(ctx);
  std::vector<NCSeries> gen_images;
  for (int i = 1; i <= ctx.rank; ++i) gen_images.push_back(log_magnus(m.image(i), ctx));
  std::vector<NCSeries> images;
  LinearMap out;
  for (int k = 0; k < basis->dimension(); ++k) {
    auto [u, v] = basis->factorization(k);
    if (u < 0) {
      images.push_back(gen_images[static_cast<std::size_t>(basis->word(k).letter(0) - 1)]);
    } else {
      images.push_back(bracket(images[static_cast<std::size_t>(u)], images[static_cast<std::size_t>(v)]));
    }
    out.columns.push_back(basis->coords(images.back()));
  }
  return out;
}

LinearMap ad_generator(int i, TruncationContext ctx) {
  auto basis = LieBasis::get(ctx);
  const NCSeries x = NCSeries::generator(ctx, i);
  LinearMap out;
  for (int k = 0; k < basis->dimension(); ++k) out.columns.push_back(basis->coords(bracket(basis->bracketing(k), x)));
  return out;
}

OrbitSpan orbit_span(const ProblemInstance& inst, TruncationContext ctx) {
  inst.validate();
  OrbitSpan out{FilteredSubspace(ctx), {}};
  auto basis = LieBasis::get(ctx);
  if (inst.uses_generators()) {
    for (const auto& w : inst.orbit_generators)
      if (out.span.add(log_magnus(w, ctx))) out.witnesses.push_back(w);
    return out;
  }
  const auto maps = induced_maps(inst, ctx);
  struct Item {
    std::optional<Word> word;
    SparseVector v;
  };
  std::deque<Item> queue;
  SparseVector v0 = basis->coords(log_magnus(inst.gamma, ctx));
  if (out.span.add(v0)) {
    out.witnesses.push_back(inst.gamma);
    queue.push_back({inst.gamma, v0});
  }
  while (!queue.empty()) {
    Item item = std::move(queue.front());
    queue.pop_front();
    for (std::size_t mi = 0; mi < maps.size(); ++mi) {
      SparseVector u = maps[mi](item.v);
      if (!out.span.add(u)) continue;
      std::optional<Word> w;
      if (item.word) {
        Word image = apply_map(inst.monodromy[mi], *item.word);
        if (image.length() <= kMaxWitnessLength) w = std::move(image);
      }
      if (w) out.witnesses.push_back(*w);
      queue.push_back({std::move(w), std::move(u)});
    }
  }
  return out;
}

FilteredSubspace ideal_closure(const FilteredSubspace& v, const std::vector<LinearMap>& maps) {
  FilteredSubspace s(v.context());
  std::deque<SparseVector> queue;
  for (auto& row : v.rows())
    if (s.add(row)) queue.push_back(row);
  return close_span(std::move(s), std::move(queue), with_ad(maps, v.context()));
}

FilteredSubspace n_zero(const FilteredSubspace& n1, const std::vector<LinearMap>& maps) {
  const auto ctx = n1.context();
  const auto ops = with_ad(maps, ctx);
  FilteredSubspace s(ctx);
  std::deque<SparseVector> queue;
  for (const auto& b : n1.rows()) {
    for (int i = 0; i < ctx.rank; ++i) {
      SparseVector u = ops[static_cast<std::size_t>(i)](b);
      if (s.add(u)) queue.push_back(std::move(u));
    }
  }
  s = close_span(std::move(s), std::move(queue), ops);
  for (const auto& row : s.rows())
    if (!n1.contains(row)) throw Error("internal: N0 is not contained in N1");
  return s;
}

DepthReport depth(const FilteredSubspace& n1, const FilteredSubspace& n0, int kmax) {
  const int c = n1.context().degree;
  if (!(n0.context() == n1.context())) throw ContextMismatch("N0 and N1 contexts differ");
  if (kmax < 1 || kmax + 1 > c) throw DomainError("depth needs truncation degree >= kmax + 1");
  DepthReport r;
  r.rank = n1.context().rank;
  r.kmax = kmax;
  r.has_rational = true;
  for (int j = 1; j <= kmax; ++j) {
    GradeInfo g;
    g.j = j;
    g.dim_n1 = n1.leading_dimension(j);
    g.dim_n0 = n0.leading_dimension(j);
    g.dim_image = g.dim_n1 - g.dim_n0;
    auto a = n0.leading_space(j + 1);
    auto b = n1.leading_space(j + 1);
    g.contained_next = subspace_contains(a, b);
    r.ch1_dim += g.dim_image;
    if (!r.k && g.contained_next) r.k = j;
    r.grades.push_back(std::move(g));
  }
  if (r.k) {
    r.stabilized = true;
    for (int j = *r.k; j <= kmax; ++j) r.stabilized = r.stabilized && r.grades[static_cast<std::size_t>(j - 1)].contained_next;
    if (!r.stabilized) r.warnings.push_back("containment at grade k+1 did not persist up to kmax");
  }
  return r;
}

// ---------------------------------------------------------------- GradedSubgroup

namespace {

using Coef = long long;

// Stored coefficients stay below this bound, so products accumulate exactly
// in 128 bits.
constexpr Coef kCoefBound = Coef{1} << 62;

Coef checked(__int128 x) {
  if (x >= kCoefBound || x <= -kCoefBound) throw ResourceLimit("integer overflow in nilpotent arithmetic");
  return static_cast<Coef>(x);
}

Coef to_coef(const Integer& x) {
  if (!x.fits_slong_p()) throw ResourceLimit("integer overflow in nilpotent arithmetic");
  return checked(x.get_si());
}

Coef floor_div(Coef a, Coef b) {
  Coef q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Dense integer series truncated at degree c; index of a word is
/// offset(length) + base-n value with the first letter most significant.
struct DenseLayout {
  int n = 0;
  int c = 0;
  std::vector<std::size_t> offset;  // offset[l], l = 0..c+1
  std::vector<std::size_t> width;   // n^l

  DenseLayout(int rank, int degree) : n(rank), c(degree) {
    std::size_t o = 0, w = 1;
    for (int l = 0; l <= c + 1; ++l) {
      offset.push_back(o);
      width.push_back(w);
      o += w;
      w *= static_cast<std::size_t>(n);
    }
  }
  std::size_t size() const { return offset[static_cast<std::size_t>(c) + 1]; }
  int degree_of(std::size_t index) const {
    int l = 0;
    while (offset[static_cast<std::size_t>(l) + 1] <= index) ++l;
    return l;
  }
};

using Dense = std::vector<Coef>;

/// Lowest degree >= 1 with a nonzero coefficient (c + 1 if none).
int low_degree(const DenseLayout& L, const Dense& a) {
  for (std::size_t t = 1; t < a.size(); ++t)
    if (a[t] != 0) return L.degree_of(t);
  return L.c + 1;
}

/// a * b truncated at degree maxdeg.
Dense dense_mul(const DenseLayout& L, const Dense& a, const Dense& b, int maxdeg) {
  std::vector<__int128> acc(L.size(), 0);
  const int da = low_degree(L, a), db = low_degree(L, b);
  for (int la = 0; la <= maxdeg; la = (la == 0 ? da : la + 1)) {
    const std::size_t oa = L.offset[static_cast<std::size_t>(la)], wa = L.width[static_cast<std::size_t>(la)];
    for (std::size_t ia = 0; ia < wa; ++ia) {
      const Coef x = a[oa + ia];
      if (x == 0) continue;
      for (int lb = 0; la + lb <= maxdeg; lb = (lb == 0 ? db : lb + 1)) {
        const std::size_t ob = L.offset[static_cast<std::size_t>(lb)], wb = L.width[static_cast<std::size_t>(lb)];
        __int128* out = acc.data() + L.offset[static_cast<std::size_t>(la + lb)] + ia * wb;
        const Coef* y = b.data() + ob;
        for (std::size_t ib = 0; ib < wb; ++ib) out[ib] += static_cast<__int128>(x) * y[ib];
      }
    }
  }
  Dense out(L.size());
  for (std::size_t t = 0; t < acc.size(); ++t) out[t] = checked(acc[t]);
  return out;
}

/// Group element with its inverse; `low` is the leading degree (c + 1 for 1).
struct Elem {
  Dense f, i;
  int low = 0;
};

Elem make_elem(const DenseLayout& L, Dense f, Dense i) {
  const int low = low_degree(L, f);
  return {std::move(f), std::move(i), low};
}

Elem elem_one(const DenseLayout& L) {
  Dense d(L.size(), 0);
  d[0] = 1;
  return {d, d, L.c + 1};
}

Elem elem_inv(const Elem& a) { return {a.i, a.f, a.low}; }

Elem elem_mul(const DenseLayout& L, const Elem& a, const Elem& b) {
  if (a.low + b.low > L.c) {
    // (a - 1)(b - 1) vanishes at this truncation: the product is additive.
    Dense f(a.f.size()), i(a.i.size());
    for (std::size_t t = 0; t < f.size(); ++t) {
      f[t] = checked(static_cast<__int128>(a.f[t]) + b.f[t]);
      i[t] = checked(static_cast<__int128>(a.i[t]) + b.i[t]);
    }
    f[0] = 1;
    i[0] = 1;
    return make_elem(L, std::move(f), std::move(i));
  }
  return make_elem(L, dense_mul(L, a.f, b.f, L.c), dense_mul(L, b.i, a.i, L.c));
}

Elem elem_comm(const DenseLayout& L, const Elem& a, const Elem& b) {
  return elem_mul(L, elem_mul(L, elem_inv(a), elem_inv(b)), elem_mul(L, a, b));
}

Elem elem_pow(const DenseLayout& L, Elem base, Coef e) {
  if (e == 0) return elem_one(L);
  if (2 * base.low > L.c) {
    Dense f(base.f.size()), i(base.i.size());
    for (std::size_t t = 1; t < f.size(); ++t) {
      f[t] = checked(static_cast<__int128>(e) * base.f[t]);
      i[t] = checked(static_cast<__int128>(e) * base.i[t]);
    }
    f[0] = 1;
    i[0] = 1;
    return make_elem(L, std::move(f), std::move(i));
  }
  if (e < 0) {
    base = elem_inv(base);
    e = -e;
  }
  std::optional<Elem> out;
  while (e > 0) {
    if (e & 1) out = out ? elem_mul(L, *out, base) : base;
    e >>= 1;
    if (e) base = elem_mul(L, base, base);
  }
  return *out;
}

Elem elem_letter(const DenseLayout& L, int letter) {
  const std::size_t g = static_cast<std::size_t>(std::abs(letter) - 1);
  Dense f(L.size(), 0), inv_part(L.size(), 0);
  f[0] = 1;
  f[L.offset[1] + g] = 1;
  // (1 + X)^{-1} = sum (-X)^k; the index of g^k within level k is g (1 + n + ... + n^{k-1}).
  std::size_t idx = 0;
  for (int k = 0; k <= L.c; ++k) {
    inv_part[L.offset[static_cast<std::size_t>(k)] + idx] = (k % 2) ? -1 : 1;
    idx = idx * static_cast<std::size_t>(L.n) + g;
  }
  Elem e = make_elem(L, std::move(f), std::move(inv_part));
  return letter > 0 ? e : elem_inv(e);
}

Elem elem_word(const DenseLayout& L, const Word& w) {
  Elem out = elem_one(L);
  for (int l : w.letters()) out = elem_mul(L, out, elem_letter(L, l));
  return out;
}

/// Algebra endomorphism X_j -> y[j] (zero constant terms), by Horner's rule
/// on the leading letter: s = s_0 + sum_j X_j (d_j s).
Dense dense_substitute(const DenseLayout& L, const Dense& s, const std::vector<Dense>& y) {
  auto subtree_nonzero = [&](int level, std::size_t index) {
    std::size_t lo = index, span = 1;
    for (int l = level; l <= L.c; ++l) {
      for (std::size_t t = 0; t < span; ++t)
        if (s[L.offset[static_cast<std::size_t>(l)] + lo + t] != 0) return true;
      lo *= static_cast<std::size_t>(L.n);
      span *= static_cast<std::size_t>(L.n);
    }
    return false;
  };
  auto rec = [&](auto&& self, int level, std::size_t prefix) -> Dense {
    const int maxdeg = L.c - level;
    Dense out(L.size(), 0);
    out[0] = s[L.offset[static_cast<std::size_t>(level)] + prefix];
    if (maxdeg == 0) return out;
    for (int j = 0; j < L.n; ++j) {
      const std::size_t child = prefix * static_cast<std::size_t>(L.n) + static_cast<std::size_t>(j);
      if (!subtree_nonzero(level + 1, child)) continue;
      Dense term = dense_mul(L, y[static_cast<std::size_t>(j)], self(self, level + 1, child), maxdeg);
      for (std::size_t t = 0; t < out.size(); ++t) out[t] = checked(static_cast<__int128>(out[t]) + term[t]);
    }
    return out;
  };
  return rec(rec, 0, 0);
}

Coef ext_gcd(Coef a, Coef b, Coef& s, Coef& t) {
  Integer g, S, T;
  mpz_gcdext(g.get_mpz_t(), S.get_mpz_t(), T.get_mpz_t(), Integer(static_cast<long>(a)).get_mpz_t(),
             Integer(static_cast<long>(b)).get_mpz_t());
  s = to_coef(S);
  t = to_coef(T);
  return to_coef(g);
}

}  // namespace

struct GradedSubgroup::Impl {
  struct Entry {
    Elem g;
    std::vector<Coef> lead;
    std::size_t reduced_at = 0;
    Coef pivot() const { return lead[pivot_index]; }
    std::size_t pivot_index = 0;
  };
  struct MapData {
    std::vector<Dense> y;  // images of X_j: magnus(m(x_j)) - 1
  };

  TruncationContext ctx;
  DenseLayout layout;
  std::shared_ptr<const LieBasis> basis;
  std::vector<MapData> maps;
  std::vector<Elem> letters;  // x_j and x_j^{-1}
  std::vector<std::map<int, Entry>> levels;
  std::vector<std::vector<std::size_t>> lyndon_index;  // dense indices of Lyndon words per degree
  std::size_t epoch = 1;                                // bumped when a pivot row is added or replaced

  Impl(TruncationContext c, const std::vector<GroupMap>& ms)
      : ctx(c), layout(c.rank, c.degree), basis(LieBasis::get(c)), levels(static_cast<std::size_t>(c.degree) + 1) {
    lyndon_index.resize(static_cast<std::size_t>(c.degree) + 1);
    for (int i = 0; i < basis->dimension(); ++i) {
      const WordKey w = basis->word(i);
      std::size_t v = 0;
      for (int k = 0; k < w.length(); ++k) v = v * static_cast<std::size_t>(c.rank) + static_cast<std::size_t>(w.letter(k) - 1);
      lyndon_index[static_cast<std::size_t>(w.length())].push_back(layout.offset[static_cast<std::size_t>(w.length())] + v);
    }
    for (const auto& m : ms) {
      if (m.rank() != c.rank) throw RankMismatch("map rank differs from context rank");
      MapData md;
      for (int j = 1; j <= c.rank; ++j) {
        Dense d = elem_word(layout, m.image(j)).f;
        d[0] -= 1;
        md.y.push_back(std::move(d));
      }
      maps.push_back(std::move(md));
    }
    for (int j = 1; j <= c.rank; ++j) {
      letters.push_back(elem_letter(layout, j));
      letters.push_back(elem_letter(layout, -j));
    }
  }

  /// Coefficients at the Lyndon words of degree d. Since the bracketing of a
  /// Lyndon word w is w plus larger words, this is a unimodular triangular
  /// change of the Lyndon coordinates, so lattices are preserved.
  std::vector<Coef> leading_vector(const Elem& e, int d) const {
    std::vector<Coef> out;
    for (std::size_t idx : lyndon_index[static_cast<std::size_t>(d)]) out.push_back(e.f[idx]);
    return out;
  }

  /// Lyndon coordinates of the degree-d part of e.
  std::vector<Rational> lyndon_coords(const Elem& e, int d) const {
    NCSeries part(ctx);
    const std::size_t o = layout.offset[static_cast<std::size_t>(d)], w = layout.width[static_cast<std::size_t>(d)];
    std::vector<int> word(static_cast<std::size_t>(d));
    for (std::size_t t = 0; t < w; ++t) {
      if (e.f[o + t] == 0) continue;
      std::size_t v = t;
      for (int k = d - 1; k >= 0; --k) {
        word[static_cast<std::size_t>(k)] = static_cast<int>(v % static_cast<std::size_t>(layout.n)) + 1;
        v /= static_cast<std::size_t>(layout.n);
      }
      part.add_term(WordKey::from_letters(word), Rational(static_cast<long>(e.f[o + t])));
    }
    return basis->coords(part, d);
  }

  Elem apply_map(const MapData& m, const Elem& e) const {
    return make_elem(layout, dense_substitute(layout, e.f, m.y), dense_substitute(layout, e.i, m.y));
  }

  /// Multiplies the entry at (d, p) by powers of deeper entries so that its
  /// Lyndon-word coefficients at each deeper pivot column lie in [0, pivot).
  /// The subgroup and the leading vector are unchanged; this keeps the
  /// coefficients of stored elements from growing.
  void reduce_entry(int d, int p) {
    Entry& r = levels[static_cast<std::size_t>(d)].at(p);
    if (r.reduced_at == epoch) return;
    for (int e = d + 1; e <= ctx.degree; ++e) {
      for (auto& [q, h] : levels[static_cast<std::size_t>(e)]) {
        reduce_entry(e, q);
        const Coef val = r.g.f[lyndon_index[static_cast<std::size_t>(e)][static_cast<std::size_t>(q)]];
        const Coef f = floor_div(val, h.pivot());
        if (f != 0) r.g = elem_mul(layout, r.g, elem_pow(layout, h.g, -f));
      }
    }
    r.reduced_at = epoch;
  }

  std::vector<Elem> derived(int d, int p) {
    reduce_entry(d, p);
    const Elem b = levels[static_cast<std::size_t>(d)].at(p).g;
    std::vector<Elem> out;
    // Conjugation acts unipotently on the graded pieces, so closure under
    // b -> b^x already gives closure under b -> b^(x^-1).
    if (d + 1 <= ctx.degree)
      for (std::size_t j = 0; j < letters.size(); j += 2) out.push_back(elem_comm(layout, b, letters[j]));
    for (const auto& m : maps) out.push_back(apply_map(m, b));
    for (int e = 1; d + e <= ctx.degree; ++e) {
      for (auto& [q, entry] : levels[static_cast<std::size_t>(e)]) {
        reduce_entry(e, q);
        out.push_back(elem_comm(layout, b, entry.g));
      }
    }
    return out;
  }

  /// Reduces entries of each row of level d to [0, pivot) at the pivot
  /// columns of later rows, so that leading vectors stay in Hermite form.
  void normalize(int d) {
    auto& level = levels[static_cast<std::size_t>(d)];
    for (auto it = level.rbegin(); it != level.rend(); ++it) {
      Entry& r = it->second;
      for (auto jt = level.upper_bound(it->first); jt != level.end(); ++jt) {
        const Coef f = floor_div(r.lead[static_cast<std::size_t>(jt->first)], jt->second.pivot());
        if (f == 0) continue;
        r.g = elem_mul(layout, r.g, elem_pow(layout, jt->second.g, -f));
        r.lead = leading_vector(r.g, d);
        r.reduced_at = 0;
      }
    }
  }

  /// Reduces g against the sequence, inserting or replacing entries; returns
  /// true iff the sequence changed. Keys of new entries go to `fresh`.
  bool sift(Elem g, std::vector<std::pair<int, int>>& fresh) {
    bool changed = false;
    std::deque<Elem> pending;
    while (true) {
      const int d = g.low;
      if (d > ctx.degree) {
        if (pending.empty()) return changed;
        g = std::move(pending.front());
        pending.pop_front();
        continue;
      }
      auto v = leading_vector(g, d);
      std::size_t p = 0;
      while (v[p] == 0) ++p;
      const int key = static_cast<int>(p);
      auto& level = levels[static_cast<std::size_t>(d)];
      auto it = level.find(key);
      if (it == level.end()) {
        if (v[p] < 0) {
          g = elem_inv(g);
          v = leading_vector(g, d);
        }
        level.emplace(key, Entry{std::move(g), std::move(v), 0, p});
        ++epoch;
        normalize(d);
        fresh.emplace_back(d, key);
        changed = true;
        g = elem_one(layout);
        continue;
      }
      reduce_entry(d, key);
      Entry& e = it->second;
      const Coef a = e.pivot();
      const Coef b = v[p];
      if (b % a == 0) {
        g = elem_mul(layout, g, elem_pow(layout, e.g, -(b / a)));
        continue;
      }
      // Replace the pivot element by one with pivot gcd(a, b); the old
      // element is sifted again against the new sequence.
      Coef s = 0, t = 0;
      const Coef gg = ext_gcd(a, b, s, t);
      Elem h = e.g;
      Elem replaced = elem_mul(layout, elem_pow(layout, h, s), elem_pow(layout, g, t));
      Elem rest = elem_mul(layout, elem_pow(layout, h, -(b / gg)), elem_pow(layout, g, a / gg));
      e.lead = leading_vector(replaced, d);
      e.g = std::move(replaced);
      e.reduced_at = 0;
      ++epoch;
      normalize(d);
      fresh.emplace_back(d, key);
      pending.push_back(std::move(h));
      changed = true;
      g = std::move(rest);
    }
  }

  bool drain(std::deque<Elem>& work) {
    bool changed = false;
    while (!work.empty()) {
      Elem g = std::move(work.front());
      work.pop_front();
      std::vector<std::pair<int, int>> fresh;
      if (sift(std::move(g), fresh)) changed = true;
      for (auto [d, p] : fresh)
        for (auto& x : derived(d, p)) work.push_back(std::move(x));
    }
    return changed;
  }

  void close(std::deque<Elem> work) {
    drain(work);
    // Verification: every derived element of the final sequence sifts to 1.
    while (true) {
      std::vector<std::pair<int, int>> keys;
      for (std::size_t d = 0; d < levels.size(); ++d)
        for (const auto& [p, e] : levels[d]) keys.emplace_back(static_cast<int>(d), p);
      for (auto [d, p] : keys)
        for (auto& x : derived(d, p)) work.push_back(std::move(x));
      if (!drain(work)) break;
    }
  }

  bool contains(Elem g) const {
    while (g.low <= ctx.degree) {
      const int d = g.low;
      auto v = leading_vector(g, d);
      std::size_t p = 0;
      while (v[p] == 0) ++p;
      const auto& level = levels[static_cast<std::size_t>(d)];
      auto it = level.find(static_cast<int>(p));
      if (it == level.end() || v[p] % it->second.pivot() != 0) return false;
      g = elem_mul(layout, g, elem_pow(layout, it->second.g, -(v[p] / it->second.pivot())));
    }
    return true;
  }
};

GradedSubgroup::GradedSubgroup(TruncationContext ctx, std::vector<GroupMap> maps)
    : impl_(std::make_unique<Impl>(ctx, maps)) {}
GradedSubgroup::~GradedSubgroup() = default;
GradedSubgroup::GradedSubgroup(GradedSubgroup&&) noexcept = default;
GradedSubgroup& GradedSubgroup::operator=(GradedSubgroup&&) noexcept = default;

void GradedSubgroup::close(const std::vector<Word>& generators) {
  std::deque<Elem> work;
  for (const auto& w : generators) {
    if (w.rank() != impl_->ctx.rank) throw RankMismatch("generator rank differs from context rank");
    work.push_back(elem_word(impl_->layout, w));
  }
  impl_->close(std::move(work));
}

void GradedSubgroup::close_commutators(const GradedSubgroup& h) {
  if (!(h.impl_->ctx == impl_->ctx)) throw ContextMismatch("subgroup contexts differ");
  std::deque<Elem> work;
  for (const auto& level : h.impl_->levels)
    for (const auto& [p, e] : level)
      for (const auto& x : impl_->letters) work.push_back(elem_comm(impl_->layout, e.g, x));
  impl_->close(std::move(work));
}

bool GradedSubgroup::contains(const Word& w) const { return impl_->contains(elem_word(impl_->layout, w)); }

GradedLattice GradedSubgroup::lattice(int d) const {
  if (d < 1 || d > impl_->ctx.degree) throw DomainError("lattice degree out of range");
  std::vector<std::vector<Rational>> gens;
  for (const auto& [p, e] : impl_->levels[static_cast<std::size_t>(d)]) gens.push_back(impl_->lyndon_coords(e.g, d));
  return GradedLattice::from_rational(d, impl_->basis->dimension(d), gens);
}

int GradedSubgroup::size() const {
  int n = 0;
  for (const auto& level : impl_->levels) n += static_cast<int>(level.size());
  return n;
}

// ---------------------------------------------------------------- reports

void integral_depth(const ProblemInstance& inst, DepthReport& report) {
  inst.validate();
  const auto ctx = inst.context();
  const std::vector<GroupMap> maps = inst.uses_generators() ? std::vector<GroupMap>{} : inst.monodromy;
  GradedSubgroup orbit(ctx, maps);
  orbit.close(inst.uses_generators() ? inst.orbit_generators : std::vector<Word>{inst.gamma});
  GradedSubgroup k(ctx, maps);
  k.close_commutators(orbit);

  report.has_integral = true;
  report.kappa_graded.reset();
  if (report.grades.empty()) {
    for (int j = 1; j <= inst.kmax; ++j) {
      GradeInfo g;
      g.j = j;
      report.grades.push_back(std::move(g));
    }
  }
  for (auto& g : report.grades) {
    const auto lo = orbit.lattice(g.j);
    const auto lk = k.lattice(g.j);
    g.rank_orbit = lo.rank();
    g.rank_k = lk.rank();
    g.torsion = torsion_invariants(lk, lo);
    g.lattice_contained_next = lattice_contains(k.lattice(g.j + 1), orbit.lattice(g.j + 1));
    if (!report.kappa_graded && g.lattice_contained_next) report.kappa_graded = g.j;
    if (report.has_rational && (g.rank_orbit != g.dim_n1 || g.rank_k != g.dim_n0)) {
      report.warnings.push_back("rational and integral ranks disagree at grade " + std::to_string(g.j));
    }
  }
}

DepthReport analyze(const ProblemInstance& inst) {
  inst.validate();
  const auto ctx = inst.context();
  check_resources(inst.rank, ctx.degree);
  DepthReport r;
  if (inst.mode != DepthMode::integral) {
    const auto maps = induced_maps(inst, ctx);
    auto v = orbit_span(inst, ctx);
    auto n1 = ideal_closure(v.span, maps);
    auto n0 = n_zero(n1, maps);
    r = depth(n1, n0, inst.kmax);
  }
  r.rank = inst.rank;
  r.kmax = inst.kmax;
  r.mode = inst.mode;
  if (inst.rank > 6) r.warnings.insert(r.warnings.begin(), "rank above 6: computation may be slow");
  if (inst.kmax > 6) r.warnings.insert(r.warnings.begin(), "kmax above 6: computation may be slow");
  if (inst.mode != DepthMode::rational) integral_depth(inst, r);
  return r;
}

// ---------------------------------------------------------------- brute force

std::vector<int> brute_force_ch1(const ProblemInstance& inst, int word_length, int c, std::size_t max_words) {
  inst.validate();
  const TruncationContext ctx(inst.rank, c);
  const auto L = static_cast<std::size_t>(word_length);
  std::vector<Word> letters;
  for (int i = 1; i <= inst.rank; ++i) {
    letters.push_back(Word::generator(i, inst.rank));
    letters.push_back(inv(Word::generator(i, inst.rank)));
  }
  std::set<Word> orbit;
  std::vector<Word> frontier;
  auto insert = [&](std::set<Word>& set, const Word& w, std::vector<Word>& fresh) {
    if (w.is_identity() || w.length() > L) return;
    if (set.insert(w).second) {
      fresh.push_back(w);
      if (set.size() > max_words) throw ResourceLimit("brute force word budget exceeded");
    }
  };
  if (inst.uses_generators()) {
    for (const auto& w : inst.orbit_generators) insert(orbit, w, frontier);
  } else {
    insert(orbit, inst.gamma, frontier);
  }
  // Saturate: monodromy images, conjugates by letters, inverses, products.
  for (int round = 0; round < 3 && !frontier.empty(); ++round) {
    std::vector<Word> fresh;
    const std::vector<Word> current(orbit.begin(), orbit.end());
    for (const auto& w : frontier) {
      for (const auto& m : inst.monodromy) insert(orbit, apply_map(m, w), fresh);
      for (const auto& x : letters) insert(orbit, mul(mul(inv(x), w), x), fresh);
      insert(orbit, inv(w), fresh);
      for (const auto& u : current) {
        insert(orbit, mul(w, u), fresh);
        insert(orbit, mul(u, w), fresh);
      }
    }
    frontier = std::move(fresh);
  }
  std::set<Word> kwords;
  std::vector<Word> kfresh;
  for (const auto& w : orbit)
    for (const auto& x : letters) {
      Word k = comm(w, x);
      insert(kwords, k, kfresh);
      for (const auto& y : letters) insert(kwords, mul(mul(inv(y), k), y), kfresh);
    }
  FilteredSubspace o_span(ctx), k_span(ctx);
  for (const auto& w : orbit) o_span.add(log_magnus(w, ctx));
  for (const auto& w : kwords) k_span.add(log_magnus(w, ctx));
  std::vector<int> dims;
  for (int j = 1; j <= c; ++j) dims.push_back(o_span.leading_dimension(j) - k_span.leading_dimension(j));
  return dims;
}

}  // namespace odepth
