#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "odepth/linalg.hpp"
#include "odepth/word.hpp"

namespace odepth {

enum class DepthMode { rational, integral, both };

std::string to_string(DepthMode m);
DepthMode parse_mode(const std::string& s);

struct ProblemInstance {
  int rank = 2;
  Word gamma{2};
  std::vector<GroupMap> monodromy;     // generators of the monodromy action
  std::vector<Word> orbit_generators;  // direct normal generators of the orbit
  int kmax = 6;
  DepthMode mode = DepthMode::both;

  bool uses_generators() const { return !orbit_generators.empty(); }
  /// Throws DomainError / RankMismatch for inconsistent instances.
  void validate() const;
  /// Truncation used for the instance: degree kmax + 1.
  TruncationContext context() const { return TruncationContext(rank, kmax + 1); }
};

/// Linear map on Lyndon coordinates stored by columns.
struct LinearMap {
  std::vector<SparseVector> columns;
  SparseVector operator()(const SparseVector& v) const;
};

/// Algebra endomorphism X_i -> log magnus(m(x_i)) restricted to Lie elements.
LinearMap induced_lie_map(const GroupMap& m, TruncationContext ctx);
/// v -> [v, X_i].
LinearMap ad_generator(int i, TruncationContext ctx);

struct OrbitSpan {
  FilteredSubspace span;
  std::vector<Word> witnesses;  // words whose logs enlarged the span
};

OrbitSpan orbit_span(const ProblemInstance& inst, TruncationContext ctx);
/// Smallest subspace containing V closed under every ad_generator and `maps`.
FilteredSubspace ideal_closure(const FilteredSubspace& v, const std::vector<LinearMap>& maps);
/// Span of [b, X_i] over N1, closed again. Throws Error unless N0 is inside N1.
FilteredSubspace n_zero(const FilteredSubspace& n1, const std::vector<LinearMap>& maps);

struct GradeInfo {
  int j = 0;
  int dim_n1 = 0;
  int dim_n0 = 0;
  int dim_image = 0;
  /// Rational containment of leading spaces at grade j + 1.
  bool contained_next = false;
  // Integral certificate (filled when the integral route ran).
  int rank_orbit = 0;
  int rank_k = 0;
  std::vector<Integer> torsion;
  bool lattice_contained_next = false;
};

struct DepthReport {
  int rank = 0;
  int kmax = 0;
  DepthMode mode = DepthMode::both;
  bool has_rational = false;
  bool has_integral = false;
  std::optional<int> k;             // nullopt: undetermined(>kmax)
  std::optional<int> kappa_graded;  // certificate, not the group-level value
  bool stabilized = false;
  int ch1_dim = 0;
  std::vector<GradeInfo> grades;  // j = 1..kmax
  std::vector<std::string> warnings;
};

/// Rational part of the report from N1 and N0 (truncation degree >= kmax + 1).
DepthReport depth(const FilteredSubspace& n1, const FilteredSubspace& n0, int kmax);

/// Subgroup of the free nilpotent group F / L_{c+1}, stored as a sifted
/// sequence whose leading Lie coordinates are in integral echelon form per
/// degree. Elements are represented through the integral Magnus embedding
/// x_i -> 1 + X_i, whose leading homogeneous parts coincide with those of log.
/// The subgroup is closed under conjugation by the generators and `maps`.
class GradedSubgroup {
 public:
  GradedSubgroup(TruncationContext ctx, std::vector<GroupMap> maps);
  ~GradedSubgroup();
  GradedSubgroup(GradedSubgroup&&) noexcept;
  GradedSubgroup& operator=(GradedSubgroup&&) noexcept;

  /// Adds the normal, map-invariant closure of the given words.
  void close(const std::vector<Word>& generators);
  /// Adds the normal, map-invariant closure of [b, x_i^{+-1}] over the sequence of h.
  void close_commutators(const GradedSubgroup& h);
  bool contains(const Word& w) const;
  /// Lattice of leading coordinates of (H cap L_d) modulo L_{d+1}.
  GradedLattice lattice(int d) const;
  int size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Fills the integral certificate fields of `report` (grades must exist).
void integral_depth(const ProblemInstance& inst, DepthReport& report);

/// Runs the routes selected by inst.mode.
DepthReport analyze(const ProblemInstance& inst);

/// Enumerates orbit words up to length L and K words built from them, then
/// returns the graded ranks of span(logs of orbit words) modulo span(logs of
/// K words) for grades 1..c. Throws ResourceLimit above max_words.
std::vector<int> brute_force_ch1(const ProblemInstance& inst, int word_length, int c, std::size_t max_words = 4000);

/// Throws ResourceLimit when the Lyndon dimension up to degree c exceeds this.
inline constexpr long kMaxLieDimension = 20000;

}  // namespace odepth
