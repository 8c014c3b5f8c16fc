#include "odepth/fixtures.hpp"

#include <numbers>

namespace odepth::fixtures {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);
}  // namespace

Path x_circle(cplx center, double radius, double theta0) {
  return Path({ArcSegment{{center, 0.0}, {radius, 0.0}, {kI * radius, 0.0}, theta0, 2 * kPi}}, true);
}

Path real_circle(double radius) {
  return Path({ArcSegment{{0.0, 0.0}, {radius, 0.0}, {0.0, radius}, 0.0, 2 * kPi}}, true);
}

ChenFixture residue_plane() {
  ChenFixture out;
  const Poly2 one = Poly2::constant(1.0), zero;
  out.forms.emplace_back(one, zero, 2 * kPi * kI * Poly2::x());
  out.forms.emplace_back(one, zero, 2 * kPi * kI * (Poly2::x() - one));
  out.loops.emplace(1, x_circle(0.0, 0.5, 0.0));
  out.loops.emplace(2, x_circle(1.0, 0.5, kPi));
  return out;
}

namespace {
const Poly2 X = Poly2::x(), Y = Poly2::y();
Poly2 circle_energy() { return cplx(0.5) * (X * X + Y * Y); }
}  // namespace

MelnikovFixture harmonic() {
  return {PlanarSystem{circle_energy(), {{1, OneForm(cplx(-1.0) * Y, Poly2())}}},
          TransversalSpec{{0.5, 0.0}, {1.0, 0.0}},
          {0.2, 0.4, 0.6, 0.8, 1.0}};
}

MelnikovFixture cubic_center() {
  const Poly2 f = circle_energy() - cplx(1.0 / 3) * X * X * X;
  return {PlanarSystem{f, {{1, OneForm(cplx(-1.0) * Y, X * X)}}}, TransversalSpec{{-0.2, 0.0}, {-1.0, 0.0}}, {0.02, 0.05, 0.1}};
}

MelnikovFixture counter_rotating() {
  const Poly2 f = cplx(-0.5) * (X * X + cplx(2.0) * Y * Y);
  return {PlanarSystem{f, {{1, OneForm(Poly2(), X + X * Y * Y)}}}, TransversalSpec{{0.5, 0.0}, {1.0, 0.0}}, {-0.1, -0.3, -0.5}};
}

M2Fixture m2_fixture() {
  return {m2_construction(OneForm(Poly2(), X * X), OneForm(Poly2(), X * Y), circle_energy(), 0.5, 1.0),
          TransversalSpec{{0.5, 0.0}, {1.0, 0.0}},
          {0.3, 0.5, 0.8}};
}

ProblemInstance generic_instance() {
  ProblemInstance p;
  p.rank = 2;
  p.gamma = Word::generator(1, 2);
  p.monodromy = {GroupMap(2, {Word::generator(2, 2), Word::generator(1, 2)})};
  return p;
}

ProblemInstance codim1_instance() {
  ProblemInstance p;
  p.rank = 3;
  p.gamma = Word(3);
  p.orbit_generators = {Word::generator(1, 3), Word::generator(2, 3)};
  return p;
}

ProblemInstance commutator_orbit_instance() {
  ProblemInstance p;
  p.rank = 2;
  p.gamma = Word(2);
  p.orbit_generators = {comm(Word::generator(1, 2), Word::generator(2, 2))};
  return p;
}

std::string to_string(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::depth:
      return "depth";
    case FixtureKind::chen:
      return "chen";
    case FixtureKind::melnikov:
      return "melnikov";
  }
  return "?";
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries{
      {"generic", FixtureKind::depth, "rank 2, monodromy swaps the generators, gamma = x1", "k=1, kappa_graded=1",
       "orbit is the whole group, so K = L_2", "bundled"},
      {"codim1", FixtureKind::depth, "rank 3, orbit normally generated by x1 and x2", "k=1, kappa_graded=1",
       "orbit has codimension one in homology, so K = L_2", "bundled"},
      {"commutator-orbit", FixtureKind::depth, "rank 2, orbit normally generated by [x1,x2]", "k=2, kappa_graded=2",
       "brute-force word enumeration", "bundled"},
      {"harmonic", FixtureKind::melnikov, "F=(x^2+y^2)/2, eta=-y dx", "M1(t)=2*pi*t", "energy balance",
       "bundled"},
      {"residue-plane", FixtureKind::chen, "C minus {0,1}, eta_i = dx/(2 pi i (x-a_i)), loops of radius 1/2 at 1/2",
       "coefficient of X1X2 on [g1,g2] = 1", "residue theorem", "bundled"},
      {"m2-fixture", FixtureKind::melnikov,
       "F=(x^2+y^2)/2, w = x^2 dy + (F-1/2) x y dy", "M1=0, M2(t)=int_gamma w w' along the flow",
       "iterated integral of w and its Gelfand-Leray derivative", "bundled"},
      {"triangle", FixtureKind::depth, "F=y(x^2-(y-3)^2), real loop around the center", "k=2, kappa=2",
       "published example", "requires literature-derived monodromy data"},
      {"lines-product", FixtureKind::depth,
       "F = product of d+1 lines in general position, forms eta_i = F df_i/f_i (i=1..d)", "k=2",
       "published example", "requires the monodromy of the line arrangement (data placeholder)"},
  };
  return entries;
}

}  // namespace odepth::fixtures
