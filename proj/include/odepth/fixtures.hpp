#pragma once

#include <map>
#include <string>
#include <vector>

#include "odepth/chen.hpp"
#include "odepth/melnikov.hpp"
#include "odepth/orbit_depth.hpp"

namespace odepth::fixtures {

/// Closed loop x = center + radius e^(i theta), theta from theta0 through one
/// counterclockwise turn, y = 0.
Path x_circle(cplx center, double radius, double theta0);

/// Real circle of the given radius about the origin, counterclockwise from
/// (radius, 0).
Path real_circle(double radius);

/// Forms and loops for iterated integrals on the punctured line.
struct ChenFixture {
  std::vector<OneForm> forms;
  std::map<int, Path> loops;
};

/// C minus {0, 1}: eta_1 = dx / (2 pi i x), eta_2 = dx / (2 pi i (x - 1)),
/// loops of radius 1/2 about 0 and 1 based at 1/2, counterclockwise. The
/// residues pair the forms dually with the loops.
ChenFixture residue_plane();

struct MelnikovFixture {
  PlanarSystem system;
  TransversalSpec transversal;
  std::vector<double> t_values;
};

/// F = (x^2 + y^2) / 2, eta = -y dx; the energy balance gives M_1(t) = 2 pi t.
MelnikovFixture harmonic();
/// F = (x^2 + y^2) / 2 - x^3 / 3 (center at 0, saddle at (1, 0)),
/// eta = -y dx + x^2 dy.
MelnikovFixture cubic_center();
/// F = -(x^2 + 2 y^2) / 2, whose flow turns counterclockwise, eta = (x + x y^2) dy.
MelnikovFixture counter_rotating();

struct M2Fixture {
  M2Construction construction;
  TransversalSpec transversal;
  std::vector<double> t_values;
};

/// F = (x^2 + y^2) / 2, theta1 = x^2 dy, theta2 = x y dy, t0 = 1/2, lambda = 1.
/// Both thetas have zero periods on every circle, so M_1 vanishes.
M2Fixture m2_fixture();

/// Rank 2, gamma = x1, monodromy swapping x1 and x2: the orbit is the whole
/// group, so K = L_2 and k = 1.
ProblemInstance generic_instance();
/// Rank 3 with orbit normally generated by x1 and x2 (codimension one in
/// homology): k = 1.
ProblemInstance codim1_instance();
/// Rank 2 with orbit normally generated by [x1, x2]: k = 2.
ProblemInstance commutator_orbit_instance();

enum class FixtureKind { depth, chen, melnikov };

struct CatalogEntry {
  std::string name;
  FixtureKind kind;
  std::string description;
  std::string expected;
  /// How the expected value is known.
  std::string basis;
  /// "bundled", or the reason the fixture cannot run yet.
  std::string status;
};

/// Every bundled fixture, in a fixed order.
const std::vector<CatalogEntry>& catalog();

std::string to_string(FixtureKind kind);

}  // namespace odepth::fixtures
