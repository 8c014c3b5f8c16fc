#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "odepth/chen.hpp"

namespace odepth {

/// dF + sum_i eps^i eta_i = 0 with F and the eta_i real polynomials.
struct PlanarSystem {
  Poly2 hamiltonian;
  std::map<int, OneForm> forms;  // eps-order -> form

  /// Throws DomainError unless F and every form are real polynomials and at
  /// least one form of order >= 1 is present.
  void validate() const;
  /// eta(eps) = sum_i eps^(i-1) eta_i, so that the system reads dF + eps eta(eps) = 0.
  OneForm aggregated(double eps) const;
};

struct PlanarField {
  Poly2 u;
  Poly2 v;
  std::array<double, 2> operator()(double x, double y) const { return {u.eval_real(x, y), v.eval_real(x, y)}; }
};

/// (F_y + eps Q, -F_x - eps P) for eta(eps) = P dx + Q dy; it annihilates dF + eps eta.
PlanarField vector_field(const PlanarSystem& system, double eps);

/// The line base + s direction, parametrized by the value t of F.
struct TransversalSpec {
  std::array<double, 2> base{};
  std::array<double, 2> direction{};
};

/// Point of the transversal with F = t. Throws DomainError on transversality loss.
std::array<double, 2> transversal_point(const Poly2& f, const TransversalSpec& tau, double t);

struct ReturnOptions {
  double tol = 1e-12;
  double max_time = 1e3;
  double escape_radius = 1e6;
};

struct DisplacementSample {
  double t = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double return_time = 0.0;
  double error = 0.0;
};

/// Follows the perturbed flow from the transversal point at level t until it
/// crosses the transversal again in the starting direction; delta is F there
/// minus t. With `inverse` the flow runs backwards (inverse holonomy).
/// Throws NoReturn, StepUnderflow or DomainError.
DisplacementSample return_map(const PlanarSystem& system, const TransversalSpec& tau, double t, double eps,
                              const ReturnOptions& options = {}, bool inverse = false);

/// eps0, eps0 r, eps0 r^2, ...
std::vector<double> geometric_grid(double eps0, double ratio, int count);

std::vector<DisplacementSample> sample_displacement(const PlanarSystem& system, const TransversalSpec& tau, double t,
                                                    const std::vector<double>& eps_grid,
                                                    const ReturnOptions& options = {});

struct FitOptions {
  int order = 4;
  /// A coefficient counts as nonzero when it exceeds this many standard errors.
  double significance = 6.0;
  /// Max residual allowed, relative to max |delta|, on top of the noise floor.
  double residual_threshold = 1e-4;
  /// Per-sample noise floor; 0 uses the samples' error estimates.
  double noise = 0.0;
};

struct MelnikovFit {
  double t = 0.0;
  std::vector<double> coefficients;  // M_1 .. M_order
  std::vector<double> std_errors;
  std::optional<int> mu;
  bool below_noise_floor = false;
  /// delta / eps^mu settles as eps decreases.
  bool plateau = false;
  double residual = 0.0;
  double noise = 0.0;

  double coefficient(int i) const { return coefficients.at(static_cast<std::size_t>(i - 1)); }
  double std_error(int i) const { return std_errors.at(static_cast<std::size_t>(i - 1)); }
};

/// Least-squares fit delta = sum_{i=1}^{order} M_i eps^i through the origin.
/// Throws FitError on too few or ill-conditioned points or a large residual.
MelnikovFit fit_melnikov(const std::vector<DisplacementSample>& samples, const FitOptions& options = {});

struct AdditivityReport {
  MelnikovFit single;
  MelnikovFit doubled;     // P o P
  MelnikovFit cancelled;   // P^-1 o P
  MelnikovFit conjugated;  // Q^-1 o P o Q
  bool doubles = false;
  bool cancels = false;
  bool conjugation_invariant = false;
};

/// Compares the leading coefficient of the holonomy P of `system` with those
/// of P o P, P^-1 o P and Q^-1 o P o Q, Q the holonomy of `conjugator` on the
/// same transversal.
AdditivityReport holonomy_additivity_check(const PlanarSystem& system, const PlanarSystem& conjugator,
                                           const TransversalSpec& tau, double t, const std::vector<double>& eps_grid,
                                           const ReturnOptions& options = {}, const FitOptions& fit = {});

/// Restriction of the Gelfand-Leray derivative w' (dw = dF ^ w') to the
/// fibers of F: (A / F_x) dy where |F_x| >= chart_ratio |F_y|, else
/// -(A / F_y) dx, with dw = A dx ^ dy.
FormEval gelfand_leray_form(const OneForm& w, const Poly2& f, double chart_ratio = 1.0);

/// Integral of w' along a path lying on a fiber of F.
cplx gelfand_leray(const OneForm& w, const Poly2& f, const Path& path, double tol, double chart_ratio = 1.0);

/// The unperturbed periodic orbit through the transversal point at level t,
/// oriented by the flow (F_y, -F_x).
Path fiber_loop(const Poly2& f, const TransversalSpec& tau, double t, const ReturnOptions& options = {});

/// w = lambda theta1 + lambda^-1 (F - t0) theta2 and the system dF + eps w = 0.
/// With loops oriented by the flow, delta = -eps int w + eps^2 int w w' + ...
/// when int w vanishes identically.
struct M2Construction {
  Poly2 f;
  OneForm theta1;
  OneForm theta2;
  double t0 = 0.0;
  double lambda = 1.0;
  OneForm omega;
  PlanarSystem system;
};

M2Construction m2_construction(const OneForm& theta1, const OneForm& theta2, const Poly2& f, double t0, double lambda);

/// Largest |int theta_i| over the loops; throws DomainError if above tol.
double check_m2_hypothesis(const M2Construction& c, const std::vector<Path>& loops, double tol);

/// The iterated integral of w w' along the loop (w first).
cplx predicted_m2(const M2Construction& c, const Path& loop, double tol);

}  // namespace odepth
