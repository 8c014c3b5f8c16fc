#include "odepth/melnikov.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cfloat>
#include <cmath>

#include "odepth/error.hpp"
#include "odepth/ode.hpp"

namespace odepth {

namespace {

/// P and Q of a polynomial form with the constant denominator folded in.
std::pair<Poly2, Poly2> numerators(const OneForm& w) {
  if (!w.is_polynomial()) throw DomainError("polynomial one-form expected");
  const cplx s = 1.0 / w.d.terms()[0].c;
  return {s * w.p, s * w.q};
}

double grad_norm(const Poly2& f, double x, double y) { return std::hypot(f.dx().eval_real(x, y), f.dy().eval_real(x, y)); }

}  // namespace

// ---------------------------------------------------------------- system

void PlanarSystem::validate() const {
  if (!hamiltonian.is_real()) throw DomainError("Hamiltonian must have real coefficients");
  if (forms.empty()) throw DomainError("system needs at least one perturbation form");
  for (const auto& [order, w] : forms) {
    if (order < 1) throw DomainError("perturbation orders start at 1");
    auto [p, q] = numerators(w);
    if (!p.is_real() || !q.is_real()) throw DomainError("perturbation forms must have real coefficients");
  }
}

OneForm PlanarSystem::aggregated(double eps) const {
  Poly2 p, q;
  for (const auto& [order, w] : forms) {
    auto [wp, wq] = numerators(w);
    const double s = std::pow(eps, order - 1);
    p = p + cplx(s) * wp;
    q = q + cplx(s) * wq;
  }
  return OneForm(p, q);
}

PlanarField vector_field(const PlanarSystem& system, double eps) {
  system.validate();
  const OneForm eta = system.aggregated(eps);
  return {system.hamiltonian.dy() + cplx(eps) * eta.q, cplx(-1.0) * system.hamiltonian.dx() - cplx(eps) * eta.p};
}

std::array<double, 2> transversal_point(const Poly2& f, const TransversalSpec& tau, double t) {
  const auto [bx, by] = tau.base;
  const auto [dx, dy] = tau.direction;
  const double dnorm = std::hypot(dx, dy);
  if (dnorm == 0.0) throw DomainError("transversal direction is zero");
  const Poly2 fx = f.dx(), fy = f.dy();
  double s = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double x = bx + s * dx, y = by + s * dy;
    const double gx = fx.eval_real(x, y), gy = fy.eval_real(x, y);
    const double slope = gx * dx + gy * dy;
    if (std::abs(slope) < 1e-3 * std::hypot(gx, gy) * dnorm || slope == 0.0)
      throw DomainError("transversality loss: grad F is orthogonal to the transversal");
    const double step = (f.eval_real(x, y) - t) / slope;
    s -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(s))) break;
  }
  const double x = bx + s * dx, y = by + s * dy;
  if (std::abs(f.eval_real(x, y) - t) > 1e-9 * (1.0 + std::abs(t))) throw DomainError("no transversal point at this level");
  return {x, y};
}

// ---------------------------------------------------------------- return map

DisplacementSample return_map(const PlanarSystem& system, const TransversalSpec& tau, double t, double eps,
                              const ReturnOptions& options, bool inverse) {
  const PlanarField field = vector_field(system, eps);
  const double dir = inverse ? -1.0 : 1.0;
  const auto start = transversal_point(system.hamiltonian, tau, t);
  const auto [bx, by] = tau.base;
  const auto [tx, ty] = tau.direction;
  auto side = [&](const double* p) { return tx * (p[1] - by) - ty * (p[0] - bx); };

  const auto v0 = field(start[0], start[1]);
  const double crossing = dir * (tx * v0[1] - ty * v0[0]);
  if (std::abs(crossing) < 1e-12 * std::hypot(v0[0], v0[1]) * std::hypot(tx, ty) || crossing == 0.0)
    throw DomainError("transversality loss: the flow is tangent to the transversal");
  const double sigma = crossing > 0 ? 1.0 : -1.0;

  Dp45 ode(
      2,
      [&](double, const double* y, double* dy) {
        const auto v = field(y[0], y[1]);
        dy[0] = dir * v[0];
        dy[1] = dir * v[1];
      },
      {.rtol = options.tol, .atol = options.tol * 1e-2});

  std::vector<double> y{start[0], start[1]};
  bool found = false, escaped = false;
  double ta = 0.0, tb = 0.0;
  std::vector<double> ya;
  const OdeStats stats = ode.integrate(0.0, options.max_time, y, [&](double t0, const std::vector<double>& y0, double t1, const std::vector<double>& y1) {
    if (std::hypot(y1[0], y1[1]) > options.escape_radius) {
      escaped = true;
      return false;
    }
    if (t0 > 0.0 && sigma * side(y0.data()) < 0.0 && sigma * side(y1.data()) >= 0.0) {
      found = true;
      ta = t0;
      tb = t1;
      ya = y0;
      return false;
    }
    return true;
  });
  if (escaped) throw NoReturn("trajectory escaped (blow-up) before returning");
  if (!found) throw NoReturn("no return to the transversal within time " + std::to_string(options.max_time));

  // Illinois regula falsi on the crossing within the accepted step.
  std::vector<double> p;
  auto g = [&](double h) {
    ode.step(ta, ya, h, p);
    return side(p.data());
  };
  double lo = 0.0, hi = tb - ta, glo = side(ya.data()), ghi = g(hi);
  int stuck = 0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (tb + 1.0); ++it) {
    double mid = (lo * ghi - hi * glo) / (ghi - glo);
    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
      if (stuck == -1) ghi *= 0.5;
      stuck = -1;
    } else {
      hi = mid;
      ghi = gm;
      if (stuck == 1) glo *= 0.5;
      stuck = 1;
    }
  }
  const double h = std::abs(ghi) < std::abs(glo) ? hi : lo;
  ode.step(ta, ya, h, p);

  DisplacementSample out;
  out.t = t;
  out.eps = eps;
  out.delta = system.hamiltonian.eval_real(p[0], p[1]) - t;
  out.return_time = ta + h;
  out.error = stats.error_sum * grad_norm(system.hamiltonian, p[0], p[1]);
  return out;
}

std::vector<double> geometric_grid(double eps0, double ratio, int count) {
  if (!(eps0 > 0) || !(ratio > 0 && ratio < 1) || count < 1) throw DomainError("bad geometric grid");
  std::vector<double> out;
  double e = eps0;
  for (int k = 0; k < count; ++k, e *= ratio) out.push_back(e);
  return out;
}

std::vector<DisplacementSample> sample_displacement(const PlanarSystem& system, const TransversalSpec& tau, double t,
                                                    const std::vector<double>& eps_grid, const ReturnOptions& options) {
  std::vector<DisplacementSample> out;
  for (double e : eps_grid) out.push_back(return_map(system, tau, t, e, options));
  return out;
}

// ---------------------------------------------------------------- fitting

MelnikovFit fit_melnikov(const std::vector<DisplacementSample>& samples, const FitOptions& options) {
  const int m = options.order;
  if (m < 1) throw FitError("fit order must be positive");
  if (samples.empty()) throw FitError("no samples");
  const double t = samples.front().t;
  std::vector<double> distinct;
  double emax = 0.0, dmax = 0.0, noise = options.noise;
  for (const auto& s : samples) {
    if (std::abs(s.t - t) > 1e-12 * (1.0 + std::abs(t))) throw FitError("samples have different t");
    if (s.eps != 0.0 && std::find(distinct.begin(), distinct.end(), s.eps) == distinct.end()) distinct.push_back(s.eps);
    emax = std::max(emax, std::abs(s.eps));
    dmax = std::max(dmax, std::abs(s.delta));
    if (options.noise <= 0.0) noise = std::max(noise, s.error);
  }
  if (static_cast<int>(distinct.size()) < m + 2)
    throw FitError("need at least " + std::to_string(m + 2) + " distinct nonzero eps values");
  noise = std::max(noise, 4 * DBL_EPSILON * dmax);

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(n, m);
  Eigen::VectorXd b(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double r = samples[static_cast<std::size_t>(j)].eps / emax;
    double pw = 1.0;
    for (int i = 0; i < m; ++i) a(j, i) = (pw *= r);
    b(j) = samples[static_cast<std::size_t>(j)].delta;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e12) throw FitError("ill-conditioned eps grid");
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd res = b - a * c;
  const double dof = static_cast<double>(n - m);
  const double var = std::max(dof > 0 ? res.squaredNorm() / dof : 0.0, noise * noise);
  const Eigen::MatrixXd cov = (a.transpose() * a).inverse() * var;

  MelnikovFit fit;
  fit.t = t;
  fit.noise = noise;
  fit.residual = res.cwiseAbs().maxCoeff();
  double scale = 1.0;
  for (int i = 0; i < m; ++i) {
    scale *= emax;
    fit.coefficients.push_back(c(i) / scale);
    fit.std_errors.push_back(std::sqrt(cov(i, i)) / scale);
  }
  for (int i = 1; i <= m; ++i) {
    if (std::abs(fit.coefficient(i)) > options.significance * fit.std_error(i)) {
      fit.mu = i;
      break;
    }
  }
  fit.below_noise_floor = !fit.mu;
  if (fit.residual > options.residual_threshold * dmax + 10 * noise)
    throw FitError("fit residual " + std::to_string(fit.residual) + " above threshold");

  if (fit.mu) {
    // delta / eps^mu at the three smallest eps should approach M_mu.
    std::vector<const DisplacementSample*> by_eps;
    for (const auto& s : samples)
      if (s.eps != 0.0) by_eps.push_back(&s);
    std::sort(by_eps.begin(), by_eps.end(), [](auto* x, auto* y) { return std::abs(x->eps) < std::abs(y->eps); });
    const double target = fit.coefficient(*fit.mu);
    auto ratio_err = [&](std::size_t k) { return std::abs(by_eps[k]->delta / std::pow(by_eps[k]->eps, *fit.mu) - target); };
    const double slack = options.significance * fit.std_error(*fit.mu) + 1e-9 * std::abs(target);
    fit.plateau = by_eps.size() >= 3 && ratio_err(0) <= ratio_err(1) + slack && ratio_err(1) <= ratio_err(2) + slack;
  }
  return fit;
}

// ---------------------------------------------------------------- additivity

AdditivityReport holonomy_additivity_check(const PlanarSystem& system, const PlanarSystem& conjugator,
                                           const TransversalSpec& tau, double t, const std::vector<double>& eps_grid,
                                           const ReturnOptions& options, const FitOptions& fit) {
  std::vector<DisplacementSample> single, doubled, cancelled, conjugated;
  auto compose = [&](double eps, std::initializer_list<std::pair<const PlanarSystem*, bool>> steps) {
    DisplacementSample out{t, eps, 0.0, 0.0, 0.0};
    double level = t;
    for (auto [sys, inverse] : steps) {
      const auto s = return_map(*sys, tau, level, eps, options, inverse);
      level += s.delta;
      out.return_time += s.return_time;
      out.error += s.error;
    }
    out.delta = level - t;
    return out;
  };
  for (double e : eps_grid) {
    single.push_back(compose(e, {{&system, false}}));
    doubled.push_back(compose(e, {{&system, false}, {&system, false}}));
    cancelled.push_back(compose(e, {{&system, false}, {&system, true}}));
    conjugated.push_back(compose(e, {{&conjugator, false}, {&system, false}, {&conjugator, true}}));
  }
  AdditivityReport r;
  r.single = fit_melnikov(single, fit);
  r.doubled = fit_melnikov(doubled, fit);
  r.cancelled = fit_melnikov(cancelled, fit);
  r.conjugated = fit_melnikov(conjugated, fit);
  if (!r.single.mu) return r;
  const int mu = *r.single.mu;
  auto close = [&](const MelnikovFit& x, double target, double target_se) {
    const double a = x.coefficient(mu);
    return std::abs(a - target) <= fit.significance * std::hypot(x.std_error(mu), target_se) + 1e-6 * std::abs(target);
  };
  const double m = r.single.coefficient(mu), se = r.single.std_error(mu);
  r.doubles = r.doubled.mu == mu && close(r.doubled, 2 * m, 2 * se);
  r.cancels = std::abs(r.cancelled.coefficient(mu)) <= fit.significance * r.cancelled.std_error(mu) + 1e-6 * std::abs(m);
  r.conjugation_invariant = r.conjugated.mu == mu && close(r.conjugated, m, se);
  return r;
}

// ---------------------------------------------------------------- Gelfand-Leray

FormEval gelfand_leray_form(const OneForm& w, const Poly2& f, double chart_ratio) {
  if (!(chart_ratio > 0)) throw DomainError("chart ratio must be positive");
  const Poly2 a = w.exterior_derivative(), fx = f.dx(), fy = f.dy();
  FormEval out;
  out.value = [a, fx, fy, chart_ratio](const Point& at, const Point& v) {
    const cplx gx = fx(at), gy = fy(at);
    if (std::abs(gx) >= chart_ratio * std::abs(gy)) return a(at) * v[1] / gx;
    return -a(at) * v[0] / gy;
  };
  out.regularity = [fx, fy](const Point& at) { return std::max(std::abs(fx(at)), std::abs(fy(at))); };
  return out;
}

cplx gelfand_leray(const OneForm& w, const Poly2& f, const Path& path, double tol, double chart_ratio) {
  return iterated_integral(path, std::vector<FormEval>{gelfand_leray_form(w, f, chart_ratio)}, {.tol = tol});
}

Path fiber_loop(const Poly2& f, const TransversalSpec& tau, double t, const ReturnOptions& options) {
  const PlanarSystem bare{f, {{1, OneForm(Poly2(), Poly2())}}};
  const auto sample = return_map(bare, tau, t, 0.0, options);
  const auto start = transversal_point(f, tau, t);
  return Path({LevelSegment{f, start, sample.return_time}}, true, 1e-6);
}

// ---------------------------------------------------------------- second order

M2Construction m2_construction(const OneForm& theta1, const OneForm& theta2, const Poly2& f, double t0, double lambda) {
  if (!(lambda > 0)) throw DomainError("lambda must be positive");
  auto [p1, q1] = numerators(theta1);
  auto [p2, q2] = numerators(theta2);
  const Poly2 shift = f - Poly2::constant(t0);
  M2Construction c;
  c.f = f;
  c.theta1 = theta1;
  c.theta2 = theta2;
  c.t0 = t0;
  c.lambda = lambda;
  c.omega = OneForm(cplx(lambda) * p1 + cplx(1.0 / lambda) * shift * p2, cplx(lambda) * q1 + cplx(1.0 / lambda) * shift * q2);
  c.system = PlanarSystem{f, {{1, c.omega}}};
  c.system.validate();
  return c;
}

double check_m2_hypothesis(const M2Construction& c, const std::vector<Path>& loops, double tol) {
  double worst = 0.0;
  for (const auto& loop : loops) {
    for (const OneForm* th : {&c.theta1, &c.theta2}) {
      worst = std::max(worst, std::abs(iterated_integral(loop, std::vector<OneForm>{*th}, {.tol = tol * 1e-2})));
    }
  }
  if (worst > tol) throw DomainError("hypothesis check failed: a theta form has nonzero period " + std::to_string(worst));
  return worst;
}

cplx predicted_m2(const M2Construction& c, const Path& loop, double tol) {
  return iterated_integral(loop, std::vector<FormEval>{as_eval(c.omega), gelfand_leray_form(c.omega, c.f)}, {.tol = tol});
}

}  // namespace odepth
