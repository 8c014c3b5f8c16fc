#include "odepth/ode.hpp"

#include <algorithm>
#include <cmath>

#include "odepth/error.hpp"
#include "odepth/kernels.hpp"

namespace odepth {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Dp45::Dp45(std::size_t dim, OdeRhs rhs, OdeOptions options)
    : dim_(dim), rhs_(std::move(rhs)), options_(options), k_(7, std::vector<double>(dim)), tmp_(dim), err_(dim) {
  if (!(options_.rtol > 0) || !(options_.atol > 0)) throw DomainError("ODE tolerances must be positive");
}

void Dp45::stages(double t, const std::vector<double>& y, double h, std::vector<double>& out) {
  using kernels::axpy;
  const std::size_t n = dim_;
  auto combo = [&](std::initializer_list<std::pair<double, int>> terms) {
    tmp_ = y;
    for (auto [a, i] : terms)
      if (a != 0.0) axpy(h * a, k_[static_cast<std::size_t>(i)].data(), tmp_.data(), n);
  };
  combo({{a21, 0}});
  rhs_(t + c2 * h, tmp_.data(), k_[1].data());
  combo({{a31, 0}, {a32, 1}});
  rhs_(t + c3 * h, tmp_.data(), k_[2].data());
  combo({{a41, 0}, {a42, 1}, {a43, 2}});
  rhs_(t + c4 * h, tmp_.data(), k_[3].data());
  combo({{a51, 0}, {a52, 1}, {a53, 2}, {a54, 3}});
  rhs_(t + c5 * h, tmp_.data(), k_[4].data());
  combo({{a61, 0}, {a62, 1}, {a63, 2}, {a64, 3}, {a65, 4}});
  rhs_(t + h, tmp_.data(), k_[5].data());
  combo({{a71, 0}, {a73, 2}, {a74, 3}, {a75, 4}, {a76, 5}});
  out = tmp_;
  rhs_(t + h, out.data(), k_[6].data());
  std::fill(err_.begin(), err_.end(), 0.0);
  const double e[7] = {e1, 0.0, e3, e4, e5, e6, e7};
  for (std::size_t i = 0; i < 7; ++i)
    if (e[i] != 0.0) axpy(h * e[i], k_[i].data(), err_.data(), n);
}

void Dp45::step(double t, const std::vector<double>& y, double h, std::vector<double>& out) {
  rhs_(t, y.data(), k_[0].data());
  stages(t, y, h, out);
}

OdeStats Dp45::integrate(double t0, double t1, std::vector<double>& y, const Observer& observer) {
  if (y.size() != dim_) throw DomainError("ODE state has the wrong dimension");
  OdeStats stats;
  stats.t_end = t0;
  const double span = t1 - t0;
  if (span == 0.0) return stats;
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = options_.initial_step > 0 ? dir * std::min(options_.initial_step, std::abs(span)) : span / 100.0;
  double t = t0;
  std::vector<double> ynew(dim_);
  rhs_(t, y.data(), k_[0].data());
  while (dir * (t1 - t) > 0) {
    if (stats.accepted + stats.rejected >= options_.max_steps) throw StepUnderflow("ODE step budget exhausted");
    if (dir * (t + h - t1) > 0) h = t1 - t;
    const double hmin = 1e-14 * std::max(1.0, std::abs(t));
    if (std::abs(h) < hmin) throw StepUnderflow("ODE step size underflow at t = " + std::to_string(t));
    stages(t, y, h, ynew);
    const double err = kernels::max_scaled_error(err_.data(), y.data(), ynew.data(), dim_, options_.atol, options_.rtol);
    if (!std::isfinite(err)) {
      h *= 0.25;
      ++stats.rejected;
      continue;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err > 1.0) {
      h *= std::min(factor, 0.9);
      ++stats.rejected;
      continue;
    }
    double local = 0.0;
    for (double e : err_) local = std::max(local, std::abs(e));
    stats.error_sum += local;
    ++stats.accepted;
    const double tnew = (h == t1 - t) ? t1 : t + h;
    const bool keep_going = !observer || observer(t, y, tnew, ynew);
    y.swap(ynew);
    t = tnew;
    std::swap(k_[0], k_[6]);  // FSAL
    stats.t_end = t;
    if (!keep_going) break;
    h *= factor;
  }
  return stats;
}

}  // namespace odepth
