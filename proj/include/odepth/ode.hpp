#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace odepth {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Initial step; 0 picks one from the interval length.
  double initial_step = 0.0;
  std::size_t max_steps = 2'000'000;
};

/// dy = f(t, y), all arrays of the system dimension.
using OdeRhs = std::function<void(double t, const double* y, double* dy)>;

struct OdeStats {
  double t_end = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  /// Sum over accepted steps of the max-norm local error estimate.
  double error_sum = 0.0;
};

/// Dormand-Prince 5(4) embedded pair with FSAL and max-norm step control.
class Dp45 {
 public:
  Dp45(std::size_t dim, OdeRhs rhs, OdeOptions options = {});

  /// Called after each accepted step with the step endpoints; returning false
  /// stops the integration at t1.
  using Observer = std::function<bool(double t0, const std::vector<double>& y0, double t1, const std::vector<double>& y1)>;

  /// Integrates y from t0 towards t1 (either direction), in place.
  /// Throws StepUnderflow if the step size collapses.
  OdeStats integrate(double t0, double t1, std::vector<double>& y, const Observer& observer = {});

  /// One fifth-order step of size h without error control.
  void step(double t, const std::vector<double>& y, double h, std::vector<double>& out);

  std::size_t dimension() const { return dim_; }

 private:
  /// Stages k2..k7 from k1 = f(t, y); writes the solution to out and the
  /// error estimate to err_.
  void stages(double t, const std::vector<double>& y, double h, std::vector<double>& out);

  std::size_t dim_;
  OdeRhs rhs_;
  OdeOptions options_;
  std::vector<std::vector<double>> k_;
  std::vector<double> tmp_, err_;
};

}  // namespace odepth
