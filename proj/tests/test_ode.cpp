#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "odepth/error.hpp"
#include "odepth/ode.hpp"

using odepth::Dp45;

TEST(Dp45, ExponentialDecay) {
  Dp45 ode(1, [](double, const double* y, double* dy) { dy[0] = -y[0]; });
  std::vector<double> y{1.0};
  auto stats = ode.integrate(0.0, 3.0, y);
  EXPECT_NEAR(y[0], std::exp(-3.0), 1e-10);
  EXPECT_DOUBLE_EQ(stats.t_end, 3.0);
  EXPECT_GT(stats.accepted, 0u);
}

TEST(Dp45, HarmonicPeriodBackwardAndForward) {
  Dp45 ode(2, [](double, const double* y, double* dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  });
  std::vector<double> y{1.0, 0.0};
  ode.integrate(0.0, 2 * std::numbers::pi, y);
  EXPECT_NEAR(y[0], 1.0, 1e-9);
  EXPECT_NEAR(y[1], 0.0, 1e-9);
  ode.integrate(0.0, -std::numbers::pi / 2, y);
  EXPECT_NEAR(y[0], 0.0, 1e-9);
  EXPECT_NEAR(y[1], 1.0, 1e-9);
}

TEST(Dp45, ObserverStopsEarly) {
  Dp45 ode(1, [](double, const double*, double* dy) { dy[0] = 1.0; });
  std::vector<double> y{0.0};
  auto stats = ode.integrate(0.0, 10.0, y, [](double, const std::vector<double>&, double, const std::vector<double>& y1) {
    return y1[0] < 1.0;
  });
  EXPECT_GE(y[0], 1.0);
  EXPECT_LT(stats.t_end, 10.0);
}

TEST(Dp45, SingleStepIsFifthOrder) {
  Dp45 ode(1, [](double t, const double*, double* dy) { dy[0] = std::pow(t, 4); });
  std::vector<double> out;
  ode.step(0.0, {0.0}, 1.0, out);
  EXPECT_NEAR(out[0], 0.2, 1e-14);
}

TEST(Dp45, BlowUpUnderflows) {
  Dp45 ode(1, [](double, const double* y, double* dy) { dy[0] = y[0] * y[0]; });
  std::vector<double> y{1.0};
  EXPECT_THROW(ode.integrate(0.0, 2.0, y), odepth::StepUnderflow);
}
