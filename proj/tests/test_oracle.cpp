#include <gtest/gtest.h>

#include <cmath>

#include "lrnr/errors.hpp"
#include "lrnr/oracle.hpp"

using namespace lrnr;

namespace {
const FluxPtr kBurgers = make_flux("burgers");
}

TEST(Oracle, ZeroData) {
  LaxOleinikOracle o(PiecewiseConstantFn({0.5}, {0.0, 0.0}), kBurgers, 1.0);
  const auto m = o.minimize(0.3, 0.4);
  EXPECT_NEAR(m.y_minus, 0.3, 1e-9);
  EXPECT_NEAR(m.y_plus, 0.3, 1e-9);
  EXPECT_NEAR(m.value, 0.0, 1e-14);
  EXPECT_DOUBLE_EQ(o.solution(0.3, 0.4), 0.0);
  EXPECT_TRUE(o.alive(0.3, 0.0, 0.9));
}

TEST(Oracle, UniqueFootLeftOfShock) {
  LaxOleinikOracle o(PiecewiseConstantFn({0.0, 0.4}, {0.0, 1.0, 0.0}), kBurgers, 1.0);
  const auto m = o.minimize(0.44, 0.1);
  EXPECT_NEAR(m.y_minus, 0.34, 1e-9);
  EXPECT_NEAR(m.y_plus, 0.34, 1e-9);
}

TEST(Oracle, TwoFeetOnShockMatchFineGridMinimization) {
  LaxOleinikOracle o(PiecewiseConstantFn({0.0, 0.4}, {0.0, 1.0, 0.0}), kBurgers, 1.0);
  // fine-grid minimization of the objective, step 1e-5
  double best = 1e300;
  std::vector<double> argmins;
  for (int i = 0; i <= 100000; ++i) {
    const double y = i * 1e-5;
    const double J = o.objective(y, 0.45, 0.1);
    if (J < best - 1e-12) {
      best = J;
      argmins = {y};
    } else if (std::abs(J - best) <= 1e-12) {
      argmins.push_back(y);
    }
  }
  const auto m = o.minimize(0.45, 0.1);
  EXPECT_NEAR(m.y_minus, argmins.front(), 1e-5);
  EXPECT_NEAR(m.y_plus, argmins.back(), 1e-5);
  EXPECT_NEAR(m.y_minus, 0.35, 1e-9);
  EXPECT_NEAR(m.y_plus, 0.45, 1e-9);
}

TEST(Oracle, RarefactionFan) {
  LaxOleinikOracle o(PiecewiseConstantFn({0.2, 0.7}, {0.0, 1.0, 0.0}), kBurgers, 1.0);
  EXPECT_NEAR(o.solution(0.25, 0.1), 0.5, 1e-12);
}

TEST(Oracle, ShockSides) {
  LaxOleinikOracle o(PiecewiseConstantFn({0.0, 0.4}, {0.0, 1.0, 0.0}), kBurgers, 1.0);
  EXPECT_DOUBLE_EQ(o.solution(0.44, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(o.solution(0.46, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(o.solution(0.45, 0.1, Side::Left), 1.0);
  EXPECT_DOUBLE_EQ(o.solution(0.45, 0.1, Side::Right), 0.0);
}

TEST(Oracle, MergingShocks) {
  // shocks from 0.2 (speed 1.5) and 0.4 (speed 0.5) meet at (0.5, 0.2); merged speed 1
  LaxOleinikOracle o(PiecewiseConstantFn({0.0, 0.2, 0.4}, {0.0, 2.0, 1.0, 0.0}), kBurgers, 0.3);
  EXPECT_DOUBLE_EQ(o.solution(0.6, 0.3, Side::Left), 2.0);
  EXPECT_DOUBLE_EQ(o.solution(0.6, 0.3, Side::Right), 0.0);
  EXPECT_DOUBLE_EQ(o.solution(0.59, 0.3), 1.9666666666666666);  // fan from 0: x / t
}

TEST(Oracle, AliveStraightLineIntersection) {
  LaxOleinikOracle o(PiecewiseConstantFn({0.0, 0.4}, {0.0, 1.0, 0.0}), kBurgers, 1.0);
  EXPECT_TRUE(o.alive(0.3, 1.0, 0.19));
  EXPECT_FALSE(o.alive(0.3, 1.0, 0.21));
}

TEST(Oracle, StationaryShockAbsorption) {
  // shock at 0.5 with speed 0; a foot at distance d dies at t = d
  LaxOleinikOracle o(PiecewiseConstantFn({0.0, 0.5, 1.0}, {0.0, 1.0, -1.0, 0.0}), kBurgers, 0.3);
  EXPECT_TRUE(o.alive(0.45, 1.0, 0.049));
  EXPECT_FALSE(o.alive(0.45, 1.0, 0.051));
  EXPECT_TRUE(o.alive(0.6, -1.0, 0.099));
  EXPECT_FALSE(o.alive(0.6, -1.0, 0.101));
}

TEST(Oracle, ProfileAgreesWithPointwiseSolution) {
  LaxOleinikOracle o(PiecewiseConstantFn({0.0, 0.2, 0.4}, {0.0, 2.0, 1.0, 0.0}), kBurgers, 0.3);
  for (double t : {0.05, 0.15, 0.2, 0.3}) {
    const auto p = o.profile(t);
    for (int i = 0; i < 400; ++i) {
      const double x = (i + 0.5) / 400.0;
      EXPECT_NEAR(p(x), o.solution(x, t), 1e-9) << "t=" << t << " x=" << x;
    }
  }
}

TEST(Oracle, ConservationProperty) {
  // total mass is conserved while nothing leaves the domain
  LaxOleinikOracle o(PiecewiseConstantFn({0.2, 0.5, 0.8}, {0.0, 1.0, -1.0, 0.0}), kBurgers, 0.2);
  for (double t : {0.05, 0.1, 0.2}) {
    const auto p = o.profile(t);
    double mass = 0.0;
    for (const auto& s : p.segments()) {
      if (!s.fan) {
        mass += s.value * (s.b - s.a);
      } else {
        const double ua = (s.a - s.origin) / t, ub = (s.b - s.origin) / t;
        mass += 0.5 * (ua + ub) * (s.b - s.a);
      }
    }
    EXPECT_NEAR(mass, 0.0, 1e-9);
  }
}

TEST(Oracle, HorizonChecked) {
  LaxOleinikOracle o(PiecewiseConstantFn({0.5}, {1.0, 0.0}), kBurgers, 0.2);
  EXPECT_THROW(o.solution(0.5, 0.3), HorizonExceeded);
}

TEST(CharacteristicOracle, SmoothPreShock) {
  auto u0 = [](double x) { return 0.5 * std::sin(3.14159265358979323846 * x) * std::sin(3.14159265358979323846 * x); };
  CharacteristicOracle o(u0, kBurgers, Interval(0.0, 1.0));
  for (double x : {0.1, 0.4, 0.7, 0.95}) {
    const double t = 0.3;
    const double y = o.foot(x, t);
    EXPECT_NEAR(y + t * u0(y), x, 1e-12);
    EXPECT_DOUBLE_EQ(o.solution(x, t), u0(y));
  }
}

TEST(IntegrateAbs, SignChange) {
  EXPECT_NEAR(integrate_abs([](double x) { return x - 0.3; }, 0.0, 1.0), 0.045 + 0.245, 1e-14);
  EXPECT_NEAR(integrate_abs([](double x) { return std::sin(x); }, 0.0, 2.0 * 3.14159265358979323846, 16), 4.0, 1e-12);
}
