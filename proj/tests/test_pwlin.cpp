#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lrnr/errors.hpp"
#include "lrnr/pwlin.hpp"

using namespace lrnr;

TEST(PiecewiseLinear, InterpolatesAndClamps) {
  PiecewiseLinearFn f({0.0, 1.0}, {0.0, 2.0});
  EXPECT_DOUBLE_EQ(f(0.5), 1.0);
  EXPECT_DOUBLE_EQ(f(2.0), 2.0);
  EXPECT_DOUBLE_EQ(f(-1.0), 0.0);
}

TEST(PiecewiseConstant, OneSidedLimits) {
  PiecewiseConstantFn f({0.4}, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(f(0.4, Side::Left), 1.0);
  EXPECT_DOUBLE_EQ(f(0.4, Side::Right), 0.0);
}

TEST(PiecewiseConstant, RejectsBadShapes) {
  EXPECT_THROW(PiecewiseConstantFn({0.4}, {1.0}), Error);
  EXPECT_THROW(PiecewiseConstantFn({0.6, 0.4}, {1.0, 0.0, 1.0}), Error);
}

TEST(LeftInverse, PlateauAndIdentity) {
  EXPECT_DOUBLE_EQ(left_inverse(PiecewiseLinearFn({0.0, 1.0, 2.0}, {0.0, 1.0, 1.0}), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(left_inverse(PiecewiseLinearFn::identity(Interval(0.0, 1.0)), 0.3), 0.3);
}

TEST(LeftInverse, MatchesBisection) {
  PiecewiseLinearFn g({0.0, 0.5, 1.0}, {0.0, 0.25, 1.0});
  // bisection oracle
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (g(m) < 0.625 ? lo : hi) = m;
  }
  EXPECT_NEAR(left_inverse(g, 0.625), 0.75, 1e-15);
  EXPECT_NEAR(left_inverse(g, 0.625), hi, 1e-12);
}

TEST(LeftInverse, NonMonotoneRejected) {
  EXPECT_THROW(MonotoneInverse(PiecewiseLinearFn({0.0, 0.5, 1.0}, {0.0, 1.0, 0.5})), NotMonotone);
}

TEST(LeftInverse, PropertyRoundTripOnRandomIncreasing) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x{0.0}, y{u(rng)};
    for (int i = 0; i < 10; ++i) {
      x.push_back(x.back() + u(rng));
      y.push_back(y.back() + u(rng));
    }
    PiecewiseLinearFn g(x, y);
    MonotoneInverse inv(g);
    for (int s = 0; s < 20; ++s) {
      const double xs = x.front() + (x.back() - x.front()) * (s + 0.5) / 20.0;
      EXPECT_NEAR(inv(g(xs)), xs, 1e-10 * (1.0 + xs));
    }
  }
}

TEST(Variation, SingleBump) {
  PiecewiseConstantFn up({0.3, 0.6}, {0.0, 1.0, 0.0}), down({0.3, 0.6}, {0.0, -1.0, 0.0});
  EXPECT_DOUBLE_EQ(total_variation(up), 2.0);
  EXPECT_DOUBLE_EQ(positive_variation(up), 1.0);
  EXPECT_DOUBLE_EQ(total_variation(down), 2.0);
  EXPECT_DOUBLE_EQ(positive_variation(down), 1.0);
}

TEST(Variation, PositiveVariationMatchesSubsetSupremum) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int m = 20;
  std::vector<double> bp, v;
  for (int i = 0; i < m; ++i) v.push_back(u(rng));
  for (int i = 1; i < m; ++i) bp.push_back(static_cast<double>(i) / m);
  PiecewiseConstantFn f(bp, v);
  // brute force over all increasing subsets of pieces
  double best = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    double s = 0.0, prev = 0.0;
    bool first = true;
    for (int i = 0; i < m; ++i) {
      if (!(mask >> i & 1u)) continue;
      if (!first) s += std::max(0.0, v[i] - prev);
      prev = v[i];
      first = false;
    }
    best = std::max(best, s);
  }
  EXPECT_NEAR(positive_variation(f), best, 1e-12);
}

TEST(RhoEps, RampValues) {
  EXPECT_DOUBLE_EQ(rho_eps(0.1, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(rho_eps(0.1, 0.05), 1.0);
  EXPECT_DOUBLE_EQ(rho_eps(0.1, -0.05), 0.0);
  EXPECT_THROW(rho_eps(0.0, 0.1), InvalidEps);
}

TEST(RhoEps, L1GapIsQuarterEps) {
  for (double eps : {0.2, 1e-1, 1e-2, 1e-3}) {
    // fine midpoint quadrature over the ramp support
    const int n = 200000;
    double s = 0.0;
    const double a = -eps, b = eps, h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
      const double x = a + (i + 0.5) * h;
      s += std::abs(rho(x) - rho_eps(eps, x)) * h;
    }
    EXPECT_NEAR(s, eps / 4.0, 1e-9 * eps);
  }
}

TEST(StepSum, ProfileMatchesPointwise) {
  StepSum s{0.5, {0.2, 0.6, 0.4}, {1.0, -2.0, 0.5}, 0.05};
  const auto p = s.to_p1(Interval(0.0, 1.0));
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    EXPECT_NEAR(p(x), s(x), 1e-12);
  }
  EXPECT_DOUBLE_EQ(s.total_variation(), 3.5);
}

TEST(L1Distance, TrivialCases) {
  const Interval dom(0.0, 1.0);
  PiecewiseLinearFn f({0.0, 0.3, 1.0}, {0.0, 1.0, -1.0});
  EXPECT_DOUBLE_EQ(l1_distance(f, f, dom), 0.0);
  EXPECT_DOUBLE_EQ(l1_distance(PiecewiseLinearFn::constant(dom, 0.0), PiecewiseLinearFn::constant(dom, 1.0), dom), 1.0);
}

TEST(L1Distance, RandomPairMatchesRiemannSum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> xa{0.0}, ya, xb{0.0}, yb;
    for (int i = 1; i < 7; ++i) xa.push_back(i / 7.0 + 0.02 * u(rng));
    for (int i = 1; i < 5; ++i) xb.push_back(i / 5.0 + 0.03 * u(rng));
    xa.push_back(1.0);
    xb.push_back(1.0);
    for (std::size_t i = 0; i < xa.size(); ++i) ya.push_back(u(rng));
    for (std::size_t i = 0; i < xb.size(); ++i) yb.push_back(u(rng));
    PiecewiseLinearFn a(xa, ya), b(xb, yb);
    const int n = 1000000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      s += std::abs(a(x) - b(x));
    }
    EXPECT_NEAR(l1_distance(a, b, Interval(0.0, 1.0)), s / n, 1e-6);
  }
}

TEST(L1Distance, ConstantAgainstLinear) {
  PiecewiseConstantFn f({0.5}, {1.0, 0.0});
  const auto g = PiecewiseLinearFn::identity(Interval(0.0, 1.0));
  // int_0^0.5 |1 - x| + int_0.5^1 x = 0.375 + 0.375
  EXPECT_NEAR(l1_distance(f, g, Interval(0.0, 1.0)), 0.75, 1e-14);
}
