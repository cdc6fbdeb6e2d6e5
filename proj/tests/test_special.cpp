#include "exactdpp/special.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace sp = exactdpp::special;

TEST(Special, ErfMatchesLibm) {
  double worst = 0.0;
  for (int i = -6000; i <= 6000; ++i) {
    const double x = i * 1e-3;
    const double ref = std::erf(x);
    if (ref != 0.0) worst = std::max(worst, std::fabs(sp::erf(x) - ref) / std::fabs(ref));
  }
  EXPECT_LT(worst, 2e-15);
}

TEST(Special, ErfcMatchesLibmIntoTheTail) {
  double worst = 0.0;
  for (int i = -3000; i <= 26000; ++i) {
    const double x = i * 1e-3;
    const double ref = std::erfc(x);
    if (ref > 0.0) worst = std::max(worst, std::fabs(sp::erfc(x) - ref) / ref);
  }
  EXPECT_LT(worst, 2e-14);
}

TEST(Special, OddSymmetryAndLimits) {
  for (double x : {0.1, 0.4, 0.47, 0.5, 1.3, 4.0, 7.0}) {
    EXPECT_EQ(sp::erf(-x), -sp::erf(x));
    EXPECT_NEAR(sp::erfc(-x), 2.0 - sp::erfc(x), 1e-15);
  }
  EXPECT_EQ(sp::erf(0.0), 0.0);
  EXPECT_EQ(sp::erf(30.0), 1.0);
  EXPECT_EQ(sp::erfc(30.0), 0.0);
}

TEST(Special, ErfDiffKeepsRelativeAccuracyInTails) {
  for (double x : {3.0, 5.0, 8.0}) {
    const double y = x + 0.25;
    const long double ref = std::erfc(static_cast<long double>(x)) - std::erfc(static_cast<long double>(y));
    EXPECT_NEAR(sp::erf_diff(y, x) / static_cast<double>(ref), 1.0, 1e-13) << x;
    EXPECT_NEAR(sp::erf_diff(-x, -y) / static_cast<double>(ref), 1.0, 1e-13) << x;
  }
  EXPECT_NEAR(sp::erf_diff(0.3, -0.2), std::erf(0.3) - std::erf(-0.2), 1e-16);
}
