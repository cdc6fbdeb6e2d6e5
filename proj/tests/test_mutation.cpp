// Linked against a core build with one erf coefficient perturbed.
#include "exactdpp/special.hpp"
#include "exactdpp/validation.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace exactdpp;

TEST(Mutation, PerturbedErfIsVisible) {
  double worst = 0.0;
  for (int i = -40; i <= 40; ++i) worst = std::max(worst, std::fabs(special::erf(i / 10.0) - std::erf(i / 10.0)));
  EXPECT_GT(worst, 1e-12);
}

TEST(Mutation, CdfCheckRejectsTheMutant) {
  const auto check = validation::cdf_vs_quadrature(50, 1);
  EXPECT_FALSE(check.passed) << "observed " << check.observed;
}
