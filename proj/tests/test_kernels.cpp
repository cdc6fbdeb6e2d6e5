#include "exactdpp/errors.hpp"
#include "exactdpp/kernels.hpp"
#include "support.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>

using namespace exactdpp;
using testing_support::integrate;
using testing_support::Rng;

namespace {

double product_integrand(KernelFamily family, double l, double x, double a, double b) {
  if (family == KernelFamily::SquareExponential) {
    return std::exp(-0.5 * ((x - a) * (x - a) + (x - b) * (x - b)) / (l * l));
  }
  return std::exp(-(std::fabs(x - a) + std::fabs(x - b)) / l);
}

double quad_cross(KernelFamily family, double l, double a, double b, double t0, double t1) {
  return integrate([&](double x) { return product_integrand(family, l, x, a, b); }, t0, t1, {a, b},
                   static_cast<int>(20.0 / l) + 20);
}

}  // namespace

TEST(Kernels, PointValues) {
  const auto se_half = KernelSpec::isotropic(KernelFamily::SquareExponential, 1, 0.5);
  EXPECT_EQ(se_half.eval_1d(0, 0.3, 0.3), 1.0);
  const auto se_one = KernelSpec::isotropic(KernelFamily::SquareExponential, 1, 1.0);
  EXPECT_NEAR(se_one.eval_1d(0, 0.0, 1.0), 0.606530659712633, 1e-15);
  const auto exp_one = KernelSpec::isotropic(KernelFamily::Exponential, 1, 1.0);
  EXPECT_NEAR(exp_one.eval_1d(0, 0.0, 1.0), 0.367879441171442, 1e-15);
}

TEST(Kernels, ProductOverDimensions) {
  const KernelSpec spec(KernelFamily::SquareExponential, {0.2, 0.4, 0.7});
  const Eigen::Vector3d x(0.1, 0.5, 0.9), y(0.3, 0.2, 0.4);
  double expected = 1.0;
  for (int d = 0; d < 3; ++d) expected *= spec.eval_1d(d, x[d], y[d]);
  EXPECT_NEAR(spec.eval(x, y), expected, 1e-15);
  EXPECT_EQ(spec.eval(x, x), 1.0);
}

TEST(Kernels, SymmetricAndBounded) {
  Rng rng(1);
  for (auto family : {KernelFamily::SquareExponential, KernelFamily::Exponential}) {
    const auto spec = KernelSpec::isotropic(family, 1, 0.15);
    for (int i = 0; i < 500; ++i) {
      const double a = rng.uniform(), b = rng.uniform();
      EXPECT_EQ(spec.eval_1d(0, a, b), spec.eval_1d(0, b, a));
      EXPECT_LE(spec.eval_1d(0, a, b), 1.0);
      if (a != b) {
        EXPECT_LT(spec.eval_1d(0, a, b), 1.0);
      }
    }
  }
}

TEST(Kernels, CrossIntegralAtZeroIsZero) {
  for (auto family : {KernelFamily::SquareExponential, KernelFamily::Exponential}) {
    const auto spec = KernelSpec::isotropic(family, 1, 0.3);
    EXPECT_EQ(spec.cross_integral_1d(0, 0.2, 0.7, 0.0), 0.0);
  }
}

TEST(Kernels, SeSelfProductMatchesSimpson) {
  // k(x, 0.5)^2 = exp(-(x - 0.5)^2 / l^2) under the exp(-r^2 / (2 l^2)) convention.
  for (double l : {0.05, 0.2, 0.7}) {
    const auto spec = KernelSpec::isotropic(KernelFamily::SquareExponential, 1, l);
    const double ref = oracle::adaptive_simpson(
        [&](double x) { return std::exp(-(x - 0.5) * (x - 0.5) / (l * l)); }, 0.0, 1.0, 1e-14);
    EXPECT_NEAR(spec.cross_integral_1d(0, 0.5, 0.5, 1.0), ref, 1e-10) << l;
  }
}

TEST(Kernels, ExponentialExampleMatchesQuadrature) {
  const auto spec = KernelSpec::isotropic(KernelFamily::Exponential, 1, 1.0);
  EXPECT_NEAR(spec.cross_integral_1d(0, 0.2, 0.6, 1.0),
              quad_cross(KernelFamily::Exponential, 1.0, 0.2, 0.6, 0.0, 1.0), 1e-10);
}

TEST(Kernels, CrossIntegralMatchesQuadratureOnRandomInputs) {
  Rng rng(2);
  for (auto family : {KernelFamily::SquareExponential, KernelFamily::Exponential}) {
    for (int i = 0; i < 300; ++i) {
      const double l = rng.uniform(0.02, 1.0);
      const double a = rng.uniform(), b = rng.uniform(), t = rng.uniform();
      const auto spec = KernelSpec::isotropic(family, 1, l);
      EXPECT_NEAR(spec.cross_integral_1d(0, a, b, t), quad_cross(family, l, a, b, 0.0, t), 1e-10)
          << to_string(family) << " l=" << l << " a=" << a << " b=" << b << " t=" << t;
    }
  }
}

TEST(Kernels, CrossIntegralSymmetricAdditiveMonotone) {
  Rng rng(3);
  for (auto family : {KernelFamily::SquareExponential, KernelFamily::Exponential}) {
    for (int i = 0; i < 200; ++i) {
      const double l = rng.uniform(0.03, 0.8);
      const auto spec = KernelSpec::isotropic(family, 1, l);
      const double a = rng.uniform(), b = rng.uniform();
      double t1 = rng.uniform(), t2 = rng.uniform();
      if (t1 > t2) std::swap(t1, t2);
      EXPECT_NEAR(spec.cross_integral_1d(0, a, b, t2), spec.cross_integral_1d(0, b, a, t2), 1e-15);
      const double piece = spec.cross_integral_1d(0, a, b, t2) - spec.cross_integral_1d(0, a, b, t1);
      EXPECT_NEAR(piece, quad_cross(family, l, a, b, t1, t2), 1e-10);
      EXPECT_GE(piece, -1e-16);
    }
    const auto spec = KernelSpec::isotropic(family, 1, 0.1);
    double prev = 0.0;
    for (int g = 0; g <= 1000; ++g) {
      const double v = spec.cross_integral_1d(0, 0.35, 0.4, g / 1000.0);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Kernels, DiagIntegralIsIdentity) {
  const auto spec = KernelSpec::isotropic(KernelFamily::Exponential, 2, 0.3);
  EXPECT_EQ(spec.diag_integral_1d(0, 0.0), 0.0);
  EXPECT_EQ(spec.diag_integral_1d(1, 1.0), 1.0);
  EXPECT_EQ(spec.diag_integral_1d(0, 0.37), 0.37);
}

TEST(Kernels, BoxMapping) {
  const auto unit = KernelSpec::isotropic(KernelFamily::SquareExponential, 2, 0.3);
  const Eigen::Vector2d p(0.25, 0.75);
  EXPECT_EQ(unit.box_to_unit(p), p);

  const KernelSpec box(KernelFamily::SquareExponential, {0.3}, {{2.0, 4.0}});
  EXPECT_DOUBLE_EQ(box.box_to_unit(Eigen::VectorXd::Constant(1, 3.0))[0], 0.5);
  EXPECT_THROW(box.box_to_unit(Eigen::VectorXd::Constant(1, 4.5)), DomainError);

  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    std::vector<Interval> iv;
    Eigen::VectorXd x(3);
    for (int d = 0; d < 3; ++d) {
      const double lo = rng.uniform(-100, 100);
      const double hi = lo + rng.uniform(1e-3, 50);
      iv.push_back({lo, hi});
      x[d] = rng.uniform(lo, hi);
    }
    const KernelSpec spec(KernelFamily::Exponential, {0.1, 0.2, 0.3}, iv);
    const Eigen::VectorXd back = spec.unit_to_box(spec.box_to_unit(x));
    for (int d = 0; d < 3; ++d) EXPECT_LE(std::fabs(back[d] - x[d]), 1e-12 * std::max(1.0, std::fabs(x[d])));
  }
}

TEST(Kernels, GramIsPositiveSemidefinite) {
  Rng rng(5);
  for (auto family : {KernelFamily::SquareExponential, KernelFamily::Exponential}) {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = rng.integer(1, 8);
      const int D = rng.integer(1, 3);
      std::vector<double> ls;
      for (int d = 0; d < D; ++d) ls.push_back(rng.uniform(0.05, 2.0));
      const KernelSpec spec(family, ls);
      const Eigen::MatrixXd X = testing_support::random_rows(rng, n, D);
      Eigen::MatrixXd K(n, n);
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) K(a, b) = spec.eval(X.row(a).transpose(), X.row(b).transpose());
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
      EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-10);
    }
  }
}

TEST(Kernels, RejectsInvalidSpecs) {
  EXPECT_THROW(KernelSpec(KernelFamily::SquareExponential, {}), std::invalid_argument);
  EXPECT_THROW(KernelSpec(KernelFamily::SquareExponential, {0.0}), std::invalid_argument);
  EXPECT_THROW(KernelSpec(KernelFamily::SquareExponential, {-1.0}), std::invalid_argument);
  EXPECT_THROW(KernelSpec(KernelFamily::Exponential, {0.1}, {{1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(KernelSpec(KernelFamily::Exponential, {0.1, 0.1}, {{0.0, 1.0}}), std::invalid_argument);
}

TEST(Kernels, FamilyNames) {
  EXPECT_EQ(parse_kernel_family("se"), KernelFamily::SquareExponential);
  EXPECT_EQ(parse_kernel_family("rbf"), KernelFamily::SquareExponential);
  EXPECT_EQ(parse_kernel_family("exponential"), KernelFamily::Exponential);
  EXPECT_EQ(parse_kernel_family(to_string(KernelFamily::Exponential)), KernelFamily::Exponential);
  EXPECT_THROW(parse_kernel_family("matern52"), std::invalid_argument);
}

TEST(Kernels, PrintedExponentialFormDisagrees) {
  // x0 < a < b < x1, lambda = 1.
  const double a = 0.3, b = 0.5, x0 = 0.1, x1 = 0.9;
  const double ref = quad_cross(KernelFamily::Exponential, 1.0, a, b, x0, x1);
  const auto spec = KernelSpec::isotropic(KernelFamily::Exponential, 1, 1.0);
  EXPECT_NEAR(spec.cross_integral_1d(0, a, b, x1) - spec.cross_integral_1d(0, a, b, x0), ref, 1e-12);
  EXPECT_GT(std::fabs(detail::exponential_cross_integral_as_printed(a, b, x0, x1) - ref), 1e-3);
}
