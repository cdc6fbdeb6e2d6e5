#include "exactdpp/errors.hpp"
#include "exactdpp/oracle.hpp"
#include "exactdpp/sampler.hpp"
#include "exactdpp/validation.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace exactdpp;
using testing_support::Rng;

namespace {

Eigen::VectorXd pt(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

double min_pair_distance(const Eigen::MatrixXd& X) {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < X.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < X.rows(); ++b) m = std::min(m, (X.row(a) - X.row(b)).norm());
  }
  return m;
}

}  // namespace

TEST(Sampler, EmptyStateCdfIsIdentity) {
  const DppState s(KernelSpec::isotropic(KernelFamily::SquareExponential, 2, 0.1));
  const ConditionalCdf cdf = build_cdf(s, Eigen::VectorXd(0), 0);
  EXPECT_EQ(cdf.total_mass(), 1.0);
  for (double t : {0.0, 0.2, 0.37, 1.0}) EXPECT_EQ(cdf(t), t);
}

TEST(Sampler, TwoPointCdfMatchesAdaptiveSimpson) {
  DppState s(KernelSpec::isotropic(KernelFamily::SquareExponential, 1, 0.2));
  s.push(pt({0.3}));
  s.push(pt({0.7}));
  const ConditionalCdf cdf = build_cdf(s, Eigen::VectorXd(0), 0);
  const auto dense = oracle::DenseVariance::from_state(s);
  for (int i = 1; i <= 9; ++i) {
    const double t = i / 10.0;
    const double ref = oracle::adaptive_simpson([&](double x) { return dense(pt({x})); }, 0.0, t, 1e-13);
    EXPECT_NEAR(cdf(t), ref, 1e-8) << t;
  }
  EXPECT_EQ(cdf(0.0), 0.0);
}

TEST(Sampler, ThreeDimensionalCdfMatchesNestedQuadrature) {
  Rng rng(1);
  for (auto family : {KernelFamily::SquareExponential, KernelFamily::Exponential}) {
    DppState s(KernelSpec(family, {0.3, 0.25, 0.35}));
    for (int i = 0; i < 10; ++i) s.push(pt({rng.uniform(), rng.uniform(), rng.uniform()}));
    const Eigen::VectorXd prefix = pt({rng.uniform(), 0.0, 0.0});
    const ConditionalCdf cdf = build_cdf(s, prefix, 1);
    for (double t : {0.25, 0.6, 1.0}) {
      EXPECT_NEAR(cdf(t), oracle::quad_cdf(s, prefix, 1, t), 1e-6 * cdf.total_mass());
    }
  }
}

TEST(Sampler, CdfIsMonotoneOnRandomStates) {
  Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const auto family = trial % 2 ? KernelFamily::Exponential : KernelFamily::SquareExponential;
    const int D = 1 + trial % 3;
    DppState s(KernelSpec::isotropic(family, D, 0.15));
    UniformStream u(static_cast<std::uint64_t>(trial));
    draw_more(s, u, rng.integer(0, 8));
    Eigen::VectorXd prefix(D);
    for (int d = 0; d < D; ++d) prefix[d] = rng.uniform();
    const int d = rng.integer(0, D - 1);
    const ConditionalCdf cdf = build_cdf(s, prefix, d);
    double prev = 0.0;
    for (int g = 0; g <= 1000; ++g) {
      const double v = cdf(g / 1000.0);
      EXPECT_GE(v, prev - 1e-15 * cdf.total_mass());
      prev = v;
    }
    EXPECT_NEAR(prev, cdf.total_mass(), 1e-15);
  }
}

TEST(Sampler, InvertIdentityCdf) {
  const DppState s(KernelSpec::isotropic(KernelFamily::SquareExponential, 1, 0.1));
  const ConditionalCdf cdf = build_cdf(s, Eigen::VectorXd(0), 0);
  EXPECT_NEAR(invert_cdf(cdf, 0.37), 0.37, 1e-12);
  EXPECT_LE(invert_cdf(cdf, 0.0), 1e-12);
  EXPECT_GE(invert_cdf(cdf, cdf.total_mass()), 1.0 - 1e-12);
}

TEST(Sampler, ForwardResidualOfInversion) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    DppState s(KernelSpec::isotropic(trial % 2 ? KernelFamily::Exponential : KernelFamily::SquareExponential, 1, 0.1));
    UniformStream u(static_cast<std::uint64_t>(100 + trial));
    draw_more(s, u, 5);
    const ConditionalCdf cdf = build_cdf(s, Eigen::VectorXd(0), 0);
    for (int k = 0; k < 20; ++k) {
      const double target = rng.uniform() * cdf.total_mass();
      // sup |P'| = sup V <= 1.
      EXPECT_LE(std::fabs(cdf(invert_cdf(cdf, target)) - target), 1e-12 + 1e-14);
    }
  }
}

TEST(Sampler, RejectsBadPrefixAndDimension) {
  const DppState s(KernelSpec::isotropic(KernelFamily::SquareExponential, 2, 0.1));
  EXPECT_THROW(build_cdf(s, pt({1.5, 0.0}), 1), DomainError);
  EXPECT_THROW(build_cdf(s, pt({0.5, 0.0}), 2), std::out_of_range);
}

TEST(Sampler, FirstPointIsTheRawVariates) {
  const auto spec = KernelSpec::isotropic(KernelFamily::Exponential, 3, 0.2);
  const PointSet p = draw(spec, 1, 77);
  UniformStream u(77);
  for (int d = 0; d < 3; ++d) EXPECT_NEAR(p.points(0, d), u.next(), 1e-12);
}

TEST(Sampler, SecondPointMatchesRejectionOracle) {
  const auto check = validation::second_point_ks(20000, 6);
  EXPECT_TRUE(check.passed) << check.observed;
}

TEST(Sampler, DeterministicPerSeed) {
  const auto spec = KernelSpec::isotropic(KernelFamily::SquareExponential, 2, 0.1);
  const PointSet a = draw(spec, 30, 42);
  const PointSet b = draw(spec, 30, 42);
  const PointSet c = draw(spec, 30, 43);
  EXPECT_EQ(a.points, b.points);
  EXPECT_NE(a.points, c.points);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(a.method, SampleMethod::Exact);
  ASSERT_TRUE(a.kernel.has_value());
  EXPECT_EQ(*a.kernel, spec);
  EXPECT_TRUE((a.points.array() >= 0.0).all() && (a.points.array() <= 1.0).all());
}

TEST(Sampler, AmplitudeDoesNotChangeDraws) {
  for (auto family : {KernelFamily::SquareExponential, KernelFamily::Exponential}) {
    const auto spec = KernelSpec::isotropic(family, 2, 0.1);
    const PointSet base = draw(spec, 40, 5);
    for (double theta : {4.0, 0.25}) {
      SamplerOptions opts;
      opts.state.amplitude = theta;
      EXPECT_EQ(draw(spec, 40, 5, opts).points, base.points) << theta;
    }
  }
}

TEST(Sampler, DrawnSetsSatisfyChainIdentity) {
  const auto check = validation::determinant_chain(24, 17);
  EXPECT_TRUE(check.passed) << check.observed << " " << check.detail;
}

TEST(Sampler, NoDuplicatePoints) {
  EXPECT_GT(min_pair_distance(draw(KernelSpec::isotropic(KernelFamily::SquareExponential, 2, 0.01), 200, 1).points), 1e-8);
  EXPECT_GT(min_pair_distance(draw(KernelSpec::isotropic(KernelFamily::Exponential, 2, 0.01), 200, 2).points), 1e-8);
  EXPECT_GT(min_pair_distance(draw(KernelSpec::isotropic(KernelFamily::SquareExponential, 1, 0.01), 100, 3).points), 1e-8);
}

TEST(Sampler, RepulsionBeatsUniformByThreeStandardErrors) {
  const auto spec = KernelSpec::isotropic(KernelFamily::SquareExponential, 2, 0.05);
  std::vector<double> diff;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    diff.push_back(oracle::coverage_metrics(draw(spec, 100, seed).points).mean_nn -
                   oracle::coverage_metrics(draw_uniform(2, 100, seed).points).mean_nn);
  }
  double mean = 0.0, var = 0.0;
  for (double d : diff) mean += d / diff.size();
  for (double d : diff) var += (d - mean) * (d - mean) / (diff.size() - 1);
  EXPECT_GT(mean, 3.0 * std::sqrt(var / diff.size()));
}

TEST(Sampler, SaturatedStateRaisesDegenerateDensity) {
  try {
    draw(KernelSpec::isotropic(KernelFamily::SquareExponential, 1, 0.5), 40, 1);
    FAIL() << "expected DegenerateDensityError";
  } catch (const DegenerateDensityError& e) {
    EXPECT_NE(std::string(e.what()).find("sample "), std::string::npos);
  }
  EXPECT_THROW(draw(KernelSpec::isotropic(KernelFamily::SquareExponential, 1, 0.1), 0, 1), std::invalid_argument);
}

TEST(Sampler, UniformBaseline) {
  EXPECT_EQ(draw_uniform(2, 0, 1).size(), 0);
  const PointSet p = draw_uniform(3, 10000, 9);
  EXPECT_TRUE((p.points.array() >= 0.0).all() && (p.points.array() < 1.0).all());
  const double sigma = std::sqrt(1.0 / 12.0 / 10000.0);
  for (int d = 0; d < 3; ++d) EXPECT_NEAR(p.points.col(d).mean(), 0.5, 3.0 * sigma);
  EXPECT_EQ(draw_uniform(3, 5, 9).points, p.points.topRows(5));
  EXPECT_FALSE(p.kernel.has_value());
}

TEST(Sampler, StreamIsReproducible) {
  UniformStream a(123), b(123);
  std::mt19937_64 engine(123);
  for (int i = 0; i < 100; ++i) {
    const double x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_EQ(x, static_cast<double>(engine() >> 11) * 0x1.0p-53);
  }
}
