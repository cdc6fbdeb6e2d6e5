#include "exactdpp/sampler.hpp"

#include "exactdpp/errors.hpp"
#include "exactdpp/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace exactdpp {
namespace {

std::string format_mass(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

constexpr double kMinMass = 1e-14;
const double kHalfSqrtPi = 0.5 * std::sqrt(std::numbers::pi);

}  // namespace

double ConditionalCdf::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  double sum = 0.0;
  const std::size_t n = coef_.size();
  if (family_ == KernelFamily::SquareExponential) {
    const double inv_l = 1.0 / lengthscale_;
    for (std::size_t i = 0; i < n; ++i) {
      // erf((t - m) / l) - erf(-m / l), split so neither branch cancels.
      const double z = (t - p0_[i]) * inv_l;
      const double g = z >= 0.0 ? special::erf(z) + p1_[i] : special::erfc(-z) - p2_[i];
      sum += coef_[i] * g;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      sum += coef_[i] * detail::exponential_cross_integral(lengthscale_, p0_[i], p1_[i], t);
    }
  }
  return amplitude_ * t - sum;
}

ConditionalCdf build_cdf(const DppState& state, const Eigen::Ref<const Eigen::VectorXd>& prefix,
                         int d) {
  const KernelSpec& spec = state.spec();
  if (d < 0 || d >= spec.dim()) throw std::out_of_range("dimension index out of range");
  if (prefix.size() < d) throw std::invalid_argument("prefix shorter than the dimension index");
  for (int r = 0; r < d; ++r) {
    if (!(prefix[r] >= 0.0 && prefix[r] <= 1.0)) throw DomainError("prefix outside [0,1]");
  }

  ConditionalCdf cdf;
  cdf.family_ = spec.family();
  cdf.dimension_ = d;
  cdf.amplitude_ = state.options().amplitude;
  cdf.lengthscale_ = spec.lengthscale(d);

  const int n = state.size();
  const double theta2 = cdf.amplitude_ * cdf.amplitude_;
  const std::size_t pairs = static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
  cdf.coef_.reserve(pairs);
  cdf.p0_.reserve(pairs);
  cdf.p1_.reserve(pairs);
  if (cdf.family_ == KernelFamily::SquareExponential) cdf.p2_.reserve(pairs);

  const Eigen::MatrixXd& inv = state.inv_gram();
  const Eigen::MatrixXd& X = state.points();
  const int D = spec.dim();

  for (int b = 0; b < n; ++b) {
    for (int a = 0; a <= b; ++a) {
      const double weight = a == b ? 1.0 : 2.0;
      double c = weight * theta2 * inv(a, b);
      if (cdf.family_ == KernelFamily::SquareExponential) {
        double expo = 0.0;
        for (int r = 0; r < d; ++r) {
          const double l = spec.lengthscale(r);
          const double z = prefix[r] - state.midpoints(r)(a, b);
          expo += z * z / (l * l);
        }
        c *= state.cross_matrix()(a, b) * std::exp(-expo);
        for (int r = d + 1; r < D; ++r) {
          const double l = spec.lengthscale(r);
          const double m = state.midpoints(r)(a, b);
          c *= kHalfSqrtPi * l * special::erf_diff((1.0 - m) / l, -m / l);
        }
        const double m = state.midpoints(d)(a, b);
        const double ml = m / cdf.lengthscale_;
        c *= kHalfSqrtPi * cdf.lengthscale_;
        if (c == 0.0) continue;
        cdf.coef_.push_back(c);
        cdf.p0_.push_back(m);
        cdf.p1_.push_back(special::erf(ml));
        cdf.p2_.push_back(special::erfc(ml));
      } else {
        double expo = 0.0;
        for (int r = 0; r < d; ++r) {
          const double l = spec.lengthscale(r);
          expo += (std::fabs(prefix[r] - X(r, a)) + std::fabs(prefix[r] - X(r, b))) / l;
        }
        c *= std::exp(-expo);
        for (int r = d + 1; r < D; ++r) c *= spec.cross_integral_1d(r, X(r, a), X(r, b), 1.0);
        if (c == 0.0) continue;
        cdf.coef_.push_back(c);
        cdf.p0_.push_back(std::min(X(d, a), X(d, b)));
        cdf.p1_.push_back(std::max(X(d, a), X(d, b)));
      }
    }
  }

  cdf.total_mass_ = cdf(1.0);
  if (!(cdf.total_mass_ > kMinMass * cdf.amplitude_)) {
    throw DegenerateDensityError(
        "conditional density has total mass " + format_mass(cdf.total_mass_) +
        " in dimension " + std::to_string(d + 1) + " with " + std::to_string(n) +
        " points; the lengthscale is too long for this many points");
  }
  return cdf;
}

double invert_cdf(const ConditionalCdf& cdf, double u, double epsilon, int max_bisections) {
  return detail::bisect(cdf, u, epsilon, max_bisections);
}

Eigen::VectorXd draw_next(DppState& state, UniformStream& stream, const SamplerOptions& options) {
  Eigen::VectorXd x(state.dim());
  for (int d = 0; d < state.dim(); ++d) {
    const ConditionalCdf cdf = build_cdf(state, x.head(d), d);
    const double u = cdf.total_mass() * stream.next();
    x[d] = invert_cdf(cdf, u, options.epsilon, options.max_bisections);
  }
  state.push(x);
  return x;
}

Eigen::MatrixXd draw_more(DppState& state, UniformStream& stream, int n,
                          const SamplerOptions& options) {
  if (n < 0) throw std::invalid_argument("sample count must be nonnegative");
  Eigen::MatrixXd out(n, state.dim());
  for (int i = 0; i < n; ++i) {
    const int index = state.size() + 1;
    try {
      out.row(i) = draw_next(state, stream, options).transpose();
    } catch (const NearSingularError& e) {
      throw NearSingularError("sample " + std::to_string(index) + ": " + e.what());
    } catch (const DegenerateDensityError& e) {
      throw DegenerateDensityError("sample " + std::to_string(index) + ": " + e.what());
    }
  }
  return out;
}

PointSet draw(const KernelSpec& spec, int n, std::uint64_t seed, const SamplerOptions& options) {
  if (n < 1) throw std::invalid_argument("sample count must be at least 1");
  DppState state(spec, options.state);
  UniformStream stream(seed);
  PointSet out;
  out.points = draw_more(state, stream, n, options);
  out.method = SampleMethod::Exact;
  out.seed = seed;
  out.kernel = spec;
  out.epsilon = options.epsilon;
  out.jitter = options.state.jitter;
  return out;
}

PointSet draw_uniform(int dim, int n, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  if (n < 0) throw std::invalid_argument("sample count must be nonnegative");
  UniformStream stream(seed);
  PointSet out;
  out.points.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) out.points(i, d) = stream.next();
  }
  out.method = SampleMethod::Uniform;
  out.seed = seed;
  return out;
}

}  // namespace exactdpp
