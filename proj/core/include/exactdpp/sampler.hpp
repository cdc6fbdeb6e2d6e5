#pragma once

#include "exactdpp/kernels.hpp"
#include "exactdpp/point_set.hpp"
#include "exactdpp/rng.hpp"
#include "exactdpp/state.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace exactdpp {

struct SamplerOptions {
  /// Bisection stops once the bracket is no wider than this.
  double epsilon = 1e-12;
  int max_bisections = 60;
  StateOptions state;
};

/// Unnormalized conditional CDF of one coordinate of the next point,
///
///   P(t) = theta * t - sum_{a,b} c_ab * I_d(a, b, t),
///
/// where I_d(a, b, t) integrates k_d(x, x_a) k_d(x, x_b) over [0, t] and c_ab
/// collects [K^-1]_ab, the kernel factors of the already-drawn coordinates and
/// the full-interval integrals of the trailing coordinates. All pair terms are
/// frozen at construction, so each evaluation costs one special-function call
/// per pair (a <= b).
class ConditionalCdf {
 public:
  double operator()(double t) const;
  double total_mass() const { return total_mass_; }
  int dimension() const { return dimension_; }
  /// Number of pair terms (a <= b).
  std::size_t terms() const { return coef_.size(); }

 private:
  friend ConditionalCdf build_cdf(const DppState&, const Eigen::Ref<const Eigen::VectorXd>&, int);

  KernelFamily family_ = KernelFamily::SquareExponential;
  int dimension_ = 0;
  double amplitude_ = 1.0;
  double lengthscale_ = 1.0;
  double total_mass_ = 1.0;
  std::vector<double> coef_;
  // Square-exponential: midpoint, erf(m / l) and erfc(m / l).
  // Exponential: min and max of the pair's coordinates; third slot unused.
  std::vector<double> p0_, p1_, p2_;
};

/// Builds the CDF of coordinate d (0-based) of the next point given the first
/// d coordinates in `prefix`. Throws DegenerateDensityError when P(1) is below
/// 1e-14 (relative to the kernel amplitude).
ConditionalCdf build_cdf(const DppState& state, const Eigen::Ref<const Eigen::VectorXd>& prefix,
                         int d);

/// Interval bisection on [0, 1] for P(x) = u: halve while the bracket is
/// wider than epsilon, keeping the half where P crosses u, and return the last
/// midpoint.
double invert_cdf(const ConditionalCdf& cdf, double u, double epsilon = 1e-12,
                  int max_bisections = 60);

/// Draws one point coordinate by coordinate from the conditional law given the
/// state, consuming one variate per coordinate, and pushes it onto the state.
Eigen::VectorXd draw_next(DppState& state, UniformStream& stream,
                          const SamplerOptions& options = {});

/// Exact DPP sample of n points. Deterministic in (spec, n, seed, options).
PointSet draw(const KernelSpec& spec, int n, std::uint64_t seed, const SamplerOptions& options = {});

/// Continues an existing state by n further points drawn from `stream`.
Eigen::MatrixXd draw_more(DppState& state, UniformStream& stream, int n,
                          const SamplerOptions& options = {});

namespace detail {

template <class Cdf>
double bisect(const Cdf& cdf, double u, double epsilon, int max_bisections) {
  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  for (int it = 0; hi - lo > epsilon && it < max_bisections; ++it) {
    mid = 0.5 * (lo + hi);
    if (cdf(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

}  // namespace detail

/// n i.i.d. uniform points on [0,1]^dim from the same stream construction.
PointSet draw_uniform(int dim, int n, std::uint64_t seed);

}  // namespace exactdpp
