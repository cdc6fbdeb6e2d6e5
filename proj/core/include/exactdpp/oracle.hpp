#pragma once

#include "exactdpp/kernels.hpp"
#include "exactdpp/point_set.hpp"
#include "exactdpp/state.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

// Brute-force ground truth. Nothing in here calls the closed-form integrals or
// the incremental inverse: kernels are re-evaluated locally, the Gram matrix is
// factored densely and every integral is done numerically.
namespace exactdpp::oracle {

enum class QuadMethod { CompositeSimpson, AdaptiveSimpson, GaussLegendre };

struct QuadratureRule {
  QuadMethod method = QuadMethod::GaussLegendre;
  /// Panels per unit length and lengthscale; CompositeSimpson rounds up to even.
  int panels_per_lengthscale = 2;
  /// Minimum number of panels on any integration segment.
  int min_panels = 2;
  /// Target for AdaptiveSimpson.
  double tolerance = 1e-12;
};

double simpson(const std::function<double(double)>& f, double a, double b, int panels);
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);
/// Composite 10-point Gauss-Legendre.
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels);

/// Conditional variance evaluated densely: k(x,x) - k_x^T K^-1 k_x
/// with its own kernel evaluation and a fresh Cholesky factor of the Gram matrix.
class DenseVariance {
 public:
  DenseVariance(KernelFamily family, std::vector<double> lengthscales,
                const Eigen::Ref<const Eigen::MatrixXd>& points_by_row, double jitter,
                double amplitude = 1.0);
  /// Mirrors the statistics of a sampler state (points, jitter, amplitude).
  static DenseVariance from_state(const DppState& state);

  int dim() const { return static_cast<int>(lengthscales_.size()); }
  int size() const { return static_cast<int>(points_.rows()); }
  const Eigen::MatrixXd& points() const { return points_; }
  KernelFamily family() const { return family_; }
  const std::vector<double>& lengthscales() const { return lengthscales_; }

  double kernel_1d(int d, double a, double b) const;
  /// Raw (unclamped) variance.
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Variance given the kernel column k_x (amplitude already applied).
  double from_column(const Eigen::Ref<const Eigen::VectorXd>& kx) const;
  /// Column-wise version: one variance per column of kx.
  Eigen::VectorXd from_columns(const Eigen::Ref<const Eigen::MatrixXd>& kx) const;

 private:
  KernelFamily family_;
  std::vector<double> lengthscales_;
  Eigen::MatrixXd points_;
  double amplitude_;
  Eigen::MatrixXd chol_lower_;
};

/// Nested quadrature of the conditional variance: integral over [0, t] in
/// coordinate d and over [0,1] in every later coordinate, with the first d
/// coordinates fixed to `prefix`. Supports D <= 3.
double quad_cdf(const DppState& state, const Eigen::Ref<const Eigen::VectorXd>& prefix, int d, double t,
                const QuadratureRule& rule = {});

struct RejectionResult {
  /// Accepted points, one per row.
  Eigen::MatrixXd accepted;
  double acceptance_rate = 0.0;
  /// Envelope used: 1.001 times the grid maximum of the variance.
  double bound = 0.0;
  /// Proposals whose variance exceeded the envelope (should stay at zero).
  int bound_violations = 0;
  int trials = 0;
};

/// Uniform-proposal rejection sampling of the next point from the density
/// proportional to the conditional variance. D <= 3.
RejectionResult rejection_draw(const DppState& state, int n_trials, std::uint64_t seed,
                               std::optional<int> grid_per_dim = std::nullopt);

struct JointDensityCheck {
  double chain_product = 0.0;
  double determinant = 0.0;
  double relative_gap = 0.0;
  bool defined = true;
  std::string diagnosis;
};

/// Compares prod_i V_i(x_i), each factor from a separate dense solve, with
/// det K_XX from an LU factorization of the whole Gram matrix. No jitter.
JointDensityCheck joint_density_check(const Eigen::Ref<const Eigen::MatrixXd>& points_by_row,
                                      const KernelSpec& spec);

struct CoverageReport {
  int size = 0;
  double mean_nn = 0.0;
  double min_nn = 0.0;
  std::vector<double> nn_distances;
  /// Largest gap between consecutive sorted coordinates (0 and 1 included), per coordinate.
  std::vector<double> max_projection_gap;
  std::string method;
  std::vector<std::uint64_t> seeds;
};

CoverageReport coverage_metrics(const Eigen::Ref<const Eigen::MatrixXd>& points_by_row);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected);

}  // namespace exactdpp::oracle
