#pragma once

#include "exactdpp/kernels.hpp"
#include "exactdpp/point_set.hpp"
#include "exactdpp/rng.hpp"
#include "exactdpp/sampler.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace exactdpp {

enum class BasisKind { Nystrom, Spectral };

/// Finite-rank kernel k(a, b) ~ phi(a)^T Sigma phi(b) (+ noise on the diagonal)
/// with product features phi_f(x) = prod_d h_{f,d}(x_d).
///
/// Nystrom: h_{f,d}(x) = k_d(x, z_{f,d}) for inducing points z_f, Sigma = K_ZZ^-1.
/// Spectral: h_{f,d}(x) = cos(omega_{f,d} x) with omega = pi * m, m in N^D, and a
/// diagonal Sigma built from the kernel's spectral density.
class FeatureBasis {
 public:
  FeatureBasis(BasisKind kind, KernelSpec spec, Eigen::MatrixXd params, Eigen::MatrixXd weight_cov,
               double noise);

  BasisKind kind() const { return kind_; }
  const KernelSpec& spec() const { return spec_; }
  int rank() const { return static_cast<int>(params_.rows()); }
  int dim() const { return spec_.dim(); }
  /// Row f holds the inducing point (Nystrom) or the angular frequencies (spectral).
  const Eigen::MatrixXd& params() const { return params_; }
  const Eigen::MatrixXd& weight_cov() const { return weight_cov_; }
  double noise() const { return noise_; }

  double feature_1d(int f, int d, double x) const;
  Eigen::VectorXd features(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Integral over [0, t] of h_{f,d}(x) h_{g,d}(x).
  double product_integral_1d(int f, int g, int d, double t) const;
  /// phi(a)^T Sigma phi(b).
  double approx_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b) const;

 private:
  BasisKind kind_;
  KernelSpec spec_;
  Eigen::MatrixXd params_;
  Eigen::MatrixXd weight_cov_;
  double noise_;
};

/// Integral over [0, t] of cos(a x) cos(b x); continuous across a = b.
double trig_product_integral(double a, double b, double t);

/// Nystrom basis with F inducing points. Without explicit points the inducing
/// set is the midpoint grid ((i + 1/2) / q per dimension, q^D = F); rows of
/// `inducing` override it. Throws NearSingularError if K_ZZ cannot be factored.
FeatureBasis nystrom_basis(const KernelSpec& spec, int rank, double noise = 1e-6,
                           std::optional<Eigen::MatrixXd> inducing = std::nullopt,
                           double jitter = 1e-10);

/// Spectral basis with the F lowest frequency vectors pi * m, ordered by |m|^2
/// and then lexicographically.
FeatureBasis spectral_basis(const KernelSpec& spec, int rank, double noise = 1e-6);

/// Integer frequency multi-indices chosen by spectral_basis, one per row.
Eigen::MatrixXi lowest_frequencies(int dim, int count);

/// Weight-space posterior of the finite-rank model: maintains
/// A^-1 = (Sigma^-1 + noise^-1 Phi Phi^T)^-1 under rank-1 updates, so each
/// conditioned point costs O(F^2).
class ApproxState {
 public:
  explicit ApproxState(FeatureBasis basis);

  const FeatureBasis& basis() const { return basis_; }
  int size() const { return static_cast<int>(points_.cols()); }
  int dim() const { return basis_.dim(); }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::MatrixXd& posterior_cov() const { return post_cov_; }

  /// phi(x)^T A^-1 phi(x).
  double variance_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  void push(const Eigen::Ref<const Eigen::VectorXd>& x);

 private:
  FeatureBasis basis_;
  Eigen::MatrixXd points_;
  Eigen::MatrixXd post_cov_;
};

/// Approximate conditional variance given conditioned points (rows).
double approx_variance_at(const FeatureBasis& basis, const Eigen::Ref<const Eigen::MatrixXd>& conditioned,
                          const Eigen::Ref<const Eigen::VectorXd>& x);

/// CDF of coordinate d of the next point under the finite-rank model,
/// P(t) = sum_{f,g} B_fg * prefix_fg * J_d(f, g, t) * suffix_fg with B = A^-1.
class ApproxCdf {
 public:
  double operator()(double t) const;
  double total_mass() const { return total_mass_; }

 private:
  friend ApproxCdf build_approx_cdf(const ApproxState&, const Eigen::Ref<const Eigen::VectorXd>&, int);

  const FeatureBasis* basis_ = nullptr;
  int dimension_ = 0;
  double total_mass_ = 0.0;
  std::vector<int> f_, g_;
  std::vector<double> coef_;
};

/// The returned CDF refers to the state's basis and must not outlive the state.
ApproxCdf build_approx_cdf(const ApproxState& state, const Eigen::Ref<const Eigen::VectorXd>& prefix,
                           int d);

double invert_cdf(const ApproxCdf& cdf, double u, double epsilon = 1e-12, int max_bisections = 60);

Eigen::VectorXd approx_draw_next(ApproxState& state, UniformStream& stream,
                                 const SamplerOptions& options = {});
Eigen::MatrixXd approx_draw_more(ApproxState& state, UniformStream& stream, int n,
                                 const SamplerOptions& options = {});

/// Approximate DPP sample of n points. Uses the same variate schedule as the
/// exact sampler, so equal seeds give coupled draws.
PointSet approx_draw(const FeatureBasis& basis, int n, std::uint64_t seed,
                     const SamplerOptions& options = {});

}  // namespace exactdpp
