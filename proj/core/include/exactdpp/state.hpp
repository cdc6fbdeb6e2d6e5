#pragma once

#include "exactdpp/kernels.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace exactdpp {

struct StateOptions {
  /// Added to the Gram diagonal (relative to the kernel amplitude).
  double jitter = 1e-10;
  /// Rebuild the inverse from scratch after this many pushes; 0 disables.
  int rebuild_interval = 64;
  /// Rebuild whenever the per-push residual estimate exceeds this value.
  double drift_tolerance = 1e-6;
  /// Overall kernel scale theta. The process does not depend on it; it exists
  /// so that invariance can be tested. Powers of two keep every operation exact.
  double amplitude = 1.0;
};

/// The points drawn so far together with the statistics needed to evaluate the
/// next conditional density: pairwise midpoints m (square-exponential only),
/// the cross matrix M and the inverse Gram matrix.
///
/// M_ab is the value of k(x, x_a) k(x, x_b) at the point where the product
/// peaks: prod_d exp(-(x_a - x_b)_d^2 / (4 l_d^2)) for the square-exponential
/// family and prod_d exp(-|x_a - x_b|_d / l_d) for the exponential family.
class DppState {
 public:
  explicit DppState(KernelSpec spec, StateOptions options = {});

  const KernelSpec& spec() const { return spec_; }
  const StateOptions& options() const { return options_; }
  int dim() const { return spec_.dim(); }
  int size() const { return static_cast<int>(points_.cols()); }
  bool empty() const { return size() == 0; }

  /// Points as columns, one per sample, in unit-cube coordinates.
  const Eigen::MatrixXd& points() const { return points_; }
  auto point(int i) const { return points_.col(i); }

  const Eigen::MatrixXd& inv_gram() const { return inv_gram_; }
  const Eigen::MatrixXd& cross_matrix() const { return cross_; }
  /// Midpoints along dimension d, (x_a + x_b)_d / 2. Square-exponential only.
  const Eigen::MatrixXd& midpoints(int d) const;

  /// Posterior variance of a GP conditioned on the current points, clamped at 0.
  double variance_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Same, without clamping. May dip slightly below zero near the points.
  double raw_variance_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Appends x and updates all statistics; the inverse is extended by the
  /// block (Schur complement) formula. Throws NearSingularError when the
  /// Schur complement falls below 1e-12.
  void push(const Eigen::Ref<const Eigen::VectorXd>& x);

  /// Recomputes the inverse from a Cholesky factorization of the jittered Gram.
  void rebuild_inverse();

  /// Jittered Gram matrix recomputed from the points.
  Eigen::MatrixXd gram() const;
  /// max |inv_gram * K - I| with K from gram().
  double inverse_residual() const;

  /// Pushes since the inverse was last rebuilt from scratch.
  int pushes_since_rebuild() const { return pushes_since_rebuild_; }
  std::size_t rebuild_count() const { return rebuild_count_; }

 private:
  Eigen::VectorXd kernel_column(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  KernelSpec spec_;
  StateOptions options_;
  Eigen::MatrixXd points_;
  Eigen::MatrixXd inv_gram_;
  Eigen::MatrixXd cross_;
  std::vector<Eigen::MatrixXd> midpoints_;
  int pushes_since_rebuild_ = 0;
  std::size_t rebuild_count_ = 0;
};

/// Value-returning forms of the state operations.
DppState push_point(DppState state, const Eigen::Ref<const Eigen::VectorXd>& x);
DppState rebuild_inverse(DppState state);

}  // namespace exactdpp
