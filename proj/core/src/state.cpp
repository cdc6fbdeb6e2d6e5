#include "exactdpp/state.hpp"

#include "exactdpp/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace exactdpp {
namespace {

constexpr double kMinSchur = 1e-12;

std::string describe(const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::string out = "(";
  char buf[32];
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    if (d) out += ", ";
    const auto res = std::to_chars(buf, buf + sizeof buf, x[d]);
    out.append(buf, res.ptr);
  }
  return out + ")";
}

}  // namespace

DppState::DppState(KernelSpec spec, StateOptions options)
    : spec_(std::move(spec)), options_(options), points_(spec_.dim(), 0) {
  if (!(options_.jitter >= 0.0)) throw std::invalid_argument("jitter must be nonnegative");
  if (!(options_.amplitude > 0.0)) throw std::invalid_argument("amplitude must be positive");
  if (spec_.family() == KernelFamily::SquareExponential) {
    midpoints_.assign(static_cast<std::size_t>(spec_.dim()), Eigen::MatrixXd(0, 0));
  }
}

const Eigen::MatrixXd& DppState::midpoints(int d) const {
  if (midpoints_.empty()) throw std::logic_error("midpoints are kept for square-exponential kernels only");
  return midpoints_[static_cast<std::size_t>(d)];
}

Eigen::VectorXd DppState::kernel_column(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd k(size());
  for (int a = 0; a < size(); ++a) k[a] = options_.amplitude * spec_.eval(x, points_.col(a));
  return k;
}

double DppState::raw_variance_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (empty()) return options_.amplitude;
  const Eigen::VectorXd k = kernel_column(x);
  return options_.amplitude - k.dot(inv_gram_ * k);
}

double DppState::variance_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return std::max(0.0, raw_variance_at(x));
}

void DppState::push(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != dim()) throw DomainError("point has wrong dimension");
  for (int d = 0; d < dim(); ++d) {
    if (!(x[d] >= 0.0 && x[d] <= 1.0)) throw DomainError("point " + describe(x) + " is outside the unit cube");
  }

  const int n = size();
  const double theta = options_.amplitude;
  const double diag = theta * (1.0 + options_.jitter);
  const Eigen::VectorXd k = kernel_column(x);
  const Eigen::VectorXd w = inv_gram_ * k;
  const double schur = diag - k.dot(w);
  if (!(schur >= kMinSchur * theta)) {
    std::ostringstream os;
    os << "Gram matrix is near-singular after adding " << describe(x) << " (Schur complement "
       << schur << "); duplicate or near-duplicate point";
    throw NearSingularError(os.str());
  }

  // Block inverse: [[Ki + w w^T / s, -w / s], [-w^T / s, 1 / s]].
  Eigen::MatrixXd next(n + 1, n + 1);
  next.topLeftCorner(n, n) = inv_gram_;
  next.topLeftCorner(n, n).noalias() += (w / schur) * w.transpose();
  next.col(n).head(n) = -w / schur;
  next.row(n).head(n) = next.col(n).head(n).transpose();
  next(n, n) = 1.0 / schur;
  inv_gram_ = std::move(next);

  points_.conservativeResize(Eigen::NoChange, n + 1);
  points_.col(n) = x;

  cross_.conservativeResize(n + 1, n + 1);
  for (int a = 0; a <= n; ++a) {
    double expo = 0.0;
    for (int d = 0; d < dim(); ++d) {
      const double l = spec_.lengthscale(d);
      const double r = points_(d, a) - x[d];
      expo += spec_.family() == KernelFamily::SquareExponential ? 0.25 * r * r / (l * l)
                                                                 : std::fabs(r) / l;
    }
    cross_(a, n) = cross_(n, a) = std::exp(-expo);
  }
  for (int d = 0; d < static_cast<int>(midpoints_.size()); ++d) {
    auto& mid = midpoints_[static_cast<std::size_t>(d)];
    mid.conservativeResize(n + 1, n + 1);
    for (int a = 0; a <= n; ++a) mid(a, n) = mid(n, a) = 0.5 * (points_(d, a) + x[d]);
  }

  ++pushes_since_rebuild_;
  const bool scheduled =
      options_.rebuild_interval > 0 && pushes_since_rebuild_ >= options_.rebuild_interval;
  bool drifted = false;
  if (!scheduled && n > 0) {
    // Residual of the new column: inv_gram * [k; diag] should be e_n.
    Eigen::VectorXd column(n + 1);
    column.head(n) = k;
    column[n] = diag;
    Eigen::VectorXd r = inv_gram_ * column;
    r[n] -= 1.0;
    drifted = r.cwiseAbs().maxCoeff() > options_.drift_tolerance;
  }
  if (scheduled || drifted) rebuild_inverse();
}

Eigen::MatrixXd DppState::gram() const {
  const int n = size();
  Eigen::MatrixXd K(n, n);
  for (int a = 0; a < n; ++a) {
    K(a, a) = options_.amplitude * (1.0 + options_.jitter);
    for (int b = 0; b < a; ++b) {
      K(a, b) = K(b, a) = options_.amplitude * spec_.eval(points_.col(a), points_.col(b));
    }
  }
  return K;
}

void DppState::rebuild_inverse() {
  pushes_since_rebuild_ = 0;
  if (empty()) return;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram());
  if (llt.info() != Eigen::Success) {
    throw NearSingularError("Cholesky factorization of the Gram matrix failed with " +
                            std::to_string(size()) + " points");
  }
  inv_gram_ = llt.solve(Eigen::MatrixXd::Identity(size(), size()));
  inv_gram_ = 0.5 * (inv_gram_ + inv_gram_.transpose()).eval();
  ++rebuild_count_;
}

double DppState::inverse_residual() const {
  if (empty()) return 0.0;
  return (inv_gram_ * gram() - Eigen::MatrixXd::Identity(size(), size())).cwiseAbs().maxCoeff();
}

DppState push_point(DppState state, const Eigen::Ref<const Eigen::VectorXd>& x) {
  state.push(x);
  return state;
}

DppState rebuild_inverse(DppState state) {
  state.rebuild_inverse();
  return state;
}

}  // namespace exactdpp
