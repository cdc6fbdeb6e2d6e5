#include "exactdpp/lowrank.hpp"

#include "exactdpp/errors.hpp"

#include <Eigen/Cholesky>

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

// Spectral density of the normalized 1D kernel at angular frequency w.
double spectral_density(KernelFamily family, double l, double w) {
  if (family == KernelFamily::SquareExponential) {
    return std::sqrt(2.0 * std::numbers::pi) * l * std::exp(-0.5 * l * l * w * w);
  }
  return 2.0 * l / (1.0 + l * l * w * w);
}

// sin(delta * t) / (2 delta), including the delta -> 0 limit t / 2.
double half_sinc_integral(double delta, double t) {
  const double x = delta * t;
  if (std::fabs(x) < 1e-4) return 0.5 * t * (1.0 - x * x / 6.0 + x * x * x * x / 120.0);
  return std::sin(x) / (2.0 * delta);
}

}  // namespace

double trig_product_integral(double a, double b, double t) {
  if (a == b) {
    if (a == 0.0) return t;
    return 0.5 * t + std::sin(2.0 * a * t) / (4.0 * a);
  }
  return half_sinc_integral(a - b, t) + half_sinc_integral(a + b, t);
}

FeatureBasis::FeatureBasis(BasisKind kind, KernelSpec spec, Eigen::MatrixXd params,
                           Eigen::MatrixXd weight_cov, double noise)
    : kind_(kind),
      spec_(std::move(spec)),
      params_(std::move(params)),
      weight_cov_(std::move(weight_cov)),
      noise_(noise) {
  if (params_.rows() < 1) throw std::invalid_argument("basis needs at least one feature");
  if (params_.cols() != spec_.dim()) throw std::invalid_argument("feature parameters have wrong dimension");
  if (weight_cov_.rows() != params_.rows() || weight_cov_.cols() != params_.rows()) {
    throw std::invalid_argument("weight covariance must be F x F");
  }
  if (!(noise_ >= 0.0)) throw std::invalid_argument("noise must be nonnegative");
  if ((weight_cov_ - weight_cov_.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * weight_cov_.cwiseAbs().maxCoeff()) {
    throw BasisConditioningError("weight covariance is not symmetric");
  }
  if (Eigen::LLT<Eigen::MatrixXd>(weight_cov_).info() != Eigen::Success) {
    throw BasisConditioningError("weight covariance is not positive definite");
  }
}

double FeatureBasis::feature_1d(int f, int d, double x) const {
  if (kind_ == BasisKind::Nystrom) return spec_.eval_1d(d, x, params_(f, d));
  return std::cos(params_(f, d) * x);
}

Eigen::VectorXd FeatureBasis::features(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd phi(rank());
  for (int f = 0; f < rank(); ++f) {
    if (kind_ == BasisKind::Nystrom) {
      phi[f] = spec_.eval(x, params_.row(f).transpose());
    } else {
      double v = 1.0;
      for (int d = 0; d < dim(); ++d) v *= std::cos(params_(f, d) * x[d]);
      phi[f] = v;
    }
  }
  return phi;
}

double FeatureBasis::product_integral_1d(int f, int g, int d, double t) const {
  if (kind_ == BasisKind::Nystrom) return spec_.cross_integral_1d(d, params_(f, d), params_(g, d), t);
  return trig_product_integral(params_(f, d), params_(g, d), t);
}

double FeatureBasis::approx_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                                   const Eigen::Ref<const Eigen::VectorXd>& b) const {
  return features(a).dot(weight_cov_ * features(b));
}

FeatureBasis nystrom_basis(const KernelSpec& spec, int rank, double noise,
                           std::optional<Eigen::MatrixXd> inducing, double jitter) {
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  const int D = spec.dim();
  Eigen::MatrixXd Z;
  if (inducing) {
    Z = *inducing;
    if (Z.rows() != rank || Z.cols() != D) throw std::invalid_argument("inducing points must be F x D");
  } else {
    const int per_dim = static_cast<int>(std::lround(std::pow(rank, 1.0 / D)));
    int total = 1;
    for (int d = 0; d < D; ++d) total *= per_dim;
    if (total != rank) {
      throw std::invalid_argument("grid inducing points need F to be a perfect D-th power; pass explicit points");
    }
    Z.resize(rank, D);
    for (int f = 0; f < rank; ++f) {
      int rest = f;
      for (int d = D - 1; d >= 0; --d) {
        Z(f, d) = (rest % per_dim + 0.5) / per_dim;
        rest /= per_dim;
      }
    }
  }
  Eigen::MatrixXd Kzz(rank, rank);
  for (int f = 0; f < rank; ++f) {
    for (int g = 0; g < rank; ++g) Kzz(f, g) = spec.eval(Z.row(f).transpose(), Z.row(g).transpose());
    Kzz(f, f) += jitter;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(Kzz);
  if (llt.info() != Eigen::Success) {
    throw NearSingularError("inducing-point Gram matrix is singular; spread the inducing points or add jitter");
  }
  Eigen::MatrixXd sigma = llt.solve(Eigen::MatrixXd::Identity(rank, rank));
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  return FeatureBasis(BasisKind::Nystrom, spec, std::move(Z), std::move(sigma), noise);
}

Eigen::MatrixXi lowest_frequencies(int dim, int count) {
  if (dim < 1 || count < 1) throw std::invalid_argument("need dim >= 1 and count >= 1");
  for (int bound = 0;; ++bound) {
    double cube = std::pow(bound + 1.0, dim);
    if (cube > 1e7) throw std::invalid_argument("too many spectral features requested for this dimension");
    std::vector<std::vector<int>> inside;
    std::vector<int> m(static_cast<std::size_t>(dim), 0);
    while (true) {
      long norm2 = 0;
      for (int v : m) norm2 += static_cast<long>(v) * v;
      if (norm2 <= static_cast<long>(bound) * bound) inside.push_back(m);
      int d = dim - 1;
      while (d >= 0 && m[static_cast<std::size_t>(d)] == bound) m[static_cast<std::size_t>(d--)] = 0;
      if (d < 0) break;
      ++m[static_cast<std::size_t>(d)];
    }
    if (static_cast<int>(inside.size()) < count) continue;
    std::stable_sort(inside.begin(), inside.end(), [](const auto& x, const auto& y) {
      long nx = 0, ny = 0;
      for (int v : x) nx += static_cast<long>(v) * v;
      for (int v : y) ny += static_cast<long>(v) * v;
      return nx < ny;
    });
    Eigen::MatrixXi out(count, dim);
    for (int f = 0; f < count; ++f) {
      for (int d = 0; d < dim; ++d) out(f, d) = inside[static_cast<std::size_t>(f)][static_cast<std::size_t>(d)];
    }
    return out;
  }
}

FeatureBasis spectral_basis(const KernelSpec& spec, int rank, double noise) {
  if (rank < 1) throw std::invalid_argument("rank must be at least 1");
  const int D = spec.dim();
  const Eigen::MatrixXi m = lowest_frequencies(D, rank);
  Eigen::MatrixXd omega(rank, D);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(rank, rank);
  for (int f = 0; f < rank; ++f) {
    // cos(w a) cos(w b) = (cos(w (a - b)) + cos(w (a + b))) / 2, hence the 2 for w > 0.
    double weight = 1.0;
    for (int d = 0; d < D; ++d) {
      omega(f, d) = std::numbers::pi * m(f, d);
      const double s = spectral_density(spec.family(), spec.lengthscale(d), omega(f, d));
      weight *= m(f, d) == 0 ? s : 2.0 * s;
    }
    sigma(f, f) = weight;
  }
  return FeatureBasis(BasisKind::Spectral, spec, std::move(omega), std::move(sigma), noise);
}

ApproxState::ApproxState(FeatureBasis basis)
    : basis_(std::move(basis)), points_(basis_.dim(), 0), post_cov_(basis_.weight_cov()) {}

double ApproxState::variance_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd phi = basis_.features(x);
  return std::max(0.0, phi.dot(post_cov_ * phi));
}

void ApproxState::push(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != dim()) throw DomainError("point has wrong dimension");
  const Eigen::VectorXd phi = basis_.features(x);
  const Eigen::VectorXd v = post_cov_ * phi;
  const double denom = basis_.noise() + phi.dot(v);
  if (!(denom > 0.0)) {
    throw BasisConditioningError("posterior precision lost positive definiteness at point " +
                                 std::to_string(size() + 1));
  }
  post_cov_.noalias() -= (v / denom) * v.transpose();
  const int n = size();
  points_.conservativeResize(Eigen::NoChange, n + 1);
  points_.col(n) = x;
}

double approx_variance_at(const FeatureBasis& basis, const Eigen::Ref<const Eigen::MatrixXd>& conditioned,
                          const Eigen::Ref<const Eigen::VectorXd>& x) {
  ApproxState state(basis);
  for (Eigen::Index i = 0; i < conditioned.rows(); ++i) state.push(conditioned.row(i).transpose());
  return state.variance_at(x);
}

double ApproxCdf::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < coef_.size(); ++i) {
    sum += coef_[i] * basis_->product_integral_1d(f_[i], g_[i], dimension_, t);
  }
  return sum;
}

ApproxCdf build_approx_cdf(const ApproxState& state, const Eigen::Ref<const Eigen::VectorXd>& prefix,
                           int d) {
  const FeatureBasis& basis = state.basis();
  if (d < 0 || d >= basis.dim()) throw std::out_of_range("dimension index out of range");
  ApproxCdf cdf;
  cdf.basis_ = &basis;
  cdf.dimension_ = d;
  const int F = basis.rank();
  const Eigen::MatrixXd& B = state.posterior_cov();

  // Per-feature prefix factors prod_{r<d} h_{f,r}(x_r).
  Eigen::VectorXd head = Eigen::VectorXd::Ones(F);
  for (int f = 0; f < F; ++f) {
    for (int r = 0; r < d; ++r) head[f] *= basis.feature_1d(f, r, prefix[r]);
  }
  for (int g = 0; g < F; ++g) {
    for (int f = 0; f <= g; ++f) {
      double c = (f == g ? 1.0 : 2.0) * B(f, g) * head[f] * head[g];
      for (int r = d + 1; r < basis.dim() && c != 0.0; ++r) c *= basis.product_integral_1d(f, g, r, 1.0);
      if (c == 0.0) continue;
      cdf.f_.push_back(f);
      cdf.g_.push_back(g);
      cdf.coef_.push_back(c);
    }
  }
  cdf.total_mass_ = cdf(1.0);
  if (!(cdf.total_mass_ > kMinMass)) {
    throw DegenerateDensityError("approximate conditional density has total mass " +
                                 format_mass(cdf.total_mass_) + " in dimension " +
                                 std::to_string(d + 1));
  }
  return cdf;
}

double invert_cdf(const ApproxCdf& cdf, double u, double epsilon, int max_bisections) {
  return detail::bisect(cdf, u, epsilon, max_bisections);
}

Eigen::VectorXd approx_draw_next(ApproxState& state, UniformStream& stream, const SamplerOptions& options) {
  Eigen::VectorXd x(state.dim());
  for (int d = 0; d < state.dim(); ++d) {
    const ApproxCdf cdf = build_approx_cdf(state, x.head(d), d);
    const double u = cdf.total_mass() * stream.next();
    x[d] = invert_cdf(cdf, u, options.epsilon, options.max_bisections);
  }
  state.push(x);
  return x;
}

Eigen::MatrixXd approx_draw_more(ApproxState& state, UniformStream& stream, int n,
                                 const SamplerOptions& options) {
  if (n < 0) throw std::invalid_argument("sample count must be nonnegative");
  Eigen::MatrixXd out(n, state.dim());
  for (int i = 0; i < n; ++i) {
    const int index = state.size() + 1;
    try {
      out.row(i) = approx_draw_next(state, stream, options).transpose();
    } catch (const BasisConditioningError& e) {
      throw BasisConditioningError("sample " + std::to_string(index) + ": " + e.what());
    } catch (const DegenerateDensityError& e) {
      throw DegenerateDensityError("sample " + std::to_string(index) + ": " + e.what());
    }
  }
  return out;
}

PointSet approx_draw(const FeatureBasis& basis, int n, std::uint64_t seed, const SamplerOptions& options) {
  if (n < 1) throw std::invalid_argument("sample count must be at least 1");
  ApproxState state(basis);
  UniformStream stream(seed);
  PointSet out;
  out.points = approx_draw_more(state, stream, n, options);
  out.method = basis.kind() == BasisKind::Nystrom ? SampleMethod::Nystrom : SampleMethod::Spectral;
  out.seed = seed;
  out.kernel = basis.spec();
  out.epsilon = options.epsilon;
  out.jitter = options.state.jitter;
  out.rank = basis.rank();
  return out;
}

}  // namespace exactdpp
