#include "exactdpp/kernels.hpp"

#include "exactdpp/errors.hpp"
#include "exactdpp/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace exactdpp {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquareExponential:
      return "se";
    case KernelFamily::Exponential:
      return "exp";
  }
  return "?";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "se" || name == "square-exponential" || name == "rbf") {
    return KernelFamily::SquareExponential;
  }
  if (name == "exp" || name == "exponential") return KernelFamily::Exponential;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "'");
}

KernelSpec::KernelSpec(KernelFamily family, std::vector<double> lengthscales)
    : KernelSpec(family, lengthscales, std::vector<Interval>(lengthscales.size())) {}

KernelSpec::KernelSpec(KernelFamily family, std::vector<double> lengthscales,
                       std::vector<Interval> box)
    : family_(family), lengthscales_(std::move(lengthscales)), box_(std::move(box)) {
  if (lengthscales_.empty()) throw std::invalid_argument("kernel needs at least one dimension");
  if (box_.size() != lengthscales_.size()) {
    throw std::invalid_argument("box has " + std::to_string(box_.size()) +
                                " intervals for a " + std::to_string(lengthscales_.size()) +
                                "-dimensional kernel");
  }
  for (double l : lengthscales_) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("lengthscales must be positive and finite");
    }
  }
  for (const auto& iv : box_) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      throw std::invalid_argument("box intervals must satisfy lo < hi");
    }
  }
}

KernelSpec KernelSpec::isotropic(KernelFamily family, int dim, double lengthscale) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  return KernelSpec(family, std::vector<double>(static_cast<std::size_t>(dim), lengthscale));
}

double KernelSpec::eval_1d(int d, double a, double b) const {
  const double l = lengthscale(d);
  const double r = a - b;
  if (family_ == KernelFamily::SquareExponential) return std::exp(-0.5 * r * r / (l * l));
  return std::exp(-std::fabs(r) / l);
}

double KernelSpec::eval(const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& y) const {
  // One exp over the summed exponent; identical to the product of factors.
  double expo = 0.0;
  for (int d = 0; d < dim(); ++d) {
    const double l = lengthscale(d);
    const double r = x[d] - y[d];
    expo += family_ == KernelFamily::SquareExponential ? 0.5 * r * r / (l * l)
                                                       : std::fabs(r) / l;
  }
  return std::exp(-expo);
}

double KernelSpec::cross_integral_1d(int d, double a, double b, double t) const {
  const double l = lengthscale(d);
  if (t <= 0.0) return 0.0;
  if (family_ == KernelFamily::Exponential) return detail::exponential_cross_integral(l, a, b, t);

  // k(x,a) k(x,b) = exp(-(x-m)^2 / l^2) * exp(-(a-b)^2 / (4 l^2)) with m the midpoint.
  const double m = 0.5 * (a + b);
  const double r = a - b;
  const double cross = std::exp(-0.25 * r * r / (l * l));
  return cross * 0.5 * std::sqrt(std::numbers::pi) * l *
         special::erf_diff((t - m) / l, -m / l);
}

double KernelSpec::diag_integral_1d(int /*d*/, double t) const { return t; }

Eigen::VectorXd KernelSpec::box_to_unit(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim()) throw DomainError("point has wrong dimension");
  Eigen::VectorXd u(dim());
  for (int d = 0; d < dim(); ++d) {
    const auto& iv = box_[static_cast<std::size_t>(d)];
    if (!(x[d] >= iv.lo && x[d] <= iv.hi)) {
      throw DomainError("coordinate " + std::to_string(d + 1) + " = " + std::to_string(x[d]) +
                        " lies outside [" + std::to_string(iv.lo) + ", " +
                        std::to_string(iv.hi) + "]");
    }
    u[d] = (x[d] - iv.lo) / (iv.hi - iv.lo);
  }
  return u;
}

Eigen::VectorXd KernelSpec::unit_to_box(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (u.size() != dim()) throw DomainError("point has wrong dimension");
  Eigen::VectorXd x(dim());
  for (int d = 0; d < dim(); ++d) {
    const auto& iv = box_[static_cast<std::size_t>(d)];
    if (!(u[d] >= 0.0 && u[d] <= 1.0)) throw DomainError("unit coordinate outside [0,1]");
    x[d] = iv.lo + u[d] * (iv.hi - iv.lo);
  }
  return x;
}

bool operator==(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

bool operator==(const KernelSpec& a, const KernelSpec& b) {
  return a.family() == b.family() && a.lengthscales() == b.lengthscales() && a.box() == b.box();
}

namespace detail {

double exponential_cross_integral(double lambda, double a, double b, double t) {
  if (t <= 0.0) return 0.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  // Value of the integrand on the plateau lo <= x <= hi.
  const double plateau = std::exp(-(hi - lo) / lambda);
  double total = 0.0;

  // x < lo: integrand is plateau * exp(-2 (lo - x) / lambda).
  const double u = std::min(t, lo);
  total += 0.5 * lambda * plateau * (std::exp(-2.0 * (lo - u) / lambda) - std::exp(-2.0 * lo / lambda));
  if (t <= lo) return total;

  total += (std::min(t, hi) - lo) * plateau;
  if (t <= hi) return total;

  // x > hi: integrand is plateau * exp(-2 (x - hi) / lambda).
  total += -0.5 * lambda * plateau * std::expm1(-2.0 * (t - hi) / lambda);
  return total;
}

double exponential_cross_integral_as_printed(double a, double b, double x0, double x1) {
  return 0.5 * std::exp(-a - b) * (std::exp(2.0 * a) - std::exp(2.0 * x0)) +
         (b - a) * std::exp(a - b) +
         0.5 * std::exp(a + b) * (std::exp(2.0 * x1) - std::exp(2.0 * b));
}

}  // namespace detail

}  // namespace exactdpp
