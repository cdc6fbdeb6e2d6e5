#include "exactdpp/oracle.hpp"

#include "exactdpp/errors.hpp"
#include "exactdpp/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace exactdpp::oracle {
namespace {

struct Nodes {
  std::vector<double> x;
  std::vector<double> w;
};

void append_gauss(Nodes& out, double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    out.x.push_back(mid - half * abscissa[i]);
    out.w.push_back(half * weights[i]);
    out.x.push_back(mid + half * abscissa[i]);
    out.w.push_back(half * weights[i]);
  }
}

void append_simpson(Nodes& out, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  for (int i = 0; i <= panels; ++i) {
    const double c = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    out.x.push_back(a + i * h);
    out.w.push_back(c * h / 3.0);
  }
}

// Segment boundaries on [lo, hi]: the ends plus any kink locations inside.
std::vector<double> segments(double lo, double hi, const std::vector<double>& kinks) {
  std::vector<double> cuts{lo, hi};
  for (double k : kinks) {
    if (k > lo && k < hi) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

Nodes make_nodes(double lo, double hi, const std::vector<double>& kinks, double lengthscale,
                 const QuadratureRule& rule) {
  Nodes out;
  if (hi <= lo) return out;
  const auto cuts = segments(lo, hi, kinks);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s];
    const double b = cuts[s + 1];
    const int panels = std::max(
        rule.min_panels,
        static_cast<int>(std::ceil((b - a) * rule.panels_per_lengthscale / lengthscale)));
    if (rule.method == QuadMethod::CompositeSimpson) {
      append_simpson(out, a, b, 2 * panels);
    } else {
      const double h = (b - a) / panels;
      for (int p = 0; p < panels; ++p) append_gauss(out, a + p * h, p + 1 == panels ? b : a + (p + 1) * h);
    }
  }
  return out;
}

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 2) panels = 2;
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  if (b == a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
  Nodes nodes;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) append_gauss(nodes, a + p * h, a + (p + 1) * h);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.x.size(); ++i) sum += nodes.w[i] * f(nodes.x[i]);
  return sum;
}

DenseVariance::DenseVariance(KernelFamily family, std::vector<double> lengthscales,
                             const Eigen::Ref<const Eigen::MatrixXd>& points_by_row, double jitter,
                             double amplitude)
    : family_(family), lengthscales_(std::move(lengthscales)), points_(points_by_row), amplitude_(amplitude) {
  const int n = size();
  if (n == 0) return;
  Eigen::MatrixXd K(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double k = amplitude_;
      for (int d = 0; d < dim(); ++d) k *= kernel_1d(d, points_(a, d), points_(b, d));
      K(a, b) = k;
    }
    K(a, a) += amplitude_ * jitter;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) throw OracleError("dense Gram factorization failed");
  chol_lower_ = llt.matrixL();
}

DenseVariance DenseVariance::from_state(const DppState& state) {
  return DenseVariance(state.spec().family(), state.spec().lengthscales(), state.points().transpose(),
                       state.options().jitter, state.options().amplitude);
}

double DenseVariance::kernel_1d(int d, double a, double b) const {
  const double l = lengthscales_[static_cast<std::size_t>(d)];
  if (family_ == KernelFamily::SquareExponential) {
    const double z = (a - b) / l;
    return std::exp(-0.5 * z * z);
  }
  return std::exp(-std::fabs(a - b) / l);
}

double DenseVariance::from_column(const Eigen::Ref<const Eigen::VectorXd>& kx) const {
  if (size() == 0) return amplitude_;
  const Eigen::VectorXd y = chol_lower_.triangularView<Eigen::Lower>().solve(kx);
  return amplitude_ - y.squaredNorm();
}

Eigen::VectorXd DenseVariance::from_columns(const Eigen::Ref<const Eigen::MatrixXd>& kx) const {
  if (size() == 0) return Eigen::VectorXd::Constant(kx.cols(), amplitude_);
  const Eigen::MatrixXd y = chol_lower_.triangularView<Eigen::Lower>().solve(kx);
  return (amplitude_ - y.colwise().squaredNorm().array()).matrix().transpose();
}

double DenseVariance::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd k(size());
  for (int a = 0; a < size(); ++a) {
    double v = amplitude_;
    for (int d = 0; d < dim(); ++d) v *= kernel_1d(d, x[d], points_(a, d));
    k[a] = v;
  }
  return from_column(k);
}

double quad_cdf(const DppState& state, const Eigen::Ref<const Eigen::VectorXd>& prefix, int d, double t,
                const QuadratureRule& rule) {
  const int D = state.dim();
  if (D > 3) throw OracleError("nested quadrature is limited to D <= 3");
  if (d < 0 || d >= D) throw OracleError("dimension index out of range");
  if (t <= 0.0) return 0.0;

  const DenseVariance variance = DenseVariance::from_state(state);
  const int n = variance.size();
  const Eigen::MatrixXd& X = variance.points();
  const bool kinked = state.spec().family() == KernelFamily::Exponential;
  auto kinks_of = [&](int r) {
    std::vector<double> k;
    if (kinked) {
      for (int a = 0; a < n; ++a) k.push_back(X(a, r));
    }
    return k;
  };

  const double amplitude = state.options().amplitude;
  Eigen::VectorXd head = Eigen::VectorXd::Constant(n, amplitude);
  for (int a = 0; a < n; ++a) {
    for (int r = 0; r < d; ++r) head[a] *= variance.kernel_1d(r, prefix[r], X(a, r));
  }

  if (rule.method == QuadMethod::AdaptiveSimpson) {
    if (d != D - 1) throw OracleError("adaptive Simpson supports a single integrated coordinate");
    auto f = [&](double x) {
      Eigen::VectorXd k = head;
      for (int a = 0; a < n; ++a) k[a] *= variance.kernel_1d(d, x, X(a, d));
      return variance.from_column(k);
    };
    const auto cuts = segments(0.0, t, kinks_of(d));
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      total += adaptive_simpson(f, cuts[s], cuts[s + 1], rule.tolerance / static_cast<double>(cuts.size()));
    }
    return total;
  }

  // Tensor grid over coordinates d..D-1 with per-coordinate kernel tables.
  std::vector<Nodes> nodes;
  std::vector<Eigen::MatrixXd> tables;
  for (int r = d; r < D; ++r) {
    const double hi = r == d ? t : 1.0;
    nodes.push_back(make_nodes(0.0, hi, kinks_of(r), state.spec().lengthscale(r), rule));
    const Nodes& nr = nodes.back();
    Eigen::MatrixXd table(static_cast<Eigen::Index>(nr.x.size()), n);
    for (std::size_t i = 0; i < nr.x.size(); ++i) {
      for (int a = 0; a < n; ++a) table(static_cast<Eigen::Index>(i), a) = variance.kernel_1d(r, nr.x[i], X(a, r));
    }
    tables.push_back(std::move(table));
  }

  // Outer levels are enumerated one node tuple at a time; the innermost level
  // is handled as a block so the triangular solve runs on a matrix right-hand side.
  const int levels = static_cast<int>(nodes.size());
  const Nodes& inner = nodes.back();
  const Eigen::MatrixXd& inner_table = tables.back();
  const Eigen::Map<const Eigen::VectorXd> inner_w(inner.w.data(), static_cast<Eigen::Index>(inner.w.size()));
  std::vector<std::size_t> idx(static_cast<std::size_t>(levels - 1), 0);
  double total = 0.0;
  Eigen::VectorXd base(n);
  while (true) {
    double w = 1.0;
    base = head;
    for (int l = 0; l + 1 < levels; ++l) {
      const std::size_t i = idx[static_cast<std::size_t>(l)];
      w *= nodes[static_cast<std::size_t>(l)].w[i];
      if (n > 0) base.array() *= tables[static_cast<std::size_t>(l)].row(static_cast<Eigen::Index>(i)).transpose().array();
    }
    total += w * inner_w.dot(variance.from_columns(inner_table.transpose().array().colwise() * base.array()));
    int l = levels - 2;
    while (l >= 0 && ++idx[static_cast<std::size_t>(l)] == nodes[static_cast<std::size_t>(l)].x.size()) {
      idx[static_cast<std::size_t>(l--)] = 0;
    }
    if (l < 0) break;
  }
  return total;
}

RejectionResult rejection_draw(const DppState& state, int n_trials, std::uint64_t seed,
                               std::optional<int> grid_per_dim) {
  const int D = state.dim();
  if (D > 3) throw OracleError("rejection oracle is limited to D <= 3");
  if (n_trials < 1) throw OracleError("need at least one trial");
  const DenseVariance variance = DenseVariance::from_state(state);

  const int g = grid_per_dim.value_or(D == 1 ? 4001 : (D == 2 ? 301 : 61));
  double grid_max = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(D), 0);
  Eigen::VectorXd x(D);
  while (true) {
    for (int r = 0; r < D; ++r) x[r] = static_cast<double>(idx[static_cast<std::size_t>(r)]) / (g - 1);
    grid_max = std::max(grid_max, variance(x));
    int r = D - 1;
    while (r >= 0 && ++idx[static_cast<std::size_t>(r)] == g) idx[static_cast<std::size_t>(r--)] = 0;
    if (r < 0) break;
  }

  RejectionResult out;
  out.bound = 1.001 * grid_max;
  out.trials = n_trials;
  if (!(out.bound > 0.0)) throw OracleError("variance vanishes on the whole grid");
  UniformStream stream(seed);
  std::vector<Eigen::VectorXd> accepted;
  for (int i = 0; i < n_trials; ++i) {
    for (int r = 0; r < D; ++r) x[r] = stream.next();
    const double v = variance(x);
    if (v > out.bound) ++out.bound_violations;
    if (stream.next() * out.bound < v) accepted.push_back(x);
  }
  if (accepted.empty()) throw OracleError("no proposal accepted in " + std::to_string(n_trials) + " trials");
  out.accepted.resize(static_cast<Eigen::Index>(accepted.size()), D);
  for (std::size_t i = 0; i < accepted.size(); ++i) out.accepted.row(static_cast<Eigen::Index>(i)) = accepted[i].transpose();
  out.acceptance_rate = static_cast<double>(accepted.size()) / n_trials;
  return out;
}

JointDensityCheck joint_density_check(const Eigen::Ref<const Eigen::MatrixXd>& points_by_row,
                                      const KernelSpec& spec) {
  const int n = static_cast<int>(points_by_row.rows());
  JointDensityCheck out;
  if (n == 0) {
    out.chain_product = out.determinant = 1.0;
    return out;
  }
  const DenseVariance kernel(spec.family(), spec.lengthscales(), points_by_row.topRows(0), 0.0);
  Eigen::MatrixXd K(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      double k = 1.0;
      for (int d = 0; d < spec.dim(); ++d) k *= kernel.kernel_1d(d, points_by_row(a, d), points_by_row(b, d));
      K(a, b) = k;
    }
  }

  double chain = 1.0;
  for (int i = 0; i < n; ++i) {
    double v = K(i, i);
    if (i > 0) {
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K.topLeftCorner(i, i));
      const Eigen::VectorXd kx = K.col(i).head(i);
      v -= kx.dot(lu.solve(kx));
    }
    if (!(v > 0.0)) {
      out.defined = false;
      out.diagnosis = "conditional variance of point " + std::to_string(i + 1) + " is " +
                      std::to_string(v) + "; Gram matrix is numerically singular";
    }
    chain *= v;
  }
  out.chain_product = chain;
  out.determinant = Eigen::PartialPivLU<Eigen::MatrixXd>(K).determinant();
  if (!(out.determinant > 0.0)) {
    out.defined = false;
    if (out.diagnosis.empty()) out.diagnosis = "Gram determinant is not positive";
  }
  out.relative_gap = out.defined ? std::fabs(out.chain_product - out.determinant) / out.determinant
                                 : std::numeric_limits<double>::quiet_NaN();
  return out;
}

CoverageReport coverage_metrics(const Eigen::Ref<const Eigen::MatrixXd>& points_by_row) {
  const int n = static_cast<int>(points_by_row.rows());
  const int D = static_cast<int>(points_by_row.cols());
  if (n < 2) throw OracleError("coverage metrics need at least two points");
  CoverageReport out;
  out.size = n;
  out.nn_distances.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double dist = (points_by_row.row(a) - points_by_row.row(b)).norm();
      auto& na = out.nn_distances[static_cast<std::size_t>(a)];
      auto& nb = out.nn_distances[static_cast<std::size_t>(b)];
      na = std::min(na, dist);
      nb = std::min(nb, dist);
    }
  }
  double sum = 0.0;
  out.min_nn = std::numeric_limits<double>::infinity();
  for (double v : out.nn_distances) {
    sum += v;
    out.min_nn = std::min(out.min_nn, v);
  }
  out.mean_nn = sum / n;
  for (int d = 0; d < D; ++d) {
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) c[static_cast<std::size_t>(a)] = points_by_row(a, d);
    c.push_back(0.0);
    c.push_back(1.0);
    std::sort(c.begin(), c.end());
    double gap = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) gap = std::max(gap, c[i] - c[i - 1]);
    out.max_projection_gap.push_back(gap);
  }
  return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw OracleError("KS distance needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    best = std::max(best, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& expected) {
  if (observed.size() != expected.size() || observed.size() < 2) {
    throw OracleError("chi-square test needs matching bins (at least two)");
  }
  ChiSquareResult out;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (!(expected[i] > 0.0)) throw OracleError("expected bin count must be positive");
    const double diff = observed[i] - expected[i];
    out.statistic += diff * diff / expected[i];
  }
  out.dof = static_cast<int>(observed.size()) - 1;
  out.p_value = boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic);
  return out;
}

}  // namespace exactdpp::oracle
