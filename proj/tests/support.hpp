#pragma once

#include "exactdpp/oracle.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testing_support {

struct Rng {
  explicit Rng(unsigned long long seed) : engine(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
  std::mt19937_64 engine;
};

// Composite Gauss-Legendre over [a, b] with extra breakpoints at kinks.
inline double integrate(const std::function<double(double)>& f, double a, double b, std::vector<double> kinks = {},
                        int panels_per_unit = 200) {
  std::vector<double> cuts{a, b};
  for (double k : kinks) {
    if (k > a && k < b) cuts.push_back(k);
  }
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    sum += exactdpp::oracle::gauss_legendre(f, cuts[i], cuts[i + 1],
                                            std::max(2, static_cast<int>(std::ceil(len * panels_per_unit))));
  }
  return sum;
}

inline Eigen::MatrixXd random_rows(Rng& rng, int n, int dim) {
  Eigen::MatrixXd X(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) X(i, d) = rng.uniform();
  }
  return X;
}

}  // namespace testing_support
