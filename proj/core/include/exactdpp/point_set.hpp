#pragma once

#include "exactdpp/kernels.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string_view>

namespace exactdpp {

enum class SampleMethod { Exact, Nystrom, Spectral, Uniform, Rejection };

std::string_view to_string(SampleMethod method);
SampleMethod parse_sample_method(std::string_view name);

/// Drawn points (one row per point, unit-cube coordinates) plus everything
/// needed to reproduce the run.
struct PointSet {
  Eigen::MatrixXd points;
  SampleMethod method = SampleMethod::Exact;
  std::uint64_t seed = 0;
  /// Absent for uniform draws, which do not depend on a kernel.
  std::optional<KernelSpec> kernel;
  double epsilon = 1e-12;
  double jitter = 1e-10;
  /// Feature count for the low-rank methods.
  std::optional<int> rank;

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
};

}  // namespace exactdpp
