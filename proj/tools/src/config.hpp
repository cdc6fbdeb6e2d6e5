#pragma once

#include "exactdpp/kernels.hpp"
#include "exactdpp/point_set.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace exactdpp::cli {

/// Bad command-line input; reported with usage and exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Sample, Validate, Compare };

std::string_view to_string(Command command);
Command parse_command(std::string_view name);

struct RunConfig {
  Command command = Command::Sample;
  KernelFamily kernel = KernelFamily::SquareExponential;
  /// One entry per dimension after resolution.
  std::vector<double> lengthscales{0.1};
  int dim = 1;
  int num = 100;
  std::uint64_t seed = 0;
  /// Empty means the unit cube.
  std::vector<Interval> domain;
  SampleMethod method = SampleMethod::Exact;
  std::vector<int> ranks{10};
  double noise = 1e-6;
  std::string out;
  std::string format = "csv";
  double epsilon = 1e-12;
  double jitter = 1e-10;
  // compare
  int shared = 20;
  int replicates = 20;
  int grid = 1000;
  // validate
  double scale = 1.0;
};

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// "0.1" or "0.1,0.2,0.3".
std::vector<double> parse_real_list(std::string_view text);
/// "5,10,15"; an empty string gives an empty list.
std::vector<int> parse_int_list(std::string_view text);
/// "a,b x c,d ..." (spaces optional). A single interval is broadcast to every
/// dimension.
std::vector<Interval> parse_domain(std::string_view text, int dim);
std::string format_domain(const std::vector<Interval>& domain);

/// Checks ranges and broadcasts scalar lengthscales; throws UsageError.
void resolve(RunConfig& config);

KernelSpec make_spec(const RunConfig& config);

/// %.17g.
std::string format_real(double v);

}  // namespace exactdpp::cli
