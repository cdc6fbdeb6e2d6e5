#include "exactdpp/point_set.hpp"

#include <stdexcept>
#include <string>

namespace exactdpp {

std::string_view to_string(SampleMethod method) {
  switch (method) {
    case SampleMethod::Exact:
      return "exact";
    case SampleMethod::Nystrom:
      return "nystrom";
    case SampleMethod::Spectral:
      return "spectral";
    case SampleMethod::Uniform:
      return "uniform";
    case SampleMethod::Rejection:
      return "rejection";
  }
  return "?";
}

SampleMethod parse_sample_method(std::string_view name) {
  for (auto m : {SampleMethod::Exact, SampleMethod::Nystrom, SampleMethod::Spectral,
                 SampleMethod::Uniform, SampleMethod::Rejection}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

}  // namespace exactdpp
