#pragma once

#include <cstdint>
#include <random>

namespace exactdpp {

/// Reproducible stream of uniform variates on [0, 1).
///
/// The engine is std::mt19937_64 seeded with the 64-bit seed; each variate is
/// the top 53 bits of one engine output scaled by 2^-53. Both pieces are fully
/// specified, so a stream can be reproduced bit-for-bit in other languages.
/// Samplers consume exactly one variate per (sample, dimension) pair in
/// lexicographic order.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}

  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace exactdpp
