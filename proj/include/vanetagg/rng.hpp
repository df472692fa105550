#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "vanetagg/bytes.hpp"

namespace vanetagg {

// Seedable deterministic random stream (SHA-256 in counter mode). All
// randomized protocol steps take one of these so runs are reproducible from
// a seed; production callers use from_entropy().
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);
  explicit Rng(ByteView seed_material);
  static Rng from_entropy();

  // Child stream whose output is independent of this stream's future output.
  Rng fork(std::string_view label);

  void fill(std::span<std::uint8_t> out);
  result_type operator()();
  // Uniform in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound);
  // Uniform in [0, 1).
  double unit();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  void refill();

  std::array<std::uint8_t, 32> key_{};
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> block_{};
  std::size_t used_ = block_.size();
};

}  // namespace vanetagg
