#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vanetagg::sim {

// Simulator randomness: mt19937_64 streams keyed by a list of integers. The
// draw helpers avoid std distributions, whose algorithms differ between
// standard libraries, so runs replay across toolchains.
class Stream {
 public:
  explicit Stream(std::initializer_list<std::uint64_t> key);

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  // Uniform in [0, bound); bound must be nonzero.
  std::uint64_t below(std::uint64_t bound);
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

// Seed for run `run` of a cell with `vehicle_count` vehicles. Independent of
// r and t so cells that differ only in those share their random worlds.
std::uint64_t run_seed(std::uint64_t base_seed, std::uint32_t vehicle_count, std::uint32_t run);

}  // namespace vanetagg::sim
