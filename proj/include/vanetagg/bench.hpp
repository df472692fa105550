#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vanetagg/cpk.hpp"
#include "vanetagg/sim/scenario.hpp"

namespace vanetagg::bench {

struct Stat {
  double mean_ms = 0;
  double stddev_ms = 0;
  double median_ms = 0;
  // Least affected by preemption; the best estimate of intrinsic cost.
  double min_ms = 0;
};

// Wall-clock cost of each phase for one (t, r) cell.
struct PhaseTimings {
  std::uint32_t t = 0;
  std::uint32_t r = 0;
  std::size_t repetitions = 0;
  Stat request;        // build_request
  Stat reply;          // one reply with structural request checks
  Stat reply_checked;  // one reply that also verifies every forgery
  Stat validate;       // one fraction checked by the initiator
  Stat finalize;       // assemble plus the self-check
  Stat verify;         // verify_ring by a receiver
};

struct BenchConfig {
  std::vector<std::uint32_t> ring_sizes{20};
  std::vector<std::uint32_t> thresholds{2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t repetitions = 30;
  std::size_t warmup = 2;
  // Verification is repeated on the same ring and the median kept.
  std::size_t verify_repeats = 3;
  std::uint64_t seed = 1;
};

// Cells are visited round-robin within each repetition so that slow drift in
// machine speed spreads evenly over the grid. Cells with r - t < 6 are skipped.
std::vector<PhaseTimings> run(const cpk::KeySetup& keys, const BenchConfig& config);

void write_csv(std::ostream& out, const std::vector<PhaseTimings>& cells);

// Least-squares fit of the simulator's cost model to measured medians. Needs
// cells with at least two ring sizes and two thresholds.
sim::CostModel fit_costs(const std::vector<PhaseTimings>& cells);

}  // namespace vanetagg::bench
