#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vanetagg/sim/engine.hpp"
#include "vanetagg/sim/scenario.hpp"

namespace vanetagg::sim {

struct Interval {
  double low;
  double high;
};

// Wilson score interval for k successes in n trials at z (1.96 for 95%).
Interval wilson(std::size_t k, std::size_t n, double z = 1.96);

struct CellSummary {
  std::uint32_t vehicle_count = 0;
  double density_per_km2 = 0;
  std::uint32_t r = 0;
  std::uint32_t t = 0;
  std::size_t runs = 0;
  std::size_t initiated = 0;
  std::size_t succeeded = 0;
  double validation_probability = 0;  // succeeded / initiated
  Interval validation_ci{0, 0};
  // Means over successful runs, in milliseconds; absent without successes.
  std::optional<double> aggregation_delay_ms;
  std::optional<double> crypto_time_ms;
  std::optional<double> non_crypto_delay_ms;
  double mean_replies = 0;  // over initiated runs
};

using RunCallback = std::function<void(const CellSummary& cell, std::uint32_t run, const SimMetrics& m)>;

// Cells in order vehicle_count, r, t (t fastest). Run i of a cell uses
// run_seed(base.seed, vehicle_count, i).
std::vector<CellSummary> sweep(const SweepSpec& spec, const RunCallback& on_run = {});

CellSummary summarize(const SimScenario& cell, const std::vector<SimMetrics>& runs);

// Tidy rows: vehicle_count,density_per_km2,ring_size,threshold,metric,value.
void write_csv(std::ostream& out, const std::vector<CellSummary>& cells);
void write_jsonl(std::ostream& out, const std::vector<CellSummary>& cells);

struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
};

// Ordinary least squares; needs two or more distinct x values.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace vanetagg::sim
