#include "vanetagg/sim/sweep.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "vanetagg/error.hpp"
#include "vanetagg/sim/random.hpp"

namespace vanetagg::sim {

Interval wilson(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0, 1};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1 + z2 / nn;
  const double centre = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

CellSummary summarize(const SimScenario& cell, const std::vector<SimMetrics>& runs) {
  CellSummary c;
  c.vehicle_count = cell.vehicle_count;
  c.density_per_km2 = cell.density_per_km2();
  c.r = cell.r;
  c.t = cell.t;
  c.runs = runs.size();
  double delay = 0;
  double crypto = 0;
  double non_crypto = 0;
  double replies = 0;
  for (const auto& m : runs) {
    if (!m.initiated) continue;
    ++c.initiated;
    replies += m.replies_received;
    if (!m.success) continue;
    ++c.succeeded;
    delay += m.aggregation_delay;
    crypto += m.crypto_time;
    non_crypto += m.non_crypto_delay;
  }
  c.validation_probability = c.initiated ? static_cast<double>(c.succeeded) / c.initiated : 0.0;
  c.validation_ci = wilson(c.succeeded, c.initiated);
  c.mean_replies = c.initiated ? replies / c.initiated : 0.0;
  if (c.succeeded) {
    const double n = static_cast<double>(c.succeeded);
    c.aggregation_delay_ms = 1e3 * delay / n;
    c.crypto_time_ms = 1e3 * crypto / n;
    c.non_crypto_delay_ms = 1e3 * non_crypto / n;
  }
  return c;
}

std::vector<CellSummary> sweep(const SweepSpec& spec, const RunCallback& on_run) {
  std::vector<CellSummary> out;
  for (auto vehicles : spec.vehicle_counts) {
    for (auto r : spec.ring_sizes) {
      for (auto t : spec.thresholds) {
        SimScenario cell = spec.base;
        cell.vehicle_count = vehicles;
        cell.r = r;
        cell.t = t;
        validate(cell);
        std::vector<SimMetrics> runs;
        runs.reserve(spec.runs);
        for (std::uint32_t i = 0; i < spec.runs; ++i) {
          SimScenario run = cell;
          run.seed = run_seed(spec.base.seed, vehicles, i);
          runs.push_back(run_scenario(run));
        }
        out.push_back(summarize(cell, runs));
        if (on_run) {
          for (std::uint32_t i = 0; i < spec.runs; ++i) on_run(out.back(), i, runs[i]);
        }
      }
    }
  }
  return out;
}

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

struct Metric {
  const char* name;
  std::optional<double> value;
};

std::vector<Metric> metrics_of(const CellSummary& c) {
  return {
      {"runs", static_cast<double>(c.runs)},
      {"initiated", static_cast<double>(c.initiated)},
      {"succeeded", static_cast<double>(c.succeeded)},
      {"validation_probability", c.validation_probability},
      {"validation_ci_low", c.validation_ci.low},
      {"validation_ci_high", c.validation_ci.high},
      {"aggregation_delay_ms", c.aggregation_delay_ms},
      {"crypto_time_ms", c.crypto_time_ms},
      {"non_crypto_delay_ms", c.non_crypto_delay_ms},
      {"mean_replies", c.mean_replies},
  };
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "vehicle_count,density_per_km2,ring_size,threshold,metric,value\n";
  for (const auto& c : cells) {
    for (const auto& m : metrics_of(c)) {
      out << c.vehicle_count << ',' << num(c.density_per_km2) << ',' << c.r << ',' << c.t << ',' << m.name << ','
          << (m.value ? num(*m.value) : "nan") << '\n';
    }
  }
}

void write_jsonl(std::ostream& out, const std::vector<CellSummary>& cells) {
  for (const auto& c : cells) {
    for (const auto& m : metrics_of(c)) {
      nlohmann::json row = {{"vehicle_count", c.vehicle_count},
                            {"density_per_km2", c.density_per_km2},
                            {"ring_size", c.r},
                            {"threshold", c.t},
                            {"metric", m.name},
                            {"value", nullptr}};
      if (m.value) row["value"] = *m.value;
      out << row.dump() << '\n';
    }
  }
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::kInvalidArgument, "linear_fit needs matching samples");
  const double n = static_cast<double>(x.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0;
  double sxy = 0;
  double syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) fail(ErrorCode::kInvalidArgument, "linear_fit needs two distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace vanetagg::sim
