#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vanetagg::sim {

enum class CryptoMode { kModeled, kReal };

std::string_view to_string(CryptoMode m);

// Crypto cost charged to the simulated clock, in seconds, linear in the
// number of forged members (r - t), ring members (r) or replies (t - 1).
// Defaults were fitted by `vanetagg bench --fit-costs` (P-256, one core of
// the reference machine).
struct CostModel {
  double request_base = 0.00037;
  double request_per_fake = 0.00023;
  double reply_base = 0.00013;
  double reply_per_fake = 0.00028;
  double validate_base = 0.00027;
  double finalize_base = 0.00071;
  double finalize_per_member = 0.00027;

  double request(std::uint32_t t, std::uint32_t r) const { return request_base + request_per_fake * (r - t); }
  double reply(std::uint32_t t, std::uint32_t r) const { return reply_base + reply_per_fake * (r - t); }
  double validate() const { return validate_base; }
  // Assembly re-validates the t - 1 fractions, then verifies the ring.
  double finalize(std::uint32_t t, std::uint32_t r) const {
    return finalize_base + finalize_per_member * r + validate_base * (t - 1);
  }
};

// One simulation cell. Lengths in meters, times in seconds.
struct SimScenario {
  double area_width = 2400;
  double area_height = 2400;
  std::uint32_t grid_blocks = 6;
  std::uint32_t vehicle_count = 150;
  double mean_speed_kmh = 60;
  double comm_range = 300;
  double duration = 200;
  std::uint32_t r = 20;
  std::uint32_t t = 3;

  // Per-hop latency = base_latency + 8 * bytes / bitrate_bps + U(0, latency_jitter).
  double base_latency = 0.001;
  double bitrate_bps = 6e6;
  double latency_jitter = 0.0005;
  double loss_rate = 0;
  // A replier waits U(0, reply_backoff) before transmitting its reply.
  double reply_backoff = 0.05;

  double detection_radius = 200;
  double honest_fraction = 1.0;
  double session_timeout = 120;
  bool variant_keys = false;
  bool encrypt_replies = false;

  std::uint64_t seed = 1;
  CryptoMode crypto_mode = CryptoMode::kModeled;
  CostModel costs;

  double density_per_km2() const { return vehicle_count / (area_width * area_height / 1e6); }
};

// Throws kConfigError on nonpositive dimensions, comm_range >= min(area),
// probabilities outside [0, 1] or t > r.
void validate(const SimScenario& s);

// A sweep: the scenario with list-valued vehicle_count, r and t plus the
// number of runs per cell.
struct SweepSpec {
  SimScenario base;
  std::vector<std::uint32_t> vehicle_counts{150};
  std::vector<std::uint32_t> ring_sizes{20};
  std::vector<std::uint32_t> thresholds{3};
  std::uint32_t runs = 100;
};

// Parses `key = value` lines; `#` starts a comment. vehicle_count, r and t
// accept lists ("50, 150, 250") and ranges ("2..8"). Unknown keys, bad values
// and repeated keys throw kConfigError.
SweepSpec parse_sweep(std::string_view text);
SweepSpec load_sweep(const std::string& path);

// "2..8" or "50, 150, 250" (kConfigError on anything else).
std::vector<std::uint32_t> parse_count_list(std::string_view text);
// Inverse of parse_sweep, one key per line.
std::string format_sweep(const SweepSpec& spec);

}  // namespace vanetagg::sim
