#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "vanetagg/sim/scenario.hpp"

namespace vanetagg::sim {

// Outcome of one simulated aggregation. Times in seconds, measured from the
// moment the Request Packet is sent.
struct SimMetrics {
  bool initiated = false;  // some vehicle detected the event before the end
  bool success = false;    // a verifying announcement within the timeout
  bool timed_out = false;
  double event_time = 0;
  double request_sent = 0;
  double aggregation_delay = 0;  // timeout for failed sessions
  double crypto_time = 0;        // crypto on the critical path
  double non_crypto_delay = 0;   // aggregation_delay - crypto_time
  std::uint32_t willing_receivers = 0;  // honest witnesses that got the request
  std::uint32_t replies_received = 0;   // at the initiator, before it finalized or gave up
  std::uint32_t replies_accepted = 0;

  friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

// Wire sizes (bytes, including the packet-type tag) matching encode_packet.
struct WireSizes {
  std::size_t request;
  std::size_t reply;
  std::size_t aggregation;
};

WireSizes wire_sizes(const SimScenario& s, std::size_t road_name_bytes);

// Pure function of the scenario, seed included.
SimMetrics run_scenario(const SimScenario& scenario);

// One CSV line (no newline) and its header, for per-run dumps.
std::string metrics_csv_header();
std::string metrics_csv_row(const SimMetrics& m);

}  // namespace vanetagg::sim
