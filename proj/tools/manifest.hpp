#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace vanetagg::cli {

// Sidecar written next to every output: enough to regenerate the outputs.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::optional<std::uint64_t> seed;  // null for entropy-seeded runs
  std::string tool_version;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
};

// "<first output>.manifest.json".
std::string manifest_path(const RunManifest& m);

}  // namespace vanetagg::cli
