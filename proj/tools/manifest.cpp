#include "manifest.hpp"

namespace vanetagg::cli {

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j = {{"command", command}, {"config", config}, {"seed", nullptr}, {"tool_version", tool_version},
                      {"outputs", outputs}};
  if (seed) j["seed"] = *seed;
  return j;
}

std::string manifest_path(const RunManifest& m) {
  return (m.outputs.empty() ? m.command : m.outputs.front()) + ".manifest.json";
}

}  // namespace vanetagg::cli
