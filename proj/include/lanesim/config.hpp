#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "lanesim/sim.hpp"

namespace lanesim {

using json = nlohmann::json;

[[nodiscard]] json to_json(const HsvThreshold& t);
[[nodiscard]] HsvThreshold threshold_from_json(const json& j);

[[nodiscard]] json to_json(const IlluminationPreset& p);
[[nodiscard]] IlluminationPreset preset_from_json(const json& j, IlluminationPreset base);

/// Effective simulation config, including the resolved preset.
[[nodiscard]] json to_json(const SimConfig& cfg);

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
[[nodiscard]] std::string config_hash(const SimConfig& cfg);
[[nodiscard]] std::string fnv1a_hex(std::string_view bytes);

/// Full application config: simulation settings, the named preset table and
/// dataset locations. Loaded from JSON; absent keys keep their defaults.
struct AppConfig {
  SimConfig sim;
  std::string preset_name = "low";
  std::map<std::string, IlluminationPreset> presets{{"low", IlluminationPreset::low()},
                                                    {"high", IlluminationPreset::high()}};
  std::string dataset_root;
  std::string manifest_path;

  /// Re-resolves sim.preset from preset_name and validates everything.
  void finalize();

  static AppConfig from_json(const json& j);
  static AppConfig load(const std::filesystem::path& path);
  [[nodiscard]] json to_json() const;
};

}  // namespace lanesim
