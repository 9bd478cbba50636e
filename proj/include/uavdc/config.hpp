#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "uavdc/planner.hpp"
#include "uavdc/scenario.hpp"

namespace uavdc {

/// Everything a run can be configured with, grouped the way config files
/// are: [de], [weights], [planner], [generator].
struct RunConfig {
    PlannerConfig planner;
    GeneratorConfig generator;
};

/// Parses the TOML subset used by config files: `[table]` headers,
/// `key = value` with integer, float, boolean or basic-string values, and
/// `#` comments. Throws ParseError with the offending line.
nlohmann::json parse_toml(std::string_view text);

/// Overlays `doc` onto `config`. Unknown tables or keys and ill-typed values
/// throw ConfigError naming the key.
void apply_config(RunConfig& config, const nlohmann::json& doc);

/// `.toml` files go through parse_toml, anything else is read as JSON.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Fully resolved configuration in the same layout apply_config accepts.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace uavdc
