#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "uavdc/route_eval.hpp"
#include "uavdc/scenario.hpp"

namespace uavdc {

inline constexpr int kPlanSchemaVersion = 1;

nlohmann::json plan_to_json(const Plan& plan);
/// Throws ParseError / SchemaVersionError; the result is checked against the scenario.
Plan plan_from_json(const nlohmann::json& doc, const Scenario& scenario);
std::string serialize_plan(const Plan& plan);

/// Route plot: sensors scaled by priority, one coloured polyline per UAV,
/// square start markers and a diamond at the end position. Abandoned
/// sensors are drawn hollow.
std::string render_svg(const Plan& plan, const Scenario& scenario);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace uavdc
