#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace uavdc {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    return std::sqrt(dx * dx + dy * dy);
}

/// A collection point. Ids run 1..n within a scenario.
struct Sensor {
    int id = 0;
    Point position;
    double priority = 1.0;  // in [1, 100]

    friend bool operator==(const Sensor&, const Sensor&) = default;
};

struct UavSpec {
    int id = 0;
    Point start;
    double battery_s = 3600.0;   // budget, seconds of flight at energy_rate 1
    double energy_rate = 1.0;    // energy consumed per elapsed second
    double speed_mps = 1.0;      // constant ground speed

    friend bool operator==(const UavSpec&, const UavSpec&) = default;
};

struct FieldBound {
    double width = 0.0;
    double height = 0.0;

    bool contains(Point p) const { return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height; }

    friend bool operator==(const FieldBound&, const FieldBound&) = default;
};

/// Full problem instance. Immutable once validated.
struct Scenario {
    std::vector<Sensor> sensors;
    std::vector<UavSpec> uavs;
    Point end;
    FieldBound field;
    double takeoff_landing_s = 0.0;  // charged once at takeoff and once at landing
    double dwell_s = 0.0;            // hover time per collected sensor
    std::uint64_t seed = 0;

    std::size_t sensor_count() const { return sensors.size(); }
    std::size_t uav_count() const { return uavs.size(); }

    const Sensor& sensor(int id) const { return sensors.at(static_cast<std::size_t>(id - 1)); }
    const UavSpec& uav(int id) const { return uavs.at(static_cast<std::size_t>(id - 1)); }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws ValidationError naming the first violated field.
void validate(const Scenario& scenario);

/// Knobs of the synthetic scenario generator.
struct GeneratorConfig {
    int blobs = 6;
    double blob_sigma_fraction = 1.0 / 12.0;  // blob stddev as a fraction of the field size
    double battery_s = 3600.0;
    double energy_rate = 1.0;
    double speed_mps = 10.0;
    double takeoff_landing_s = 15.0;
    double dwell_s = 80.0;
};

/// Clustered (Gaussian-mixture) sensor field with U(1,100) priorities, UAV
/// starts spread evenly along the field boundary and a shared end position
/// at the field centre. Pure function of its arguments.
Scenario generate_scenario(int n, int q, FieldBound field, std::uint64_t seed, const GeneratorConfig& config = {});

/// Dense symmetric Euclidean distances over sensors, UAV starts and the end
/// position. Node layout: sensors [0, n), UAV starts [n, n+q), end n+q.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(const Scenario& scenario);

    std::size_t size() const { return dim_; }
    std::size_t sensor_count() const { return sensors_; }

    double operator()(std::size_t a, std::size_t b) const { return entries_[a * dim_ + b]; }

    std::size_t sensor_node(int sensor_id) const { return static_cast<std::size_t>(sensor_id - 1); }
    std::size_t start_node(int uav_id) const { return sensors_ + static_cast<std::size_t>(uav_id - 1); }
    std::size_t end_node() const { return dim_ - 1; }

    /// Distance between two sensors given by id.
    double between(int sensor_a, int sensor_b) const { return (*this)(sensor_node(sensor_a), sensor_node(sensor_b)); }

private:
    std::size_t sensors_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> entries_;
};

DistanceMatrix distance_matrix(const Scenario& scenario);

inline constexpr int kScenarioSchemaVersion = 1;

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

std::string serialize_scenario(const Scenario& scenario);
/// Parses and validates; throws ParseError, SchemaVersionError or ValidationError.
Scenario parse_scenario(std::string_view text);

void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace uavdc
