#include "uavdc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uavdc/errors.hpp"
#include "uavdc/rng.hpp"

namespace uavdc {

namespace {

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

std::string indexed(std::string_view array, std::size_t i, std::string_view member) {
    return std::string(array) + "[" + std::to_string(i) + "]." + std::string(member);
}

// Point at fraction t in [0,1) of the field perimeter, walking
// counter-clockwise from the origin corner.
Point perimeter_point(FieldBound field, double t) {
    const double w = field.width;
    const double h = field.height;
    double s = t * 2.0 * (w + h);
    if (s < w) return {s, 0.0};
    s -= w;
    if (s < h) return {w, s};
    s -= h;
    if (s < w) return {w - s, h};
    s -= w;
    return {0.0, std::max(0.0, h - s)};
}

}  // namespace

void validate(const Scenario& s) {
    if (!(s.field.width > 0.0) || !std::isfinite(s.field.width)) throw ValidationError("field.w", "must be positive");
    if (!(s.field.height > 0.0) || !std::isfinite(s.field.height)) throw ValidationError("field.h", "must be positive");
    if (s.sensors.empty()) throw ValidationError("sensors", "at least one sensor is required");
    if (s.uavs.empty()) throw ValidationError("uavs", "at least one UAV is required");
    if (!(s.takeoff_landing_s >= 0.0) || !std::isfinite(s.takeoff_landing_s))
        throw ValidationError("t0", "must be a non-negative number of seconds");
    if (!(s.dwell_s >= 0.0) || !std::isfinite(s.dwell_s))
        throw ValidationError("dwell", "must be a non-negative number of seconds");
    if (!finite(s.end) || !s.field.contains(s.end)) throw ValidationError("end", "lies outside the field");

    for (std::size_t i = 0; i < s.sensors.size(); ++i) {
        const Sensor& sensor = s.sensors[i];
        if (sensor.id != static_cast<int>(i) + 1)
            throw ValidationError(indexed("sensors", i, "id"), "ids must be contiguous starting at 1");
        if (!finite(sensor.position) || !s.field.contains(sensor.position))
            throw ValidationError(indexed("sensors", i, "position"), "lies outside the field");
        if (!(sensor.priority >= 1.0 && sensor.priority <= 100.0))
            throw ValidationError(indexed("sensors", i, "priority"),
                                  "priority " + std::to_string(sensor.priority) + " is outside [1, 100]");
    }
    for (std::size_t i = 0; i < s.uavs.size(); ++i) {
        const UavSpec& uav = s.uavs[i];
        if (uav.id != static_cast<int>(i) + 1)
            throw ValidationError(indexed("uavs", i, "id"), "ids must be contiguous starting at 1");
        if (!finite(uav.start) || !s.field.contains(uav.start))
            throw ValidationError(indexed("uavs", i, "position"), "start lies outside the field");
        if (!(uav.battery_s > 0.0) || !std::isfinite(uav.battery_s))
            throw ValidationError(indexed("uavs", i, "battery_s"), "must be positive");
        if (!(uav.speed_mps > 0.0) || !std::isfinite(uav.speed_mps))
            throw ValidationError(indexed("uavs", i, "speed_mps"), "must be positive");
        if (!(uav.energy_rate > 0.0) || !std::isfinite(uav.energy_rate))
            throw ValidationError(indexed("uavs", i, "energy_rate"), "must be positive");
    }
}

Scenario generate_scenario(int n, int q, FieldBound field, std::uint64_t seed, const GeneratorConfig& config) {
    if (n < 1) throw ValidationError("n", "sensor count must be at least 1");
    if (q < 1) throw ValidationError("q", "UAV count must be at least 1");
    if (!(field.width > 0.0) || !std::isfinite(field.width)) throw ValidationError("field.w", "must be positive");
    if (!(field.height > 0.0) || !std::isfinite(field.height)) throw ValidationError("field.h", "must be positive");
    if (config.blobs < 1) throw ValidationError("blobs", "must be at least 1");
    if (!(config.blob_sigma_fraction > 0.0)) throw ValidationError("blob_sigma_fraction", "must be positive");

    Rng rng(derive_seed(seed, "scenario"));
    const double sx = field.width * config.blob_sigma_fraction;
    const double sy = field.height * config.blob_sigma_fraction;

    std::vector<Point> centres(static_cast<std::size_t>(config.blobs));
    for (Point& c : centres) {
        const double mx = std::min(sx, field.width / 4.0);
        const double my = std::min(sy, field.height / 4.0);
        c.x = rng.uniform(mx, field.width - mx);
        c.y = rng.uniform(my, field.height - my);
    }

    Scenario s;
    s.field = field;
    s.seed = seed;
    s.takeoff_landing_s = config.takeoff_landing_s;
    s.dwell_s = config.dwell_s;
    s.sensors.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const Point& c = centres[rng.index(centres.size())];
        Sensor sensor;
        sensor.id = j + 1;
        sensor.position.x = std::clamp(rng.normal(c.x, sx), 0.0, field.width);
        sensor.position.y = std::clamp(rng.normal(c.y, sy), 0.0, field.height);
        sensor.priority = rng.uniform(1.0, 100.0);
        s.sensors.push_back(sensor);
    }

    s.uavs.reserve(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) {
        UavSpec uav;
        uav.id = i + 1;
        uav.start = perimeter_point(field, (i + 0.5) / q);
        uav.battery_s = config.battery_s;
        uav.energy_rate = config.energy_rate;
        uav.speed_mps = config.speed_mps;
        s.uavs.push_back(uav);
    }
    s.end = {field.width / 2.0, field.height / 2.0};

    validate(s);
    return s;
}

DistanceMatrix::DistanceMatrix(const Scenario& scenario)
    : sensors_(scenario.sensors.size()), dim_(scenario.sensors.size() + scenario.uavs.size() + 1) {
    std::vector<Point> nodes;
    nodes.reserve(dim_);
    for (const Sensor& s : scenario.sensors) nodes.push_back(s.position);
    for (const UavSpec& u : scenario.uavs) nodes.push_back(u.start);
    nodes.push_back(scenario.end);

    entries_.assign(dim_ * dim_, 0.0);
    for (std::size_t a = 0; a < dim_; ++a) {
        for (std::size_t b = a + 1; b < dim_; ++b) {
            const double d = distance(nodes[a], nodes[b]);
            entries_[a * dim_ + b] = d;
            entries_[b * dim_ + a] = d;
        }
    }
}

DistanceMatrix distance_matrix(const Scenario& scenario) { return DistanceMatrix(scenario); }

nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json doc;
    doc["schema_version"] = kScenarioSchemaVersion;
    doc["field"] = {{"w", s.field.width}, {"h", s.field.height}};
    doc["t0"] = s.takeoff_landing_s;
    doc["dwell"] = s.dwell_s;
    doc["seed"] = s.seed;
    auto& sensors = doc["sensors"] = nlohmann::json::array();
    for (const Sensor& sensor : s.sensors)
        sensors.push_back({{"id", sensor.id}, {"x", sensor.position.x}, {"y", sensor.position.y}, {"rho", sensor.priority}});
    auto& uavs = doc["uavs"] = nlohmann::json::array();
    for (const UavSpec& u : s.uavs)
        uavs.push_back({{"id", u.id},
                        {"x", u.start.x},
                        {"y", u.start.y},
                        {"battery_s", u.battery_s},
                        {"speed_mps", u.speed_mps},
                        {"energy_rate", u.energy_rate}});
    doc["end"] = {{"x", s.end.x}, {"y", s.end.y}};
    return doc;
}

namespace {

const nlohmann::json& member(const nlohmann::json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(0, path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(0, path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

double number(const nlohmann::json& obj, const std::string& key, const std::string& path) {
    const auto& v = member(obj, key, path);
    if (!v.is_number()) throw ParseError(0, path.empty() ? key : path + "." + key, "expected a number");
    return v.get<double>();
}

int integer(const nlohmann::json& obj, const std::string& key, const std::string& path) {
    const auto& v = member(obj, key, path);
    if (!v.is_number_integer()) throw ParseError(0, path.empty() ? key : path + "." + key, "expected an integer");
    return v.get<int>();
}

const nlohmann::json& array(const nlohmann::json& obj, const std::string& key) {
    const auto& v = member(obj, key, "");
    if (!v.is_array()) throw ParseError(0, key, "expected an array");
    return v;
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ParseError(0, "", "scenario document must be an object");
    const int version = integer(doc, "schema_version", "");
    if (version != kScenarioSchemaVersion) throw SchemaVersionError(version, kScenarioSchemaVersion);

    Scenario s;
    const auto& field = member(doc, "field", "");
    s.field.width = number(field, "w", "field");
    s.field.height = number(field, "h", "field");
    s.takeoff_landing_s = number(doc, "t0", "");
    s.dwell_s = number(doc, "dwell", "");
    const auto& seed = member(doc, "seed", "");
    if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() && seed.get<std::int64_t>() < 0))
        throw ParseError(0, "seed", "expected a non-negative integer");
    s.seed = seed.get<std::uint64_t>();

    const auto& sensors = array(doc, "sensors");
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const std::string path = "sensors[" + std::to_string(i) + "]";
        Sensor sensor;
        sensor.id = integer(sensors[i], "id", path);
        sensor.position.x = number(sensors[i], "x", path);
        sensor.position.y = number(sensors[i], "y", path);
        sensor.priority = number(sensors[i], "rho", path);
        s.sensors.push_back(sensor);
    }
    const auto& uavs = array(doc, "uavs");
    for (std::size_t i = 0; i < uavs.size(); ++i) {
        const std::string path = "uavs[" + std::to_string(i) + "]";
        UavSpec u;
        u.id = integer(uavs[i], "id", path);
        u.start.x = number(uavs[i], "x", path);
        u.start.y = number(uavs[i], "y", path);
        u.battery_s = number(uavs[i], "battery_s", path);
        u.speed_mps = number(uavs[i], "speed_mps", path);
        u.energy_rate = number(uavs[i], "energy_rate", path);
        s.uavs.push_back(u);
    }
    const auto& end = member(doc, "end", "");
    s.end.x = number(end, "x", "end");
    s.end.y = number(end, "y", "end");

    validate(s);
    return s;
}

std::string serialize_scenario(const Scenario& scenario) { return scenario_to_json(scenario).dump(2) + "\n"; }

Scenario parse_scenario(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
        const std::size_t line =
            1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
        throw ParseError(line, "", e.what());
    }
    return scenario_from_json(doc);
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
    validate(scenario);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << serialize_scenario(scenario);
    if (!out) throw Error("failed writing " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open scenario file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

}  // namespace uavdc
