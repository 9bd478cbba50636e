#include "uavdc/report.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "uavdc/errors.hpp"

namespace uavdc {

nlohmann::json plan_to_json(const Plan& plan) {
    nlohmann::json doc;
    doc["schema_version"] = kPlanSchemaVersion;
    doc["mode"] = to_string(plan.mode);
    doc["seed"] = plan.seed;
    auto& routes = doc["routes"] = nlohmann::json::array();
    for (const Route& r : plan.routes)
        routes.push_back({{"uav_id", r.uav_id},
                          {"visit_order", r.visit_order},
                          {"arrival_times", r.arrival_times},
                          {"return_time", r.return_time},
                          {"total_distance", r.total_distance},
                          {"failed", r.failed}});
    doc["abandoned"] = plan.abandoned;
    doc["owner"] = plan.owner;
    return doc;
}

Plan plan_from_json(const nlohmann::json& doc, const Scenario& scenario) {
    Plan plan;
    try {
        const int version = doc.at("schema_version").get<int>();
        if (version != kPlanSchemaVersion) throw SchemaVersionError(version, kPlanSchemaVersion);
        plan.mode = parse_plan_mode(doc.at("mode").get<std::string>());
        plan.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& r : doc.at("routes")) {
            Route route;
            route.uav_id = r.at("uav_id").get<int>();
            route.visit_order = r.at("visit_order").get<std::vector<int>>();
            route.arrival_times = r.at("arrival_times").get<std::vector<double>>();
            route.return_time = r.at("return_time").get<double>();
            route.total_distance = r.at("total_distance").get<double>();
            route.failed = r.at("failed").get<bool>();
            plan.routes.push_back(std::move(route));
        }
        plan.abandoned = doc.at("abandoned").get<std::vector<int>>();
        plan.owner = doc.at("owner").get<std::vector<int>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, "plan", e.what());
    }
    check_plan(plan, scenario);
    return plan;
}

std::string serialize_plan(const Plan& plan) { return plan_to_json(plan).dump(2) + "\n"; }

std::string render_svg(const Plan& plan, const Scenario& scenario) {
    static constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                        "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
    const double w = scenario.field.width;
    const double h = scenario.field.height;
    const double unit = std::max(w, h) / 400.0;  // one "pixel" in field metres
    char buf[512];
    std::string out;
    // Field y grows upwards; SVG y grows downwards.
    const auto X = [](double x) { return x; };
    const auto Y = [h](double y) { return h - y; };

    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.3f %.3f\" width=\"800\" height=\"%.0f\">\n", w, h,
                  800.0 * h / w);
    out += buf;
    std::snprintf(buf, sizeof buf, "<rect x=\"0\" y=\"0\" width=\"%.3f\" height=\"%.3f\" fill=\"white\" stroke=\"black\" stroke-width=\"%.3f\"/>\n",
                  w, h, unit);
    out += buf;

    for (const Route& r : plan.routes) {
        const char* colour = palette[static_cast<std::size_t>(r.uav_id - 1) % palette.size()];
        out += "<polyline class=\"route\" data-uav=\"" + std::to_string(r.uav_id) + "\" fill=\"none\" stroke=\"" + colour + "\"";
        std::snprintf(buf, sizeof buf, " stroke-width=\"%.3f\"", 1.5 * unit);
        out += buf;
        if (r.failed) out += " stroke-dasharray=\"8 4\"";
        out += " points=\"";
        const Point start = scenario.uav(r.uav_id).start;
        std::snprintf(buf, sizeof buf, "%.3f,%.3f", X(start.x), Y(start.y));
        out += buf;
        for (const int id : r.visit_order) {
            const Point p = scenario.sensor(id).position;
            std::snprintf(buf, sizeof buf, " %.3f,%.3f", X(p.x), Y(p.y));
            out += buf;
        }
        std::snprintf(buf, sizeof buf, " %.3f,%.3f\"/>\n", X(scenario.end.x), Y(scenario.end.y));
        out += buf;
    }

    std::vector<const char*> fill(scenario.sensors.size(), "none");
    for (const Route& r : plan.routes)
        for (const int id : r.visit_order)
            fill[static_cast<std::size_t>(id - 1)] = palette[static_cast<std::size_t>(r.uav_id - 1) % palette.size()];
    for (const Sensor& s : scenario.sensors) {
        const double radius = unit * (1.5 + 0.04 * s.priority);
        const bool visited = std::string_view(fill[static_cast<std::size_t>(s.id - 1)]) != "none";
        std::snprintf(buf, sizeof buf,
                      "<circle class=\"sensor\" data-id=\"%d\" cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"%s\" stroke=\"%s\" stroke-width=\"%.3f\"/>\n",
                      s.id, X(s.position.x), Y(s.position.y), radius, fill[static_cast<std::size_t>(s.id - 1)],
                      visited ? "black" : "#888888", 0.3 * unit);
        out += buf;
    }

    for (const UavSpec& u : scenario.uavs) {
        const double side = 6.0 * unit;
        std::snprintf(buf, sizeof buf,
                      "<rect class=\"start\" data-uav=\"%d\" x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"%s\"/>\n",
                      u.id, X(u.start.x) - side / 2, Y(u.start.y) - side / 2, side, side,
                      palette[static_cast<std::size_t>(u.id - 1) % palette.size()]);
        out += buf;
    }
    const double d = 5.0 * unit;
    const double ex = X(scenario.end.x);
    const double ey = Y(scenario.end.y);
    std::snprintf(buf, sizeof buf, "<polygon class=\"end\" points=\"%.3f,%.3f %.3f,%.3f %.3f,%.3f %.3f,%.3f\" fill=\"black\"/>\n",
                  ex, ey - d, ex + d, ey, ex, ey + d, ex - d, ey);
    out += buf;
    out += "</svg>\n";
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace uavdc
