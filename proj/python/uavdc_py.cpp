#include <optional>
#include <string>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "uavdc/clustering.hpp"
#include "uavdc/config.hpp"
#include "uavdc/errors.hpp"
#include "uavdc/planner.hpp"
#include "uavdc/report.hpp"
#include "uavdc/scenario.hpp"

namespace py = pybind11;
using namespace uavdc;

namespace {

// Python objects cross the boundary as JSON so the C++ side keeps a single
// source of truth for every document layout.
py::object to_python(const nlohmann::json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

nlohmann::json from_python(const py::object& obj) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

RunConfig resolve_config(const std::optional<py::dict>& overrides) {
    RunConfig config;
    if (overrides) apply_config(config, from_python(*overrides));
    return config;
}

nlohmann::json metrics_json(const UavMetrics& m) {
    return {{"uav_id", m.uav_id},     {"cost", m.cost},         {"duration", m.duration},
            {"time_difference", m.time_difference}, {"visited", m.visited}, {"distance", m.distance},
            {"time_violation", m.time_violation}};
}

nlohmann::json result_json(const PlanResult& r) {
    nlohmann::json per_uav = nlohmann::json::array();
    for (const UavMetrics& m : r.metrics.per_uav) per_uav.push_back(metrics_json(m));
    nlohmann::json traces = nlohmann::json::array();
    for (const UavTrace& t : r.traces) {
        nlohmann::json best = nlohmann::json::array();
        for (const TraceRow& row : t.rows) best.push_back(row.best_cost);
        traces.push_back({{"uav_id", t.uav_id}, {"stage", t.stage}, {"best_cost", best}});
    }
    return {{"plan", plan_to_json(r.plan)},
            {"metrics", {{"per_uav", per_uav}, {"fleet", metrics_json(r.metrics.fleet)}}},
            {"cost",
             {{"total", r.cost.total()},
              {"duration_term", r.cost.duration_term},
              {"abandon_term", r.cost.abandon_term},
              {"violation_term", r.cost.violation_term},
              {"slack_term", r.cost.slack_term}}},
            {"cluster_labels", r.clusters.labels},
            {"cluster_objective", r.clusters.objective_value},
            {"cluster_uav", r.cluster_uav},
            {"traces", traces}};
}

}  // namespace

PYBIND11_MODULE(uavdc, m) {
    m.doc() = "UAV sensor data-collection mission planner";

    auto base = py::register_exception<Error>(m, "UavdcError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<InfeasibleScenarioError>(m, "InfeasibleScenarioError", base.ptr());

    py::class_<Scenario>(m, "Scenario")
        .def_property_readonly("n", &Scenario::sensor_count)
        .def_property_readonly("q", &Scenario::uav_count)
        .def_property_readonly("seed", [](const Scenario& s) { return s.seed; })
        .def_property_readonly("field", [](const Scenario& s) { return py::make_tuple(s.field.width, s.field.height); })
        .def_property_readonly("priorities",
                               [](const Scenario& s) {
                                   std::vector<double> out;
                                   for (const Sensor& sensor : s.sensors) out.push_back(sensor.priority);
                                   return out;
                               })
        .def_property_readonly("positions",
                               [](const Scenario& s) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const Sensor& sensor : s.sensors) out.emplace_back(sensor.position.x, sensor.position.y);
                                   return out;
                               })
        .def("to_json", &serialize_scenario)
        .def("to_dict", [](const Scenario& s) { return to_python(scenario_to_json(s)); })
        .def_static("from_json", &parse_scenario, py::arg("text"))
        .def_static("from_dict",
                    [](const py::dict& doc) { return parse_scenario(from_python(doc).dump()); }, py::arg("doc"))
        .def("save", [](const Scenario& s, const std::filesystem::path& p) { save_scenario(s, p); }, py::arg("path"))
        .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; })
        .def("__repr__", [](const Scenario& s) {
            return "<Scenario n=" + std::to_string(s.sensor_count()) + " q=" + std::to_string(s.uav_count()) + ">";
        });

    m.def(
        "generate_scenario",
        [](int n, int q, double field, std::optional<double> field_height, std::uint64_t seed,
           const std::optional<py::dict>& config) {
            const RunConfig c = resolve_config(config);
            return generate_scenario(n, q, {field, field_height.value_or(field)}, seed, c.generator);
        },
        py::arg("n") = 128, py::arg("q") = 4, py::arg("field") = 3400.0, py::arg("field_height") = py::none(),
        py::arg("seed") = 1, py::arg("config") = py::none());

    m.def("load_scenario", [](const std::filesystem::path& p) { return load_scenario(p); }, py::arg("path"));

    m.def(
        "plan",
        [](const Scenario& s, const std::string& mode, std::uint64_t seed, const std::optional<py::dict>& config) {
            RunConfig c = resolve_config(config);
            c.planner.mode = parse_plan_mode(mode);
            c.planner.seed = seed;
            PlanResult r;
            {
                py::gil_scoped_release release;
                r = plan_mission(s, c.planner);
            }
            return to_python(result_json(r));
        },
        py::arg("scenario"), py::arg("mode") = "collaborative", py::arg("seed") = 1, py::arg("config") = py::none());

    m.def(
        "compare",
        [](const Scenario& s, std::uint64_t seed, const std::optional<py::dict>& config) {
            RunConfig c = resolve_config(config);
            c.planner.seed = seed;
            ComparisonReport r;
            {
                py::gil_scoped_release release;
                r = compare_modes(s, c.planner);
            }
            nlohmann::json doc{{"non_collaborative", result_json(r.non_collaborative)},
                               {"collaborative", result_json(r.collaborative)},
                               {"visited_ratio_non_collaborative", r.visited_ratio_non_collaborative},
                               {"visited_ratio_collaborative", r.visited_ratio_collaborative},
                               {"cost_reduction", r.cost_reduction},
                               {"csv_header", comparison_csv_header()},
                               {"csv_row", comparison_csv_row("seed-" + std::to_string(seed), r)}};
            return to_python(doc);
        },
        py::arg("scenario"), py::arg("seed") = 1, py::arg("config") = py::none());

    m.def(
        "cluster",
        [](const Scenario& s, int k, int restarts, std::uint64_t seed) {
            const DistanceMatrix dm(s);
            const ClusterAssignment a = cluster_sensors(s, dm, k, restarts, seed);
            return py::make_tuple(a.labels, a.objective_value);
        },
        py::arg("scenario"), py::arg("k"), py::arg("restarts") = 50, py::arg("seed") = 1,
        "Returns (labels, objective) with labels in 1..k.");

    m.def(
        "clustering_objective",
        [](const Scenario& s, const std::vector<int>& labels, int k) {
            return clustering_objective(labels, k, s, DistanceMatrix(s));
        },
        py::arg("scenario"), py::arg("labels"), py::arg("k"));

    m.def(
        "optimize",
        [](const std::function<double(const std::vector<double>&)>& fn, std::size_t dim, std::uint64_t seed,
           int population_size, int max_generations, double mutation_factor, double crossover_factor,
           const std::string& donor_mode) {
            DeConfig config;
            config.seed = seed;
            config.population_size = population_size;
            config.max_generations = max_generations;
            config.mutation_factor = mutation_factor;
            config.crossover_factor = crossover_factor;
            config.donor_mode = parse_donor_mode(donor_mode);
            const OptimizeResult r = optimize(
                [&fn](std::span<const double> x) { return fn(std::vector<double>(x.begin(), x.end())); }, config, dim);
            std::vector<double> history;
            for (const GenerationRecord& g : r.trace.generations) history.push_back(g.best_fitness);
            return py::make_tuple(r.best, r.best_fitness, history);
        },
        py::arg("fitness"), py::arg("dim"), py::arg("seed") = 1, py::arg("population_size") = 60,
        py::arg("max_generations") = 300, py::arg("mutation_factor") = 0.7, py::arg("crossover_factor") = 0.9,
        py::arg("donor_mode") = "base-r3",
        "Minimises fitness over [0, 1]^dim. Returns (best, best_fitness, per-generation best).");

    m.def("resolved_config", [](const std::optional<py::dict>& config) { return to_python(config_to_json(resolve_config(config))); },
          py::arg("config") = py::none());
}
