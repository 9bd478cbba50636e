#include "uavdc/config.hpp"

#include <cctype>
#include <string>

#include "uavdc/errors.hpp"
#include "uavdc/report.hpp"

namespace uavdc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_bare_key(std::string_view s) {
    if (s.empty()) return false;
    for (const char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

nlohmann::json parse_value(std::string_view raw, int line, const std::string& key) {
    if (raw.empty()) throw ParseError(line, key, "missing value");
    if (raw.front() == '"') {
        std::string out;
        std::size_t i = 1;
        for (; i < raw.size() && raw[i] != '"'; ++i) {
            if (raw[i] == '\\' && i + 1 < raw.size()) {
                const char e = raw[++i];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: throw ParseError(line, key, "unsupported escape");
                }
            } else {
                out += raw[i];
            }
        }
        if (i != raw.size() - 1) throw ParseError(line, key, "unterminated string");
        return out;
    }
    if (raw == "true") return true;
    if (raw == "false") return false;
    std::string digits;
    for (const char c : raw)
        if (c != '_') digits += c;
    const bool integral = digits.find_first_of(".eE") == std::string::npos && digits != "inf" && digits != "nan";
    try {
        std::size_t used = 0;
        if (integral) {
            const long long v = std::stoll(digits, &used);
            if (used == digits.size()) return v;
        } else {
            const double v = std::stod(digits, &used);
            if (used == digits.size()) return v;
        }
    } catch (const std::exception&) {
    }
    throw ParseError(line, key, "unsupported value '" + std::string(raw) + "'");
}

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(key + ": expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(key + ": expected a number");
        } else {
            if (!v.is_string()) throw ConfigError(key + ": expected a string");
        }
        return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

template <class F>
void each_key(const nlohmann::json& table, const std::string& name, F&& f) {
    if (!table.is_object()) throw ConfigError(name + ": expected a table");
    for (auto it = table.begin(); it != table.end(); ++it) {
        const std::string key = name + "." + it.key();
        if (!f(it.key(), it.value(), key)) throw ConfigError("unknown config key '" + key + "'");
    }
}

}  // namespace

nlohmann::json parse_toml(std::string_view text) {
    nlohmann::json doc = nlohmann::json::object();
    nlohmann::json* table = &doc;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        // Strip comments outside strings.
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
            if (line[i] == '#' && !in_string) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "", "malformed table header");
            const std::string name(trim(line.substr(1, line.size() - 2)));
            if (!is_bare_key(name)) throw ParseError(line_no, name, "unsupported table name");
            if (doc.contains(name)) throw ParseError(line_no, name, "duplicate table");
            doc[name] = nlohmann::json::object();
            table = &doc[name];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "", "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        if (!is_bare_key(key)) throw ParseError(line_no, key, "unsupported key");
        if (table->contains(key)) throw ParseError(line_no, key, "duplicate key");
        (*table)[key] = parse_value(trim(line.substr(eq + 1)), line_no, key);
    }
    return doc;
}

void apply_config(RunConfig& config, const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a table");
    DeConfig& de = config.planner.de;
    CostWeights& w = config.planner.weights;
    PlannerConfig& p = config.planner;
    GeneratorConfig& g = config.generator;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& section = it.key();
        const nlohmann::json& table = it.value();
        if (section == "de") {
            each_key(table, section, [&](const std::string& k, const nlohmann::json& v, const std::string& full) {
                if (k == "population_size") de.population_size = get_as<int>(v, full);
                else if (k == "max_generations") de.max_generations = get_as<int>(v, full);
                else if (k == "mutation_factor") de.mutation_factor = get_as<double>(v, full);
                else if (k == "crossover_factor") de.crossover_factor = get_as<double>(v, full);
                else if (k == "blend_noise_sigma") de.blend_noise_sigma = get_as<double>(v, full);
                else if (k == "donor_mode") {
                    try {
                        de.donor_mode = parse_donor_mode(get_as<std::string>(v, full));
                    } catch (const ValidationError& e) {
                        throw ConfigError(full + ": " + e.what());
                    }
                } else return false;
                return true;
            });
        } else if (section == "weights") {
            each_key(table, section, [&](const std::string& k, const nlohmann::json& v, const std::string& full) {
                if (k == "time") w.time = get_as<double>(v, full);
                else if (k == "abandon") w.abandon = get_as<double>(v, full);
                else if (k == "violation") w.violation = get_as<double>(v, full);
                else if (k == "slack") w.slack = get_as<double>(v, full);
                else return false;
                return true;
            });
        } else if (section == "planner") {
            each_key(table, section, [&](const std::string& k, const nlohmann::json& v, const std::string& full) {
                if (k == "mode") {
                    try {
                        p.mode = parse_plan_mode(get_as<std::string>(v, full));
                    } catch (const ValidationError& e) {
                        throw ConfigError(full + ": " + e.what());
                    }
                } else if (k == "cluster_restarts") p.cluster_restarts = get_as<int>(v, full);
                else if (k == "append_only") p.append_only = get_as<bool>(v, full);
                else if (k == "polish") p.polish = get_as<bool>(v, full);
                else if (k == "reassign_rounds") p.reassign_rounds = get_as<int>(v, full);
                else if (k == "threads") p.threads = get_as<int>(v, full);
                else return false;
                return true;
            });
        } else if (section == "generator") {
            each_key(table, section, [&](const std::string& k, const nlohmann::json& v, const std::string& full) {
                if (k == "blobs") g.blobs = get_as<int>(v, full);
                else if (k == "blob_sigma_fraction") g.blob_sigma_fraction = get_as<double>(v, full);
                else if (k == "battery_s") g.battery_s = get_as<double>(v, full);
                else if (k == "energy_rate") g.energy_rate = get_as<double>(v, full);
                else if (k == "speed_mps") g.speed_mps = get_as<double>(v, full);
                else if (k == "takeoff_landing_s") g.takeoff_landing_s = get_as<double>(v, full);
                else if (k == "dwell_s") g.dwell_s = get_as<double>(v, full);
                else return false;
                return true;
            });
        } else {
            throw ConfigError("unknown config table '" + section + "'");
        }
    }
    config.planner.validate();
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    nlohmann::json doc;
    if (path.extension() == ".toml") {
        doc = parse_toml(text);
    } else {
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(0, "config", e.what());
        }
    }
    apply_config(base, doc);
    return base;
}

nlohmann::json config_to_json(const RunConfig& config) {
    const DeConfig& de = config.planner.de;
    const CostWeights& w = config.planner.weights;
    const PlannerConfig& p = config.planner;
    const GeneratorConfig& g = config.generator;
    return {
        {"de",
         {{"population_size", de.population_size},
          {"max_generations", de.max_generations},
          {"mutation_factor", de.mutation_factor},
          {"crossover_factor", de.crossover_factor},
          {"blend_noise_sigma", de.blend_noise_sigma},
          {"donor_mode", to_string(de.donor_mode)}}},
        {"weights", {{"time", w.time}, {"abandon", w.abandon}, {"violation", w.violation}, {"slack", w.slack}}},
        {"planner",
         {{"mode", to_string(p.mode)},
          {"cluster_restarts", p.cluster_restarts},
          {"append_only", p.append_only},
          {"polish", p.polish},
          {"reassign_rounds", p.reassign_rounds},
          {"threads", p.threads}}},
        {"generator",
         {{"blobs", g.blobs},
          {"blob_sigma_fraction", g.blob_sigma_fraction},
          {"battery_s", g.battery_s},
          {"energy_rate", g.energy_rate},
          {"speed_mps", g.speed_mps},
          {"takeoff_landing_s", g.takeoff_landing_s},
          {"dwell_s", g.dwell_s}}},
    };
}

}  // namespace uavdc
