#include "mcqn/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mcqn {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    const std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
        if (!names.count(key)) fail(where, "unknown key \"" + key + "\"");
}

const json& field(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing \"") + key + "\"");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

std::uint64_t count(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
        const double x = v.get<double>();
        if (x >= 0.0 && x == std::floor(x) && x < 1.8e19) return static_cast<std::uint64_t>(x);
    }
    fail(where, "expected a non-negative integer");
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i + 1) + "]"));
    return out;
}

/// 1-based label in [1, limit] to a 0-based index.
std::size_t label(const json& v, std::size_t limit, const std::string& where) {
    const auto x = count(v, where);
    if (x < 1 || x > limit) fail(where, "label " + std::to_string(x) + " outside 1.." + std::to_string(limit));
    return static_cast<std::size_t>(x - 1);
}

std::vector<std::size_t> labels(const json& v, std::size_t limit, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of labels");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(label(v[i], limit, where + "[" + std::to_string(i + 1) + "]"));
    return out;
}

StationPolicy parse_policy(const json& v, std::size_t classes, const std::string& where) {
    StationPolicy policy;
    std::string name;
    const json* priority = nullptr;
    std::string allocation;
    if (v.is_string()) {
        name = v.get<std::string>();
    } else {
        only_keys(v, where, {"policy", "allocation", "priority"});
        const auto& p = field(v, "policy", where);
        if (!p.is_string()) fail(where + ".policy", "expected a string");
        name = p.get<std::string>();
        if (v.contains("allocation")) {
            if (!v["allocation"].is_string()) fail(where + ".allocation", "expected a string");
            allocation = v["allocation"].get<std::string>();
        }
        if (v.contains("priority")) priority = &v["priority"];
    }
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    if (name == "fcfs") {
        policy.discipline = Discipline::fcfs;
    } else if (name == "sbp") {
        policy.discipline = Discipline::sbp;
    } else if (name == "ps") {
        if (allocation.empty()) allocation = "equalitarian";
        if (allocation == "equalitarian")
            policy.discipline = Discipline::ps_equalitarian;
        else if (allocation == "proportional")
            policy.discipline = Discipline::ps_proportional;
        else if (allocation == "preferential")
            policy.discipline = Discipline::ps_preferential;
        else
            fail(where + ".allocation", "expected equalitarian, proportional or preferential");
    } else {
        fail(where + ".policy", "expected fcfs, sbp or ps, got \"" + name + "\"");
    }
    if (!allocation.empty() && name != "ps") fail(where + ".allocation", "only valid for ps stations");
    if (priority) policy.priority = labels(*priority, classes, where + ".priority");
    return policy;
}

HorizonGrowth parse_growth(const json& v, const std::string& where) {
    if (!v.is_string()) fail(where, "expected a string");
    const auto s = v.get<std::string>();
    if (s == "constant") return HorizonGrowth::constant;
    if (s == "logarithmic") return HorizonGrowth::logarithmic;
    if (s == "power") return HorizonGrowth::power;
    fail(where, "expected constant, logarithmic or power");
}

std::filesystem::path relative_to(const std::filesystem::path& source, const std::string& path) {
    const std::filesystem::path p(path);
    return p.is_absolute() ? p : source.parent_path() / p;
}

}  // namespace

OutputFormat parse_output_format(const std::string& text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    throw ConfigError("output format must be csv or json, got \"" + text + "\"");
}

nlohmann::json load_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        return json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        const auto pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto line_start = text.rfind('\n', pos == 0 ? 0 : pos - 1);
        const auto begin = line_start == std::string::npos ? 0 : line_start + 1;
        const auto end = text.find('\n', begin);
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(begin), '\n');
        std::string message = e.what();
        if (const auto at = message.find(", column "); at != std::string::npos)
            if (const auto colon = message.find(": ", at); colon != std::string::npos) message = message.substr(colon + 2);
        throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(pos - begin + 1) +
                          ": parse error: " + message + "\n  " + text.substr(begin, end - begin));
    }
}

NetworkSpec parse_network(const json& doc) {
    const std::string w = "network";
    only_keys(doc, w,
              {"station_count", "class_count", "station_of", "arrival_rates", "service_rates", "routing",
               "station_policies", "description"});
    NetworkSpec spec;
    spec.station_count = count(field(doc, "station_count", w), w + ".station_count");
    spec.class_count = count(field(doc, "class_count", w), w + ".class_count");
    spec.station_of = labels(field(doc, "station_of", w), spec.station_count, w + ".station_of");
    spec.service_rates = numbers(field(doc, "service_rates", w), w + ".service_rates");
    spec.arrival_rates = doc.contains("arrival_rates") ? numbers(doc["arrival_rates"], w + ".arrival_rates")
                                                       : std::vector<double>(spec.class_count, 0.0);

    const auto& routing = field(doc, "routing", w);
    if (!routing.is_array()) fail(w + ".routing", "expected a matrix (array of rows)");
    for (std::size_t r = 0; r < routing.size(); ++r)
        spec.routing.push_back(numbers(routing[r], w + ".routing[" + std::to_string(r + 1) + "]"));

    const auto& policies = field(doc, "station_policies", w);
    if (!policies.is_array()) fail(w + ".station_policies", "expected an array");
    for (std::size_t i = 0; i < policies.size(); ++i)
        spec.station_policies.push_back(
            parse_policy(policies[i], spec.class_count, w + ".station_policies[" + std::to_string(i + 1) + "]"));
    return spec;
}

NetworkSpec load_network(const std::filesystem::path& path) {
    const auto doc = load_document(path);
    if (!doc.is_object()) throw ConfigError(path.string() + ": expected an object at top level");
    if (!doc.contains("network")) return parse_network(doc);
    const auto& net = doc["network"];
    if (net.is_string()) return load_network(relative_to(path, net.get<std::string>()));
    return parse_network(net);
}

RMSchedule parse_schedule(const json& doc) {
    const std::string w = "schedule";
    only_keys(doc, w,
              {"epsilon", "c1", "c1_epsilon_power", "omega", "c2", "horizon", "gamma", "iterations", "theta_init",
               "burn_in", "alpha", "event_cap"});
    RMSchedule s;
    if (doc.contains("epsilon")) s.epsilon = number(doc["epsilon"], w + ".epsilon");
    if (doc.contains("c1") && doc.contains("c1_epsilon_power")) fail(w, "give either c1 or c1_epsilon_power");
    if (doc.contains("c1")) s.gain_c1 = number(doc["c1"], w + ".c1");
    if (doc.contains("c1_epsilon_power"))
        s.gain_c1 = std::pow(s.epsilon, number(doc["c1_epsilon_power"], w + ".c1_epsilon_power"));
    if (doc.contains("omega")) s.gain_omega = number(doc["omega"], w + ".omega");
    if (doc.contains("c2")) s.horizon_c2 = number(doc["c2"], w + ".c2");
    if (doc.contains("horizon")) s.horizon_growth = parse_growth(doc["horizon"], w + ".horizon");
    if (doc.contains("gamma")) s.horizon_gamma = number(doc["gamma"], w + ".gamma");
    if (doc.contains("iterations")) s.iterations = count(doc["iterations"], w + ".iterations");
    if (doc.contains("theta_init")) s.theta_init = number(doc["theta_init"], w + ".theta_init");
    if (doc.contains("burn_in")) s.averaging_burn_in = number(doc["burn_in"], w + ".burn_in");
    if (doc.contains("alpha")) s.alpha = number(doc["alpha"], w + ".alpha");
    if (doc.contains("event_cap")) s.event_cap = count(doc["event_cap"], w + ".event_cap");
    return s;
}

ExperimentConfig parse_experiment(const json& doc, const std::filesystem::path& source) {
    only_keys(doc, "config", {"description", "network", "seed", "ray", "schedule", "region", "monotonicity", "output"});
    ExperimentConfig cfg;
    cfg.source = source;
    const auto& net = field(doc, "network", "config");
    if (net.is_string()) {
        cfg.network_path = relative_to(source, net.get<std::string>());
        cfg.network = load_network(cfg.network_path);
    } else {
        cfg.network_path = source;
        cfg.network = parse_network(net);
    }
    if (doc.contains("seed")) cfg.seed = count(doc["seed"], "config.seed");
    if (doc.contains("ray")) cfg.ray = numbers(doc["ray"], "config.ray");
    if (doc.contains("schedule")) cfg.schedule = parse_schedule(doc["schedule"]);

    if (doc.contains("region")) {
        const auto& r = doc["region"];
        only_keys(r, "region", {"rays", "plane", "count", "include_axes"});
        RegionBlock block;
        if (r.contains("rays")) {
            if (!r["rays"].is_array()) fail("region.rays", "expected an array of directions");
            for (std::size_t j = 0; j < r["rays"].size(); ++j)
                block.rays.push_back(numbers(r["rays"][j], "region.rays[" + std::to_string(j + 1) + "]"));
        }
        if (r.contains("plane")) {
            const auto p = labels(r["plane"], cfg.network.class_count, "region.plane");
            if (p.size() != 2) fail("region.plane", "expected two class labels");
            block.plane = CoordinatePlane{p[0], p[1]};
            block.count = r.contains("count") ? count(r["count"], "region.count") : 5;
            if (r.contains("include_axes")) {
                if (!r["include_axes"].is_boolean()) fail("region.include_axes", "expected true or false");
                block.include_axes = r["include_axes"].get<bool>();
            }
        }
        if (block.rays.empty() == !block.plane) fail("region", "give exactly one of \"rays\" or \"plane\"");
        cfg.region = std::move(block);
    }

    if (doc.contains("monotonicity")) {
        const auto& m = doc["monotonicity"];
        only_keys(m, "monotonicity", {"theta_grid", "t_grid", "replications", "noise_multiplier"});
        MonotonicityBlock block;
        block.theta_grid = numbers(field(m, "theta_grid", "monotonicity"), "monotonicity.theta_grid");
        block.t_grid = numbers(field(m, "t_grid", "monotonicity"), "monotonicity.t_grid");
        if (m.contains("replications")) block.replications = count(m["replications"], "monotonicity.replications");
        if (m.contains("noise_multiplier"))
            block.noise_multiplier = number(m["noise_multiplier"], "monotonicity.noise_multiplier");
        cfg.monotonicity = std::move(block);
    }

    if (doc.contains("output")) {
        const auto& o = doc["output"];
        only_keys(o, "output", {"path", "format"});
        if (o.contains("path")) {
            if (!o["path"].is_string()) fail("output.path", "expected a string");
            cfg.output_path = relative_to(source, o["path"].get<std::string>());
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) fail("output.format", "expected a string");
            cfg.format = parse_output_format(o["format"].get<std::string>());
        }
    }
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    const auto doc = load_document(path);
    if (!doc.is_object()) throw ConfigError(path.string() + ": expected an object at top level");
    try {
        return parse_experiment(doc, path);
    } catch (const IoError&) {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

nlohmann::json network_json(const NetworkSpec& spec) {
    json policies = json::array();
    for (const auto& p : spec.station_policies) {
        json entry;
        switch (p.discipline) {
            case Discipline::fcfs: entry["policy"] = "fcfs"; break;
            case Discipline::sbp: entry["policy"] = "sbp"; break;
            case Discipline::ps_equalitarian: entry = {{"policy", "ps"}, {"allocation", "equalitarian"}}; break;
            case Discipline::ps_proportional: entry = {{"policy", "ps"}, {"allocation", "proportional"}}; break;
            case Discipline::ps_preferential: entry = {{"policy", "ps"}, {"allocation", "preferential"}}; break;
        }
        if (!p.priority.empty()) {
            std::vector<std::size_t> one_based;
            for (auto k : p.priority) one_based.push_back(k + 1);
            entry["priority"] = one_based;
        }
        policies.push_back(std::move(entry));
    }
    std::vector<std::size_t> station_of;
    for (auto s : spec.station_of) station_of.push_back(s + 1);
    return {
        {"station_count", spec.station_count},
        {"class_count", spec.class_count},
        {"station_of", station_of},
        {"arrival_rates", spec.arrival_rates},
        {"service_rates", spec.service_rates},
        {"routing", spec.routing},
        {"station_policies", std::move(policies)},
    };
}

}  // namespace mcqn
