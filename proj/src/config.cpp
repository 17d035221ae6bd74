#include "helarm/config.hpp"

#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <string>

#include "json.hpp"

namespace helarm {

namespace {

using nlohmann::json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError("config: " + what + " at " + path);
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known) fail(path + "." + item.key(), "unknown key");
    }
}

double get_number(const json& obj, const char* key, double fallback,
                  const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const char* key, int fallback,
            const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const char* key, bool fallback,
              const std::string& path) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

HelicoidDesign parse_design(const std::string& name, const json& obj,
                            const std::string& path) {
    expect_keys(obj, path,
                {"helicoids", "sector_angle_deg", "inner_radius",
                 "outer_radius", "axial_rise", "layers"});
    for (const char* key :
         {"helicoids", "sector_angle_deg", "inner_radius", "outer_radius",
          "axial_rise"})
        if (!obj.contains(key)) fail(path + "." + key, "missing key");
    const int n = get_int(obj, "helicoids", 0, path);
    return make_design(name, n,
                       get_number(obj, "sector_angle_deg", 0.0, path) *
                           kDegToRad,
                       get_number(obj, "inner_radius", 0.0, path),
                       get_number(obj, "outer_radius", 0.0, path),
                       get_number(obj, "axial_rise", 0.0, path),
                       get_int(obj, "layers", n, path));
}

SegmentSpec parse_segment(const AppConfig& config, const json& obj,
                          const std::string& path) {
    expect_keys(obj, path,
                {"design", "rest_length", "cable_radius",
                 "cable_azimuths_deg"});
    SegmentSpec seg;
    if (!obj.contains("design")) fail(path + ".design", "missing key");
    if (!obj.at("design").is_string())
        fail(path + ".design", "expected a string");
    seg.design = find_design(config, obj.at("design").get<std::string>());
    seg.rest_length = get_number(obj, "rest_length", seg.rest_length, path);
    seg.cable_radius = get_number(obj, "cable_radius", seg.cable_radius, path);
    if (obj.contains("cable_azimuths_deg")) {
        const json& arr = obj.at("cable_azimuths_deg");
        if (!arr.is_array() || arr.size() != 3)
            fail(path + ".cable_azimuths_deg", "expected an array of 3 numbers");
        for (std::size_t i = 0; i < 3; ++i) {
            if (!arr[i].is_number())
                fail(path + ".cable_azimuths_deg", "expected a number");
            seg.cable_azimuths[i] = arr[i].get<double>() * kDegToRad;
        }
    }
    return seg;
}

void parse_robot(AppConfig& config, const json& obj, const std::string& path) {
    expect_keys(obj, path,
                {"base_rotation", "base_offset", "plate_offset",
                 "gripper_length", "gripper_range", "gripper_cable_travel",
                 "spool_radius", "segments"});
    RobotDescription& robot = config.robot;
    robot.base_rotation =
        get_bool(obj, "base_rotation", robot.base_rotation, path);
    robot.base_offset = get_number(obj, "base_offset", robot.base_offset, path);
    robot.plate_offset =
        get_number(obj, "plate_offset", robot.plate_offset, path);
    robot.gripper_length =
        get_number(obj, "gripper_length", robot.gripper_length, path);
    robot.gripper_cable_travel = get_number(obj, "gripper_cable_travel",
                                            robot.gripper_cable_travel, path);
    robot.spool_radius =
        get_number(obj, "spool_radius", robot.spool_radius, path);
    if (obj.contains("gripper_range")) {
        const json& arr = obj.at("gripper_range");
        if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number() ||
            !arr[1].is_number())
            fail(path + ".gripper_range", "expected an array of 2 numbers");
        robot.gripper_range = {arr[0].get<double>(), arr[1].get<double>()};
    }
    if (obj.contains("segments")) {
        const json& arr = obj.at("segments");
        if (!arr.is_array()) fail(path + ".segments", "expected an array");
        robot.segments.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
            robot.segments.push_back(parse_segment(
                config, arr[i], path + ".segments[" + std::to_string(i) + "]"));
    }
    validate_robot(robot);
}

} // namespace

AppConfig default_config() {
    AppConfig config;
    for (const auto& design : builtin_designs())
        config.designs.emplace(design.name, design);
    config.robot = default_robot();
    return config;
}

AppConfig load_config(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }

    AppConfig config = default_config();
    expect_keys(doc, "$",
                {"designs", "material", "robot", "simulation", "channels"});

    if (doc.contains("designs")) {
        const json& designs = doc.at("designs");
        if (!designs.is_object()) fail("$.designs", "expected an object");
        for (const auto& item : designs.items()) {
            const std::string path = "$.designs." + item.key();
            auto design = parse_design(item.key(), item.value(), path);
            config.designs.insert_or_assign(item.key(), design);
        }
    }
    if (doc.contains("material")) {
        const json& material = doc.at("material");
        expect_keys(material, "$.material", {"youngs_modulus"});
        config.material.youngs_modulus = get_number(
            material, "youngs_modulus", config.material.youngs_modulus,
            "$.material");
        validate_material(config.material);
    }
    if (doc.contains("robot")) parse_robot(config, doc.at("robot"), "$.robot");
    if (doc.contains("simulation")) {
        const json& sim = doc.at("simulation");
        expect_keys(sim, "$.simulation",
                    {"dt", "motor_tau", "noise_sigma", "seed"});
        config.simulation.dt =
            get_number(sim, "dt", config.simulation.dt, "$.simulation");
        config.simulation.motor_tau = get_number(
            sim, "motor_tau", config.simulation.motor_tau, "$.simulation");
        config.simulation.noise_sigma = get_number(
            sim, "noise_sigma", config.simulation.noise_sigma, "$.simulation");
        config.simulation.seed = static_cast<std::uint32_t>(get_int(
            sim, "seed", static_cast<int>(config.simulation.seed),
            "$.simulation"));
        if (config.simulation.dt <= 0.0)
            fail("$.simulation.dt", "must be positive");
        if (config.simulation.motor_tau < 0.0)
            fail("$.simulation.motor_tau", "must be non-negative");
        if (config.simulation.noise_sigma < 0.0)
            fail("$.simulation.noise_sigma", "must be non-negative");
    }
    if (doc.contains("channels")) {
        const json& ch = doc.at("channels");
        expect_keys(ch, "$.channels",
                    {"depth_to_wall", "diameter", "count", "samples"});
        config.channels.depth_to_wall = get_number(
            ch, "depth_to_wall", config.channels.depth_to_wall, "$.channels");
        config.channels.diameter =
            get_number(ch, "diameter", config.channels.diameter, "$.channels");
        config.channels.count =
            get_int(ch, "count", config.channels.count, "$.channels");
        config.channels.samples =
            get_int(ch, "samples", config.channels.samples, "$.channels");
        if (config.channels.count < 0)
            fail("$.channels.count", "must be non-negative");
        if (config.channels.samples < 2)
            fail("$.channels.samples", "must be at least 2");
    }
    return config;
}

AppConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    return load_config(in);
}

const HelicoidDesign& find_design(const AppConfig& config,
                                  const std::string& name) {
    const auto it = config.designs.find(name);
    if (it != config.designs.end()) return it->second;
    std::string known;
    for (const auto& [key, value] : config.designs) {
        if (!known.empty()) known += ", ";
        known += key;
    }
    throw ValidationError("unknown design '" + name + "' (have: " + known +
                          ")");
}

} // namespace helarm
