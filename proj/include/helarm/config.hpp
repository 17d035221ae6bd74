#pragma once

// JSON application config: named designs, robot description, material,
// simulation and channel parameters. Parsing is strict: unknown keys are
// rejected with a path-qualified error. Angles cross this boundary in
// degrees and are converted to radians on load.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "helarm/errors.hpp"
#include "helarm/geometry.hpp"
#include "helarm/kinematics.hpp"
#include "helarm/mechanics.hpp"

namespace helarm {

inline constexpr const char* kConfigEnvVar = "HELARM_CONFIG";

struct SimulationConfig {
    double dt = 0.005;        // s
    double motor_tau = 0.0;   // s
    double noise_sigma = 20.0; // Pa
    std::uint32_t seed = 1234;
};

struct AppConfig {
    std::map<std::string, HelicoidDesign> designs; // built-ins plus custom
    MaterialModel material;
    RobotDescription robot;
    SimulationConfig simulation;
    ChannelOptions channels;
};

AppConfig default_config();

AppConfig load_config(std::istream& in);
AppConfig load_config_file(const std::string& path);

// Throws ValidationError with the known names when absent.
const HelicoidDesign& find_design(const AppConfig& config,
                                  const std::string& name);

} // namespace helarm
