// helarm: design analysis, simulation, and telemetry tooling for
// trimmed-helicoid cable-driven continuum arms.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "helarm/actuation.hpp"
#include "helarm/config.hpp"
#include "helarm/geometry.hpp"
#include "helarm/kinematics.hpp"
#include "helarm/mechanics.hpp"
#include "helarm/sensing.hpp"
#include "helarm/telemetry.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Numeric failure distinct from bad input; maps to exit code 3.
struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

helarm::AppConfig load_app_config(const std::string& explicit_path) {
    if (!explicit_path.empty())
        return helarm::load_config_file(explicit_path);
    if (const char* env = std::getenv(helarm::kConfigEnvVar); env && *env)
        return helarm::load_config_file(env);
    return helarm::default_config();
}

std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw helarm::ValidationError("cannot open " + path);
    return out;
}

std::vector<const helarm::HelicoidDesign*> selected_designs(
    const helarm::AppConfig& config, const std::string& name) {
    std::vector<const helarm::HelicoidDesign*> out;
    if (!name.empty()) {
        out.push_back(&helarm::find_design(config, name));
        return out;
    }
    for (const auto& [key, design] : config.designs) out.push_back(&design);
    return out;
}

int cmd_design_table(const helarm::AppConfig& config, const std::string& name,
                     bool csv) {
    const auto designs = selected_designs(config, name);
    char line[200];
    if (csv) {
        std::printf(
            "design,helicoids,sector_deg,twist_deg,t_inner_mm,t_outer_mm,"
            "height_mm\n");
    } else {
        std::printf("%-8s %3s %11s %10s %11s %11s %10s\n", "design", "N",
                    "sector_deg", "twist_deg", "t_inner_mm", "t_outer_mm",
                    "height_mm");
    }
    for (const auto* design : designs) {
        const auto d = helarm::derive(*design);
        if (csv) {
            std::snprintf(line, sizeof(line), "%s,%d,%.6g,%.6g,%.4f,%.4f,%.6g\n",
                          design->name.c_str(), design->helicoid_count,
                          design->sector_angle * kRadToDeg,
                          d.twist_angle * kRadToDeg, d.thickness_inner,
                          d.thickness_outer, d.segment_height);
        } else {
            std::snprintf(line, sizeof(line),
                          "%-8s %3d %11.2f %10.2f %11.3f %11.3f %10.1f\n",
                          design->name.c_str(), design->helicoid_count,
                          design->sector_angle * kRadToDeg,
                          d.twist_angle * kRadToDeg, d.thickness_inner,
                          d.thickness_outer, d.segment_height);
        }
        std::fputs(line, stdout);
    }
    return 0;
}

int cmd_stiffness(const helarm::AppConfig& config, const std::string& name,
                  double modulus, bool as_json, const std::string& out_path) {
    helarm::MaterialModel material = config.material;
    if (modulus > 0.0) material.youngs_modulus = modulus;

    std::vector<helarm::HelicoidDesign> designs;
    for (const auto* d : selected_designs(config, name)) designs.push_back(*d);
    const auto reports = helarm::design_report(designs, material);

    std::ostringstream body;
    if (as_json)
        body << helarm::report_to_json(reports).dump(2) << "\n";
    else
        helarm::write_report_csv(reports, body);
    if (out_path.empty())
        std::fputs(body.str().c_str(), stdout);
    else
        open_out(out_path) << body.str();
    return 0;
}

int cmd_mesh(const helarm::AppConfig& config, const std::string& name,
             const std::string& out_path, double plate_thickness, int steps) {
    const auto& design = helarm::find_design(config, name);
    helarm::MeshOptions options;
    options.plate_thickness = plate_thickness;
    if (steps > 0) options.sweep_steps = steps;
    const auto mesh = helarm::generate_mesh(design, options);
    auto out = open_out(out_path);
    helarm::write_obj(mesh, out);
    std::fprintf(stderr,
                 "%s: %zu vertices, %zu triangles, volume %.1f mm^3, %s\n",
                 name.c_str(), mesh.vertices.size(), mesh.triangles.size(),
                 helarm::signed_volume(mesh),
                 helarm::is_watertight(mesh) ? "watertight" : "NOT watertight");
    return 0;
}

int cmd_channels(const helarm::AppConfig& config, const std::string& name,
                 const std::string& out_path) {
    const auto& design = helarm::find_design(config, name);
    const auto channels = helarm::route_channels(design, config.channels);
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& ch : channels) {
        doc.push_back({{"channel_id", ch.channel_id},
                       {"start_azimuth_deg", ch.start_azimuth * kRadToDeg},
                       {"mid_azimuth_deg",
                        helarm::channel_mid_azimuth(ch) * kRadToDeg},
                       {"radius_mm", ch.radius},
                       {"wrap_deg", ch.wrap_angle * kRadToDeg},
                       {"diameter_mm", ch.diameter},
                       {"rest_length_mm", ch.rest_length},
                       {"rest_volume_mm3", ch.rest_volume}});
    }
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        open_out(out_path) << text;
    return 0;
}

int cmd_track(const helarm::AppConfig& config, const std::string& kind_name,
              double tau, double duration, double dt, double drop,
              const std::string& out_dir) {
    helarm::TrajectoryKind kind;
    if (kind_name == "line")
        kind = helarm::TrajectoryKind::Line;
    else if (kind_name == "circle")
        kind = helarm::TrajectoryKind::Circle;
    else if (kind_name == "spiral")
        kind = helarm::TrajectoryKind::Spiral;
    else
        throw helarm::ValidationError("unknown trajectory: " + kind_name);

    const helarm::RobotDescription& robot = config.robot;
    const Eigen::VectorXd q_zero = Eigen::VectorXd::Zero(robot.dof());
    const Eigen::Vector3d tip0 = helarm::tip_position(robot, q_zero);

    helarm::TrajectoryParams params;
    if (kind == helarm::TrajectoryKind::Line) {
        params.anchor = tip0;
    } else {
        params.anchor = tip0 - Eigen::Vector3d(0.0, 0.0, drop);
        if (kind == helarm::TrajectoryKind::Spiral)
            params.anchor.z() -= params.rise;
    }
    const auto traj =
        helarm::make_trajectory(kind, params, dt, duration, &robot);

    Eigen::VectorXd q_init = q_zero;
    const double start_gap = (traj.positions.front() - tip0).norm();
    if (start_gap > 0.5) {
        helarm::IkOptions ik_options;
        ik_options.tolerance = 0.05;
        ik_options.max_iter = 400;
        const auto ik = helarm::solve_ik(robot, traj.positions.front(), q_zero,
                                         ik_options);
        if (!ik.converged)
            throw ConvergenceFailure(
                "inverse kinematics did not reach the trajectory start "
                "(residual " + std::to_string(ik.residual) + " mm)");
        q_init = ik.q;
    }

    const auto schedule = helarm::plan_velocities(robot, traj, q_init);
    if (schedule.damped_steps > 0)
        std::fprintf(stderr,
                     "warning: damping dominated %d of %zu planning steps\n",
                     schedule.damped_steps, schedule.commanded.size());
    helarm::MotorModel motor;
    motor.time_constant = tau;
    const auto result = helarm::simulate_tracking(robot, schedule, motor);

    std::filesystem::create_directories(out_dir);
    const auto base = std::filesystem::path(out_dir);
    {
        auto out = open_out((base / "run.csv").string());
        helarm::write_run_csv(result, out);
    }
    {
        auto out = open_out((base / "tip.csv").string());
        helarm::write_tip_csv(result, out);
    }
    open_out((base / "metrics.json").string())
        << helarm::metrics_json(result) << "\n";

    std::fprintf(stderr, "%s: rmse max %.6g rad/s, phase lag max %.4g s\n",
                 kind_name.c_str(), result.rmse.maxCoeff(),
                 result.phase_lag.maxCoeff());
    return 0;
}

int cmd_emulate(const helarm::AppConfig& config, const std::string& scenario,
                double noise, std::uint32_t seed, const std::string& out_path) {
    const auto kind = helarm::scenario_from_string(scenario);
    const auto& segment = config.robot.segments.front();
    const auto channels =
        helarm::route_channels(segment.design, config.channels);

    helarm::ScenarioOptions scenario_options;
    scenario_options.segment_height = segment.rest_length;
    const auto states = helarm::make_scenario(kind, scenario_options);

    helarm::EmulateOptions options;
    options.noise_sigma = noise;
    options.seed = seed;
    const auto frames = helarm::emulate_stream(channels, states, options);

    std::vector<std::uint8_t> bytes;
    bytes.reserve(frames.size() * helarm::kFrameSize);
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const auto frame = helarm::frame_from_sensor(
            frames[k], 1, static_cast<std::uint8_t>(k & 0xFF));
        const auto encoded = helarm::encode_frame(frame);
        bytes.insert(bytes.end(), encoded.begin(), encoded.end());
    }
    if (out_path.empty()) {
        std::fwrite(bytes.data(), 1, bytes.size(), stdout);
    } else {
        auto out = open_out(out_path, true);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    }
    return 0;
}

int cmd_decode(const std::string& in_path, const std::string& out_path) {
    std::vector<std::uint8_t> bytes;
    if (in_path.empty()) {
        char buf[4096];
        std::size_t got;
        while ((got = std::fread(buf, 1, sizeof(buf), stdin)) > 0)
            bytes.insert(bytes.end(), buf, buf + got);
    } else {
        std::ifstream in(in_path, std::ios::binary);
        if (!in) throw helarm::ValidationError("cannot open " + in_path);
        bytes.assign(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
    }

    const auto [frames, diag] = helarm::decode_stream(bytes);
    std::ostringstream body;
    body << "t_ms,p0,p1,p2,p3,p4,p5,ax,ay,az,gx,gy,gz,node_id,seq\n";
    char line[360];
    for (const auto& frame : frames) {
        const auto s = helarm::sensor_from_frame(frame);
        std::snprintf(line, sizeof(line),
                      "%.6g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                      "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%u,%u\n",
                      s.t_ms, s.pressures[0], s.pressures[1], s.pressures[2],
                      s.pressures[3], s.pressures[4], s.pressures[5],
                      s.accel.x(), s.accel.y(), s.accel.z(), s.gyro.x(),
                      s.gyro.y(), s.gyro.z(), frame.node_id, frame.seq);
        body << line;
    }
    if (out_path.empty())
        std::fputs(body.str().c_str(), stdout);
    else
        open_out(out_path) << body.str();
    std::fprintf(stderr,
                 "frames_ok=%llu crc_failures=%llu bytes_skipped=%llu "
                 "seq_gaps=%llu\n",
                 static_cast<unsigned long long>(diag.frames_ok),
                 static_cast<unsigned long long>(diag.crc_failures),
                 static_cast<unsigned long long>(diag.bytes_skipped),
                 static_cast<unsigned long long>(diag.seq_gaps));
    return 0;
}

int cmd_classify(const helarm::AppConfig& config, const std::string& in_path,
                 const std::string& out_path) {
    std::vector<helarm::SensorFrame> stream;
    if (in_path.empty()) {
        stream = helarm::read_stream_csv(std::cin);
    } else {
        std::ifstream in(in_path);
        if (!in) throw helarm::ValidationError("cannot open " + in_path);
        stream = helarm::read_stream_csv(in);
    }

    const double zero_window = 1.0;
    const auto conditioned = helarm::condition(stream, 5.0, zero_window);

    // Classify everything after the zeroing window.
    const double t_start = conditioned.front().t_ms + zero_window * 1000.0;
    std::size_t begin = 0;
    while (begin < conditioned.size() &&
           conditioned[begin].t_ms < t_start)
        ++begin;
    if (conditioned.size() - begin < 2)
        throw helarm::ValidationError("stream too short to classify");

    const auto channels = helarm::route_channels(
        config.robot.segments.front().design, config.channels);
    if (channels.size() != 6)
        throw helarm::ValidationError("classification expects six channels");
    std::array<double, 6> azimuths{};
    for (std::size_t c = 0; c < 6; ++c)
        azimuths[c] = helarm::channel_mid_azimuth(channels[c]);

    helarm::ModeFeatures features;
    const auto label = helarm::classify_mode(
        {conditioned.data() + begin, conditioned.size() - begin}, azimuths,
        {}, &features);

    const std::string report =
        helarm::classify_report_json(label, features,
                                     conditioned[begin].t_ms,
                                     conditioned.back().t_ms) +
        "\n";
    if (out_path.empty())
        std::fputs(report.c_str(), stdout);
    else
        open_out(out_path) << report;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"trimmed-helicoid continuum arm toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON config file (default: $HELARM_CONFIG)");

    auto* design = app.add_subcommand("design", "design geometry queries");
    design->require_subcommand(1);
    auto* table = design->add_subcommand("table", "per-design geometry table");
    std::string table_design;
    bool table_csv = false;
    table->add_option("--design", table_design, "single design to print");
    table->add_flag("--csv", table_csv, "emit CSV instead of aligned text");

    auto* stiffness = app.add_subcommand("stiffness", "stiffness report");
    std::string stiff_design, stiff_out;
    double stiff_modulus = 0.0;
    bool stiff_all = false, stiff_json = false;
    stiffness->add_flag("--all", stiff_all, "all designs (default)");
    stiffness->add_option("--design", stiff_design, "single design");
    stiffness->add_option("--modulus", stiff_modulus,
                          "override Young's modulus, N/mm^2");
    stiffness->add_flag("--json", stiff_json, "JSON with intermediates");
    stiffness->add_option("--out", stiff_out, "write to file instead of stdout");

    auto* mesh = app.add_subcommand("mesh", "export a lattice mesh as OBJ");
    std::string mesh_design, mesh_out;
    double mesh_plate = 4.0;
    int mesh_steps = 0;
    mesh->add_option("--design", mesh_design)->required();
    mesh->add_option("--out", mesh_out)->required();
    mesh->add_option("--plate-thickness", mesh_plate,
                     "end plate thickness, mm (0 disables)");
    mesh->add_option("--steps", mesh_steps, "sweep subdivisions per layer");

    auto* channels = app.add_subcommand("channels", "air channel routing");
    std::string chan_design, chan_out;
    channels->add_option("--design", chan_design)->required();
    channels->add_option("--out", chan_out, "write JSON to file");

    auto* track = app.add_subcommand("track", "plan and simulate a trajectory");
    std::string track_kind, track_dir = ".";
    double track_tau = -1.0, track_duration = 10.0, track_dt = 0.0;
    double track_drop = 60.0;
    track->add_option("--trajectory", track_kind, "line|circle|spiral")
        ->required();
    track->add_option("--tau", track_tau, "motor time constant, s");
    track->add_option("--duration", track_duration, "s");
    track->add_option("--dt", track_dt, "s");
    track->add_option("--drop", track_drop,
                      "circle/spiral height below the straight tip, mm");
    track->add_option("--out-dir", track_dir, "output directory");

    auto* emulate = app.add_subcommand("emulate",
                                       "emit a binary telemetry stream");
    std::string emu_scenario, emu_out;
    double emu_noise = -1.0;
    std::int64_t emu_seed = -1;
    emulate->add_option("--scenario", emu_scenario,
                        "axial|bend_ew|bend_ns|torsion|none")
        ->required();
    emulate->add_option("--noise", emu_noise, "pressure noise sigma, Pa");
    emulate->add_option("--seed", emu_seed, "noise seed");
    emulate->add_option("--out", emu_out, "file (default: stdout)");

    auto* decode = app.add_subcommand("decode",
                                      "binary telemetry stream to CSV");
    std::string dec_in, dec_out;
    decode->add_option("--in", dec_in, "file (default: stdin)");
    decode->add_option("--out", dec_out, "file (default: stdout)");

    auto* classify = app.add_subcommand("classify",
                                        "deformation mode from a stream CSV");
    std::string cls_in, cls_out;
    classify->add_option("--in", cls_in, "file (default: stdin)");
    classify->add_option("--out", cls_out, "file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        const helarm::AppConfig config = load_app_config(config_path);
        if (table->parsed()) return cmd_design_table(config, table_design, table_csv);
        if (stiffness->parsed())
            return cmd_stiffness(config, stiff_all ? "" : stiff_design,
                                 stiff_modulus, stiff_json, stiff_out);
        if (mesh->parsed())
            return cmd_mesh(config, mesh_design, mesh_out, mesh_plate,
                            mesh_steps);
        if (channels->parsed()) return cmd_channels(config, chan_design, chan_out);
        if (track->parsed()) {
            const double tau =
                track_tau >= 0.0 ? track_tau : config.simulation.motor_tau;
            const double dt =
                track_dt > 0.0 ? track_dt : config.simulation.dt;
            return cmd_track(config, track_kind, tau, track_duration, dt,
                             track_drop, track_dir);
        }
        if (emulate->parsed()) {
            const double noise =
                emu_noise >= 0.0 ? emu_noise : config.simulation.noise_sigma;
            const auto seed = emu_seed >= 0
                                  ? static_cast<std::uint32_t>(emu_seed)
                                  : config.simulation.seed;
            return cmd_emulate(config, emu_scenario, noise, seed, emu_out);
        }
        if (decode->parsed()) return cmd_decode(dec_in, dec_out);
        if (classify->parsed()) return cmd_classify(config, cls_in, cls_out);
    } catch (const helarm::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const ConvergenceFailure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return 0;
}
