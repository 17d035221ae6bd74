// Release gate: every merge must keep all eight criteria green. Each
// criterion prints exactly one PASS/FAIL line; any failure sets a nonzero
// exit code. Failures list their details indented under the line.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "helarm/actuation.hpp"
#include "helarm/geometry.hpp"
#include "helarm/kinematics.hpp"
#include "helarm/mechanics.hpp"
#include "helarm/sensing.hpp"
#include "helarm/telemetry.hpp"

using namespace helarm;

namespace {

constexpr double kPi = std::numbers::pi;

struct Checker {
    std::vector<std::string> errors;

    void require(bool ok, const char* fmt, ...) {
        if (ok) return;
        char buf[256];
        va_list args;
        va_start(args, fmt);
        std::vsnprintf(buf, sizeof(buf), fmt, args);
        va_end(args);
        errors.emplace_back(buf);
    }
};

// ---- 1: built-in design table ---------------------------------------------

void check_design_table(Checker& c) {
    struct Row {
        const char* name;
        double t_inner, t_outer;
    };
    const Row rows[] = {{"N4", 3.04, 3.36},
                        {"N4T", 4.05, 4.48},
                        {"N6", 2.60, 3.12},
                        {"N8", 2.22, 2.86}};
    for (const Row& row : rows) {
        const HelicoidDesign& d = builtin_design(row.name);
        const DerivedGeometry g = derive(d);
        c.require(std::abs(g.thickness_inner - row.t_inner) <= 0.005,
                  "%s inner thickness %.4f, reference %.2f", row.name,
                  g.thickness_inner, row.t_inner);
        c.require(std::abs(g.thickness_outer - row.t_outer) <= 0.005,
                  "%s outer thickness %.4f, reference %.2f", row.name,
                  g.thickness_outer, row.t_outer);
        c.require(g.twist_angle == kPi / d.helicoid_count,
                  "%s twist angle not exactly pi/%d", row.name,
                  d.helicoid_count);
    }
}

// ---- 2: stiffness model ----------------------------------------------------

void check_stiffness(Checker& c) {
    struct Row {
        const char* name;
        double k_ax, k_bend;
    };
    const Row rows[] = {{"N4", 0.1375, 59.4},
                        {"N4T", 0.3259, 140.8},
                        {"N6", 0.3056, 88.0},
                        {"N8", 0.4535, 98.0}};
    const MaterialModel material{2.48};
    double ax[4], bend[4];
    for (int i = 0; i < 4; ++i) {
        const HelicoidDesign& d = builtin_design(rows[i].name);
        ax[i] = axial_stiffness(d, material);
        bend[i] = bending_stiffness(d, material);
        c.require(std::abs(ax[i] - rows[i].k_ax) / rows[i].k_ax <= 0.005,
                  "%s axial stiffness %.6f vs oracle %.4f", rows[i].name,
                  ax[i], rows[i].k_ax);
        c.require(std::abs(bend[i] - rows[i].k_bend) / rows[i].k_bend <= 0.005,
                  "%s bending stiffness %.4f vs oracle %.1f", rows[i].name,
                  bend[i], rows[i].k_bend);
    }
    // N4 < N6 < N8 axially at equal sector angle; the thick variant beats
    // its base design on both measures but stays near N6 axially
    c.require(ax[0] < ax[2] && ax[2] < ax[3],
              "axial stiffness does not grow with helicoid count");
    c.require(ax[1] > ax[0] && bend[1] > bend[0],
              "thick-sector variant not stiffer than its base design");
    c.require(std::abs(ax[1] - ax[2]) / ax[1] <= 0.10,
              "thick 4-helicoid and 6-helicoid axial stiffness differ by "
              "more than 10%%");
    c.require(bend[2] < bend[1],
              "6-helicoid bending stiffness not below the thick variant");
}

// ---- 3: lattice meshes -----------------------------------------------------

void check_meshes(Checker& c) {
    for (const HelicoidDesign& d : builtin_designs()) {
        MeshOptions options;
        options.plate_thickness = 0.0;  // lattice only
        const TriangleMesh mesh = generate_mesh(d, options);
        c.require(is_watertight(mesh), "%s mesh is not watertight",
                  d.name.c_str());
        const double wedge = 0.5 * d.sector_angle *
                             (d.outer_radius * d.outer_radius -
                              d.inner_radius * d.inner_radius) *
                             d.axial_rise;
        const double expected = 4.0 * d.helicoid_count * d.layer_count * wedge;
        const double volume = signed_volume(mesh);
        c.require(std::abs(volume - expected) / expected <= 0.01,
                  "%s volume %.1f vs swept-solid value %.1f", d.name.c_str(),
                  volume, expected);
    }
}

// ---- 4: kinematics core ----------------------------------------------------

void check_kinematics(Checker& c) {
    const RobotDescription robot = default_robot();
    const std::array<double, 3> azimuths = robot.segments[0].cable_azimuths;
    const double r_c = robot.segments[0].cable_radius;

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_cable = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const ArcConfig arc{0.039 * u(rng), 2.0 * kPi * u(rng) - kPi,
                            50.0 + 100.0 * u(rng)};
        const auto cables = cables_from_config(arc, r_c, azimuths);
        const CableFit fit = config_from_cables(cables, r_c, azimuths);
        const auto refit = cables_from_config(fit.config, r_c, azimuths);
        for (int i = 0; i < 3; ++i)
            worst_cable = std::max(worst_cable,
                                   std::abs(refit[i] - cables[i]));
    }
    c.require(worst_cable < 1e-9,
              "cable round trip worst error %.3e mm over 10000 configs",
              worst_cable);

    const Pose straight = segment_fk({0.0, 0.0, 108.0});
    const Pose tiny = segment_fk({1e-10, 0.3, 108.0});
    const double jump = (tiny.translation - straight.translation).norm();
    c.require(jump < 1e-6, "straight-limit discontinuity %.3e mm", jump);

    // analytic-vs-finite-difference agreement at random bent poses
    const JointLimits limits = joint_limits(robot);
    double worst_jac = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd q(robot.dof());
        q[0] = 2.0 * kPi * u(rng) - kPi;
        for (int s = 0; s < 4; ++s) {
            q[1 + 3 * s] = 0.6 * limits.upper[1 + 3 * s] * u(rng);
            q[2 + 3 * s] = 2.0 * kPi * u(rng) - kPi;
            q[3 + 3 * s] = (0.05 - 0.30 * u(rng)) * 108.0;
        }
        q[13] = u(rng);
        const Eigen::MatrixXd jac = jacobian(robot, q).topRows(3);
        Eigen::MatrixXd fd(3, robot.dof());
        for (int j = 0; j < robot.dof(); ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(q[j]));
            Eigen::VectorXd qp = q, qm = q;
            qp[j] += h;
            qm[j] -= h;
            fd.col(j) =
                (tip_position(robot, qp) - tip_position(robot, qm)) / (2 * h);
        }
        const double scale = jac.cwiseAbs().maxCoeff();
        worst_jac = std::max(worst_jac,
                             (jac - fd).cwiseAbs().maxCoeff() / scale);
    }
    c.require(worst_jac < 1e-5, "jacobian check worst relative error %.3e",
              worst_jac);

    std::mt19937 ik_rng(7);
    const Eigen::VectorXd q0 = Eigen::VectorXd::Zero(robot.dof());
    int solved = 0;
    double worst_residual = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd q(robot.dof());
        q[0] = 2.0 * kPi * u(ik_rng) - kPi;
        for (int s = 0; s < 4; ++s) {
            q[1 + 3 * s] = 0.6 * limits.upper[1 + 3 * s] * u(ik_rng);
            q[2 + 3 * s] = 2.0 * kPi * u(ik_rng) - kPi;
            q[3 + 3 * s] = (0.05 - 0.30 * u(ik_rng)) * 108.0;
        }
        q[13] = u(ik_rng);
        const Eigen::Vector3d target = tip_position(robot, q);
        const IkResult r = solve_ik(robot, target, q0);
        if (r.converged && r.residual < 0.5) ++solved;
        worst_residual = std::max(worst_residual, r.residual);
    }
    c.require(solved == 100,
              "ik solved %d/100 random reachable targets, worst residual "
              "%.3f mm",
              solved, worst_residual);
}

// ---- 5: tracking simulation ------------------------------------------------

VelocitySchedule base_motor_schedule(const RobotDescription& robot,
                                     const std::vector<double>& velocities,
                                     double dt) {
    VelocitySchedule schedule;
    schedule.dt = dt;
    schedule.q_init = Eigen::VectorXd::Zero(robot.dof());
    schedule.q_path.push_back(schedule.q_init);
    Eigen::VectorXd q = schedule.q_init;
    for (const double v : velocities) {
        Eigen::VectorXd cmd = Eigen::VectorXd::Zero(robot.dof());
        cmd[0] = v;
        schedule.commanded.push_back(cmd);
        q[0] += v * dt;
        schedule.q_path.push_back(q);
    }
    return schedule;
}

void check_tracking(Checker& c) {
    const RobotDescription robot = default_robot();
    const Eigen::VectorXd q0 = Eigen::VectorXd::Zero(robot.dof());
    IkOptions tight;
    tight.tolerance = 0.05;

    struct Case {
        const char* name;
        TrajectoryKind kind;
        TrajectoryParams params;
    };
    std::vector<Case> cases;
    {
        Case line{"line", TrajectoryKind::Line, {}};
        line.params.anchor = tip_position(robot, q0);
        line.params.displacement = -80.0;
        cases.push_back(line);
        Case circle{"circle", TrajectoryKind::Circle, {}};
        circle.params.anchor = Eigen::Vector3d(0.0, 0.0, 560.0);
        circle.params.radius = 60.0;
        circle.params.turns = 1.0;
        cases.push_back(circle);
        Case spiral{"spiral", TrajectoryKind::Spiral, {}};
        spiral.params.anchor = Eigen::Vector3d(0.0, 0.0, 500.0);
        spiral.params.radius = 60.0;
        spiral.params.rise = 80.0;
        spiral.params.turns = 1.0;
        cases.push_back(spiral);
    }

    for (const Case& cs : cases) {
        const Trajectory traj =
            make_trajectory(cs.kind, cs.params, 0.005, 10.0, &robot);
        const IkResult start = solve_ik(robot, traj.positions.front(), q0,
                                        tight);
        c.require(start.converged, "%s start pose did not converge", cs.name);
        if (!start.converged) continue;
        const VelocitySchedule plan = plan_velocities(robot, traj, start.q);
        const TrackingResult run =
            simulate_tracking(robot, plan, MotorModel{0.0, 0.0});
        const double rmse = run.rmse.maxCoeff();
        const double lag = run.phase_lag.cwiseAbs().maxCoeff();
        c.require(rmse < 1e-12, "%s ideal-motor rmse %.3e", cs.name, rmse);
        c.require(lag < 1e-12, "%s ideal-motor phase lag %.3e s", cs.name,
                  lag);

        if (cs.kind == TrajectoryKind::Circle) {
            const double closure = (run.tip_executed.back() -
                                    run.tip_executed.front())
                                       .norm();
            c.require(closure < 1.0, "circle closure %.3f mm", closure);
        }
    }

    const double dt = 0.005;
    const double tau = 0.05;
    std::vector<double> wave(2000);
    for (std::size_t k = 0; k < wave.size(); ++k)
        wave[k] = 0.5 * std::sin(2.0 * kPi * 0.2 * k * dt);
    const auto schedule = base_motor_schedule(robot, wave, dt);
    const auto run = simulate_tracking(robot, schedule, MotorModel{tau, 0.0});
    c.require(run.phase_lag[0] >= 0.5 * tau && run.phase_lag[0] <= 1.5 * tau,
              "lagged motor phase estimate %.4f s outside [%.4f, %.4f]",
              run.phase_lag[0], 0.5 * tau, 1.5 * tau);
}

// ---- 6: pressure sensing and classification --------------------------------

void check_sensing(Checker& c) {
    const auto channels = route_channels(builtin_design("N6"));
    std::array<double, 6> azimuths{};
    for (int i = 0; i < 6; ++i) azimuths[i] = channel_mid_azimuth(channels[i]);

    const DeformationState rest{{0.0, 0.0, 108.0}, 0.0, 0.0};
    for (const ChannelPath& ch : channels) {
        const double dp = channel_pressure(ch, rest) - kAmbientPressure;
        c.require(dp == 0.0, "channel %d rest offset %.3e Pa", ch.channel_id,
                  dp);
    }

    const DeformationState squeezed{{0.0, 0.0, 0.9 * 108.0}, -0.1, 0.0};
    const double boyle = kAmbientPressure / 0.9 - kAmbientPressure;
    for (const ChannelPath& ch : channels) {
        const double dp = channel_pressure(ch, squeezed) - kAmbientPressure;
        c.require(std::abs(dp - boyle) < 1e-6,
                  "channel %d compression response %.2f Pa, oracle %.2f",
                  ch.channel_id, dp, boyle);
    }

    const DeformationState bent{{1.0 / 200.0, 0.0, 108.0}, 0.0, 0.0};
    const double dp_facing =
        channel_pressure(channels[3], bent) - kAmbientPressure;
    const double dp_opposite =
        channel_pressure(channels[0], bent) - kAmbientPressure;
    c.require(std::abs(dp_facing - 15980.0) <= 10.0,
              "bend-facing channel %.2f Pa, reference 15980", dp_facing);
    c.require(std::abs(dp_opposite + 12155.0) <= 10.0,
              "bend-opposite channel %.2f Pa, reference -12155", dp_opposite);

    const ScenarioKind kinds[] = {ScenarioKind::Axial, ScenarioKind::BendEW,
                                  ScenarioKind::BendNS, ScenarioKind::Torsion};
    int clean_ok = 0, noisy_ok = 0;
    for (int ki = 0; ki < 4; ++ki) {
        for (int trial = 0; trial < 10; ++trial) {
            ScenarioOptions opts;
            opts.magnitude = 0.7 + 0.06 * trial;
            opts.bend_azimuth = -0.2 + 0.04 * trial;
            const auto states = make_scenario(kinds[ki], opts);

            EmulateOptions clean;
            clean.noise_sigma = 0.0;
            clean.seed = 1000u + 40u * ki + trial;
            const auto clean_stream = emulate_stream(channels, states, clean);
            const auto clean_cond = condition(clean_stream);
            const std::span<const SensorFrame> clean_window{
                clean_cond.data() + 200, clean_cond.size() - 200};
            if (classify_mode(clean_window, azimuths) ==
                expected_label(kinds[ki]))
                ++clean_ok;

            // noise scaled to 5% of this trial's peak excursion
            double peak = 0.0;
            for (const SensorFrame& f : clean_stream)
                for (const double p : f.pressures)
                    peak = std::max(peak, std::abs(p - kAmbientPressure));
            EmulateOptions noisy;
            noisy.noise_sigma = 0.05 * peak;
            noisy.seed = 2000u + 40u * ki + trial;
            const auto noisy_stream = emulate_stream(channels, states, noisy);
            const auto noisy_cond = condition(noisy_stream);
            const std::span<const SensorFrame> noisy_window{
                noisy_cond.data() + 200, noisy_cond.size() - 200};
            if (classify_mode(noisy_window, azimuths) ==
                expected_label(kinds[ki]))
                ++noisy_ok;
        }
    }
    c.require(clean_ok == 40, "clean classification %d/40", clean_ok);
    c.require(noisy_ok >= 36, "noisy classification %d/40, need 36", noisy_ok);

    double prev = -1.0;
    for (const double modulus : {10.0, 50.0, 200.0, 1000.0, 5000.0}) {
        const double p = grasp_pressure(modulus, 300.0, 0.5, 1000.0);
        c.require(p > prev, "grasp pressure not monotone at %.0f kPa",
                  modulus);
        prev = p;
    }
    c.require(grasp_pressure(50.0, 300.0, 0.5, 1000.0) <
                  grasp_pressure(2000.0, 300.0, 0.5, 1000.0),
              "soft contact not below rigid contact");
}

// ---- 7: telemetry codec ----------------------------------------------------

void check_telemetry(Checker& c) {
    std::mt19937 rng(99);
    std::uniform_int_distribution<std::uint32_t> u32;
    std::uniform_int_distribution<int> i16(-32768, 32767);

    std::vector<TelemetryFrame> sent(1000);
    std::vector<std::uint8_t> stream;
    for (std::size_t k = 0; k < sent.size(); ++k) {
        TelemetryFrame& f = sent[k];
        f.node_id = static_cast<std::uint8_t>(u32(rng) & 0xFF);
        f.seq = static_cast<std::uint8_t>(k & 0xFF);
        f.t_ms = u32(rng);
        for (auto& p : f.pressures_cpa) p = u32(rng) % (kPressureMaxCpa + 1);
        for (auto& v : f.imu_raw) v = static_cast<std::int16_t>(i16(rng));
        const auto bytes = encode_frame(f);
        stream.insert(stream.end(), bytes.begin(), bytes.end());
    }
    const auto [frames, diag] = decode_stream(stream);
    c.require(frames.size() == sent.size() && diag.frames_ok == sent.size() &&
                  diag.crc_failures == 0 && diag.bytes_skipped == 0,
              "clean stream decode: %zu frames, %llu ok, %llu crc, %llu "
              "skipped",
              frames.size(),
              static_cast<unsigned long long>(diag.frames_ok),
              static_cast<unsigned long long>(diag.crc_failures),
              static_cast<unsigned long long>(diag.bytes_skipped));
    bool identical = frames.size() == sent.size();
    for (std::size_t k = 0; identical && k < frames.size(); ++k)
        identical = frames[k] == sent[k];
    c.require(identical, "round-trip frames differ from the sent frames");

    const auto reference = encode_frame(sent[0]);
    int rejected = 0;
    for (std::size_t bit = 0; bit < reference.size() * 8; ++bit) {
        auto corrupted = reference;
        corrupted[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        const auto [bad_frames, bad_diag] = decode_stream(corrupted);
        if (bad_frames.empty()) ++rejected;
    }
    c.require(rejected == 368, "%d/368 single-bit corruptions rejected",
              rejected);

    // garbage gaps up to 64 bytes; 0xAA never appears in the garbage, so
    // the only sync candidates are the real frames
    std::uniform_int_distribution<int> gap_len(0, 64);
    std::uniform_int_distribution<int> gap_byte(0x00, 0xA9);
    std::vector<std::uint8_t> gappy;
    std::vector<TelemetryFrame> gap_sent(50);
    for (std::size_t k = 0; k < gap_sent.size(); ++k) {
        TelemetryFrame& f = gap_sent[k];
        f.node_id = 7;
        f.seq = static_cast<std::uint8_t>(k & 0xFF);
        f.t_ms = static_cast<std::uint32_t>(5 * k);
        for (auto& p : f.pressures_cpa) p = u32(rng) % (kPressureMaxCpa + 1);
        const int gap = gap_len(rng);
        for (int b = 0; b < gap; ++b)
            gappy.push_back(static_cast<std::uint8_t>(gap_byte(rng)));
        const auto bytes = encode_frame(f);
        gappy.insert(gappy.end(), bytes.begin(), bytes.end());
    }
    const auto [gap_frames, gap_diag] = decode_stream(gappy);
    bool recovered = gap_frames.size() == gap_sent.size();
    for (std::size_t k = 0; recovered && k < gap_frames.size(); ++k)
        recovered = gap_frames[k] == gap_sent[k];
    c.require(recovered,
              "resync recovered %zu/%zu frames across garbage gaps",
              gap_frames.size(), gap_sent.size());
    c.require(gap_diag.seq_gaps == 0,
              "resync reported %llu spurious sequence gaps",
              static_cast<unsigned long long>(gap_diag.seq_gaps));
}

// ---- 8: end-to-end pipeline ------------------------------------------------

void check_pipeline(Checker& c) {
    const auto channels = route_channels(builtin_design("N6"));
    std::array<double, 6> azimuths{};
    for (int i = 0; i < 6; ++i) azimuths[i] = channel_mid_azimuth(channels[i]);

    for (const ScenarioKind kind :
         {ScenarioKind::Axial, ScenarioKind::BendEW, ScenarioKind::BendNS,
          ScenarioKind::Torsion}) {
        const auto states = make_scenario(kind, {});
        EmulateOptions opts;
        opts.seed = 7;
        const auto stream = emulate_stream(channels, states, opts);

        std::vector<std::uint8_t> bytes;
        for (std::size_t k = 0; k < stream.size(); ++k) {
            const TelemetryFrame frame = frame_from_sensor(
                stream[k], 1, static_cast<std::uint8_t>(k & 0xFF));
            const auto encoded = encode_frame(frame);
            bytes.insert(bytes.end(), encoded.begin(), encoded.end());
        }
        const auto [frames, diag] = decode_stream(bytes);
        c.require(frames.size() == stream.size() && diag.crc_failures == 0,
                  "%s bus transfer lost frames (%zu of %zu)",
                  to_string(kind).c_str(), frames.size(), stream.size());
        if (frames.size() != stream.size()) continue;

        std::vector<SensorFrame> received(frames.size());
        for (std::size_t k = 0; k < frames.size(); ++k)
            received[k] = sensor_from_frame(frames[k]);
        const auto conditioned = condition(received);
        const std::span<const SensorFrame> window{conditioned.data() + 200,
                                                  conditioned.size() - 200};
        const ModeLabel label = classify_mode(window, azimuths);
        c.require(label == expected_label(kind),
                  "%s classified as %s", to_string(kind).c_str(),
                  to_string(label).c_str());
    }
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;
        std::function<void(Checker&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"design table regression", 1.0, check_design_table},
        {"stiffness model", 1.0, check_stiffness},
        {"lattice mesh generation", 30.0, check_meshes},
        {"kinematics core", 30.0, check_kinematics},
        {"tracking simulation", 30.0, check_tracking},
        {"pressure sensing and classification", 30.0, check_sensing},
        {"telemetry codec", 10.0, check_telemetry},
        {"end-to-end pipeline", 10.0, check_pipeline},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        Checker checker;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criterion.run(checker);
        } catch (const std::exception& e) {
            checker.errors.push_back(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        if (elapsed > criterion.budget_s)
            checker.errors.push_back("over the " +
                                     std::to_string(criterion.budget_s) +
                                     " s budget");
        const bool pass = checker.errors.empty();
        std::printf("%s  %-38s (%6.2f s)\n", pass ? "PASS" : "FAIL",
                    criterion.name, elapsed);
        for (const std::string& error : checker.errors)
            std::printf("      - %s\n", error.c_str());
        if (!pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
