#include "helarm/actuation.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"

namespace helarm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_workspace(const Trajectory& traj, const RobotDescription& robot) {
    const double reach = max_reach(robot);
    for (std::size_t i = 0; i < traj.positions.size(); ++i) {
        const Eigen::Vector3d& p = traj.positions[i];
        if (p.norm() <= reach && p.z() >= 0.0) continue;
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "trajectory leaves the workspace at sample %zu "
                      "(t=%.3f s, position %.1f %.1f %.1f mm)",
                      i, traj.t[i], p.x(), p.y(), p.z());
        throw ValidationError(msg);
    }
}

} // namespace

Trajectory make_trajectory(TrajectoryKind kind, const TrajectoryParams& params,
                           double dt, double duration,
                           const RobotDescription* workspace) {
    if (dt <= 0.0) throw ValidationError("trajectory dt must be positive");
    if (duration < dt)
        throw ValidationError("trajectory duration must cover at least one step");
    if (kind != TrajectoryKind::Line && params.radius <= 0.0)
        throw ValidationError("trajectory radius must be positive");

    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
    Trajectory traj;
    traj.dt = dt;
    traj.t.reserve(steps + 1);
    traj.positions.reserve(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double s = t / (static_cast<double>(steps) * dt);
        Eigen::Vector3d p = params.anchor;
        switch (kind) {
        case TrajectoryKind::Line:
            p.z() += params.displacement * s;
            break;
        case TrajectoryKind::Circle:
        case TrajectoryKind::Spiral: {
            const double angle = params.start_angle + kTwoPi * params.turns * s;
            p.x() += params.radius * std::cos(angle);
            p.y() += params.radius * std::sin(angle);
            if (kind == TrajectoryKind::Spiral) p.z() += params.rise * s;
            break;
        }
        }
        traj.t.push_back(t);
        traj.positions.push_back(p);
    }
    if (workspace) check_workspace(traj, *workspace);
    return traj;
}

VelocitySchedule plan_velocities(const RobotDescription& robot,
                                 const Trajectory& traj,
                                 const Eigen::VectorXd& q_init,
                                 const PlanOptions& options) {
    if (traj.positions.size() < 2)
        throw ValidationError("trajectory needs at least two samples");
    if (q_init.size() != robot.dof())
        throw ValidationError("joint vector has wrong dimension");

    VelocitySchedule schedule;
    schedule.dt = traj.dt;
    schedule.q_init = q_init;
    schedule.q_path.push_back(q_init);

    const double start_gap =
        (traj.positions.front() - tip_position(robot, q_init)).norm();
    if (start_gap > options.start_tolerance) {
        char msg[120];
        std::snprintf(msg, sizeof(msg),
                      "trajectory starts %.3f mm away from the initial tip",
                      start_gap);
        throw ValidationError(msg);
    }

    const Eigen::VectorXd scales = joint_scales(robot);
    const double lambda2 = options.damping * options.damping;

    // Resolved-rate stepping in bend-vector coordinates, which stay smooth
    // through straight segments.
    Eigen::VectorXd z = to_bend_vector(robot, q_init);
    Eigen::VectorXd q = from_bend_vector(robot, z);
    Eigen::VectorXd motors_prev = motor_positions(robot, q);
    for (std::size_t k = 0; k + 1 < traj.positions.size(); ++k) {
        const Eigen::Vector3d e = traj.positions[k + 1] - tip_position(robot, q);
        const Eigen::MatrixXd jac_pos =
            bend_vector_jacobian(robot, z) * scales.asDiagonal();
        const Eigen::Matrix3d gram = jac_pos * jac_pos.transpose() +
                                     lambda2 * Eigen::Matrix3d::Identity();
        const Eigen::VectorXd dz = jac_pos.transpose() * gram.ldlt().solve(e);
        if (e.norm() > 1e-12 && (jac_pos * dz - e).norm() > 0.5 * e.norm())
            ++schedule.damped_steps;
        z = clamp_bend_vector(robot, z + scales.asDiagonal() * dz);
        q = from_bend_vector(robot, z);

        const Eigen::VectorXd motors = motor_positions(robot, q);
        schedule.commanded.push_back((motors - motors_prev) / traj.dt);
        schedule.q_path.push_back(q);
        motors_prev = motors;
    }
    return schedule;
}

TrackingResult simulate_tracking(const RobotDescription& robot,
                                 const VelocitySchedule& schedule,
                                 const MotorModel& motor) {
    if (schedule.commanded.empty())
        throw ValidationError("velocity schedule is empty");
    if (motor.time_constant < 0.0)
        throw ValidationError("motor time constant must be non-negative");

    const int n_motors = static_cast<int>(schedule.commanded.front().size());
    const double alpha =
        schedule.dt / (motor.time_constant + schedule.dt);

    TrackingResult result;
    result.dt = schedule.dt;
    result.commanded = schedule.commanded;

    Eigen::VectorXd v_exec = Eigen::VectorXd::Zero(n_motors);
    Eigen::VectorXd motors_exec = motor_positions(robot, schedule.q_init);
    result.tip_commanded.push_back(tip_position(robot, schedule.q_path[0]));
    result.tip_executed.push_back(
        tip_position(robot, q_from_motor_positions(robot, motors_exec)));
    for (std::size_t k = 0; k < schedule.commanded.size(); ++k) {
        v_exec += alpha * (schedule.commanded[k] - v_exec);
        if (motor.velocity_limit > 0.0)
            v_exec = v_exec.cwiseMax(-motor.velocity_limit)
                         .cwiseMin(motor.velocity_limit);
        result.executed.push_back(v_exec);
        motors_exec += v_exec * schedule.dt;
        result.tip_commanded.push_back(
            tip_position(robot, schedule.q_path[k + 1]));
        result.tip_executed.push_back(
            tip_position(robot, q_from_motor_positions(robot, motors_exec)));
    }

    result.rmse.resize(n_motors);
    result.phase_lag.resize(n_motors);
    const std::size_t n = result.commanded.size();
    std::vector<double> cmd(n), exec(n);
    for (int m = 0; m < n_motors; ++m) {
        for (std::size_t k = 0; k < n; ++k) {
            cmd[k] = result.commanded[k][m];
            exec[k] = result.executed[k][m];
        }
        const MotorMetrics metrics = tracking_metrics(cmd, exec, schedule.dt);
        result.rmse[m] = metrics.rmse;
        result.phase_lag[m] = metrics.phase_lag;
    }
    return result;
}

MotorMetrics tracking_metrics(std::span<const double> commanded,
                              std::span<const double> executed, double dt) {
    if (commanded.size() != executed.size())
        throw ValidationError("commanded and executed series differ in length");
    if (!(dt > 0.0)) throw ValidationError("metrics need a positive sample period");
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(commanded.size());
    if (n < 2) throw ValidationError("need at least two samples for metrics");

    MotorMetrics metrics;
    double sq = 0.0, mean_c = 0.0, mean_e = 0.0;
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const double d = commanded[k] - executed[k];
        sq += d * d;
        mean_c += commanded[k];
        mean_e += executed[k];
    }
    metrics.rmse = std::sqrt(sq / static_cast<double>(n));
    mean_c /= static_cast<double>(n);
    mean_e /= static_cast<double>(n);

    // Demeaned cross-correlation; positive lag means executed is late.
    // Lags scanned outward from zero so exact matches win ties.
    const std::ptrdiff_t max_lag = std::min<std::ptrdiff_t>(n - 1, n / 2);
    auto correlation = [&](std::ptrdiff_t lag) {
        double sum = 0.0;
        for (std::ptrdiff_t k = 0; k < n; ++k) {
            const std::ptrdiff_t j = k + lag;
            if (j < 0 || j >= n) continue;
            sum += (commanded[k] - mean_c) * (executed[j] - mean_e);
        }
        return sum;
    };
    std::ptrdiff_t best_lag = 0;
    double best = correlation(0);
    for (std::ptrdiff_t lag = 1; lag <= max_lag; ++lag) {
        for (const std::ptrdiff_t signed_lag : {lag, -lag}) {
            const double c = correlation(signed_lag);
            if (c > best) {
                best = c;
                best_lag = signed_lag;
            }
        }
    }
    metrics.phase_lag = static_cast<double>(best_lag) * dt;
    return metrics;
}

void write_run_csv(const TrackingResult& result, std::ostream& out) {
    out << "t,motor_id,v_cmd,v_exec\n";
    char line[128];
    for (std::size_t k = 0; k < result.commanded.size(); ++k) {
        const double t = static_cast<double>(k) * result.dt;
        for (int m = 0; m < result.commanded[k].size(); ++m) {
            std::snprintf(line, sizeof(line), "%.6g,%d,%.9g,%.9g\n", t, m,
                          result.commanded[k][m], result.executed[k][m]);
            out << line;
        }
    }
}

void write_tip_csv(const TrackingResult& result, std::ostream& out) {
    out << "t,x,y,z\n";
    char line[128];
    for (std::size_t k = 0; k < result.tip_executed.size(); ++k) {
        const Eigen::Vector3d& p = result.tip_executed[k];
        std::snprintf(line, sizeof(line), "%.6g,%.6g,%.6g,%.6g\n",
                      static_cast<double>(k) * result.dt, p.x(), p.y(), p.z());
        out << line;
    }
}

std::string metrics_json(const TrackingResult& result) {
    nlohmann::json doc;
    for (int m = 0; m < result.rmse.size(); ++m) {
        doc[std::to_string(m)] = {{"rmse", result.rmse[m]},
                                  {"phase_lag_s", result.phase_lag[m]}};
    }
    return doc.dump(2);
}

} // namespace helarm
