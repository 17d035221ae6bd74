#pragma once

// Trajectory generation, resolved-rate velocity planning, first-order motor
// lag simulation, and commanded-vs-executed tracking metrics.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "helarm/errors.hpp"
#include "helarm/kinematics.hpp"

namespace helarm {

// Uniformly sampled Cartesian tip path. t is strictly increasing with
// constant spacing dt; positions.size() == t.size().
struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::Vector3d> positions;
    double dt = 0.0;
};

enum class TrajectoryKind { Line, Circle, Spiral };

struct TrajectoryParams {
    // Line: start point. Circle/Spiral: center (spiral starts at anchor.z).
    Eigen::Vector3d anchor{0.0, 0.0, 0.0};
    double displacement = -100.0; // line: signed z travel, mm
    double radius = 80.0;         // circle/spiral, mm
    double rise = 100.0;          // spiral: total z gain, mm
    double turns = 1.0;           // circle/spiral: revolutions
    double start_angle = 0.0;     // rad, measured from +x
};

// Samples the path on [0, duration] inclusive. When workspace is given,
// every sample must lie inside the robot's bounding sphere with z >= 0;
// the error message names the first violating sample.
Trajectory make_trajectory(TrajectoryKind kind, const TrajectoryParams& params,
                           double dt = 0.005, double duration = 10.0,
                           const RobotDescription* workspace = nullptr);

// First-order velocity lag. time_constant 0 means ideal (executed equals
// commanded); velocity_limit 0 means unlimited, otherwise rad/s clamp.
struct MotorModel {
    double time_constant = 0.0;
    double velocity_limit = 0.0;
};

// Open-loop plan: q_path[k] is the planner's own integrated state, never a
// simulated one. commanded[k] is the motor-velocity vector applied over
// [t_k, t_k + dt); q_path.size() == commanded.size() + 1.
struct VelocitySchedule {
    double dt = 0.0;
    Eigen::VectorXd q_init;
    std::vector<Eigen::VectorXd> q_path;
    std::vector<Eigen::VectorXd> commanded;
    // Steps where damping absorbed most of the task-space error, meaning
    // the damped pseudoinverse was operating near a singularity.
    int damped_steps = 0;
};

struct PlanOptions {
    double damping = 1e-2;
    double start_tolerance = 1.0; // mm between traj[0] and fk(q_init)
};

VelocitySchedule plan_velocities(const RobotDescription& robot,
                                 const Trajectory& traj,
                                 const Eigen::VectorXd& q_init,
                                 const PlanOptions& options = {});

struct TrackingResult {
    double dt = 0.0;
    std::vector<Eigen::VectorXd> commanded;
    std::vector<Eigen::VectorXd> executed;
    std::vector<Eigen::Vector3d> tip_commanded;
    std::vector<Eigen::Vector3d> tip_executed;
    Eigen::VectorXd rmse;      // per motor, rad/s
    Eigen::VectorXd phase_lag; // per motor, s (positive = executed late)
};

TrackingResult simulate_tracking(const RobotDescription& robot,
                                 const VelocitySchedule& schedule,
                                 const MotorModel& motor);

struct MotorMetrics {
    double rmse = 0.0;
    double phase_lag = 0.0;
};

// rmse over the common length; phase lag from the argmax of the demeaned
// cross-correlation at integer-sample resolution. Throws on series shorter
// than 2 samples or mismatched lengths.
MotorMetrics tracking_metrics(std::span<const double> commanded,
                              std::span<const double> executed, double dt);

// File formats shared with the command-line tool.
void write_run_csv(const TrackingResult& result, std::ostream& out);
void write_tip_csv(const TrackingResult& result, std::ostream& out);
std::string metrics_json(const TrackingResult& result);

} // namespace helarm
