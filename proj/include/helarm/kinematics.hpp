#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "helarm/geometry.hpp"

namespace helarm {

// One segment's constant-curvature state. curvature in 1/mm, arc_length in
// mm. At zero curvature the bend azimuth is canonically zero.
struct ArcConfig {
    double curvature = 0.0;
    double bend_azimuth = 0.0;
    double arc_length = 0.0;
};

void validate_arc(const ArcConfig& arc);

struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Pose operator*(const Pose& other) const {
        return {rotation * other.rotation,
                rotation * other.translation + translation};
    }
};

struct SegmentSpec {
    HelicoidDesign design;
    double rest_length = 108.0;  // mm, the lattice height
    double cable_radius = 24.0;  // cable attachment radius, mm
    std::array<double, 3> cable_azimuths = {0.0, 2.0943951023931953,
                                            4.1887902047863905};
};

// Base rotation + stacked segments + gripper. Joint vector layout:
//   q = [base_angle,
//        (curvature, bend_azimuth, length_offset) per segment,
//        gripper_opening]
// where length_offset is the deviation from the segment rest length, so
// q = 0 is the straight arm at rest height.
struct RobotDescription {
    bool base_rotation = true;
    double base_offset = 75.0;      // motor base to first plate, mm
    double plate_offset = 7.5;      // rigid end plate, one per segment face
    double gripper_length = 150.0;  // mm
    std::array<double, 2> gripper_range = {0.0, 1.0};
    double gripper_cable_travel = 20.0;  // mm of cable per unit opening
    double spool_radius = 10.0;          // mm
    std::vector<SegmentSpec> segments;

    int dof() const { return 2 + 3 * static_cast<int>(segments.size()); }
};

// Four N6 segments, base rotation, gripper: 14 DoF.
RobotDescription default_robot();

void validate_robot(const RobotDescription& robot);

// Per-joint limits used by the IK solver, as (lower, upper) pairs.
struct JointLimits {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};
JointLimits joint_limits(const RobotDescription& robot);
Eigen::VectorXd clamp_to_limits(const RobotDescription& robot,
                                const Eigen::VectorXd& q);

ArcConfig segment_arc(const RobotDescription& robot, const Eigen::VectorXd& q,
                      int segment);

// Cable length of each tendon for a bent segment:
//   l_i = length * (1 - curvature * r_c * cos(azimuth_i - bend_azimuth))
std::array<double, 3> cables_from_config(
    const ArcConfig& arc, double cable_radius,
    const std::array<double, 3>& azimuths);

struct CableFit {
    ArcConfig config;
    double residual = 0.0;  // max |given - refit| over the three cables, mm
};

// Exact inverse of cables_from_config (three unknowns, three cables).
CableFit config_from_cables(const std::array<double, 3>& lengths,
                            double cable_radius,
                            const std::array<double, 3>& azimuths);

// Constant-curvature arc transform; the straight limit is evaluated by
// series so the map is continuous at zero curvature.
Pose segment_fk(const ArcConfig& arc);

struct ArmPose {
    std::vector<Pose> plate_poses;  // distal end plate of every segment
    Pose tip;
};

ArmPose arm_fk(const RobotDescription& robot, const Eigen::VectorXd& q);
Eigen::Vector3d tip_position(const RobotDescription& robot,
                             const Eigen::VectorXd& q);

// 6 x dof tip Jacobian from central differences on arm_fk: rows are linear
// velocity (mm per unit joint) then angular velocity (rotation-vector rate).
// Steps are 1e-6 of each coordinate's scale.
Eigen::MatrixXd jacobian(const RobotDescription& robot,
                         const Eigen::VectorXd& q);

// Per-joint scale used for finite-difference steps and solver conditioning:
// 1 for angles, the segment rest length for length offsets, its inverse for
// curvatures.
Eigen::VectorXd joint_scales(const RobotDescription& robot);

struct IkOptions {
    double damping = 1e-2;     // applied to the scale-normalized system
    int max_iter = 1200;       // shared across restart attempts
    double tolerance = 0.5;    // mm
    double step_clamp = 0.2;   // per-joint, in scale-normalized units
    double task_step = 30.0;   // task-space error clamp per iteration, mm
};

struct IkResult {
    Eigen::VectorXd q;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Position-only damped least squares toward a Cartesian target.
IkResult solve_ik(const RobotDescription& robot,
                  const Eigen::Vector3d& target_position,
                  const Eigen::VectorXd& q0, const IkOptions& options = {});

// Solver-side bend coordinates: each segment's (curvature, bend_azimuth)
// pair is replaced by the bend vector (k cos az, k sin az), which is smooth
// through the straight configuration where the azimuth is undefined. Same
// vector length and ordering as q.
Eigen::VectorXd to_bend_vector(const RobotDescription& robot,
                               const Eigen::VectorXd& q);
Eigen::VectorXd from_bend_vector(const RobotDescription& robot,
                                 const Eigen::VectorXd& z);
Eigen::VectorXd clamp_bend_vector(const RobotDescription& robot,
                                  const Eigen::VectorXd& z);
// 3 x dof position Jacobian in bend-vector coordinates.
Eigen::MatrixXd bend_vector_jacobian(const RobotDescription& robot,
                                     const Eigen::VectorXd& z);

// Longest possible straight reach, used as the workspace bounding sphere.
double max_reach(const RobotDescription& robot);

// Motor conventions: motor 0 drives base rotation directly; motors
// 1..3*segments wind the segment cables (angle = cable delta / spool
// radius, so shortening is negative); the last motor drives the gripper.
Eigen::VectorXd cable_lengths(const RobotDescription& robot,
                              const Eigen::VectorXd& q);
Eigen::VectorXd motor_angles_from_cables(const RobotDescription& robot,
                                         const Eigen::VectorXd& cable_deltas);
Eigen::VectorXd motor_positions(const RobotDescription& robot,
                                const Eigen::VectorXd& q);
Eigen::VectorXd q_from_motor_positions(const RobotDescription& robot,
                                       const Eigen::VectorXd& motors);

} // namespace helarm
