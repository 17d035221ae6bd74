#include "helarm/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace helarm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::Matrix3d rot_z(double angle) {
    return Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ())
        .toRotationMatrix();
}

Pose translate_z(double distance) {
    Pose p;
    p.translation = Eigen::Vector3d(0.0, 0.0, distance);
    return p;
}

Eigen::Vector3d rotation_vector(const Eigen::Matrix3d& rotation) {
    const Eigen::AngleAxisd aa(rotation);
    return aa.angle() * aa.axis();
}

void check_dof(const RobotDescription& robot, const Eigen::VectorXd& q) {
    if (q.size() != robot.dof())
        throw ValidationError("joint vector has wrong dimension");
}

} // namespace

void validate_arc(const ArcConfig& arc) {
    if (arc.curvature < 0.0)
        throw ValidationError("curvature must be non-negative");
    if (arc.arc_length <= 0.0)
        throw ValidationError("arc_length must be positive");
    if (arc.curvature * arc.arc_length >= 2.0 * kPi)
        throw ValidationError("arc self-intersects: curvature * length >= 2*pi");
}

RobotDescription default_robot() {
    RobotDescription robot;
    SegmentSpec seg;
    seg.design = builtin_design("N6");
    robot.segments.assign(4, seg);
    return robot;
}

void validate_robot(const RobotDescription& robot) {
    if (robot.segments.empty())
        throw ValidationError("robot needs at least one segment");
    if (robot.spool_radius <= 0.0)
        throw ValidationError("spool_radius must be positive");
    if (robot.gripper_range[1] < robot.gripper_range[0])
        throw ValidationError("gripper_range is inverted");
    for (const auto& seg : robot.segments) {
        validate_design(seg.design);
        if (seg.rest_length <= 0.0)
            throw ValidationError("segment rest_length must be positive");
        if (seg.cable_radius <= 0.0)
            throw ValidationError("cable_radius must be positive");
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (std::abs(seg.cable_azimuths[i] - seg.cable_azimuths[j]) <
                    1e-9)
                    throw ValidationError("cable azimuths must be distinct");
    }
}

JointLimits joint_limits(const RobotDescription& robot) {
    const int n = robot.dof();
    JointLimits lim{Eigen::VectorXd::Constant(n, -kInf),
                    Eigen::VectorXd::Constant(n, kInf)};
    if (!robot.base_rotation) {
        lim.lower[0] = 0.0;
        lim.upper[0] = 0.0;
    }
    for (std::size_t s = 0; s < robot.segments.size(); ++s) {
        const auto& seg = robot.segments[s];
        const int i = 1 + 3 * static_cast<int>(s);
        // Curvature bounded by cable positivity and arc validity at the
        // longest admissible length.
        const double max_len = 1.1 * seg.rest_length;
        const double kappa_max = 0.95 * std::min(1.0 / seg.cable_radius,
                                                 2.0 * kPi / max_len);
        lim.lower[i] = 0.0;
        lim.upper[i] = kappa_max;
        lim.lower[i + 2] = -0.4 * seg.rest_length;
        lim.upper[i + 2] = 0.1 * seg.rest_length;
    }
    lim.lower[n - 1] = robot.gripper_range[0];
    lim.upper[n - 1] = robot.gripper_range[1];
    return lim;
}

Eigen::VectorXd clamp_to_limits(const RobotDescription& robot,
                                const Eigen::VectorXd& q) {
    check_dof(robot, q);
    const JointLimits lim = joint_limits(robot);
    return q.cwiseMax(lim.lower).cwiseMin(lim.upper);
}

ArcConfig segment_arc(const RobotDescription& robot, const Eigen::VectorXd& q,
                      int segment) {
    check_dof(robot, q);
    const int i = 1 + 3 * segment;
    return {q[i], q[i + 1], robot.segments[segment].rest_length + q[i + 2]};
}

std::array<double, 3> cables_from_config(
    const ArcConfig& arc, double cable_radius,
    const std::array<double, 3>& azimuths) {
    validate_arc(arc);
    std::array<double, 3> lengths{};
    for (int i = 0; i < 3; ++i) {
        lengths[i] = arc.arc_length *
                     (1.0 - arc.curvature * cable_radius *
                                std::cos(azimuths[i] - arc.bend_azimuth));
        if (lengths[i] <= 0.0)
            throw ValidationError("over-curvature: cable length would be <= 0");
    }
    return lengths;
}

CableFit config_from_cables(const std::array<double, 3>& lengths,
                            double cable_radius,
                            const std::array<double, 3>& azimuths) {
    for (const double l : lengths)
        if (l <= 0.0) throw ValidationError("cable lengths must be positive");

    // l_i = L - (L k cos b) r_c cos a_i - (L k sin b) r_c sin a_i is linear
    // in (L, L k cos b, L k sin b).
    Eigen::Matrix3d A;
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = -cable_radius * std::cos(azimuths[i]);
        A(i, 2) = -cable_radius * std::sin(azimuths[i]);
        rhs[i] = lengths[i];
    }
    const double det = A.determinant();
    if (std::abs(det) < 1e-9 * cable_radius * cable_radius)
        throw ValidationError("cable azimuths do not determine a configuration");
    const Eigen::Vector3d x = A.partialPivLu().solve(rhs);
    if (x[0] <= 0.0)
        throw ValidationError("cable lengths imply non-positive arc length");

    CableFit fit;
    fit.config.arc_length = x[0];
    const double amplitude = std::hypot(x[1], x[2]);
    fit.config.curvature = amplitude / x[0];
    fit.config.bend_azimuth =
        amplitude > 1e-12 ? std::atan2(x[2], x[1]) : 0.0;

    const auto refit =
        cables_from_config(fit.config, cable_radius, azimuths);
    for (int i = 0; i < 3; ++i)
        fit.residual = std::max(fit.residual, std::abs(refit[i] - lengths[i]));
    return fit;
}

Pose segment_fk(const ArcConfig& arc) {
    const double kl = arc.curvature * arc.arc_length;
    double lateral;   // (1 - cos(k*l)) / k
    double vertical;  // sin(k*l) / k
    if (std::abs(kl) < 1e-6) {
        lateral = arc.curvature * arc.arc_length * arc.arc_length *
                  (0.5 - kl * kl / 24.0);
        vertical = arc.arc_length * (1.0 - kl * kl / 6.0);
    } else {
        lateral = (1.0 - std::cos(kl)) / arc.curvature;
        vertical = std::sin(kl) / arc.curvature;
    }
    const Eigen::Matrix3d plane = rot_z(arc.bend_azimuth);
    Pose pose;
    pose.translation = plane * Eigen::Vector3d(lateral, 0.0, vertical);
    pose.rotation =
        plane *
        Eigen::AngleAxisd(kl, Eigen::Vector3d::UnitY()).toRotationMatrix() *
        plane.transpose();
    return pose;
}

ArmPose arm_fk(const RobotDescription& robot, const Eigen::VectorXd& q) {
    check_dof(robot, q);
    ArmPose result;
    Pose pose;
    if (robot.base_rotation) pose.rotation = rot_z(q[0]);
    pose = pose * translate_z(robot.base_offset);
    for (std::size_t s = 0; s < robot.segments.size(); ++s) {
        pose = pose * translate_z(robot.plate_offset);
        pose = pose * segment_fk(segment_arc(robot, q, static_cast<int>(s)));
        pose = pose * translate_z(robot.plate_offset);
        result.plate_poses.push_back(pose);
    }
    result.tip = pose * translate_z(robot.gripper_length);
    return result;
}

Eigen::Vector3d tip_position(const RobotDescription& robot,
                             const Eigen::VectorXd& q) {
    return arm_fk(robot, q).tip.translation;
}

Eigen::VectorXd joint_scales(const RobotDescription& robot) {
    Eigen::VectorXd scales = Eigen::VectorXd::Ones(robot.dof());
    for (std::size_t s = 0; s < robot.segments.size(); ++s) {
        const int i = 1 + 3 * static_cast<int>(s);
        scales[i] = 1.0 / robot.segments[s].rest_length;
        scales[i + 2] = robot.segments[s].rest_length;
    }
    return scales;
}

Eigen::MatrixXd jacobian(const RobotDescription& robot,
                         const Eigen::VectorXd& q) {
    check_dof(robot, q);
    const int n = robot.dof();
    const Eigen::VectorXd scales = joint_scales(robot);
    Eigen::MatrixXd jac(6, n);
    for (int i = 0; i < n; ++i) {
        const double step = 1e-6 * scales[i];
        Eigen::VectorXd qp = q, qm = q;
        qp[i] += step;
        qm[i] -= step;
        const ArmPose fp = arm_fk(robot, qp);
        const ArmPose fm = arm_fk(robot, qm);
        jac.col(i).head<3>() =
            (fp.tip.translation - fm.tip.translation) / (2.0 * step);
        jac.col(i).tail<3>() =
            rotation_vector(fp.tip.rotation * fm.tip.rotation.transpose()) /
            (2.0 * step);
    }
    return jac;
}

double max_reach(const RobotDescription& robot) {
    double reach = robot.base_offset + robot.gripper_length;
    for (const auto& seg : robot.segments)
        reach += 2.0 * robot.plate_offset + 1.1 * seg.rest_length;
    return reach;
}

Eigen::VectorXd to_bend_vector(const RobotDescription& robot,
                               const Eigen::VectorXd& q) {
    check_dof(robot, q);
    Eigen::VectorXd z = q;
    for (std::size_t s = 0; s < robot.segments.size(); ++s) {
        const int i = 1 + 3 * static_cast<int>(s);
        z[i] = q[i] * std::cos(q[i + 1]);
        z[i + 1] = q[i] * std::sin(q[i + 1]);
    }
    return z;
}

Eigen::VectorXd from_bend_vector(const RobotDescription& robot,
                                 const Eigen::VectorXd& z) {
    check_dof(robot, z);
    Eigen::VectorXd q = z;
    for (std::size_t s = 0; s < robot.segments.size(); ++s) {
        const int i = 1 + 3 * static_cast<int>(s);
        const double kappa = std::hypot(z[i], z[i + 1]);
        q[i] = kappa;
        q[i + 1] = kappa > 1e-15 ? std::atan2(z[i + 1], z[i]) : 0.0;
    }
    return q;
}

Eigen::VectorXd clamp_bend_vector(const RobotDescription& robot,
                                  const Eigen::VectorXd& z) {
    check_dof(robot, z);
    const JointLimits lim = joint_limits(robot);
    Eigen::VectorXd out = z;
    const int n = robot.dof();
    out[0] = std::clamp(out[0], lim.lower[0], lim.upper[0]);
    out[n - 1] = std::clamp(out[n - 1], lim.lower[n - 1], lim.upper[n - 1]);
    for (std::size_t s = 0; s < robot.segments.size(); ++s) {
        const int i = 1 + 3 * static_cast<int>(s);
        const double kappa = std::hypot(out[i], out[i + 1]);
        if (kappa > lim.upper[i]) {
            out[i] *= lim.upper[i] / kappa;
            out[i + 1] *= lim.upper[i] / kappa;
        }
        out[i + 2] = std::clamp(out[i + 2], lim.lower[i + 2], lim.upper[i + 2]);
    }
    return out;
}

Eigen::MatrixXd bend_vector_jacobian(const RobotDescription& robot,
                                     const Eigen::VectorXd& z) {
    check_dof(robot, z);
    const int n = robot.dof();
    const Eigen::VectorXd scales = joint_scales(robot);
    Eigen::MatrixXd jac(3, n);
    for (int i = 0; i < n; ++i) {
        const double step = 1e-6 * scales[i];
        Eigen::VectorXd zp = z, zm = z;
        zp[i] += step;
        zm[i] -= step;
        jac.col(i) = (tip_position(robot, from_bend_vector(robot, zp)) -
                      tip_position(robot, from_bend_vector(robot, zm))) /
                     (2.0 * step);
    }
    return jac;
}

IkResult solve_ik(const RobotDescription& robot,
                  const Eigen::Vector3d& target_position,
                  const Eigen::VectorXd& q0, const IkOptions& options) {
    check_dof(robot, q0);
    if (target_position.norm() > max_reach(robot))
        throw ValidationError("target outside the workspace bounding sphere");

    IkResult result;
    result.q = clamp_to_limits(robot, q0);
    Eigen::Vector3d error = target_position - tip_position(robot, result.q);
    result.residual = error.norm();
    if (result.residual < options.tolerance) {
        result.converged = true;
        return result;
    }

    const Eigen::VectorXd scales = joint_scales(robot);
    const JointLimits limits = joint_limits(robot);
    const double lambda2 = options.damping * options.damping;

    // Position-only DLS is multi-modal for folded targets; on stall the
    // search reseeds from a random interior configuration. The generator is
    // fixed so results stay reproducible. The returned q is the best pose
    // seen across all attempts.
    std::mt19937 rng(0x5bd1e995u);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    int restarts = 0;
    const double target_azimuth =
        std::atan2(target_position.y(), target_position.x());
    const double target_polar = std::atan2(target_position.head<2>().norm(),
                                           target_position.z());
    const auto reseed = [&] {
        Eigen::VectorXd q_rand(robot.dof());
        const int flavor = restarts++;
        if (flavor == 0 || flavor == 1) {
            // two deterministic shapes aimed at the target before falling
            // back to random seeds: a uniform arc for near-boundary targets,
            // and a proximal fold for far-low ones (tilting early carries the
            // whole remaining length outward)
            double arc = 0.0;
            for (const auto& seg : robot.segments) arc += seg.rest_length;
            q_rand.setZero();
            if (robot.base_rotation) q_rand[0] = target_azimuth;
            for (size_t s = 0; s < robot.segments.size(); ++s) {
                if (flavor == 0) {
                    q_rand[1 + 3 * s] = 2.0 * target_polar / arc;
                    q_rand[3 + 3 * s] = 0.5 * limits.upper[3 + 3 * s];
                } else {
                    const double kappa_fold =
                        std::min(target_polar / robot.segments[0].rest_length,
                                 0.9 * limits.upper[1]);
                    q_rand[1 + 3 * s] = (s == 0) ? kappa_fold
                                                 : 0.1 * kappa_fold;
                }
                q_rand[2 + 3 * s] = robot.base_rotation ? 0.0 : target_azimuth;
            }
            return q_rand;
        }
        for (int j = 0; j < robot.dof(); ++j) {
            double lo = limits.lower[j];
            double hi = limits.upper[j];
            if (!std::isfinite(lo)) lo = -kPi;
            if (!std::isfinite(hi)) hi = kPi;
            q_rand[j] = lo + (hi - lo) * uniform(rng);
        }
        // every other attempt points the base at the target azimuth, which
        // reduces the remaining search to a near-planar problem
        if (robot.base_rotation && restarts % 2 == 0 &&
            target_position.head<2>().norm() > 1e-9) {
            q_rand[0] = target_azimuth + 0.3 * (uniform(rng) - 0.5);
        }
        return q_rand;
    };

    Eigen::VectorXd z = to_bend_vector(robot, result.q);
    Eigen::VectorXd q_cur = result.q;
    double residual = result.residual;
    Eigen::Vector3d err = error;
    double attempt_best = residual;
    int since_improve = 0;
    for (int iter = 0; iter < options.max_iter; ++iter) {
        const Eigen::MatrixXd jac_pos =
            bend_vector_jacobian(robot, z) * scales.asDiagonal();

        Eigen::Vector3d e = err;
        if (e.norm() > options.task_step) e *= options.task_step / e.norm();

        const Eigen::Matrix3d gram =
            jac_pos * jac_pos.transpose() +
            lambda2 * Eigen::Matrix3d::Identity();
        Eigen::VectorXd dz = jac_pos.transpose() * gram.ldlt().solve(e);
        dz = dz.cwiseMax(-options.step_clamp).cwiseMin(options.step_clamp);
        const Eigen::VectorXd step = scales.asDiagonal() * dz;

        // Backtrack until the residual improves; reject stalled steps.
        bool accepted = false;
        for (double t = 1.0; t > 1.0 / 64.0; t *= 0.5) {
            const Eigen::VectorXd z_try =
                clamp_bend_vector(robot, z + t * step);
            const Eigen::VectorXd q_try = from_bend_vector(robot, z_try);
            const Eigen::Vector3d e_try =
                target_position - tip_position(robot, q_try);
            if (e_try.norm() < residual) {
                z = z_try;
                q_cur = q_try;
                err = e_try;
                residual = e_try.norm();
                accepted = true;
                break;
            }
        }
        result.iterations = iter + 1;
        if (accepted && residual < result.residual) {
            result.q = q_cur;
            result.residual = residual;
        }
        if (result.residual < options.tolerance) {
            result.converged = true;
            break;
        }
        if (residual < 0.99 * attempt_best) {
            attempt_best = residual;
            since_improve = 0;
        } else {
            ++since_improve;
        }
        // a rejected step or a long crawl both mean this basin is exhausted
        if (!accepted || since_improve >= 20) {
            q_cur = clamp_to_limits(robot, reseed());
            z = to_bend_vector(robot, q_cur);
            err = target_position - tip_position(robot, q_cur);
            residual = err.norm();
            attempt_best = residual;
            since_improve = 0;
        }
    }
    return result;
}

Eigen::VectorXd cable_lengths(const RobotDescription& robot,
                              const Eigen::VectorXd& q) {
    check_dof(robot, q);
    Eigen::VectorXd lengths(3 * robot.segments.size());
    for (std::size_t s = 0; s < robot.segments.size(); ++s) {
        const auto& seg = robot.segments[s];
        const auto cables =
            cables_from_config(segment_arc(robot, q, static_cast<int>(s)),
                               seg.cable_radius, seg.cable_azimuths);
        for (int i = 0; i < 3; ++i) lengths[3 * s + i] = cables[i];
    }
    return lengths;
}

Eigen::VectorXd motor_angles_from_cables(const RobotDescription& robot,
                                         const Eigen::VectorXd& cable_deltas) {
    return cable_deltas / robot.spool_radius;
}

Eigen::VectorXd motor_positions(const RobotDescription& robot,
                                const Eigen::VectorXd& q) {
    check_dof(robot, q);
    const int n = robot.dof();
    Eigen::VectorXd motors(n);
    motors[0] = q[0];
    Eigen::VectorXd deltas = cable_lengths(robot, q);
    for (std::size_t s = 0; s < robot.segments.size(); ++s)
        for (int i = 0; i < 3; ++i)
            deltas[3 * s + i] -= robot.segments[s].rest_length;
    motors.segment(1, deltas.size()) =
        motor_angles_from_cables(robot, deltas);
    motors[n - 1] =
        q[n - 1] * robot.gripper_cable_travel / robot.spool_radius;
    return motors;
}

Eigen::VectorXd q_from_motor_positions(const RobotDescription& robot,
                                       const Eigen::VectorXd& motors) {
    if (motors.size() != robot.dof())
        throw ValidationError("motor vector has wrong dimension");
    const int n = robot.dof();
    Eigen::VectorXd q(n);
    q[0] = motors[0];
    for (std::size_t s = 0; s < robot.segments.size(); ++s) {
        const auto& seg = robot.segments[s];
        std::array<double, 3> lengths{};
        for (int i = 0; i < 3; ++i)
            lengths[i] =
                seg.rest_length + motors[1 + 3 * s + i] * robot.spool_radius;
        const CableFit fit =
            config_from_cables(lengths, seg.cable_radius, seg.cable_azimuths);
        const int base = 1 + 3 * static_cast<int>(s);
        q[base] = fit.config.curvature;
        q[base + 1] = fit.config.bend_azimuth;
        q[base + 2] = fit.config.arc_length - seg.rest_length;
    }
    q[n - 1] = motors[n - 1] * robot.spool_radius / robot.gripper_cable_travel;
    return q;
}

} // namespace helarm
