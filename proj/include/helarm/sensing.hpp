#pragma once

// Fluidic-innervation emulation: sealed-channel pressure from deformation,
// IMU synthesis, signal conditioning, deformation-mode classification, and
// the grasped-object stiffness indicator.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "helarm/errors.hpp"
#include "helarm/geometry.hpp"
#include "helarm/kinematics.hpp"

namespace helarm {

inline constexpr double kAmbientPressure = 101325.0; // Pa
inline constexpr double kPressureRangeLow = 26000.0;  // Pa, sensor floor
inline constexpr double kPressureRangeHigh = 126000.0;
inline constexpr double kPressureResolution = 0.02; // Pa
inline constexpr double kSampleRate = 200.0;        // Hz

struct SensorFrame {
    double t_ms = 0.0;
    std::array<double, 6> pressures{}; // Pa absolute
    Eigen::Vector3d accel{0.0, 0.0, 0.0}; // m/s^2, tip frame
    Eigen::Vector3d gyro{0.0, 0.0, 0.0};  // rad/s, tip frame
    bool clipped = false; // any pressure clamped to the sensor range
};

// Segment-level deformation. arc describes the bent centerline (arc_length
// already includes the axial strain); twist is torsion about the local axis.
struct DeformationState {
    ArcConfig arc{0.0, 0.0, 1.0};
    double axial_strain = 0.0; // l/l0 - 1
    double twist = 0.0;        // rad
};

enum class ModeLabel { Axial, BendEW, BendNS, Torsion, None };

std::string to_string(ModeLabel label);

// Isothermal sealed-channel pressure. The channel length scales with axial
// strain, with the bend-plane cosine at the channel's mid-height azimuth,
// and with the helix stretch produced by torsion; pressure follows from
// constant-cross-section Boyle's law.
double channel_pressure(const ChannelPath& channel,
                        const DeformationState& state,
                        double ambient = kAmbientPressure);

struct EmulateOptions {
    double noise_sigma = 20.0; // Pa, additive Gaussian before quantization
    std::uint32_t seed = 1234;
    double ambient = kAmbientPressure;
    double sample_rate = kSampleRate;
};

// One frame per state sample. Pressures get noise, then quantization to the
// sensor resolution, then clamping to the sensor range (flagged). accel is
// gravity expressed in the tip frame; gyro is the finite-difference body
// rate of the tip frame.
std::vector<SensorFrame> emulate_stream(
    const std::vector<ChannelPath>& channels,
    const std::vector<DeformationState>& states,
    const EmulateOptions& options = {});

// Single-pole low-pass on all twelve channels, then zeroing against the
// mean of the first zero_window seconds. Throws if the stream is shorter
// than the zero window.
std::vector<SensorFrame> condition(const std::vector<SensorFrame>& stream,
                                   double cutoff_hz = 5.0,
                                   double zero_window = 1.0);

struct ModeFeatures {
    double mean_pressure = 0.0;      // Pa, mean over channels and window
    double harmonic_amplitude = 0.0; // Pa, first circular harmonic
    double harmonic_phase = 0.0;     // rad
    double gyro_z_integral = 0.0;    // rad
};

struct ClassifyOptions {
    double pressure_threshold = 200.0; // Pa
    double dominance_ratio = 2.0;      // harmonic vs uniform mean
    double gyro_integral_threshold = 0.05; // rad
    double min_window = 0.5;           // s
};

// Window must span at least min_window seconds of conditioned frames.
ModeLabel classify_mode(std::span<const SensorFrame> window,
                        const std::array<double, 6>& channel_azimuths,
                        const ClassifyOptions& options = {},
                        ModeFeatures* features = nullptr);

// Series contact-stiffness indicator: delta_p = gain * closure *
// k_g*k_obj/(k_g + k_obj) with k_obj = contact_scale * object modulus.
double grasp_pressure(double object_modulus_kpa, double grip_stiffness,
                      double closure, double gain,
                      double contact_scale = 1.0);

enum class ScenarioKind { Axial, BendEW, BendNS, Torsion, None };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_from_string(const std::string& name);
ModeLabel expected_label(ScenarioKind kind);

// Settle (rest), linear ramp, then hold at full deformation.
struct ScenarioOptions {
    double duration = 3.0;
    double settle = 1.0;
    double ramp = 1.0;
    double magnitude = 1.0;      // scales the mode's nominal deformation
    double bend_azimuth = 0.0;   // added to the mode's nominal bend plane
    double sample_rate = kSampleRate;
    double segment_height = 108.0; // rest length of the sensed segment, mm
};

std::vector<DeformationState> make_scenario(ScenarioKind kind,
                                            const ScenarioOptions& options = {});

// Stream CSV: t_ms,p0..p5,ax,ay,az,gx,gy,gz
void write_stream_csv(std::span<const SensorFrame> stream, std::ostream& out);
std::vector<SensorFrame> read_stream_csv(std::istream& in);

std::string classify_report_json(ModeLabel label, const ModeFeatures& features,
                                 double t0_ms, double t1_ms);

} // namespace helarm
