#include "helarm/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "json.hpp"

namespace helarm {

namespace {

constexpr double kGravity = 9.80665; // m/s^2, matches the IMU LSB scale

Eigen::Matrix3d tip_rotation(const DeformationState& state) {
    return segment_fk(state.arc).rotation *
           Eigen::AngleAxisd(state.twist, Eigen::Vector3d::UnitZ())
               .toRotationMatrix();
}

double quantize(double pressure) {
    return std::round(pressure / kPressureResolution) * kPressureResolution;
}

} // namespace

std::string to_string(ModeLabel label) {
    switch (label) {
    case ModeLabel::Axial: return "Axial";
    case ModeLabel::BendEW: return "BendEW";
    case ModeLabel::BendNS: return "BendNS";
    case ModeLabel::Torsion: return "Torsion";
    case ModeLabel::None: return "None";
    }
    return "None";
}

double channel_pressure(const ChannelPath& channel,
                        const DeformationState& state, double ambient) {
    const double rho = channel.radius;
    const double helical = rho * channel.wrap_angle;
    const double axial_sq = channel.rest_length * channel.rest_length -
                            helical * helical;
    if (axial_sq <= 0.0)
        throw ValidationError("channel rest_length shorter than its own wrap");
    const double height = std::sqrt(axial_sq);

    const double bend_factor =
        1.0 - state.arc.curvature * rho *
                  std::cos(channel_mid_azimuth(channel) -
                           state.arc.bend_azimuth);
    // zero torsion leaves the channel length unchanged
    const double twisted = rho * (channel.wrap_angle + state.twist);
    const double twist_factor =
        state.twist == 0.0
            ? 1.0
            : std::sqrt(height * height + twisted * twisted) /
                  channel.rest_length;
    const double factor =
        (1.0 + state.axial_strain) * bend_factor * twist_factor;
    if (factor <= 0.0)
        throw ValidationError("over-deformation: channel length would vanish");
    return ambient / factor;
}

std::vector<SensorFrame> emulate_stream(
    const std::vector<ChannelPath>& channels,
    const std::vector<DeformationState>& states,
    const EmulateOptions& options) {
    if (channels.size() != 6)
        throw ValidationError("emulation expects exactly six channels");
    if (options.sample_rate <= 0.0)
        throw ValidationError("sample_rate must be positive");

    std::mt19937 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double dt = 1.0 / options.sample_rate;

    std::vector<Eigen::Matrix3d> rotations(states.size());
    for (std::size_t k = 0; k < states.size(); ++k)
        rotations[k] = tip_rotation(states[k]);

    std::vector<SensorFrame> stream;
    stream.reserve(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        SensorFrame frame;
        frame.t_ms = static_cast<double>(k) * 1000.0 * dt;
        for (std::size_t c = 0; c < 6; ++c) {
            double p = channel_pressure(channels[c], states[k], options.ambient);
            if (options.noise_sigma > 0.0)
                p += options.noise_sigma * gauss(rng);
            p = quantize(p);
            if (p < kPressureRangeLow || p > kPressureRangeHigh) {
                p = std::clamp(p, kPressureRangeLow, kPressureRangeHigh);
                frame.clipped = true;
            }
            frame.pressures[c] = p;
        }
        frame.accel = rotations[k].transpose() *
                      Eigen::Vector3d(0.0, 0.0, -kGravity);
        if (k + 1 < states.size()) {
            const Eigen::AngleAxisd step(rotations[k].transpose() *
                                         rotations[k + 1]);
            frame.gyro = step.angle() * step.axis() / dt;
        } else if (k > 0) {
            frame.gyro = stream.back().gyro;
        }
        stream.push_back(frame);
    }
    return stream;
}

std::vector<SensorFrame> condition(const std::vector<SensorFrame>& stream,
                                   double cutoff_hz, double zero_window) {
    if (cutoff_hz <= 0.0) throw ValidationError("cutoff must be positive");
    if (stream.size() < 2)
        throw ValidationError("stream too short to condition");
    const double dt = (stream[1].t_ms - stream[0].t_ms) / 1000.0;
    if (dt <= 0.0) throw ValidationError("stream timestamps must increase");
    const auto zero_count =
        static_cast<std::size_t>(std::llround(zero_window / dt));
    if (zero_count < 1 || stream.size() < zero_count)
        throw ValidationError("stream shorter than the zeroing window");

    const double tau = 1.0 / (2.0 * std::numbers::pi * cutoff_hz);
    const double alpha = dt / (tau + dt);

    auto channel = [](SensorFrame& f, int i) -> double& {
        if (i < 6) return f.pressures[static_cast<std::size_t>(i)];
        if (i < 9) return f.accel[i - 6];
        return f.gyro[i - 9];
    };

    std::vector<SensorFrame> out = stream;
    for (int c = 0; c < 12; ++c) {
        double y = channel(out[0], c);
        for (std::size_t k = 1; k < out.size(); ++k) {
            y += alpha * (channel(out[k], c) - y);
            channel(out[k], c) = y;
        }
        double mean = 0.0;
        for (std::size_t k = 0; k < zero_count; ++k)
            mean += channel(out[k], c);
        mean /= static_cast<double>(zero_count);
        for (auto& frame : out) channel(frame, c) -= mean;
    }
    return out;
}

ModeLabel classify_mode(std::span<const SensorFrame> window,
                        const std::array<double, 6>& channel_azimuths,
                        const ClassifyOptions& options,
                        ModeFeatures* features) {
    if (window.size() < 2)
        throw ValidationError("classification window too short");
    const double span_s = (window.back().t_ms - window.front().t_ms) / 1000.0;
    if (span_s + 1e-9 < options.min_window)
        throw ValidationError("classification window too short");

    std::array<double, 6> means{};
    for (const auto& frame : window)
        for (std::size_t c = 0; c < 6; ++c) means[c] += frame.pressures[c];
    for (auto& m : means) m /= static_cast<double>(window.size());

    ModeFeatures f;
    double a1 = 0.0, b1 = 0.0;
    for (std::size_t c = 0; c < 6; ++c) {
        f.mean_pressure += means[c] / 6.0;
        a1 += means[c] * std::cos(channel_azimuths[c]) / 3.0;
        b1 += means[c] * std::sin(channel_azimuths[c]) / 3.0;
    }
    f.harmonic_amplitude = std::hypot(a1, b1);
    f.harmonic_phase = f.harmonic_amplitude > 1e-12 ? std::atan2(b1, a1) : 0.0;
    for (std::size_t k = 0; k + 1 < window.size(); ++k)
        f.gyro_z_integral += window[k].gyro.z() *
                             (window[k + 1].t_ms - window[k].t_ms) / 1000.0;
    if (features) *features = f;

    const bool spinning =
        std::abs(f.gyro_z_integral) > options.gyro_integral_threshold;
    if (f.harmonic_amplitude > options.pressure_threshold &&
        f.harmonic_amplitude >
            options.dominance_ratio * std::abs(f.mean_pressure)) {
        return std::abs(std::cos(f.harmonic_phase)) >=
                       std::abs(std::sin(f.harmonic_phase))
                   ? ModeLabel::BendEW
                   : ModeLabel::BendNS;
    }
    if (std::abs(f.mean_pressure) > options.pressure_threshold)
        return spinning ? ModeLabel::Torsion : ModeLabel::Axial;
    if (spinning) return ModeLabel::Torsion;
    return ModeLabel::None;
}

double grasp_pressure(double object_modulus_kpa, double grip_stiffness,
                      double closure, double gain, double contact_scale) {
    if (object_modulus_kpa < 0.0)
        throw ValidationError("object modulus must be non-negative");
    if (closure < 0.0) throw ValidationError("closure must be non-negative");
    if (grip_stiffness <= 0.0 || contact_scale <= 0.0)
        throw ValidationError("grip stiffness and contact scale must be positive");
    const double k_obj = contact_scale * object_modulus_kpa;
    if (k_obj == 0.0) return 0.0;
    return gain * closure * (grip_stiffness * k_obj) /
           (grip_stiffness + k_obj);
}

std::string to_string(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::Axial: return "axial";
    case ScenarioKind::BendEW: return "bend_ew";
    case ScenarioKind::BendNS: return "bend_ns";
    case ScenarioKind::Torsion: return "torsion";
    case ScenarioKind::None: return "none";
    }
    return "none";
}

ScenarioKind scenario_from_string(const std::string& name) {
    if (name == "axial") return ScenarioKind::Axial;
    if (name == "bend_ew") return ScenarioKind::BendEW;
    if (name == "bend_ns") return ScenarioKind::BendNS;
    if (name == "torsion") return ScenarioKind::Torsion;
    if (name == "none") return ScenarioKind::None;
    throw ValidationError("unknown scenario: " + name);
}

ModeLabel expected_label(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::Axial: return ModeLabel::Axial;
    case ScenarioKind::BendEW: return ModeLabel::BendEW;
    case ScenarioKind::BendNS: return ModeLabel::BendNS;
    case ScenarioKind::Torsion: return ModeLabel::Torsion;
    case ScenarioKind::None: return ModeLabel::None;
    }
    return ModeLabel::None;
}

std::vector<DeformationState> make_scenario(ScenarioKind kind,
                                            const ScenarioOptions& options) {
    if (options.sample_rate <= 0.0 || options.duration <= 0.0 ||
        options.ramp <= 0.0)
        throw ValidationError("scenario timing must be positive");

    const double dt = 1.0 / options.sample_rate;
    const auto count =
        static_cast<std::size_t>(std::llround(options.duration / dt)) + 1;

    // Nominal full-scale deformations; magnitude rescales all of them.
    const double strain_full = -0.10 * options.magnitude;
    const double kappa_full = 0.005 * options.magnitude;
    const double twist_full = 0.4 * options.magnitude;

    std::vector<DeformationState> states;
    states.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = static_cast<double>(k) * dt;
        double amp = 0.0;
        if (t >= options.settle)
            amp = std::min(1.0, (t - options.settle) / options.ramp);

        DeformationState state;
        state.arc.arc_length = options.segment_height;
        switch (kind) {
        case ScenarioKind::Axial:
            state.axial_strain = strain_full * amp;
            state.arc.arc_length = options.segment_height *
                                   (1.0 + state.axial_strain);
            break;
        case ScenarioKind::BendEW:
            state.arc.curvature = kappa_full * amp;
            state.arc.bend_azimuth = options.bend_azimuth;
            break;
        case ScenarioKind::BendNS:
            state.arc.curvature = kappa_full * amp;
            state.arc.bend_azimuth = std::numbers::pi / 2.0 +
                                     options.bend_azimuth;
            break;
        case ScenarioKind::Torsion:
            state.twist = twist_full * amp;
            break;
        case ScenarioKind::None:
            break;
        }
        states.push_back(state);
    }
    return states;
}

void write_stream_csv(std::span<const SensorFrame> stream, std::ostream& out) {
    out << "t_ms,p0,p1,p2,p3,p4,p5,ax,ay,az,gx,gy,gz\n";
    char line[320];
    for (const auto& f : stream) {
        std::snprintf(line, sizeof(line),
                      "%.6g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,"
                      "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      f.t_ms, f.pressures[0], f.pressures[1], f.pressures[2],
                      f.pressures[3], f.pressures[4], f.pressures[5],
                      f.accel.x(), f.accel.y(), f.accel.z(), f.gyro.x(),
                      f.gyro.y(), f.gyro.z());
        out << line;
    }
}

std::vector<SensorFrame> read_stream_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("t_ms,", 0) != 0)
        throw ValidationError("stream CSV missing t_ms header");

    std::vector<SensorFrame> stream;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::array<double, 13> values{};
        std::string cell;
        for (auto& v : values) {
            if (!std::getline(row, cell, ','))
                throw ValidationError("stream CSV row too short");
            v = std::stod(cell);
        }
        SensorFrame f;
        f.t_ms = values[0];
        for (std::size_t c = 0; c < 6; ++c) f.pressures[c] = values[1 + c];
        f.accel = Eigen::Vector3d(values[7], values[8], values[9]);
        f.gyro = Eigen::Vector3d(values[10], values[11], values[12]);
        stream.push_back(f);
    }
    return stream;
}

std::string classify_report_json(ModeLabel label, const ModeFeatures& features,
                                 double t0_ms, double t1_ms) {
    nlohmann::json doc;
    doc["window"] = {t0_ms, t1_ms};
    doc["label"] = to_string(label);
    doc["features"] = {{"mean_pressure", features.mean_pressure},
                       {"harmonic_amplitude", features.harmonic_amplitude},
                       {"harmonic_phase", features.harmonic_phase},
                       {"gyro_z_integral", features.gyro_z_integral}};
    return doc.dump(2);
}

} // namespace helarm
