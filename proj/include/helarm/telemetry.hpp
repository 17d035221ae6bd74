#pragma once

// Binary sensor-bus frame codec and self-synchronizing stream parser.
//
// Frame layout, 46 bytes total:
//   0..1   sync 0xAA 0x55
//   2      node_id   u8
//   3      seq       u8 (wrapping)
//   4..7   t_ms      u32 LE
//   8..31  pressures 6 x u32 LE, Pa x 100 fixed point
//   32..43 imu       6 x i16 LE (ax ay az gx gy gz, raw counts)
//   44..45 CRC-16/CCITT-FALSE over bytes 2..43, LE

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "helarm/errors.hpp"
#include "helarm/sensing.hpp"

namespace helarm {

inline constexpr std::size_t kFrameSize = 46;
inline constexpr std::uint32_t kPressureMaxCpa = 12'600'000; // 126 kPa
inline constexpr double kAccelLsbPerG = 2048.0;
inline constexpr double kGyroLsbPerDps = 16.4;
inline constexpr double kStandardGravity = 9.80665; // m/s^2

struct TelemetryFrame {
    std::uint8_t node_id = 0;
    std::uint8_t seq = 0;
    std::uint32_t t_ms = 0;
    std::array<std::uint32_t, 6> pressures_cpa{};
    std::array<std::int16_t, 6> imu_raw{};

    bool operator==(const TelemetryFrame&) const = default;
};

// poly 0x1021, init 0xFFFF, no reflection, no xorout
std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data);

// Throws on pressure fixed-point overflow.
std::array<std::uint8_t, kFrameSize> encode_frame(const TelemetryFrame& frame);

struct StreamDiagnostics {
    std::uint64_t frames_ok = 0;
    std::uint64_t crc_failures = 0;
    std::uint64_t bytes_skipped = 0;
    // Non-consecutive (mod 256) seq transitions among accepted frames.
    std::uint64_t seq_gaps = 0;
};

// Incremental decoder: feed arbitrary chunks, collect frames as they
// validate. Corruption never throws; it lands in the diagnostics.
class StreamDecoder {
public:
    void push(std::span<const std::uint8_t> data);
    // Declares end of stream; unusable buffered bytes count as skipped.
    void finish();
    std::vector<TelemetryFrame> take_frames();
    const StreamDiagnostics& diagnostics() const { return diag_; }

private:
    void scan(bool at_end);

    std::vector<std::uint8_t> buffer_;
    std::vector<TelemetryFrame> frames_;
    StreamDiagnostics diag_;
    bool have_seq_ = false;
    std::uint8_t last_seq_ = 0;
};

std::pair<std::vector<TelemetryFrame>, StreamDiagnostics> decode_stream(
    std::span<const std::uint8_t> data);

// Conversions between engineering-unit sensor frames and raw bus frames.
// Accel raw counts are 2048 LSB/g, gyro 16.4 LSB/(deg/s); both saturate at
// the i16 range. Pressures quantize to 0.01 Pa fixed point.
TelemetryFrame frame_from_sensor(const SensorFrame& sensor,
                                 std::uint8_t node_id, std::uint8_t seq);
SensorFrame sensor_from_frame(const TelemetryFrame& frame);

} // namespace helarm
