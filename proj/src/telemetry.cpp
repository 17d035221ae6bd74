#include "helarm/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace helarm {

namespace {

void store_u32(std::uint8_t* dst, std::uint32_t value) {
    dst[0] = static_cast<std::uint8_t>(value);
    dst[1] = static_cast<std::uint8_t>(value >> 8);
    dst[2] = static_cast<std::uint8_t>(value >> 16);
    dst[3] = static_cast<std::uint8_t>(value >> 24);
}

std::uint32_t load_u32(const std::uint8_t* src) {
    return static_cast<std::uint32_t>(src[0]) |
           (static_cast<std::uint32_t>(src[1]) << 8) |
           (static_cast<std::uint32_t>(src[2]) << 16) |
           (static_cast<std::uint32_t>(src[3]) << 24);
}

std::int16_t saturate_i16(double value) {
    const double rounded = std::round(value);
    if (rounded >= 32767.0) return 32767;
    if (rounded <= -32768.0) return -32768;
    return static_cast<std::int16_t>(rounded);
}

// Decodes one frame known to start at data with a valid CRC.
TelemetryFrame parse_frame(const std::uint8_t* data) {
    TelemetryFrame frame;
    frame.node_id = data[2];
    frame.seq = data[3];
    frame.t_ms = load_u32(data + 4);
    for (std::size_t i = 0; i < 6; ++i)
        frame.pressures_cpa[i] = load_u32(data + 8 + 4 * i);
    for (std::size_t i = 0; i < 6; ++i) {
        const std::uint16_t raw =
            static_cast<std::uint16_t>(data[32 + 2 * i]) |
            static_cast<std::uint16_t>(data[33 + 2 * i] << 8);
        frame.imu_raw[i] = static_cast<std::int16_t>(raw);
    }
    return frame;
}

} // namespace

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> data) {
    std::uint16_t crc = 0xFFFF;
    for (const std::uint8_t byte : data) {
        crc ^= static_cast<std::uint16_t>(byte) << 8;
        for (int bit = 0; bit < 8; ++bit)
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                                 : static_cast<std::uint16_t>(crc << 1);
    }
    return crc;
}

std::array<std::uint8_t, kFrameSize> encode_frame(const TelemetryFrame& frame) {
    for (const std::uint32_t p : frame.pressures_cpa)
        if (p > kPressureMaxCpa)
            throw ValidationError("pressure fixed-point exceeds sensor range");

    std::array<std::uint8_t, kFrameSize> bytes{};
    bytes[0] = 0xAA;
    bytes[1] = 0x55;
    bytes[2] = frame.node_id;
    bytes[3] = frame.seq;
    store_u32(bytes.data() + 4, frame.t_ms);
    for (std::size_t i = 0; i < 6; ++i)
        store_u32(bytes.data() + 8 + 4 * i, frame.pressures_cpa[i]);
    for (std::size_t i = 0; i < 6; ++i) {
        const auto raw = static_cast<std::uint16_t>(frame.imu_raw[i]);
        bytes[32 + 2 * i] = static_cast<std::uint8_t>(raw);
        bytes[33 + 2 * i] = static_cast<std::uint8_t>(raw >> 8);
    }
    const std::uint16_t crc =
        crc16_ccitt_false({bytes.data() + 2, kFrameSize - 4});
    bytes[44] = static_cast<std::uint8_t>(crc);
    bytes[45] = static_cast<std::uint8_t>(crc >> 8);
    return bytes;
}

void StreamDecoder::push(std::span<const std::uint8_t> data) {
    buffer_.insert(buffer_.end(), data.begin(), data.end());
    scan(false);
}

void StreamDecoder::finish() { scan(true); }

std::vector<TelemetryFrame> StreamDecoder::take_frames() {
    return std::exchange(frames_, {});
}

void StreamDecoder::scan(bool at_end) {
    std::size_t i = 0;
    const std::size_t n = buffer_.size();
    while (i < n) {
        if (buffer_[i] != 0xAA) {
            ++i;
            ++diag_.bytes_skipped;
            continue;
        }
        if (i + 1 >= n || i + kFrameSize > n) {
            // Possible frame start at the buffer tail: wait for more bytes
            // unless the stream is over.
            if (!at_end) break;
            ++i;
            ++diag_.bytes_skipped;
            continue;
        }
        if (buffer_[i + 1] != 0x55) {
            ++i;
            ++diag_.bytes_skipped;
            continue;
        }
        const std::uint16_t computed =
            crc16_ccitt_false({buffer_.data() + i + 2, kFrameSize - 4});
        const std::uint16_t stored =
            static_cast<std::uint16_t>(buffer_[i + 44]) |
            static_cast<std::uint16_t>(buffer_[i + 45] << 8);
        if (computed != stored) {
            ++diag_.crc_failures;
            ++i;
            ++diag_.bytes_skipped;
            continue;
        }
        const TelemetryFrame frame = parse_frame(buffer_.data() + i);
        if (have_seq_ &&
            frame.seq != static_cast<std::uint8_t>(last_seq_ + 1))
            ++diag_.seq_gaps;
        have_seq_ = true;
        last_seq_ = frame.seq;
        frames_.push_back(frame);
        ++diag_.frames_ok;
        i += kFrameSize;
    }
    buffer_.erase(buffer_.begin(),
                  buffer_.begin() + static_cast<std::ptrdiff_t>(i));
    if (at_end) buffer_.clear();
}

std::pair<std::vector<TelemetryFrame>, StreamDiagnostics> decode_stream(
    std::span<const std::uint8_t> data) {
    StreamDecoder decoder;
    decoder.push(data);
    decoder.finish();
    return {decoder.take_frames(), decoder.diagnostics()};
}

TelemetryFrame frame_from_sensor(const SensorFrame& sensor,
                                 std::uint8_t node_id, std::uint8_t seq) {
    TelemetryFrame frame;
    frame.node_id = node_id;
    frame.seq = seq;
    frame.t_ms = static_cast<std::uint32_t>(
        std::llround(std::max(0.0, sensor.t_ms)));
    for (std::size_t i = 0; i < 6; ++i) {
        const double cpa = std::round(sensor.pressures[i] * 100.0);
        frame.pressures_cpa[i] = static_cast<std::uint32_t>(
            std::clamp(cpa, 0.0, static_cast<double>(kPressureMaxCpa)));
    }
    for (int i = 0; i < 3; ++i) {
        frame.imu_raw[static_cast<std::size_t>(i)] =
            saturate_i16(sensor.accel[i] / kStandardGravity * kAccelLsbPerG);
        const double dps = sensor.gyro[i] * 180.0 / std::numbers::pi;
        frame.imu_raw[static_cast<std::size_t>(3 + i)] =
            saturate_i16(dps * kGyroLsbPerDps);
    }
    return frame;
}

SensorFrame sensor_from_frame(const TelemetryFrame& frame) {
    SensorFrame sensor;
    sensor.t_ms = static_cast<double>(frame.t_ms);
    for (std::size_t i = 0; i < 6; ++i)
        sensor.pressures[i] = static_cast<double>(frame.pressures_cpa[i]) / 100.0;
    for (int i = 0; i < 3; ++i) {
        sensor.accel[i] = static_cast<double>(frame.imu_raw[static_cast<std::size_t>(i)]) /
                          kAccelLsbPerG * kStandardGravity;
        sensor.gyro[i] = static_cast<double>(frame.imu_raw[static_cast<std::size_t>(3 + i)]) /
                         kGyroLsbPerDps * std::numbers::pi / 180.0;
    }
    return sensor;
}

} // namespace helarm
