#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thermovitals/error.hpp"

namespace thermovitals {

/// Sampling rate as an exact rational, so that bin width * padded length
/// recovers the rate without rounding surprises.
struct Fps {
    uint32_t num = 15;
    uint32_t den = 1;

    double hz() const { return static_cast<double>(num) / den; }
    double seconds_per_frame() const { return static_cast<double>(den) / num; }

    bool operator==(const Fps&) const = default;
};

/// One thermal frame: raw 16-bit sensor counts, row-major.
/// Intensity change over time is the signal; absolute calibration is not.
struct ThermalFrame {
    uint32_t width = 0;
    uint32_t height = 0;
    std::vector<uint16_t> intensities;
    uint64_t index = 0;

    uint16_t at(uint32_t x, uint32_t y) const { return intensities[static_cast<size_t>(y) * width + x]; }
    uint16_t& at(uint32_t x, uint32_t y) { return intensities[static_cast<size_t>(y) * width + x]; }

    void validate() const {
        if (width == 0 || height == 0)
            throw ArgumentError("frame dimensions must be at least 1x1");
        if (intensities.size() != static_cast<size_t>(width) * height)
            throw ArgumentError("intensity buffer size does not match width*height");
    }

    bool operator==(const ThermalFrame&) const = default;
};

/// Ground-truth annotations carried by synthetic sequences. `extra` holds
/// free-form JSON (serialized text) for anything beyond the typed fields.
struct SequenceMetadata {
    std::optional<double> true_hr_hz;
    std::optional<double> true_rr_hz;
    std::optional<std::string> motion;
    std::string extra_json; // serialized JSON object, empty if none

    std::string to_json() const;
    static SequenceMetadata from_json(const std::string& text);

    bool operator==(const SequenceMetadata&) const = default;
};

/// An ordered run of frames sharing dimensions and a fixed sampling rate.
struct FrameSequence {
    std::vector<ThermalFrame> frames;
    Fps fps;
    std::optional<SequenceMetadata> metadata;

    uint32_t width() const { return frames.empty() ? 0 : frames.front().width; }
    uint32_t height() const { return frames.empty() ? 0 : frames.front().height; }
    size_t size() const { return frames.size(); }
    bool empty() const { return frames.empty(); }
    double duration_s() const { return static_cast<double>(frames.size()) * fps.seconds_per_frame(); }

    /// Checks the shared-dimension, consecutive-index and fps invariants.
    void validate() const;

    bool operator==(const FrameSequence&) const = default;
};

} // namespace thermovitals
