#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thermovitals/frame.hpp"
#include "thermovitals/geometry.hpp"

namespace thermovitals {

/// Region trajectory. Offsets are applied with nearest-pixel rounding so
/// the generated trajectory stays an exact oracle on the integer grid.
struct Motion {
    enum class Kind { Static, ConstantVelocity, SinusoidalSway };
    Kind kind = Kind::Static;
    double vx = 0.0;            // px/frame (ConstantVelocity)
    double vy = 0.0;            // px/frame (ConstantVelocity)
    double sway_amplitude = 0.0; // px, horizontal (SinusoidalSway)
    double sway_frequency = 0.0; // Hz (SinusoidalSway)

    /// Integer (dx, dy) offset of the region at frame t.
    std::pair<int32_t, int32_t> offset_at(uint64_t frame, const Fps& fps) const;
};

/// One modulated rectangle: counts(x,y,t) gains amplitude*sin(2*pi*f*t + phase)
/// while the pixel lies inside the (possibly moving) box. A frequency of 0
/// with an explicit phase of pi/2 produces a constant warm patch, which is
/// how trackable structure is composed on top of a modulated one.
struct RegionSpec {
    RoiBox box;
    double frequency_hz = 0.0;
    double amplitude = 0.0;              // counts
    std::optional<double> phase;         // radians; drawn from the seed if absent
    Motion motion;
    std::string vital;                   // "hr", "rr" or "" (annotation only)
};

struct SyntheticSpec {
    double duration_s = 60.0;
    Fps fps;
    uint32_t width = 160;
    uint32_t height = 120;
    double background = 30000.0;  // counts
    double noise_sigma = 0.0;     // counts, i.i.d. Gaussian per pixel per frame
    double drift_per_s = 0.0;     // counts/second, scene-wide linear trend
    uint64_t seed = 0;
    std::vector<RegionSpec> regions;

    /// Throws ArgumentError when a modulation is not representable at fps
    /// or the count budget leaves the 16-bit range.
    void validate() const;

    std::string to_json() const;
    static SyntheticSpec from_json(const std::string& text);
    static SyntheticSpec from_json_file(const std::filesystem::path& path);
};

/// Renders the spec to frames. Pure function of the spec including its seed:
/// the same spec generates bit-identical sequences. Noise is quantized to
/// integer counts and clamped to [0, 65535]. Metadata records the true
/// modulation frequencies of regions tagged "hr"/"rr".
FrameSequence generate_synthetic(const SyntheticSpec& spec);

} // namespace thermovitals
