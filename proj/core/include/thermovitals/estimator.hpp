#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "thermovitals/dsp.hpp"
#include "thermovitals/frame.hpp"

namespace thermovitals {

enum class VitalKind { HeartRate, RespirationRate };

std::string to_string(VitalKind kind);
VitalKind vital_kind_from_string(const std::string& name);

/// Physiological bands and the analysis-window lengths used per vital.
/// 100-160 BPM and 10-40 RPM in Hz; 20 s windows for HR, 30 s for RR.
struct BandConfig {
    FrequencyBand hr_band{1.67, 2.67};
    FrequencyBand rr_band{0.17, 0.67};
    double hr_window_s = 20.0;
    double rr_window_s = 30.0;

    const FrequencyBand& band_for(VitalKind kind) const {
        return kind == VitalKind::HeartRate ? hr_band : rr_band;
    }
    double window_s_for(VitalKind kind) const {
        return kind == VitalKind::HeartRate ? hr_window_s : rr_window_s;
    }
};

struct EstimatorConfig {
    int filter_order = 4;
    size_t padding_factor = 8;          // padded length = next pow2 >= factor * window
    double prominence_threshold = 3.0;  // Method 1 quality flag
    double vote_threshold = 0.2;        // Method 2 quality flag (winning vote fraction)
    unsigned threads = 0;               // 0 = hardware concurrency
};

/// A frequency estimate in physiological units. rate_per_min is exactly
/// 60 * frequency_hz and frequency_hz always lies inside band.
struct VitalEstimate {
    VitalKind kind = VitalKind::HeartRate;
    int method = 1;
    double frequency_hz = 0.0;
    double rate_per_min = 0.0;
    FrequencyBand band;
    double confidence = 0.0; // prominence (Method 1) or vote fraction (Method 2)
    double window_start_s = 0.0;
    std::vector<std::string> warnings;
};

/// Sliding sample window over one or more channels. Estimation is only
/// meaningful once the buffer has filled; afterwards each push evicts the
/// oldest sample.
class SignalBuffer {
public:
    SignalBuffer(size_t channels, size_t capacity, Fps fs);

    /// Appends one sample per channel. Returns full(). Throws ArgumentError
    /// on a channel-count mismatch.
    bool push(std::span<const double> values);

    bool full() const { return count_ == capacity_; }
    size_t size() const { return count_; }
    size_t capacity() const { return capacity_; }
    size_t channels() const { return channels_; }
    uint64_t total_pushed() const { return pushed_; }
    const Fps& fs() const { return fs_; }

    /// Channel contents oldest-to-newest; length size().
    std::vector<double> channel(size_t index) const;
    TimeSeries channel_series(size_t index) const { return {channel(index), fs_}; }

private:
    size_t channels_;
    size_t capacity_;
    Fps fs_;
    std::vector<std::vector<double>> ring_; // per channel, capacity slots
    size_t head_ = 0;                       // next write position
    size_t count_ = 0;
    uint64_t pushed_ = 0;
};

/// Method 1, ROI-average analysis: band-pass the mean series, zero-pad,
/// transform, and read the dominant in-band peak. Confidence is the peak's
/// prominence over the in-band mean magnitude.
VitalEstimate estimate_method1(const TimeSeries& mean_series, VitalKind kind,
                               const FrequencyBand& band, const EstimatorConfig& config = {});

/// Method 2, per-pixel voting: every pixel series runs the Method-1 pipeline
/// independently (in parallel) and votes for its dominant in-band bin on a
/// shared padded-FFT bin grid; the most common bin wins. Ties break toward
/// the larger summed magnitude across voters, then the lower frequency.
/// Zero-variance pixels are excluded from voting and reported. Confidence is
/// winning votes / total pixels.
VitalEstimate estimate_method2(const std::vector<std::vector<double>>& pixel_series, Fps fs,
                               VitalKind kind, const FrequencyBand& band,
                               const EstimatorConfig& config = {});

/// Hz to BPM/RPM.
inline double hz_to_rate(double frequency_hz) { return 60.0 * frequency_hz; }

/// Marks the estimate with a tracking warning when any low-confidence frame
/// index falls inside [window_first_frame, window_last_frame].
void flag_tracking_warning(VitalEstimate& estimate,
                           const std::vector<uint64_t>& low_confidence_frames,
                           uint64_t window_first_frame, uint64_t window_last_frame);

/// One estimator run over a sequence: every window estimate plus the
/// labeling the evaluator needs to pair estimates with ground truth.
struct EstimateSet {
    std::string roi_label;
    VitalKind kind = VitalKind::HeartRate;
    int method = 1;
    double window_s = 0.0;
    std::string config_json; // effective pipeline configuration, serialized
    std::vector<VitalEstimate> estimates;
};

void write_estimates_json(const EstimateSet& set, const std::filesystem::path& path);
EstimateSet read_estimates_json(const std::filesystem::path& path);

} // namespace thermovitals
