#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "thermovitals/fft.hpp"
#include "thermovitals/frame.hpp"
#include "thermovitals/geometry.hpp"

namespace thermovitals {

struct KcfParams {
    double kernel_sigma = 0.5;          // Gaussian kernel bandwidth (features are unit-variance)
    double lambda = 1e-4;               // ridge regularization
    double learning_rate = 0.02;        // model interpolation rate per frame
    double padding = 1.5;               // window dims = roi dims * padding
    double response_sigma_factor = 0.1; // desired-response sigma = factor * sqrt(roi area)
    double psr_threshold = 5.0;         // peak-to-sidelobe ratio below this flags the frame
    int psr_exclusion = 5;              // sidelobe excludes +-this many cells around the peak

    void validate() const;
};

/// Result of correlating the learned model against one frame.
struct Detection {
    int32_t dx = 0;             // displacement of the response argmax, circularly unwrapped
    int32_t dy = 0;
    double psr = 0.0;           // (peak - sidelobe mean) / sidelobe std; 0 when degenerate
    bool window_clamped = false; // sampling window hit the frame border
    std::vector<double> response; // full response map, rows x cols row-major
    size_t rows = 0;
    size_t cols = 0;
};

/// Tracked positions of one ROI across a sequence. Boxes keep the initial
/// width/height; tracking is translation-only.
struct Track {
    std::vector<RoiBox> boxes;
    std::vector<double> confidence;
    std::vector<uint64_t> low_confidence_frames;

    size_t size() const { return boxes.size(); }
};

/// Kernelized correlation filter over raw intensity features.
///
/// The model is a ridge regression on all circular shifts of the target
/// window, solved in the frequency domain: the dual coefficient spectrum is
/// the desired-response spectrum divided by (kernel autocorrelation spectrum
/// + lambda). Windows are normalized to zero mean / unit variance and shaped
/// by a 2D Hann window before entering the kernel; thermal imagery has
/// little texture and plenty of noise, and the normalization keeps the
/// Gaussian kernel bandwidth meaningful across exposure drift.
class KcfTracker {
public:
    /// Trains the initial model. The ROI must be at least 8x8 and lie fully
    /// inside the frame; throws ArgumentError otherwise.
    KcfTracker(const ThermalFrame& frame, const RoiBox& roi, const KcfParams& params = {});

    const RoiBox& box() const { return box_; }
    const KcfParams& params() const { return params_; }
    size_t window_rows() const { return win_rows_; }
    size_t window_cols() const { return win_cols_; }

    /// Correlates the current model against `frame` at the current position
    /// without moving or learning.
    Detection detect(const ThermalFrame& frame) const;

    /// One tracking step: detect, move the box by the unwrapped displacement
    /// (clamped into the frame), then blend the model toward the new window.
    Detection step(const ThermalFrame& frame);

private:
    struct Window {
        std::vector<double> features;
        double norm_sq = 0.0;
        bool clamped = false;
    };

    Window extract_window(const ThermalFrame& frame, const RoiBox& at) const;
    std::vector<std::complex<double>> kernel_spectrum(const std::vector<std::complex<double>>& a_fft,
                                                      double a_norm_sq,
                                                      const std::vector<std::complex<double>>& b_fft,
                                                      double b_norm_sq) const;
    void learn(const Window& window, double rate);

    KcfParams params_;
    RoiBox box_;
    size_t win_rows_ = 0;
    size_t win_cols_ = 0;
    Fft2d fft_;
    std::vector<double> hann_;
    std::vector<std::complex<double>> label_fft_;    // desired-response spectrum
    std::vector<double> template_;                   // learned appearance
    std::vector<std::complex<double>> template_fft_;
    double template_norm_sq_ = 0.0;
    std::vector<std::complex<double>> alpha_fft_;    // dual coefficient spectrum
};

/// Tracks `initial` from frame 0 through the whole sequence. Frame 0 carries
/// the self-detection confidence of the freshly trained model.
Track track_sequence(const FrameSequence& seq, const RoiBox& initial, const KcfParams& params = {});

enum class BorderMode {
    Clamp, // out-of-frame samples clamp to the border and the frame is flagged
    Strict // out-of-frame samples throw ArgumentError
};

/// Per-pixel time series of a tracked ROI plus the ROI-mean series.
/// Channel (i, j) of the grid lives at index j*w + i.
struct PixelGrid {
    int32_t w = 0;
    int32_t h = 0;
    Fps fs;
    std::vector<std::vector<double>> series; // h*w channels, each of length T
    std::vector<double> mean_series;         // length T
    std::vector<uint64_t> clamped_frames;

    const std::vector<double>& at(int32_t i, int32_t j) const {
        return series[static_cast<size_t>(j) * w + i];
    }
};

/// Gathers the intensity of every ROI offset across all frames, following
/// the track, so downstream spectra come from approximately the same
/// anatomy despite motion.
PixelGrid extract_pixel_series(const FrameSequence& seq, const Track& track,
                               BorderMode border = BorderMode::Clamp);

/// CSV columns: frame_index,x,y,w,h,confidence,low_confidence. Leading
/// comment lines (prefixed '#') carry caller-provided annotations.
void write_track_csv(const Track& track, const std::filesystem::path& path,
                     const std::vector<std::string>& comments = {});
Track read_track_csv(const std::filesystem::path& path);

} // namespace thermovitals
