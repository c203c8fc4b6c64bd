#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "thermovitals/error.hpp"
#include "thermovitals/frame.hpp"

namespace thermovitals {

/// A sampled real signal: thermal counts (or filtered counts) at rate fs.
struct TimeSeries {
    std::vector<double> samples;
    Fps fs;
};

/// Closed frequency band of physiological interest, in Hz.
struct FrequencyBand {
    double lo = 0.0;
    double hi = 0.0;

    void validate() const {
        if (!(lo > 0.0) || !(hi > lo))
            throw BandError("frequency band requires 0 < lo < hi");
    }
};

struct NyquistCheck {
    bool ok = false;
    double required_hz = 0.0; // 2 * band.hi
    double margin_hz = 0.0;   // fs - required, negative on violation
};

/// Sampling at fs can represent the band iff fs >= 2 * band.hi.
NyquistCheck nyquist_check(const FrequencyBand& band, double fs_hz);

/// One-sided magnitude spectrum. Bin k sits at k * bin_width().
struct Spectrum {
    std::vector<double> magnitudes; // |X_k| for k = 0..N/2, unnormalized DFT
    Fps fs;
    size_t padded_length = 0;

    double bin_width() const { return fs.hz() / static_cast<double>(padded_length); }
    double frequency(size_t bin) const { return static_cast<double>(bin) * bin_width(); }
};

struct SpectralPeak {
    double frequency_hz = 0.0;
    double prominence = 0.0; // peak magnitude / mean in-band magnitude
    size_t bin = 0;
};

/// Zero-phase band-pass: subtracts the series mean, then applies an order-4
/// maximally-flat (Butterworth) band-pass forward and backward, so the net
/// gain is the squared magnitude response and no group delay is introduced.
/// Output length equals input length.
///
/// Throws BandError when the band violates Nyquist at the series rate and
/// ArgumentError when the series is shorter than 3x the pole count.
TimeSeries bandpass(const TimeSeries& x, const FrequencyBand& band, int order = 4);

/// Extends the series with zeros up to target_length; fs is unchanged.
TimeSeries zero_pad(const TimeSeries& x, size_t target_length);

/// Smallest power of two >= factor * n. With the default factor of 8 a 15 Hz
/// 20 s window (300 samples) lands on 4096 bins of ~0.00366 Hz (~0.22 BPM).
size_t padded_length_for(size_t n, size_t factor = 8);

/// One-sided magnitude spectrum of the (already padded) series.
Spectrum fft_magnitude(const TimeSeries& x);

/// Peak bin among bins whose center lies in [band.lo, band.hi]; ties go to
/// the lower frequency. Throws BandError when no bin center falls in the
/// band, which signals insufficient padding.
SpectralPeak dominant_frequency(const Spectrum& spectrum, const FrequencyBand& band);

/// Debug export: "frequency_hz,magnitude" rows.
void write_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& path);

} // namespace thermovitals
