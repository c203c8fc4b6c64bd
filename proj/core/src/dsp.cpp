#include "thermovitals/dsp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "thermovitals/fft.hpp"

namespace thermovitals {

NyquistCheck nyquist_check(const FrequencyBand& band, double fs_hz) {
    band.validate();
    NyquistCheck check;
    check.required_hz = 2.0 * band.hi;
    check.margin_hz = fs_hz - check.required_hz;
    check.ok = fs_hz >= check.required_hz;
    return check;
}

namespace {

using cd = std::complex<double>;

struct Biquad {
    double b0, b1, b2; // numerator, a0 normalized to 1
    double a1, a2;     // denominator

    double dc_gain() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

// Analog Butterworth low-pass prototype -> band-pass transform ->
// bilinear map with prewarped edges, emitted as second-order sections.
// Each prototype pole contributes a conjugate pole pair; the band-pass
// zeros land at z = +1 and z = -1, one of each per section.
std::vector<Biquad> design_butterworth_bandpass(int order, double lo_hz, double hi_hz, double fs_hz) {
    const double k = 2.0 * fs_hz; // bilinear constant
    const double wl = k * std::tan(std::numbers::pi * lo_hz / fs_hz);
    const double wh = k * std::tan(std::numbers::pi * hi_hz / fs_hz);
    const double bw = wh - wl;
    const double w0_sq = wl * wh;

    std::vector<cd> analog_poles;
    analog_poles.reserve(2 * order);
    for (int i = 0; i < order; ++i) {
        const double theta = std::numbers::pi * (2.0 * i + 1.0) / (2.0 * order) + std::numbers::pi / 2.0;
        const cd proto{std::cos(theta), std::sin(theta)};
        const cd a = proto * (bw / 2.0);
        const cd disc = std::sqrt(a * a - w0_sq);
        analog_poles.push_back(a + disc);
        analog_poles.push_back(a - disc);
    }

    // Overall gain: H(s) = bw^order * s^order / prod(s - p_i), evaluated
    // through the bilinear substitution.
    cd denom{1.0, 0.0};
    for (const cd& p : analog_poles)
        denom *= (k - p);
    const cd gain_c = std::pow(cd{bw * k, 0.0}, order) / denom;
    const double gain = gain_c.real();

    std::vector<cd> digital_poles;
    digital_poles.reserve(analog_poles.size());
    for (const cd& p : analog_poles)
        digital_poles.push_back((k + p) / (k - p));

    // Pair each pole with its conjugate partner.
    std::vector<bool> used(digital_poles.size(), false);
    std::vector<std::pair<cd, cd>> pairs;
    for (size_t i = 0; i < digital_poles.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const cd want = std::conj(digital_poles[i]);
        size_t best = i;
        double best_dist = std::numeric_limits<double>::max();
        for (size_t j = i + 1; j < digital_poles.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(digital_poles[j] - want);
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        used[best] = true;
        pairs.emplace_back(digital_poles[i], digital_poles[best]);
    }

    const double section_gain = std::pow(std::abs(gain), 1.0 / static_cast<double>(pairs.size()));
    std::vector<Biquad> sections;
    sections.reserve(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
        const auto& [p1, p2] = pairs[i];
        Biquad s{};
        double g = section_gain;
        if (i == 0 && gain < 0.0) g = -g;
        s.b0 = g;
        s.b1 = 0.0;
        s.b2 = -g; // zeros at z = +1 and z = -1
        s.a1 = -(p1 + p2).real();
        s.a2 = (p1 * p2).real();
        sections.push_back(s);
    }
    return sections;
}

// Steady-state direct-form-II-transposed state per section for a unit-step
// input, scaled through the cascade so a constant input produces a constant
// output from the first sample (same construction scipy's sosfilt_zi uses).
std::vector<std::array<double, 2>> steady_state_zi(const std::vector<Biquad>& sections) {
    std::vector<std::array<double, 2>> zi(sections.size());
    double scale = 1.0;
    for (size_t i = 0; i < sections.size(); ++i) {
        const Biquad& s = sections[i];
        const double y_ss = s.dc_gain();
        zi[i][0] = scale * (y_ss - s.b0);
        zi[i][1] = scale * (s.b2 - s.a2 * y_ss);
        scale *= y_ss;
    }
    return zi;
}

void sosfilt_inplace(const std::vector<Biquad>& sections,
                     const std::vector<std::array<double, 2>>& zi_unit,
                     std::vector<double>& x) {
    std::vector<std::array<double, 2>> state(sections.size());
    for (size_t i = 0; i < sections.size(); ++i) {
        state[i][0] = zi_unit[i][0] * x.front();
        state[i][1] = zi_unit[i][1] * x.front();
    }
    for (double& sample : x) {
        double v = sample;
        for (size_t i = 0; i < sections.size(); ++i) {
            const Biquad& s = sections[i];
            const double y = s.b0 * v + state[i][0];
            state[i][0] = s.b1 * v - s.a1 * y + state[i][1];
            state[i][1] = s.b2 * v - s.a2 * y;
            v = y;
        }
        sample = v;
    }
}

// Forward-backward filtering over an odd-symmetric edge extension.
std::vector<double> sosfiltfilt(const std::vector<Biquad>& sections, const std::vector<double>& x) {
    const size_t padlen = std::min(x.size() - 1, 6 * sections.size() + 3);
    std::vector<double> ext;
    ext.reserve(x.size() + 2 * padlen);
    for (size_t i = 0; i < padlen; ++i)
        ext.push_back(2.0 * x.front() - x[padlen - i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (size_t i = 0; i < padlen; ++i)
        ext.push_back(2.0 * x.back() - x[x.size() - 2 - i]);

    const auto zi = steady_state_zi(sections);
    sosfilt_inplace(sections, zi, ext);
    std::reverse(ext.begin(), ext.end());
    sosfilt_inplace(sections, zi, ext);
    std::reverse(ext.begin(), ext.end());

    return {ext.begin() + static_cast<std::ptrdiff_t>(padlen),
            ext.begin() + static_cast<std::ptrdiff_t>(padlen + x.size())};
}

} // namespace

TimeSeries bandpass(const TimeSeries& x, const FrequencyBand& band, int order) {
    if (order < 1)
        throw ArgumentError("bandpass: filter order must be positive");
    const auto check = nyquist_check(band, x.fs.hz());
    if (!check.ok) {
        std::ostringstream msg;
        msg << "bandpass: band [" << band.lo << ", " << band.hi << "] Hz needs a sampling rate of at least "
            << check.required_hz << " Hz but the series is sampled at " << x.fs.hz() << " Hz";
        throw BandError(msg.str());
    }
    const size_t min_len = static_cast<size_t>(3 * 2 * order);
    if (x.samples.size() < min_len)
        throw ArgumentError("bandpass: series of " + std::to_string(x.samples.size()) +
                            " samples is shorter than 3x the pole count (" + std::to_string(min_len) + ")");

    const double mean = std::accumulate(x.samples.begin(), x.samples.end(), 0.0) /
                        static_cast<double>(x.samples.size());
    std::vector<double> centered(x.samples.size());
    std::transform(x.samples.begin(), x.samples.end(), centered.begin(),
                   [mean](double v) { return v - mean; });

    const auto sections = design_butterworth_bandpass(order, band.lo, band.hi, x.fs.hz());
    return {sosfiltfilt(sections, centered), x.fs};
}

TimeSeries zero_pad(const TimeSeries& x, size_t target_length) {
    if (target_length < x.samples.size())
        throw ArgumentError("zero_pad: target length " + std::to_string(target_length) +
                            " is shorter than the series (" + std::to_string(x.samples.size()) + ")");
    TimeSeries out{x.samples, x.fs};
    out.samples.resize(target_length, 0.0);
    return out;
}

size_t padded_length_for(size_t n, size_t factor) {
    size_t target = std::max<size_t>(1, n * factor);
    size_t p = 1;
    while (p < target)
        p <<= 1;
    return p;
}

Spectrum fft_magnitude(const TimeSeries& x) {
    if (x.samples.empty())
        throw ArgumentError("fft_magnitude: series is empty");
    RealFft fft(x.samples.size());
    std::vector<std::complex<double>> bins(fft.bins());
    fft.transform(x.samples.data(), bins.data());

    Spectrum spectrum;
    spectrum.fs = x.fs;
    spectrum.padded_length = x.samples.size();
    spectrum.magnitudes.resize(bins.size());
    std::transform(bins.begin(), bins.end(), spectrum.magnitudes.begin(),
                   [](const std::complex<double>& c) { return std::abs(c); });
    return spectrum;
}

SpectralPeak dominant_frequency(const Spectrum& spectrum, const FrequencyBand& band) {
    band.validate();
    const double bin_width = spectrum.bin_width();
    // Inclusive bin range; tiny relative slack so exact band edges count.
    const double eps = bin_width * 1e-9;
    const auto lo_bin = static_cast<size_t>(std::ceil((band.lo - eps) / bin_width));
    const size_t hi_bin = std::min(
        spectrum.magnitudes.size() - 1,
        static_cast<size_t>(std::floor((band.hi + eps) / bin_width)));
    if (lo_bin > hi_bin || lo_bin >= spectrum.magnitudes.size()) {
        std::ostringstream msg;
        msg << "dominant_frequency: no spectrum bin falls inside [" << band.lo << ", " << band.hi
            << "] Hz at a bin width of " << bin_width << " Hz; increase zero padding";
        throw BandError(msg.str());
    }

    size_t peak_bin = lo_bin;
    double peak = spectrum.magnitudes[lo_bin];
    double sum = 0.0;
    for (size_t k = lo_bin; k <= hi_bin; ++k) {
        const double m = spectrum.magnitudes[k];
        sum += m;
        if (m > peak) { // strict: ties keep the lower frequency
            peak = m;
            peak_bin = k;
        }
    }
    const double mean = sum / static_cast<double>(hi_bin - lo_bin + 1);

    SpectralPeak result;
    result.bin = peak_bin;
    result.frequency_hz = spectrum.frequency(peak_bin);
    result.prominence = mean > 0.0 ? peak / mean : 0.0;
    return result;
}

void write_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    out << "frequency_hz,magnitude\n";
    out.precision(17);
    for (size_t k = 0; k < spectrum.magnitudes.size(); ++k)
        out << spectrum.frequency(k) << "," << spectrum.magnitudes[k] << "\n";
}

} // namespace thermovitals
