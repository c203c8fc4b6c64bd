#include "thermovitals/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "thermovitals/fft.hpp"

namespace thermovitals {

using nlohmann::json;

std::string to_string(VitalKind kind) {
    return kind == VitalKind::HeartRate ? "heart-rate" : "respiration-rate";
}

VitalKind vital_kind_from_string(const std::string& name) {
    if (name == "heart-rate" || name == "hr")
        return VitalKind::HeartRate;
    if (name == "respiration-rate" || name == "rr")
        return VitalKind::RespirationRate;
    throw ArgumentError("unknown vital kind '" + name + "'");
}

SignalBuffer::SignalBuffer(size_t channels, size_t capacity, Fps fs)
    : channels_(channels), capacity_(capacity), fs_(fs) {
    if (channels_ == 0 || capacity_ == 0)
        throw ArgumentError("signal buffer needs at least one channel and one slot");
    ring_.assign(channels_, std::vector<double>(capacity_, 0.0));
}

bool SignalBuffer::push(std::span<const double> values) {
    if (values.size() != channels_)
        throw ArgumentError("signal buffer push: got " + std::to_string(values.size()) +
                            " values for " + std::to_string(channels_) + " channels");
    for (size_t c = 0; c < channels_; ++c)
        ring_[c][head_] = values[c];
    head_ = (head_ + 1) % capacity_;
    count_ = std::min(count_ + 1, capacity_);
    ++pushed_;
    return full();
}

std::vector<double> SignalBuffer::channel(size_t index) const {
    if (index >= channels_)
        throw ArgumentError("signal buffer: channel index out of range");
    std::vector<double> out;
    out.reserve(count_);
    const size_t start = (head_ + capacity_ - count_) % capacity_;
    for (size_t i = 0; i < count_; ++i)
        out.push_back(ring_[index][(start + i) % capacity_]);
    return out;
}

namespace {

void require_nyquist(const FrequencyBand& band, double fs_hz) {
    const auto check = nyquist_check(band, fs_hz);
    if (!check.ok) {
        std::ostringstream msg;
        msg << "band [" << band.lo << ", " << band.hi << "] Hz requires sampling at "
            << check.required_hz << " Hz or more; got " << fs_hz << " Hz";
        throw BandError(msg.str());
    }
}

struct BinRange {
    size_t lo;
    size_t hi;
};

BinRange in_band_bins(size_t padded_length, double fs_hz, const FrequencyBand& band) {
    const double bin_width = fs_hz / static_cast<double>(padded_length);
    const double eps = bin_width * 1e-9;
    const auto lo = static_cast<size_t>(std::ceil((band.lo - eps) / bin_width));
    const auto hi = std::min(padded_length / 2,
                             static_cast<size_t>(std::floor((band.hi + eps) / bin_width)));
    if (lo > hi)
        throw BandError("no FFT bin falls inside the band; increase zero padding");
    return {lo, hi};
}

} // namespace

VitalEstimate estimate_method1(const TimeSeries& mean_series, VitalKind kind,
                               const FrequencyBand& band, const EstimatorConfig& config) {
    require_nyquist(band, mean_series.fs.hz());

    const TimeSeries filtered = bandpass(mean_series, band, config.filter_order);
    const TimeSeries padded =
        zero_pad(filtered, padded_length_for(filtered.samples.size(), config.padding_factor));
    const Spectrum spectrum = fft_magnitude(padded);
    const SpectralPeak peak = dominant_frequency(spectrum, band);

    VitalEstimate est;
    est.kind = kind;
    est.method = 1;
    est.frequency_hz = peak.frequency_hz;
    est.rate_per_min = hz_to_rate(peak.frequency_hz);
    est.band = band;
    est.confidence = peak.prominence;
    if (peak.prominence < config.prominence_threshold)
        est.warnings.push_back("low prominence");
    return est;
}

VitalEstimate estimate_method2(const std::vector<std::vector<double>>& pixel_series, Fps fs,
                               VitalKind kind, const FrequencyBand& band,
                               const EstimatorConfig& config) {
    if (pixel_series.empty())
        throw ArgumentError("method 2: pixel grid is empty");
    const size_t window_len = pixel_series.front().size();
    if (window_len == 0)
        throw ArgumentError("method 2: pixel series are empty");
    for (const auto& s : pixel_series)
        if (s.size() != window_len)
            throw ArgumentError("method 2: pixel series lengths differ");
    require_nyquist(band, fs.hz());

    const size_t padded_len = padded_length_for(window_len, config.padding_factor);
    const BinRange bins = in_band_bins(padded_len, fs.hz(), band);
    const RealFft fft(padded_len); // one plan shared by all worker threads

    struct PixelVote {
        bool valid = false;
        size_t bin = 0;
        double magnitude = 0.0;
    };
    std::vector<PixelVote> votes(pixel_series.size());

    auto process_range = [&](size_t begin, size_t end) {
        std::vector<double> padded(padded_len);
        std::vector<std::complex<double>> spectrum(fft.bins());
        for (size_t p = begin; p < end; ++p) {
            const auto& raw = pixel_series[p];
            const double mean = std::accumulate(raw.begin(), raw.end(), 0.0) /
                                static_cast<double>(raw.size());
            double var = 0.0;
            for (double v : raw)
                var += (v - mean) * (v - mean);
            if (var <= 0.0)
                continue; // dead pixel: spectrum undefined after normalization

            const TimeSeries filtered = bandpass({raw, fs}, band, config.filter_order);
            std::copy(filtered.samples.begin(), filtered.samples.end(), padded.begin());
            std::fill(padded.begin() + static_cast<std::ptrdiff_t>(window_len), padded.end(), 0.0);
            fft.transform(padded.data(), spectrum.data());

            size_t best_bin = bins.lo;
            double best_mag = std::abs(spectrum[bins.lo]);
            for (size_t k = bins.lo + 1; k <= bins.hi; ++k) {
                const double m = std::abs(spectrum[k]);
                if (m > best_mag) {
                    best_mag = m;
                    best_bin = k;
                }
            }
            votes[p] = {true, best_bin, best_mag};
        }
    };

    const size_t hw = config.threads > 0
                          ? config.threads
                          : std::max(1u, std::thread::hardware_concurrency());
    const size_t worker_count = std::min(hw, pixel_series.size());
    if (worker_count <= 1) {
        process_range(0, pixel_series.size());
    } else {
        std::vector<std::thread> workers;
        const size_t chunk = (pixel_series.size() + worker_count - 1) / worker_count;
        for (size_t w = 0; w < worker_count; ++w) {
            const size_t begin = w * chunk;
            const size_t end = std::min(begin + chunk, pixel_series.size());
            if (begin < end)
                workers.emplace_back(process_range, begin, end);
        }
        for (auto& t : workers)
            t.join();
    }

    // Sequential vote reduction keeps the result independent of thread count.
    std::map<size_t, std::pair<size_t, double>> tally; // bin -> (count, magnitude sum)
    size_t dead = 0;
    for (const auto& v : votes) {
        if (!v.valid) {
            ++dead;
            continue;
        }
        auto& [count, mag_sum] = tally[v.bin];
        ++count;
        mag_sum += v.magnitude;
    }
    if (tally.empty())
        throw ArgumentError("method 2: every pixel series has zero variance");

    size_t win_bin = 0, win_count = 0;
    double win_mag = 0.0;
    for (const auto& [bin, entry] : tally) {
        const auto& [count, mag_sum] = entry;
        // std::map iterates bins ascending, so strict comparisons resolve
        // remaining ties toward the lower frequency.
        if (count > win_count || (count == win_count && mag_sum > win_mag)) {
            win_bin = bin;
            win_count = count;
            win_mag = mag_sum;
        }
    }

    const double bin_width = fs.hz() / static_cast<double>(padded_len);
    VitalEstimate est;
    est.kind = kind;
    est.method = 2;
    est.frequency_hz = static_cast<double>(win_bin) * bin_width;
    est.rate_per_min = hz_to_rate(est.frequency_hz);
    est.band = band;
    est.confidence = static_cast<double>(win_count) / static_cast<double>(pixel_series.size());
    if (dead > 0)
        est.warnings.push_back(std::to_string(dead) + " zero-variance pixels excluded from voting");
    if (est.confidence < config.vote_threshold)
        est.warnings.push_back("low vote fraction");
    return est;
}

void flag_tracking_warning(VitalEstimate& estimate,
                           const std::vector<uint64_t>& low_confidence_frames,
                           uint64_t window_first_frame, uint64_t window_last_frame) {
    for (uint64_t idx : low_confidence_frames) {
        if (idx >= window_first_frame && idx <= window_last_frame) {
            estimate.warnings.push_back("low tracking confidence");
            return;
        }
    }
}

namespace {

json estimate_to_json(const VitalEstimate& est) {
    return json{{"kind", to_string(est.kind)},
                {"method", est.method},
                {"frequency_hz", est.frequency_hz},
                {"rate_per_min", est.rate_per_min},
                {"confidence", est.confidence},
                {"band_lo_hz", est.band.lo},
                {"band_hi_hz", est.band.hi},
                {"window_start_s", est.window_start_s},
                {"warnings", est.warnings}};
}

VitalEstimate estimate_from_json(const json& j) {
    VitalEstimate est;
    est.kind = vital_kind_from_string(j.at("kind").get<std::string>());
    est.method = j.at("method").get<int>();
    est.frequency_hz = j.at("frequency_hz").get<double>();
    est.rate_per_min = j.at("rate_per_min").get<double>();
    est.confidence = j.at("confidence").get<double>();
    est.band.lo = j.at("band_lo_hz").get<double>();
    est.band.hi = j.at("band_hi_hz").get<double>();
    est.window_start_s = j.at("window_start_s").get<double>();
    est.warnings = j.at("warnings").get<std::vector<std::string>>();
    return est;
}

} // namespace

void write_estimates_json(const EstimateSet& set, const std::filesystem::path& path) {
    json doc;
    doc["roi"] = set.roi_label;
    doc["vital"] = to_string(set.kind);
    doc["method"] = set.method;
    doc["window_s"] = set.window_s;
    doc["config"] = set.config_json.empty() ? json::object() : json::parse(set.config_json);
    doc["estimates"] = json::array();
    for (const auto& est : set.estimates)
        doc["estimates"].push_back(estimate_to_json(est));

    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    out << doc.dump(2) << "\n";
}

EstimateSet read_estimates_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open for reading: " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw FormatError("estimates file is not a JSON object: " + path.string());
    try {
        EstimateSet set;
        set.roi_label = doc.at("roi").get<std::string>();
        set.kind = vital_kind_from_string(doc.at("vital").get<std::string>());
        set.method = doc.at("method").get<int>();
        set.window_s = doc.at("window_s").get<double>();
        set.config_json = doc.at("config").dump();
        for (const auto& ej : doc.at("estimates"))
            set.estimates.push_back(estimate_from_json(ej));
        return set;
    } catch (const json::exception& e) {
        throw FormatError(std::string("estimates file: ") + e.what());
    }
}

} // namespace thermovitals
