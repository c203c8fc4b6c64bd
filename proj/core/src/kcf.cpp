#include "thermovitals/kcf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "thermovitals/error.hpp"

namespace thermovitals {

namespace {

constexpr int32_t kMinRoiSide = 8;

std::vector<double> hann_2d(size_t rows, size_t cols) {
    auto axis = [](size_t n) {
        std::vector<double> w(n, 1.0);
        if (n > 1)
            for (size_t i = 0; i < n; ++i)
                w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                             static_cast<double>(n - 1)));
        return w;
    };
    const auto wy = axis(rows);
    const auto wx = axis(cols);
    std::vector<double> out(rows * cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            out[r * cols + c] = wy[r] * wx[c];
    return out;
}

// Desired response: 2D Gaussian over the target, stored circularly shifted
// so its peak sits at (0, 0) and the response argmax reads directly as a
// displacement.
std::vector<double> gaussian_labels(size_t rows, size_t cols, double sigma) {
    std::vector<double> out(rows * cols);
    const double inv = -0.5 / (sigma * sigma);
    for (size_t r = 0; r < rows; ++r) {
        const auto dy = static_cast<double>(r <= rows / 2 ? r : r - rows);
        for (size_t c = 0; c < cols; ++c) {
            const auto dx = static_cast<double>(c <= cols / 2 ? c : c - cols);
            out[r * cols + c] = std::exp(inv * (dx * dx + dy * dy));
        }
    }
    return out;
}

} // namespace

void KcfParams::validate() const {
    if (!(lambda > 0.0))
        throw ArgumentError("kcf: lambda must be positive");
    if (!(learning_rate > 0.0) || learning_rate > 1.0)
        throw ArgumentError("kcf: learning rate must be in (0, 1]");
    if (!(kernel_sigma > 0.0))
        throw ArgumentError("kcf: kernel sigma must be positive");
    if (padding < 1.0)
        throw ArgumentError("kcf: padding factor must be at least 1");
    if (!(response_sigma_factor > 0.0))
        throw ArgumentError("kcf: response sigma factor must be positive");
    if (psr_exclusion < 0)
        throw ArgumentError("kcf: psr exclusion radius must be nonnegative");
}

KcfTracker::KcfTracker(const ThermalFrame& frame, const RoiBox& roi, const KcfParams& params)
    : params_(params),
      box_(roi),
      win_rows_(static_cast<size_t>(std::llround(roi.h * params.padding))),
      win_cols_(static_cast<size_t>(std::llround(roi.w * params.padding))),
      fft_(std::max<size_t>(1, win_rows_), std::max<size_t>(1, win_cols_)) {
    params_.validate();
    if (roi.w < kMinRoiSide || roi.h < kMinRoiSide)
        throw ArgumentError("kcf: ROI must be at least " + std::to_string(kMinRoiSide) + "x" +
                            std::to_string(kMinRoiSide) + " to train a window");
    if (!roi.inside(frame.width, frame.height))
        throw ArgumentError("kcf: ROI lies outside the frame");

    hann_ = hann_2d(win_rows_, win_cols_);

    const double response_sigma =
        params_.response_sigma_factor * std::sqrt(static_cast<double>(roi.w) * roi.h);
    const auto labels = gaussian_labels(win_rows_, win_cols_, response_sigma);
    label_fft_.resize(fft_.spectrum_size());
    fft_.forward(labels.data(), label_fft_.data());

    const Window window = extract_window(frame, box_);
    learn(window, 1.0);
}

KcfTracker::Window KcfTracker::extract_window(const ThermalFrame& frame, const RoiBox& at) const {
    // Window centered on the box; constant offset keeps displacements exact.
    const int32_t x0 = at.x - (static_cast<int32_t>(win_cols_) - at.w) / 2;
    const int32_t y0 = at.y - (static_cast<int32_t>(win_rows_) - at.h) / 2;

    Window out;
    out.features.resize(win_rows_ * win_cols_);
    const auto max_x = static_cast<int32_t>(frame.width) - 1;
    const auto max_y = static_cast<int32_t>(frame.height) - 1;

    double sum = 0.0;
    for (size_t r = 0; r < win_rows_; ++r) {
        const int32_t yy = std::clamp(y0 + static_cast<int32_t>(r), 0, max_y);
        for (size_t c = 0; c < win_cols_; ++c) {
            const int32_t xx = std::clamp(x0 + static_cast<int32_t>(c), 0, max_x);
            const double v = frame.at(static_cast<uint32_t>(xx), static_cast<uint32_t>(yy));
            out.features[r * win_cols_ + c] = v;
            sum += v;
        }
    }
    out.clamped = x0 < 0 || y0 < 0 || x0 + static_cast<int32_t>(win_cols_) > max_x + 1 ||
                  y0 + static_cast<int32_t>(win_rows_) > max_y + 1;

    const auto n = static_cast<double>(out.features.size());
    const double mean = sum / n;
    double var = 0.0;
    for (double& v : out.features) {
        v -= mean;
        var += v * v;
    }
    var /= n;

    if (var < 1e-12) {
        // Flat patch: nothing to normalize against, features stay zero.
        std::fill(out.features.begin(), out.features.end(), 0.0);
    } else {
        const double inv_std = 1.0 / std::sqrt(var);
        for (size_t i = 0; i < out.features.size(); ++i)
            out.features[i] *= inv_std * hann_[i];
    }

    out.norm_sq = 0.0;
    for (double v : out.features)
        out.norm_sq += v * v;
    return out;
}

// Gaussian kernel evaluated against all relative circular shifts of two
// windows: k(tau) = exp(-max(0, |a|^2 + |b|^2 - 2*corr(a,b)(tau)) / (sigma^2 N)).
std::vector<std::complex<double>> KcfTracker::kernel_spectrum(
    const std::vector<std::complex<double>>& a_fft, double a_norm_sq,
    const std::vector<std::complex<double>>& b_fft, double b_norm_sq) const {
    std::vector<std::complex<double>> prod(fft_.spectrum_size());
    for (size_t i = 0; i < prod.size(); ++i)
        prod[i] = a_fft[i] * std::conj(b_fft[i]);

    std::vector<double> corr(win_rows_ * win_cols_);
    fft_.inverse(prod.data(), corr.data());

    const double n = static_cast<double>(win_rows_) * static_cast<double>(win_cols_);
    const double scale = 1.0 / (params_.kernel_sigma * params_.kernel_sigma * n);
    const double norms = a_norm_sq + b_norm_sq;
    for (double& v : corr)
        v = std::exp(-std::max(0.0, norms - 2.0 * v) * scale);

    std::vector<std::complex<double>> kernel_fft(fft_.spectrum_size());
    fft_.forward(corr.data(), kernel_fft.data());
    return kernel_fft;
}

void KcfTracker::learn(const Window& window, double rate) {
    std::vector<std::complex<double>> window_fft(fft_.spectrum_size());
    fft_.forward(window.features.data(), window_fft.data());

    const auto kernel_fft = kernel_spectrum(window_fft, window.norm_sq, window_fft, window.norm_sq);

    std::vector<std::complex<double>> alpha(fft_.spectrum_size());
    for (size_t i = 0; i < alpha.size(); ++i)
        alpha[i] = label_fft_[i] / (kernel_fft[i] + params_.lambda);

    if (rate >= 1.0 || template_.empty()) {
        template_ = window.features;
        alpha_fft_ = std::move(alpha);
    } else {
        for (size_t i = 0; i < template_.size(); ++i)
            template_[i] = (1.0 - rate) * template_[i] + rate * window.features[i];
        for (size_t i = 0; i < alpha_fft_.size(); ++i)
            alpha_fft_[i] = (1.0 - rate) * alpha_fft_[i] + rate * alpha[i];
    }

    template_fft_.resize(fft_.spectrum_size());
    fft_.forward(template_.data(), template_fft_.data());
    template_norm_sq_ = 0.0;
    for (double v : template_)
        template_norm_sq_ += v * v;
}

Detection KcfTracker::detect(const ThermalFrame& frame) const {
    const Window window = extract_window(frame, box_);

    std::vector<std::complex<double>> window_fft(fft_.spectrum_size());
    fft_.forward(window.features.data(), window_fft.data());

    const auto kernel_fft =
        kernel_spectrum(window_fft, window.norm_sq, template_fft_, template_norm_sq_);

    std::vector<std::complex<double>> response_fft(fft_.spectrum_size());
    for (size_t i = 0; i < response_fft.size(); ++i)
        response_fft[i] = alpha_fft_[i] * kernel_fft[i];

    Detection det;
    det.rows = win_rows_;
    det.cols = win_cols_;
    det.response.resize(win_rows_ * win_cols_);
    fft_.inverse(response_fft.data(), det.response.data());
    det.window_clamped = window.clamped;

    // Argmax, smallest row-major index on ties.
    size_t peak_idx = 0;
    double peak = det.response[0];
    for (size_t i = 1; i < det.response.size(); ++i) {
        if (det.response[i] > peak) {
            peak = det.response[i];
            peak_idx = i;
        }
    }
    const auto pr = peak_idx / win_cols_;
    const auto pc = peak_idx % win_cols_;
    // Responses wrap circularly: indices past the midpoint are negative shifts.
    det.dy = static_cast<int32_t>(pr <= win_rows_ / 2 ? pr : pr - win_rows_);
    det.dx = static_cast<int32_t>(pc <= win_cols_ / 2 ? pc : pc - win_cols_);

    // Peak-to-sidelobe ratio over everything outside a cyclic exclusion
    // square around the peak.
    const int32_t excl = params_.psr_exclusion;
    double sum = 0.0, sum_sq = 0.0;
    size_t count = 0;
    for (size_t r = 0; r < win_rows_; ++r) {
        const auto dr_raw = static_cast<int32_t>(r > pr ? r - pr : pr - r);
        const int32_t dr = std::min(dr_raw, static_cast<int32_t>(win_rows_) - dr_raw);
        for (size_t c = 0; c < win_cols_; ++c) {
            const auto dc_raw = static_cast<int32_t>(c > pc ? c - pc : pc - c);
            const int32_t dc = std::min(dc_raw, static_cast<int32_t>(win_cols_) - dc_raw);
            if (dr <= excl && dc <= excl)
                continue;
            const double v = det.response[r * win_cols_ + c];
            sum += v;
            sum_sq += v * v;
            ++count;
        }
    }
    if (count > 0) {
        const double mean = sum / static_cast<double>(count);
        const double var = std::max(0.0, sum_sq / static_cast<double>(count) - mean * mean);
        const double sd = std::sqrt(var);
        det.psr = sd > 0.0 ? (peak - mean) / sd : 0.0;
    }
    return det;
}

Detection KcfTracker::step(const ThermalFrame& frame) {
    Detection det = detect(frame);

    box_.x = std::clamp(box_.x + det.dx, 0, static_cast<int32_t>(frame.width) - box_.w);
    box_.y = std::clamp(box_.y + det.dy, 0, static_cast<int32_t>(frame.height) - box_.h);

    const Window window = extract_window(frame, box_);
    learn(window, params_.learning_rate);
    return det;
}

Track track_sequence(const FrameSequence& seq, const RoiBox& initial, const KcfParams& params) {
    if (seq.empty())
        throw ArgumentError("track_sequence: sequence is empty");
    seq.validate();

    Track track;
    track.boxes.reserve(seq.size());
    track.confidence.reserve(seq.size());

    KcfTracker tracker(seq.frames.front(), initial, params);
    // Self-detection on the training frame measures the model's own peak
    // sharpness; a flat patch surfaces here as low confidence.
    const Detection first = tracker.detect(seq.frames.front());
    track.boxes.push_back(tracker.box());
    track.confidence.push_back(first.psr);
    if (first.psr < params.psr_threshold)
        track.low_confidence_frames.push_back(0);

    for (size_t t = 1; t < seq.size(); ++t) {
        const Detection det = tracker.step(seq.frames[t]);
        track.boxes.push_back(tracker.box());
        track.confidence.push_back(det.psr);
        if (det.psr < params.psr_threshold)
            track.low_confidence_frames.push_back(t);
    }
    return track;
}

PixelGrid extract_pixel_series(const FrameSequence& seq, const Track& track, BorderMode border) {
    if (track.size() != seq.size())
        throw ArgumentError("extract_pixel_series: track length does not match sequence length");
    if (seq.empty())
        throw ArgumentError("extract_pixel_series: sequence is empty");

    PixelGrid grid;
    grid.w = track.boxes.front().w;
    grid.h = track.boxes.front().h;
    grid.fs = seq.fps;
    grid.series.assign(static_cast<size_t>(grid.w) * grid.h, {});
    for (auto& s : grid.series)
        s.resize(seq.size());
    grid.mean_series.resize(seq.size());

    const auto max_x = static_cast<int32_t>(seq.width()) - 1;
    const auto max_y = static_cast<int32_t>(seq.height()) - 1;

    for (size_t t = 0; t < seq.size(); ++t) {
        const RoiBox& b = track.boxes[t];
        const ThermalFrame& frame = seq.frames[t];
        const bool outside = b.x < 0 || b.y < 0 || b.right() > max_x + 1 || b.bottom() > max_y + 1;
        if (outside) {
            if (border == BorderMode::Strict)
                throw ArgumentError("extract_pixel_series: box leaves the frame at index " +
                                    std::to_string(t) + " (strict border mode)");
            grid.clamped_frames.push_back(t);
        }

        double sum = 0.0;
        for (int32_t j = 0; j < grid.h; ++j) {
            const int32_t yy = std::clamp(b.y + j, 0, max_y);
            for (int32_t i = 0; i < grid.w; ++i) {
                const int32_t xx = std::clamp(b.x + i, 0, max_x);
                const double v = frame.at(static_cast<uint32_t>(xx), static_cast<uint32_t>(yy));
                grid.series[static_cast<size_t>(j) * grid.w + i][t] = v;
                sum += v;
            }
        }
        grid.mean_series[t] = sum / (static_cast<double>(grid.w) * grid.h);
    }
    return grid;
}

void write_track_csv(const Track& track, const std::filesystem::path& path,
                     const std::vector<std::string>& comments) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open for writing: " + path.string());
    for (const auto& line : comments)
        out << "# " << line << "\n";
    out << "frame_index,x,y,w,h,confidence,low_confidence\n";
    out.precision(17);
    std::vector<bool> low(track.size(), false);
    for (uint64_t idx : track.low_confidence_frames)
        if (idx < low.size())
            low[idx] = true;
    for (size_t t = 0; t < track.size(); ++t) {
        const RoiBox& b = track.boxes[t];
        out << t << "," << b.x << "," << b.y << "," << b.w << "," << b.h << ","
            << track.confidence[t] << "," << (low[t] ? 1 : 0) << "\n";
    }
}

Track read_track_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open for reading: " + path.string());

    Track track;
    std::string line;
    bool header_seen = false;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#')
            continue;
        if (!header_seen) {
            header_seen = true; // column header
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ','))
            cells.push_back(cell);
        if (cells.size() != 7)
            throw FormatError("track csv: expected 7 columns at line " + std::to_string(line_no));
        try {
            RoiBox b{std::stoi(cells[1]), std::stoi(cells[2]), std::stoi(cells[3]), std::stoi(cells[4])};
            track.boxes.push_back(b);
            track.confidence.push_back(std::stod(cells[5]));
            if (std::stoi(cells[6]) != 0)
                track.low_confidence_frames.push_back(track.boxes.size() - 1);
        } catch (const std::exception&) {
            throw FormatError("track csv: unparsable row at line " + std::to_string(line_no));
        }
    }
    if (!header_seen)
        throw FormatError("track csv: missing header row");
    return track;
}

} // namespace thermovitals
