#include "thermovitals/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "thermovitals/rng.hpp"

namespace thermovitals {

using nlohmann::json;

std::pair<int32_t, int32_t> Motion::offset_at(uint64_t frame, const Fps& fps) const {
    switch (kind) {
    case Kind::Static:
        return {0, 0};
    case Kind::ConstantVelocity:
        return {static_cast<int32_t>(std::llround(vx * static_cast<double>(frame))),
                static_cast<int32_t>(std::llround(vy * static_cast<double>(frame)))};
    case Kind::SinusoidalSway: {
        const double t = static_cast<double>(frame) * fps.seconds_per_frame();
        const double dx = sway_amplitude * std::sin(2.0 * std::numbers::pi * sway_frequency * t);
        return {static_cast<int32_t>(std::llround(dx)), 0};
    }
    }
    return {0, 0};
}

void SyntheticSpec::validate() const {
    if (duration_s <= 0.0)
        throw ArgumentError("synthetic spec: duration must be positive");
    if (fps.num == 0 || fps.den == 0)
        throw ArgumentError("synthetic spec: fps must be a positive rational");
    if (width == 0 || height == 0)
        throw ArgumentError("synthetic spec: frame dimensions must be at least 1x1");
    if (noise_sigma < 0.0)
        throw ArgumentError("synthetic spec: noise sigma must be nonnegative");

    const double nyquist = fps.hz() / 2.0;
    for (const auto& region : regions) {
        if (region.frequency_hz < 0.0)
            throw ArgumentError("synthetic spec: modulation frequency must be nonnegative");
        if (region.frequency_hz >= nyquist) {
            std::ostringstream msg;
            msg << "synthetic spec: modulation frequency " << region.frequency_hz
                << " Hz is not representable at " << fps.hz() << " fps (Nyquist limit "
                << nyquist << " Hz)";
            throw ArgumentError(msg.str());
        }
        if (region.amplitude < 0.0)
            throw ArgumentError("synthetic spec: modulation amplitude must be nonnegative");
        if (region.box.w < 1 || region.box.h < 1)
            throw ArgumentError("synthetic spec: region box must be at least 1x1");

        const double drift_span = drift_per_s * duration_s;
        const double peak = background + region.amplitude + std::max(0.0, drift_span);
        const double trough = background - region.amplitude + std::min(0.0, drift_span);
        if (peak > 65535.0 || trough < 0.0)
            throw ArgumentError("synthetic spec: background + amplitude + drift leaves the 16-bit count range");
    }
}

namespace {

Motion motion_from_json(const json& j) {
    Motion m;
    const std::string kind = j.value("kind", "static");
    if (kind == "static") {
        m.kind = Motion::Kind::Static;
    } else if (kind == "velocity") {
        m.kind = Motion::Kind::ConstantVelocity;
        m.vx = j.value("vx", 0.0);
        m.vy = j.value("vy", 0.0);
    } else if (kind == "sway") {
        m.kind = Motion::Kind::SinusoidalSway;
        m.sway_amplitude = j.value("amplitude_px", 0.0);
        m.sway_frequency = j.value("frequency_hz", 0.0);
    } else {
        throw ArgumentError("synthetic spec: unknown motion kind '" + kind + "'");
    }
    return m;
}

json motion_to_json(const Motion& m) {
    switch (m.kind) {
    case Motion::Kind::Static:
        return {{"kind", "static"}};
    case Motion::Kind::ConstantVelocity:
        return {{"kind", "velocity"}, {"vx", m.vx}, {"vy", m.vy}};
    case Motion::Kind::SinusoidalSway:
        return {{"kind", "sway"}, {"amplitude_px", m.sway_amplitude}, {"frequency_hz", m.sway_frequency}};
    }
    return {{"kind", "static"}};
}

std::string motion_description(const SyntheticSpec& spec) {
    std::ostringstream out;
    for (size_t i = 0; i < spec.regions.size(); ++i) {
        const Motion& m = spec.regions[i].motion;
        if (i > 0) out << "; ";
        out << "region " << i << ": ";
        switch (m.kind) {
        case Motion::Kind::Static:
            out << "static";
            break;
        case Motion::Kind::ConstantVelocity:
            out << "velocity " << m.vx << "," << m.vy << " px/frame";
            break;
        case Motion::Kind::SinusoidalSway:
            out << "sway " << m.sway_amplitude << " px at " << m.sway_frequency << " Hz";
            break;
        }
    }
    return out.str();
}

} // namespace

std::string SyntheticSpec::to_json() const {
    json j;
    j["duration_s"] = duration_s;
    j["fps"] = {{"num", fps.num}, {"den", fps.den}};
    j["width"] = width;
    j["height"] = height;
    j["background"] = background;
    j["noise_sigma"] = noise_sigma;
    j["drift_per_s"] = drift_per_s;
    j["seed"] = seed;
    j["regions"] = json::array();
    for (const auto& r : regions) {
        json rj;
        rj["box"] = {{"x", r.box.x}, {"y", r.box.y}, {"w", r.box.w}, {"h", r.box.h}};
        rj["frequency_hz"] = r.frequency_hz;
        rj["amplitude"] = r.amplitude;
        if (r.phase) rj["phase"] = *r.phase;
        if (!r.vital.empty()) rj["vital"] = r.vital;
        rj["motion"] = motion_to_json(r.motion);
        j["regions"].push_back(rj);
    }
    return j.dump(2);
}

SyntheticSpec SyntheticSpec::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ArgumentError("synthetic spec: not a JSON object");
    try {
        SyntheticSpec spec;
        spec.duration_s = j.value("duration_s", 60.0);
        if (j.contains("fps")) {
            spec.fps.num = j["fps"].value("num", 15u);
            spec.fps.den = j["fps"].value("den", 1u);
        }
        spec.width = j.value("width", 160u);
        spec.height = j.value("height", 120u);
        spec.background = j.value("background", 30000.0);
        spec.noise_sigma = j.value("noise_sigma", 0.0);
        spec.drift_per_s = j.value("drift_per_s", 0.0);
        spec.seed = j.value("seed", uint64_t{0});
        for (const auto& rj : j.value("regions", json::array())) {
            RegionSpec r;
            const auto& bj = rj.at("box");
            r.box = {bj.value("x", 0), bj.value("y", 0), bj.value("w", 0), bj.value("h", 0)};
            r.frequency_hz = rj.value("frequency_hz", 0.0);
            r.amplitude = rj.value("amplitude", 0.0);
            if (rj.contains("phase")) r.phase = rj["phase"].get<double>();
            r.vital = rj.value("vital", std::string{});
            if (rj.contains("motion")) r.motion = motion_from_json(rj["motion"]);
            spec.regions.push_back(std::move(r));
        }
        return spec;
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("synthetic spec: ") + e.what());
    }
}

SyntheticSpec SyntheticSpec::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open synthetic spec: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

FrameSequence generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();

    Rng rng(spec.seed);
    // Phases first, in region order, so the noise stream below does not
    // depend on how many regions carry explicit phases.
    std::vector<double> phases(spec.regions.size());
    for (size_t i = 0; i < spec.regions.size(); ++i) {
        const double drawn = rng.uniform(0.0, 2.0 * std::numbers::pi);
        phases[i] = spec.regions[i].phase.value_or(drawn);
    }

    const auto frame_count = static_cast<uint64_t>(std::llround(spec.duration_s * spec.fps.hz()));
    const size_t pixels = static_cast<size_t>(spec.width) * spec.height;

    FrameSequence seq;
    seq.fps = spec.fps;
    seq.frames.reserve(frame_count);

    std::vector<double> values(pixels);
    for (uint64_t t = 0; t < frame_count; ++t) {
        const double t_s = static_cast<double>(t) * spec.fps.seconds_per_frame();
        std::fill(values.begin(), values.end(), spec.background + spec.drift_per_s * t_s);

        for (size_t i = 0; i < spec.regions.size(); ++i) {
            const RegionSpec& r = spec.regions[i];
            const auto [dx, dy] = r.motion.offset_at(t, spec.fps);
            const double modulation =
                r.amplitude * std::sin(2.0 * std::numbers::pi * r.frequency_hz * t_s + phases[i]);

            const int32_t x0 = std::max(r.box.x + dx, 0);
            const int32_t y0 = std::max(r.box.y + dy, 0);
            const int32_t x1 = std::min(r.box.x + dx + r.box.w, static_cast<int32_t>(spec.width));
            const int32_t y1 = std::min(r.box.y + dy + r.box.h, static_cast<int32_t>(spec.height));
            for (int32_t y = y0; y < y1; ++y)
                for (int32_t x = x0; x < x1; ++x)
                    values[static_cast<size_t>(y) * spec.width + x] += modulation;
        }

        ThermalFrame frame;
        frame.width = spec.width;
        frame.height = spec.height;
        frame.index = t;
        frame.intensities.resize(pixels);
        if (spec.noise_sigma > 0.0) {
            for (size_t p = 0; p < pixels; ++p) {
                const double v = values[p] + spec.noise_sigma * rng.normal();
                frame.intensities[p] = static_cast<uint16_t>(std::clamp<long long>(std::llround(v), 0, 65535));
            }
        } else {
            for (size_t p = 0; p < pixels; ++p)
                frame.intensities[p] = static_cast<uint16_t>(std::clamp<long long>(std::llround(values[p]), 0, 65535));
        }
        seq.frames.push_back(std::move(frame));
    }

    SequenceMetadata meta;
    for (size_t i = 0; i < spec.regions.size(); ++i) {
        if (spec.regions[i].vital == "hr") meta.true_hr_hz = spec.regions[i].frequency_hz;
        if (spec.regions[i].vital == "rr") meta.true_rr_hz = spec.regions[i].frequency_hz;
    }
    meta.motion = motion_description(spec);
    meta.extra_json = json{{"synthetic_spec", json::parse(spec.to_json())}}.dump();
    seq.metadata = std::move(meta);
    return seq;
}

} // namespace thermovitals
