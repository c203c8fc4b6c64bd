#include "thermovitals/frame.hpp"

#include <json.hpp>

namespace thermovitals {

using nlohmann::json;

std::string SequenceMetadata::to_json() const {
    json j = json::object();
    if (true_hr_hz) j["true_hr_hz"] = *true_hr_hz;
    if (true_rr_hz) j["true_rr_hz"] = *true_rr_hz;
    if (motion) j["motion"] = *motion;
    if (!extra_json.empty()) j["extra"] = json::parse(extra_json);
    return j.dump();
}

SequenceMetadata SequenceMetadata::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw FormatError("metadata block is not a JSON object");
    SequenceMetadata m;
    if (j.contains("true_hr_hz")) m.true_hr_hz = j["true_hr_hz"].get<double>();
    if (j.contains("true_rr_hz")) m.true_rr_hz = j["true_rr_hz"].get<double>();
    if (j.contains("motion")) m.motion = j["motion"].get<std::string>();
    if (j.contains("extra")) m.extra_json = j["extra"].dump();
    return m;
}

void FrameSequence::validate() const {
    if (fps.num == 0 || fps.den == 0)
        throw ArgumentError("fps must be a positive rational");
    for (size_t i = 0; i < frames.size(); ++i) {
        frames[i].validate();
        if (frames[i].width != width() || frames[i].height != height())
            throw ArgumentError("all frames must share identical dimensions");
        if (frames[i].index != i)
            throw ArgumentError("frame indices must be consecutive from 0");
    }
}

} // namespace thermovitals
