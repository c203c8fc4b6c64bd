#include "thermovitals/thsq.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace thermovitals {

namespace {

constexpr std::array<char, 4> kMagic = {'T', 'H', 'S', 'Q'};
constexpr uint32_t kVersion = 1;

// All multi-byte fields are little-endian on disk regardless of host order.
template <typename T>
void put_le(std::string& out, T value) {
    for (size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
}

class Reader {
public:
    explicit Reader(std::ifstream& in) : in_(in) {}

    template <typename T>
    T get_le(const char* field) {
        unsigned char buf[sizeof(T)];
        in_.read(reinterpret_cast<char*>(buf), sizeof(T));
        if (!in_)
            throw CorruptionError(std::string("truncated file while reading ") + field);
        T v = 0;
        for (size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(buf[i]) << (8 * i);
        return v;
    }

    void raw(char* dst, size_t n, const char* field) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n))
            throw CorruptionError(std::string("truncated file while reading ") + field);
    }

private:
    std::ifstream& in_;
};

} // namespace

FrameSequence read_sequence(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open for reading: " + path.string());
    Reader r(in);

    std::array<char, 4> magic;
    r.raw(magic.data(), magic.size(), "magic");
    if (magic != kMagic)
        throw FormatError("bad magic bytes, not a THSQ file: " + path.string());

    const auto version = r.get_le<uint32_t>("version");
    if (version != kVersion)
        throw FormatError("unsupported THSQ version " + std::to_string(version));

    FrameSequence seq;
    const auto width = r.get_le<uint32_t>("width");
    const auto height = r.get_le<uint32_t>("height");
    seq.fps.num = r.get_le<uint32_t>("fps numerator");
    seq.fps.den = r.get_le<uint32_t>("fps denominator");
    const auto frame_count = r.get_le<uint64_t>("frame count");

    if (seq.fps.num == 0 || seq.fps.den == 0)
        throw FormatError("invalid header: fps must be a positive rational");
    if (frame_count > 0 && (width == 0 || height == 0))
        throw FormatError("invalid header: zero width or height with nonzero frame count");

    const size_t pixels = static_cast<size_t>(width) * height;
    seq.frames.reserve(frame_count);
    std::vector<char> payload(pixels * 2);
    for (uint64_t i = 0; i < frame_count; ++i) {
        ThermalFrame frame;
        frame.width = width;
        frame.height = height;
        frame.index = i;
        frame.intensities.resize(pixels);
        r.raw(payload.data(), payload.size(), "frame payload");
        for (size_t p = 0; p < pixels; ++p) {
            const auto lo = static_cast<unsigned char>(payload[2 * p]);
            const auto hi = static_cast<unsigned char>(payload[2 * p + 1]);
            frame.intensities[p] = static_cast<uint16_t>(lo | (hi << 8));
        }
        seq.frames.push_back(std::move(frame));
    }

    const auto meta_len = r.get_le<uint32_t>("metadata length");
    if (meta_len > 0) {
        std::string meta(meta_len, '\0');
        r.raw(meta.data(), meta_len, "metadata block");
        seq.metadata = SequenceMetadata::from_json(meta);
    }
    return seq;
}

void write_sequence(const FrameSequence& seq, const std::filesystem::path& path) {
    seq.validate();

    std::string out;
    out.append(kMagic.data(), kMagic.size());
    put_le<uint32_t>(out, kVersion);
    put_le<uint32_t>(out, seq.width());
    put_le<uint32_t>(out, seq.height());
    put_le<uint32_t>(out, seq.fps.num);
    put_le<uint32_t>(out, seq.fps.den);
    put_le<uint64_t>(out, seq.frames.size());
    for (const auto& frame : seq.frames)
        for (uint16_t v : frame.intensities)
            put_le<uint16_t>(out, v);

    if (seq.metadata) {
        const std::string meta = seq.metadata->to_json();
        put_le<uint32_t>(out, static_cast<uint32_t>(meta.size()));
        out += meta;
    } else {
        put_le<uint32_t>(out, 0);
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open for writing: " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f)
        throw IoError("write failed: " + path.string());
}

} // namespace thermovitals
