#pragma once

#include <filesystem>

#include "thermovitals/frame.hpp"

namespace thermovitals {

// THSQ container, little-endian throughout:
//   "THSQ" | u32 version=1 | u32 width | u32 height | u32 fps_num |
//   u32 fps_den | u64 frame_count | frame_count * width*height u16 payload
//   (row-major, frame-major) | u32 metadata byte length (0 if absent) |
//   UTF-8 JSON metadata
//
// Thermal counts are kept lossless on purpose; the estimators live off
// sub-count intensity fluctuations that any lossy codec would destroy.

/// Decodes a THSQ file. Throws FormatError on bad magic or header,
/// CorruptionError on truncated payload, IoError if unreadable.
FrameSequence read_sequence(const std::filesystem::path& path);

/// Encodes a sequence so that read_sequence reproduces it exactly.
void write_sequence(const FrameSequence& seq, const std::filesystem::path& path);

} // namespace thermovitals
