#pragma once

#include <cstdint>

namespace thermovitals {

/// Axis-aligned rectangle in pixel coordinates, (x, y) = top-left corner.
struct RoiBox {
    int32_t x = 0;
    int32_t y = 0;
    int32_t w = 0;
    int32_t h = 0;

    int32_t right() const { return x + w; }
    int32_t bottom() const { return y + h; }

    bool inside(uint32_t frame_w, uint32_t frame_h) const {
        return x >= 0 && y >= 0 && w >= 1 && h >= 1 &&
               right() <= static_cast<int32_t>(frame_w) &&
               bottom() <= static_cast<int32_t>(frame_h);
    }

    bool operator==(const RoiBox&) const = default;
};

} // namespace thermovitals
