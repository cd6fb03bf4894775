#pragma once

#include "cdm/raster.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cdm {

/// Bit set of the 4-neighbour directions that face background.
enum Side : std::uint8_t { kLeft = 1, kRight = 2, kUp = 4, kDown = 8 };

/// A foreground pixel with at least one background 4-neighbour
/// (out-of-image counts as background).
struct TransitionPoint {
    Pixel pos;
    std::uint8_t background_sides = 0;

    friend bool operator==(const TransitionPoint&, const TransitionPoint&) = default;
};

/// "left|up" style rendering of a side set, in left, right, up, down order.
std::string sides_to_string(std::uint8_t sides);

/// Sorted by (row, col).
std::vector<TransitionPoint> find_transition_points(const BinaryMask& mask);

/// Per-unit landmark points, all transition points of the unit.
struct Landmarks {
    Pixel top;
    Pixel bottom;
    Pixel mid_left;
    Pixel mid_right;
    Pixel top_left;
    Pixel top_right;
    int mid_row = 0;
};

/// Extremal transition points of `comp`. Ties at the top and bottom go to the
/// smallest column. Throws "landmark row empty" when `mid_row` misses the
/// component.
Landmarks landmarks(const BinaryMask& mask, const Component& comp, int mid_row);

}  // namespace cdm
