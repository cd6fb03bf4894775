#include "cdm/transitions.hpp"

namespace cdm {

std::string sides_to_string(std::uint8_t sides) {
    std::string out;
    auto add = [&](std::uint8_t bit, const char* name) {
        if (!(sides & bit)) return;
        if (!out.empty()) out += '|';
        out += name;
    };
    add(kLeft, "left");
    add(kRight, "right");
    add(kUp, "up");
    add(kDown, "down");
    return out;
}

std::vector<TransitionPoint> find_transition_points(const BinaryMask& mask) {
    std::vector<TransitionPoint> out;
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            if (!mask.at(c, r)) continue;
            std::uint8_t sides = 0;
            if (!mask.at(c - 1, r)) sides |= kLeft;
            if (!mask.at(c + 1, r)) sides |= kRight;
            if (!mask.at(c, r - 1)) sides |= kUp;
            if (!mask.at(c, r + 1)) sides |= kDown;
            if (sides) out.push_back({{c, r}, sides});
        }
    }
    return out;
}

// Row extremes of an 8-connected component are always transition points: the
// 4-neighbour beyond the extreme cannot be foreground of another component.
// The same holds for the first and last rows, whose up/down neighbours are
// background.
Landmarks landmarks(const BinaryMask& mask, const Component& comp, int mid_row) {
    (void)mask;
    if (comp.pixels.empty()) throw Error("landmarks of an empty component");
    Landmarks lm;
    lm.mid_row = mid_row;

    const int top_row = comp.bbox.min_row;
    const int bottom_row = comp.bbox.max_row;
    int lo = 0;
    int hi = 0;
    comp.row_extent(top_row, lo, hi);
    lm.top = {lo, top_row};
    lm.top_left = {lo, top_row};
    lm.top_right = {hi, top_row};
    comp.row_extent(bottom_row, lo, hi);
    lm.bottom = {lo, bottom_row};

    if (!comp.row_extent(mid_row, lo, hi)) {
        throw Error("landmark row empty: row " + std::to_string(mid_row) + " misses component " +
                    std::to_string(comp.id));
    }
    lm.mid_left = {lo, mid_row};
    lm.mid_right = {hi, mid_row};
    return lm;
}

}  // namespace cdm
