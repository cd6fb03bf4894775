#pragma once

#include "cdm/raster.hpp"

#include <optional>
#include <vector>

namespace cdm {

/// Topmost foreground row of every column; empty where a column has none.
struct SurfaceProfile {
    std::vector<std::optional<int>> top_row;

    int width() const { return static_cast<int>(top_row.size()); }
    int present() const;
};

/// Inclusive column interval.
struct ColRange {
    int first = 0;
    int last = 0;

    int size() const { return last - first + 1; }
    friend bool operator==(const ColRange&, const ColRange&) = default;
};

struct Bin {
    int bin_id = 0;
    ColRange cols;
    int floor_row = 0;   // deepest top row inside the bin
    double depth = 0.0;  // nm
};

struct BinDepthReport {
    int top_reference_row = 0;
    std::vector<Bin> bins;
    Calibration calibration;
};

SurfaceProfile surface_profile(const BinaryMask& mask);

/// Splits present columns wherever consecutive top rows differ by at least
/// `jump_threshold`; absent columns end a bin.
std::vector<ColRange> detect_bins(const SurfaceProfile& profile, int jump_threshold = 5);

/// Depth of each bin's floor below the reference row. The reference defaults
/// to the highest surface row of the whole profile.
BinDepthReport bin_depths(const SurfaceProfile& profile, const std::vector<ColRange>& bins,
                          const Calibration& calib = {}, std::optional<int> reference_row = std::nullopt);

}  // namespace cdm
