#pragma once

#include "cdm/ellipse_fit.hpp"
#include "cdm/raster.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cdm {

// Generators place every analytic vertex used by the extractors on a pixel
// centre, so the recorded geometry is exactly what the raster shows. Requested
// values are echoed next to the realised ones.

struct SrgSpec {
    int tooth_count = 7;
    double pitch = 220.0;
    double depth = 150.0;
    double mid_thickness = 48.0;
    double left_slant = 75.0;   // degrees from horizontal
    double right_slant = 105.0;
    int width = 0;               // 0 = fit to content
    int height = 0;
    int margin = 20;
    std::uint64_t seed = 0;
};

struct SrgToothTruth {
    Vec2 top_left, top_right, mid_left, mid_right, bottom_left, bottom_right;  // (col, row)
    double mid_thickness = 0.0;
    double left_slant = 0.0;
    double right_slant = 0.0;
};

struct SrgTruth {
    SrgSpec spec;
    int top_row = 0;
    int bottom_row = 0;
    int mid_row = 0;
    double etch_depth = 0.0;
    std::vector<double> pitches;
    std::vector<SrgToothTruth> teeth;
};

struct FresnelSpec {
    int bin_count = 9;
    int bin_width = 40;
    std::vector<int> bin_depths;  // px below the top margin, one per bin
    int slab_thickness = 40;      // below the deepest bin floor
    int margin = 20;
    std::uint64_t seed = 0;
};

struct FresnelBinTruth {
    int first_col = 0;
    int last_col = 0;
    int floor_row = 0;
    int depth = 0;  // px below the highest surface row
};

struct FresnelTruth {
    FresnelSpec spec;
    int top_reference_row = 0;
    std::vector<FresnelBinTruth> bins;
};

enum class MergeLevel { Isolated, Columnar, Islands };
const char* to_string(MergeLevel level);
MergeLevel parse_merge_level(const std::string& text);

/// Isolated and columnar: units on a rows x cols rectangular lattice with the
/// given pitches. Islands: the units are holes on a centred lattice (same-row
/// spacing col_pitch, same-column spacing row_pitch, every other row shifted
/// by half); the foreground is the material left between them, which breaks
/// into islands. rows x cols counts islands along the two diagonal lattice
/// axes, giving (rows-1) x (cols-1) fully enclosed units.
struct EllipseGratingSpec {
    double a = 35.0;
    double b = 18.0;
    double theta_deg = 20.0;
    int rows = 3;
    int cols = 3;
    double row_pitch = 60.0;
    double col_pitch = 100.0;
    MergeLevel level = MergeLevel::Isolated;
    int margin = 20;
    std::uint64_t seed = 0;
};

struct GratingUnitTruth {
    Ellipse ellipse;
    int row = 0;
    int col = 0;
};

struct GratingTruth {
    EllipseGratingSpec spec;
    std::vector<GratingUnitTruth> units;  // row-major by centre
    std::vector<Vec2> islands;            // island centres, islands level only
};

struct SrgSample {
    BinaryMask mask;
    SrgTruth truth;
};
struct FresnelSample {
    BinaryMask mask;
    FresnelTruth truth;
};
struct GratingSample {
    BinaryMask mask;
    GratingTruth truth;
};

SrgSample gen_srg(const SrgSpec& spec);
FresnelSample gen_fresnel(const FresnelSpec& spec);
GratingSample gen_ellipse_grating(const EllipseGratingSpec& spec);

/// Flips each pixel, in raster order, when the next SplitMix64 uniform draw is
/// below `flip_prob`.
BinaryMask add_noise(const BinaryMask& mask, double flip_prob, std::uint64_t seed);

}  // namespace cdm
