#pragma once

#include "cdm/raster.hpp"
#include "cdm/transitions.hpp"

#include <string>
#include <vector>

namespace cdm {

struct ToothCd {
    int tooth_id = 0;
    double mid_thickness = 0.0;  // nm
    double left_slant = 0.0;     // degrees from horizontal, (0, 180)
    double right_slant = 0.0;
    double depth = 0.0;          // per-tooth top-to-bottom, nm (auxiliary)
    Landmarks landmarks;
};

struct CdStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single value
    int count = 0;
};

CdStats summarize(const std::vector<double>& values);

struct CdReport {
    double etch_depth = 0.0;  // nm
    std::vector<double> pitches;
    std::vector<ToothCd> teeth;
    Pixel global_top;
    Pixel global_bottom;
    int mid_row = 0;
    CdStats mid_thickness_stats;
    CdStats left_slant_stats;
    CdStats right_slant_stats;
    CdStats pitch_stats;
    CdStats tooth_depth_stats;
    Calibration calibration;
    std::vector<std::string> warnings;
};

struct SrgOptions {
    Calibration calibration;
    long min_area = 16;
    /// Mid elevation as a fraction of the way from the global top row to the
    /// global bottom row.
    double mid_fraction = 0.5;
    /// Spurs narrower than this are stripped before segmentation (see
    /// strip_spurs). 1 = off.
    int min_run = 3;
    /// Rows on each side used to check a landmark edge for digital
    /// straightness (see repair_landmarks). 0 = off.
    int edge_window = 6;
};

/// True when the samples (row, col) lie between two parallel lines less
/// than one column apart, i.e. form a digital straight segment.
bool digitally_straight(const std::vector<Pixel>& samples);

/// Replaces a side-wall landmark column that breaks digital straightness
/// with the single column within 2 px that restores it on the rows above or
/// below it. Straight walls are left untouched, so noise-free masks keep
/// their exact landmarks.
Landmarks repair_landmarks(const Component& tooth, const Landmarks& lm, int window);

/// clean -> 8-connected components -> left-to-right by centroid column.
std::vector<Component> segment_teeth(const BinaryMask& mask, long min_area);

double etch_depth(const std::vector<Component>& teeth, const BinaryMask& mask, const Calibration& calib);

/// Rounded row at `fraction` of the way between the global top and bottom rows.
int mid_row_of(const std::vector<Component>& teeth, double fraction = 0.5);

double mid_thickness(const Component& tooth, const BinaryMask& mask, int mid_row, const Calibration& calib);

/// Spacing of consecutive mid-left landmarks; needs at least two teeth.
std::vector<double> pitch_sequence(const std::vector<Component>& teeth, const BinaryMask& mask, int mid_row,
                                   const Calibration& calib);

struct SlantAngles {
    double left = 90.0;
    double right = 90.0;
};

/// Sidewall angle from horizontal of the (top-left, mid-left) and
/// (top-right, mid-right) segments in calibrated space.
SlantAngles slant_angles(const Component& tooth, const BinaryMask& mask, int mid_row, const Calibration& calib);

/// Same computation from precomputed landmarks.
SlantAngles slant_angles(const Landmarks& lm, const Calibration& calib);

CdReport extract_srg(const BinaryMask& mask, const SrgOptions& options = {});

}  // namespace cdm
