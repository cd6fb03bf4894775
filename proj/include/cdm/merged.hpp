#pragma once

#include "cdm/cosine_fit.hpp"
#include "cdm/ellipse_fit.hpp"
#include "cdm/raster.hpp"

#include <string>
#include <vector>

namespace cdm {

struct SideSample {
    int row = 0;
    int col = 0;
};

/// Per-row extreme foreground columns of one component.
struct ColumnSides {
    std::vector<SideSample> left;
    std::vector<SideSample> right;
    bool overhang = false;  // some row had more than one run; extremes kept
};

ColumnSides column_sides(const BinaryMask& mask, const Component& comp);

/// fit_cosine over side samples (row -> col).
CosineFit<double> fit_cosine(const std::vector<SideSample>& samples, const CosineFitOptions& options = {});

enum class ArcSide { Left, Top, Right, Bottom };
const char* to_string(ArcSide side);

struct Arc {
    ArcSide side = ArcSide::Left;
    std::vector<Vec2> points;  // (x = col, y = row)
};

/// Boundary samples that belong to one prospective ellipse.
struct ArcBundle {
    std::vector<Arc> arcs;
    int source_unit_id = 0;

    std::vector<Vec2> all_points() const;
};

struct ArcPairing {
    std::vector<ArcBundle> bundles;
    std::vector<std::string> warnings;
};

/// Pairs each left-side crest-to-crest interval with the right-side
/// trough-to-trough interval nearest to it. Intervals cut by the end of the
/// row range are dropped. Throws "sides out of registration" when the two
/// fits are not roughly half a period apart.
ArcPairing pair_column_arcs(const ColumnSides& sides, const CosineFit<double>& left_fit,
                            const CosineFit<double>& right_fit);

/// One reconstructed unit ellipse with its provenance.
struct UnitEllipse {
    Ellipse px;
    Ellipse nm;  // fitted to calibrated coordinates
    FitQuality<double> quality;
    int component_id = -1;
    int bundle_id = -1;  // columnar path; -1 when fitted to a whole contour
    int cell_row = -1;   // island path
    int cell_col = -1;
};

struct UnitReport {
    std::vector<UnitEllipse> units;
    std::vector<std::string> warnings;
};

struct MergedOptions {
    Calibration calibration;
    long min_area = 16;
    CosineFitOptions cosine;
};

/// Columnar chains: side cosine fits -> arc bundles -> ellipse per bundle,
/// ordered top to bottom.
UnitReport fit_merged_column(const BinaryMask& mask, const MergedOptions& options = {});

/// Four islands around one lattice cell. Indices refer to the component list
/// handed to group_dogbones.
struct DogboneGroup {
    int left = -1;
    int top = -1;
    int right = -1;
    int bottom = -1;
    Vec2 cell_center = Vec2::Zero();
};

struct Lattice {
    double col_spacing = 0.0;  // same-row neighbour spacing
    double row_spacing = 0.0;  // same-column neighbour spacing
};

/// Same-row and same-column neighbour spacings of component centroids.
Lattice estimate_lattice(const std::vector<Component>& comps);

/// Groups ordered row-major by cell centre. Throws "no lattice".
std::vector<DogboneGroup> group_dogbones(const std::vector<Component>& comps, const BinaryMask& mask);

/// Right-facing samples of the left member, bottom-facing of the top member,
/// left-facing of the right member and top-facing of the bottom member, each
/// kept only strictly inside the rectangle spanned by the four centroids.
ArcBundle arcs_from_group(const DogboneGroup& group, const std::vector<Component>& comps, const BinaryMask& mask);

UnitReport fit_island_ellipses(const BinaryMask& mask, const MergedOptions& options = {});

}  // namespace cdm
