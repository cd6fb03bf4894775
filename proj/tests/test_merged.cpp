#include "cdm/merged.hpp"
#include "cdm/synth.hpp"
#include "test_util.hpp"

#include <cmath>

#include <gtest/gtest.h>

using namespace cdm;
using cdm::test::rect_mask;

namespace {

EllipseGratingSpec islands_spec(int rows, int cols) {
    EllipseGratingSpec spec;
    spec.a = 70;
    spec.b = 30;
    spec.theta_deg = 0;
    spec.rows = rows;
    spec.cols = cols;
    spec.col_pitch = 170;
    spec.row_pitch = 76;
    spec.level = MergeLevel::Islands;
    return spec;
}

const GratingUnitTruth& nearest(const GratingTruth& truth, const Vec2& p) {
    const GratingUnitTruth* best = &truth.units.front();
    for (const auto& u : truth.units) {
        if ((u.ellipse.center - p).norm() < (best->ellipse.center - p).norm()) best = &u;
    }
    return *best;
}

}  // namespace

TEST(ColumnSides, BarExtremes) {
    const BinaryMask m = rect_mask(20, 10, 3, 2, 8, 6);
    const ColumnSides s = column_sides(m, connected_components(m)[0]);
    ASSERT_EQ(s.left.size(), 5u);
    ASSERT_EQ(s.right.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(s.left[i].row, static_cast<int>(i) + 2);
        EXPECT_EQ(s.left[i].col, 3);
        EXPECT_EQ(s.right[i].col, 8);
    }
    EXPECT_FALSE(s.overhang);
}

TEST(ColumnSides, OneRowAndOverhang) {
    const BinaryMask line = rect_mask(20, 5, 2, 2, 12, 2);
    const ColumnSides s = column_sides(line, connected_components(line)[0]);
    ASSERT_EQ(s.left.size(), 1u);
    EXPECT_EQ(s.left[0].col, 2);
    EXPECT_EQ(s.right[0].col, 12);

    // A U shape has two runs on its upper rows.
    BinaryMask u = rect_mask(20, 10, 2, 2, 4, 8);
    u.bits.block(2, 10, 7, 3) = true;
    u.bits.block(7, 2, 2, 11) = true;
    EXPECT_TRUE(column_sides(u, connected_components(u)[0]).overhang);
}

TEST(FitMergedColumn, ColumnarChainRecoversUnits) {
    EllipseGratingSpec spec;
    spec.a = 60;
    spec.b = 25;
    spec.theta_deg = 90;
    spec.rows = 5;
    spec.cols = 1;
    spec.row_pitch = 100;
    spec.col_pitch = 80;
    spec.level = MergeLevel::Columnar;
    const GratingSample s = gen_ellipse_grating(spec);
    ASSERT_EQ(connected_components(s.mask).size(), 1u);
    const UnitReport rep = fit_merged_column(s.mask);
    ASSERT_FALSE(rep.units.empty());
    for (std::size_t i = 0; i < rep.units.size(); ++i) {
        const UnitEllipse& u = rep.units[i];
        const Ellipse& g = nearest(s.truth, u.px.center).ellipse;
        EXPECT_NEAR(u.px.a, g.a, 2.0);
        EXPECT_NEAR(u.px.b, g.b, 2.0);
        EXPECT_NEAR((u.px.center - g.center).norm(), 0, 3.0);
        EXPECT_GE(u.bundle_id, 0);
        if (i > 0) EXPECT_GT(u.px.center.y(), rep.units[i - 1].px.center.y());
    }
}

TEST(FitMergedColumn, IsolatedFallsBackToContour) {
    const GratingSample s = gen_ellipse_grating(EllipseGratingSpec{});
    const UnitReport rep = fit_merged_column(s.mask);
    EXPECT_EQ(rep.units.size(), 9u);
    ASSERT_FALSE(rep.warnings.empty());
    EXPECT_NE(rep.warnings[0].find("not merged"), std::string::npos);
    for (const auto& u : rep.units) EXPECT_EQ(u.bundle_id, -1);
    EXPECT_THROW(fit_merged_column(BinaryMask(50, 50)), Error);
}

TEST(FitMergedColumn, CalibratedCopyIsScaled) {
    const GratingSample s = gen_ellipse_grating(EllipseGratingSpec{});
    MergedOptions opt;
    opt.calibration = {2.0, 2.0};
    for (const auto& u : fit_merged_column(s.mask, opt).units) {
        EXPECT_NEAR(u.nm.a, 2.0 * u.px.a, 1e-6);
        EXPECT_NEAR(u.nm.b, 2.0 * u.px.b, 1e-6);
        EXPECT_NEAR((u.nm.center - 2.0 * u.px.center).norm(), 0, 1e-6);
    }
}

TEST(Lattice, SpacingsOfIslands) {
    const GratingSample s = gen_ellipse_grating(islands_spec(4, 4));
    const Lattice lat = estimate_lattice(connected_components(s.mask));
    EXPECT_GT(lat.col_spacing, 0);
    EXPECT_GT(lat.row_spacing, 0);
}

TEST(GroupDogbones, FourByFourGivesNineCells) {
    const GratingSample s = gen_ellipse_grating(islands_spec(4, 4));
    const auto comps = connected_components(clean(s.mask, 16));
    const auto groups = group_dogbones(comps, s.mask);
    ASSERT_EQ(groups.size(), 9u);
    for (std::size_t i = 1; i < groups.size(); ++i) {
        const Vec2 a = groups[i - 1].cell_center, b = groups[i].cell_center;
        EXPECT_TRUE(b.y() > a.y() + 1 || (std::abs(b.y() - a.y()) <= 1 && b.x() > a.x()));
    }
    for (const auto& g : groups) {
        EXPECT_LT(comps[g.left].centroid.x(), g.cell_center.x());
        EXPECT_GT(comps[g.right].centroid.x(), g.cell_center.x());
        EXPECT_LT(comps[g.top].centroid.y(), g.cell_center.y());
        EXPECT_GT(comps[g.bottom].centroid.y(), g.cell_center.y());
    }
}

TEST(GroupDogbones, ThreeByThreeGivesFourCells) {
    const GratingSample s = gen_ellipse_grating(islands_spec(3, 3));
    EXPECT_EQ(group_dogbones(connected_components(clean(s.mask, 16)), s.mask).size(), 4u);
}

TEST(GroupDogbones, NoLattice) {
    BinaryMask m(100, 100);
    m.bits.block(10, 10, 5, 5) = true;
    m.bits.block(10, 50, 5, 5) = true;
    m.bits.block(60, 30, 5, 5) = true;
    try {
        group_dogbones(connected_components(m), m);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("no lattice"), std::string::npos);
    }
    // Four scattered blobs with no surrounded cell.
    m.bits.block(80, 85, 5, 5) = true;
    EXPECT_THROW(group_dogbones(connected_components(m), m), Error);
}

TEST(FitIslandEllipses, MatchesGenerator) {
    const GratingSample s = gen_ellipse_grating(islands_spec(4, 4));
    const UnitReport rep = fit_island_ellipses(s.mask);
    ASSERT_EQ(rep.units.size(), s.truth.units.size());
    for (const auto& u : rep.units) {
        const Ellipse& g = nearest(s.truth, u.px.center).ellipse;
        EXPECT_NEAR((u.px.center - g.center).norm(), 0, 3.0);
        EXPECT_NEAR(u.px.a, g.a, 3.0);
        EXPECT_NEAR(u.px.b, g.b, 3.0);
    }
    // Cells sit on a centred lattice: row bands of 1, 2, 3, 2, 1 cells.
    std::vector<int> per_band(5, 0);
    for (std::size_t i = 0; i < rep.units.size(); ++i) {
        const auto& u = rep.units[i];
        ASSERT_TRUE(u.cell_row >= 0 && u.cell_row < 5);
        EXPECT_EQ(u.cell_col, per_band[u.cell_row]++);
        if (i > 0) EXPECT_GE(u.px.center.y(), rep.units[i - 1].px.center.y());
    }
    EXPECT_EQ(per_band, (std::vector<int>{1, 2, 3, 2, 1}));
}
