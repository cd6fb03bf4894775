#include "cdm/srg.hpp"
#include "cdm/synth.hpp"
#include "test_util.hpp"

#include <cmath>

#include <gtest/gtest.h>

using namespace cdm;

TEST(AddNoise, ExtremeProbabilities) {
    SplitMix64 rng(1);
    const BinaryMask m = test::random_mask(rng, 40, 30, 0.5);
    EXPECT_EQ(add_noise(m, 0.0, 9), m);
    const BinaryMask inv = add_noise(m, 1.0, 9);
    EXPECT_EQ(inv.count(), 40 * 30 - m.count());
    EXPECT_THROW(add_noise(m, 1.5, 9), Error);
    EXPECT_THROW(add_noise(m, -0.1, 9), Error);
}

TEST(AddNoise, BinomialCountAndDeterminism) {
    const BinaryMask blank(1000, 1000);
    const double p = 0.1, n = 1e6;
    const BinaryMask noisy = add_noise(blank, p, 7);
    EXPECT_NEAR(static_cast<double>(noisy.count()), n * p, 3 * std::sqrt(n * p * (1 - p)));
    EXPECT_EQ(add_noise(blank, p, 7), noisy);
    EXPECT_NE(add_noise(blank, p, 8), noisy);
}

TEST(GenSrg, TruthIsSelfConsistent) {
    SrgSpec spec;
    spec.left_slant = 90;
    spec.right_slant = 90;
    const SrgSample s = gen_srg(spec);
    ASSERT_EQ(s.truth.teeth.size(), 7u);
    EXPECT_EQ(s.truth.pitches.size(), 6u);
    for (const auto& t : s.truth.teeth) {
        EXPECT_DOUBLE_EQ(t.left_slant, 90.0);
        EXPECT_DOUBLE_EQ(t.right_slant, 90.0);
        EXPECT_DOUBLE_EQ(t.top_left.x(), t.mid_left.x());
        EXPECT_DOUBLE_EQ(t.mid_thickness, t.mid_right.x() - t.mid_left.x());
        EXPECT_TRUE(s.mask.at(static_cast<int>(t.mid_left.x()), s.truth.mid_row));
        EXPECT_FALSE(s.mask.at(static_cast<int>(t.mid_left.x()) - 1, s.truth.mid_row));
    }
    EXPECT_DOUBLE_EQ(s.truth.etch_depth, s.truth.bottom_row - s.truth.top_row);
    EXPECT_EQ(connected_components(s.mask).size(), 7u);
}

TEST(GenSrg, InvalidSpecs) {
    SrgSpec spec;
    spec.depth = 0;
    EXPECT_THROW(gen_srg(spec), Error);
    spec = {};
    spec.left_slant = 0;
    EXPECT_THROW(gen_srg(spec), Error);
    spec = {};
    spec.tooth_count = 0;
    EXPECT_THROW(gen_srg(spec), Error);
    spec = {};
    spec.mid_thickness = 250;  // wider than the pitch
    EXPECT_THROW(gen_srg(spec), Error);
}

TEST(GenEllipseGrating, IsolatedUnits) {
    const GratingSample s = gen_ellipse_grating(EllipseGratingSpec{});
    EXPECT_EQ(connected_components(s.mask).size(), 9u);
    EXPECT_EQ(s.truth.units.size(), 9u);
    for (std::size_t i = 1; i < s.truth.units.size(); ++i) {
        const auto& a = s.truth.units[i - 1];
        const auto& b = s.truth.units[i];
        EXPECT_TRUE(b.row > a.row || (b.row == a.row && b.col == a.col + 1));
    }
}

TEST(GenEllipseGrating, ColumnarMergesEachColumn) {
    EllipseGratingSpec spec;
    spec.a = 60;
    spec.b = 25;
    spec.theta_deg = 90;
    spec.rows = 4;
    spec.cols = 3;
    spec.row_pitch = 100;
    spec.col_pitch = 80;
    spec.level = MergeLevel::Columnar;
    const GratingSample s = gen_ellipse_grating(spec);
    EXPECT_EQ(connected_components(s.mask).size(), 3u);
    // Pitches that do not make columns touch are rejected.
    spec.row_pitch = 130;
    EXPECT_THROW(gen_ellipse_grating(spec), Error);
}

TEST(GenEllipseGrating, IslandsAndInvalidIslands) {
    EllipseGratingSpec spec;
    spec.a = 70;
    spec.b = 30;
    spec.theta_deg = 0;
    spec.rows = 4;
    spec.cols = 4;
    spec.col_pitch = 170;
    spec.row_pitch = 76;
    spec.level = MergeLevel::Islands;
    const GratingSample s = gen_ellipse_grating(spec);
    EXPECT_EQ(s.truth.islands.size(), connected_components(clean(s.mask, 16)).size());
    spec.rows = 1;
    EXPECT_THROW(gen_ellipse_grating(spec), Error);
    spec.rows = 4;
    spec.row_pitch = 300;  // diagonal holes no longer overlap
    EXPECT_THROW(gen_ellipse_grating(spec), Error);
}

TEST(MergeLevel, ParseRoundTrip) {
    for (MergeLevel l : {MergeLevel::Isolated, MergeLevel::Columnar, MergeLevel::Islands}) {
        EXPECT_EQ(parse_merge_level(to_string(l)), l);
    }
    EXPECT_THROW(parse_merge_level("blob"), Error);
}
