#include "cdm/fresnel.hpp"
#include "cdm/synth.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace cdm;
using cdm::test::rect_mask;

namespace {

FresnelSample staircase() {
    FresnelSpec spec;
    spec.bin_depths = {0, 10, 20, 30, 40, 50, 60, 70, 80};
    return gen_fresnel(spec);
}

}  // namespace

TEST(SurfaceProfile, RectangleAndGaps) {
    BinaryMask m = rect_mask(30, 30, 0, 5, 29, 20);
    const SurfaceProfile p = surface_profile(m);
    for (const auto& v : p.top_row) EXPECT_EQ(v, 5);
    m.bits.col(7) = false;
    const SurfaceProfile g = surface_profile(m);
    EXPECT_FALSE(g.top_row[7].has_value());
    EXPECT_EQ(g.present(), 29);
    EXPECT_THROW(surface_profile(BinaryMask(5, 5)), Error);
}

TEST(SurfaceProfile, MatchesGeneratorStaircase) {
    const FresnelSample s = staircase();
    const SurfaceProfile p = surface_profile(s.mask);
    for (const auto& bin : s.truth.bins) {
        for (int c = bin.first_col; c <= bin.last_col; ++c) EXPECT_EQ(p.top_row[static_cast<std::size_t>(c)], bin.floor_row);
    }
}

TEST(DetectBins, FlatStaircaseAndThreshold) {
    const SurfaceProfile flat = surface_profile(rect_mask(50, 30, 0, 10, 49, 29));
    EXPECT_EQ(detect_bins(flat).size(), 1u);

    const FresnelSample s = staircase();
    const SurfaceProfile p = surface_profile(s.mask);
    const auto bins = detect_bins(p);
    ASSERT_EQ(bins.size(), 9u);
    for (std::size_t i = 0; i < 9; ++i) {
        EXPECT_NEAR(bins[i].first, s.truth.bins[i].first_col, 1);
        EXPECT_NEAR(bins[i].last, s.truth.bins[i].last_col, 1);
    }
    EXPECT_EQ(detect_bins(p, 1000).size(), 1u);
    EXPECT_THROW(detect_bins(p, 0), Error);
}

TEST(BinDepths, StaircaseFlatAndCalibration) {
    const FresnelSample s = staircase();
    const SurfaceProfile p = surface_profile(s.mask);
    const auto bins = detect_bins(p);
    const BinDepthReport r = bin_depths(p, bins);
    ASSERT_EQ(r.bins.size(), 9u);
    EXPECT_EQ(r.top_reference_row, s.truth.top_reference_row);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(r.bins[i].depth, s.truth.bins[i].depth, 1.0);
    const BinDepthReport scaled = bin_depths(p, bins, {1.0, 3.0});
    for (std::size_t i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(scaled.bins[i].depth, 3.0 * r.bins[i].depth);

    const SurfaceProfile flat = surface_profile(rect_mask(50, 30, 0, 10, 49, 29));
    const BinDepthReport f = bin_depths(flat, detect_bins(flat));
    ASSERT_EQ(f.bins.size(), 1u);
    EXPECT_EQ(f.bins[0].depth, 0.0);
}

TEST(BinDepths, ExplicitReferenceAndErrors) {
    const FresnelSample s = staircase();
    const SurfaceProfile p = surface_profile(s.mask);
    const auto bins = detect_bins(p);
    const BinDepthReport r = bin_depths(p, bins, {}, s.truth.top_reference_row - 5);
    EXPECT_DOUBLE_EQ(r.bins[0].depth, 5.0);
    EXPECT_THROW(bin_depths(p, {}), Error);
    EXPECT_THROW(bin_depths(p, {ColRange{0, 50}, ColRange{40, 60}}), Error);
    EXPECT_THROW(bin_depths(p, {ColRange{0, 100000}}), Error);
}

TEST(GenFresnel, ContractCases) {
    FresnelSpec zero;
    zero.bin_depths.assign(9, 0);
    const FresnelSample z = gen_fresnel(zero);
    EXPECT_EQ(detect_bins(surface_profile(z.mask)).size(), 1u);
    FresnelSpec neg;
    neg.bin_depths = {0, -1, 2, 3, 4, 5, 6, 7, 8};
    EXPECT_THROW(gen_fresnel(neg), Error);
    FresnelSpec mismatch;
    mismatch.bin_depths = {0, 1};
    EXPECT_THROW(gen_fresnel(mismatch), Error);
}
