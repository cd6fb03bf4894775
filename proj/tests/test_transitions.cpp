#include "cdm/synth.hpp"
#include "cdm/transitions.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace cdm;

TEST(Transitions, EmptyAndLonePixel) {
    EXPECT_TRUE(find_transition_points(BinaryMask(8, 8)).empty());
    BinaryMask m(10, 10);
    m.set(5, 5);
    const auto pts = find_transition_points(m);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].pos, (Pixel{5, 5}));
    EXPECT_EQ(pts[0].background_sides, kLeft | kRight | kUp | kDown);
    EXPECT_EQ(sides_to_string(pts[0].background_sides), "left|right|up|down");
}

TEST(Transitions, SolidSquareSkipsCentre) {
    const auto pts = find_transition_points(BinaryMask(3, 3, true));
    ASSERT_EQ(pts.size(), 8u);
    for (const auto& p : pts) EXPECT_FALSE(p.pos == (Pixel{1, 1}));
    // Image edges count as background.
    EXPECT_EQ(pts[0].background_sides, kLeft | kUp);
}

TEST(Transitions, MatchesBruteForce) {
    SplitMix64 rng(31);
    for (int k = 0; k < 50; ++k) {
        const int w = rng.uniform_int(1, 30), h = rng.uniform_int(1, 30);
        const BinaryMask m = test::random_mask(rng, w, h, rng.uniform());
        std::vector<TransitionPoint> expect;
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                if (!m.at(c, r)) continue;
                std::uint8_t s = 0;
                s |= m.at(c - 1, r) ? 0 : kLeft;
                s |= m.at(c + 1, r) ? 0 : kRight;
                s |= m.at(c, r - 1) ? 0 : kUp;
                s |= m.at(c, r + 1) ? 0 : kDown;
                if (s) expect.push_back({{c, r}, s});
            }
        }
        EXPECT_EQ(find_transition_points(m), expect) << k;
    }
}

TEST(Landmarks, Rectangle) {
    const BinaryMask m = test::rect_mask(12, 22, 0, 0, 9, 19);
    const auto comps = connected_components(m);
    const Landmarks lm = landmarks(m, comps[0], 10);
    EXPECT_EQ(lm.top, (Pixel{0, 0}));
    EXPECT_EQ(lm.bottom, (Pixel{0, 19}));
    EXPECT_EQ(lm.mid_left, (Pixel{0, 10}));
    EXPECT_EQ(lm.mid_right, (Pixel{9, 10}));
    EXPECT_EQ(lm.top_left, (Pixel{0, 0}));
    EXPECT_EQ(lm.top_right, (Pixel{9, 0}));
    EXPECT_THROW(landmarks(m, comps[0], 21), Error);
}

TEST(Landmarks, SinglePixel) {
    BinaryMask m(5, 5);
    m.set(3, 2);
    const Landmarks lm = landmarks(m, connected_components(m)[0], 2);
    for (const Pixel& p : {lm.top, lm.bottom, lm.mid_left, lm.mid_right, lm.top_left, lm.top_right}) {
        EXPECT_EQ(p, (Pixel{3, 2}));
    }
}

TEST(Landmarks, TrapezoidMatchesGeneratorVertices) {
    SrgSpec spec;
    spec.seed = 1;
    const SrgSample s = gen_srg(spec);
    const auto comps = connected_components(s.mask);
    ASSERT_EQ(comps.size(), s.truth.teeth.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const Landmarks lm = landmarks(s.mask, comps[i], s.truth.mid_row);
        const SrgToothTruth& t = s.truth.teeth[i];
        EXPECT_NEAR(lm.top_left.col, t.top_left.x(), 1.0);
        EXPECT_NEAR(lm.top_right.col, t.top_right.x(), 1.0);
        EXPECT_NEAR(lm.mid_left.col, t.mid_left.x(), 1.0);
        EXPECT_NEAR(lm.mid_right.col, t.mid_right.x(), 1.0);
        EXPECT_NEAR(lm.top.row, t.top_left.y(), 1.0);
        EXPECT_NEAR(lm.bottom.row, t.bottom_left.y(), 1.0);
    }
}
