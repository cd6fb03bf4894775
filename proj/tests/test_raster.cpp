#include "cdm/raster.hpp"
#include "cdm/synth.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <set>

#include <gtest/gtest.h>

using namespace cdm;
using cdm::test::random_mask;
using cdm::test::rect_mask;

namespace {

// Recursive-free flood fill with an explicit queue, written independently of
// the library labelling.
int oracle_count(const BinaryMask& m, bool eight) {
    const int w = m.width(), h = m.height();
    std::vector<char> seen(static_cast<std::size_t>(w * h), 0);
    int count = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!m.at(c, r) || seen[r * w + c]) continue;
            ++count;
            std::vector<Pixel> queue{{c, r}};
            seen[r * w + c] = 1;
            for (std::size_t i = 0; i < queue.size(); ++i) {
                const Pixel p = queue[i];
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if ((dr == 0 && dc == 0) || (!eight && dr != 0 && dc != 0)) continue;
                        const int nc = p.col + dc, nr = p.row + dr;
                        if (m.at(nc, nr) && !seen[nr * w + nc]) {
                            seen[nr * w + nc] = 1;
                            queue.push_back({nc, nr});
                        }
                    }
                }
            }
        }
    }
    return count;
}

// Largest component with its holes filled: a simply connected blob.
BinaryMask solid_blob(SplitMix64& rng) {
    const BinaryMask m = random_mask(rng, 30, 30, 0.6);
    const auto comps = connected_components(m);
    const auto big = std::max_element(comps.begin(), comps.end(),
                                      [](const Component& a, const Component& b) { return a.pixel_count < b.pixel_count; });
    BinaryMask blob = component_mask(*big, 30, 30);
    // Background not 4-reachable from the border is a hole.
    BinaryMask outside(30, 30);
    std::vector<Pixel> queue;
    for (int i = 0; i < 30; ++i) {
        for (Pixel p : {Pixel{i, 0}, Pixel{i, 29}, Pixel{0, i}, Pixel{29, i}}) {
            if (!blob.at(p) && !outside.at(p)) {
                outside.set(p.col, p.row);
                queue.push_back(p);
            }
        }
    }
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const Pixel p = queue[i];
        for (Pixel q : {Pixel{p.col + 1, p.row}, Pixel{p.col - 1, p.row}, Pixel{p.col, p.row + 1}, Pixel{p.col, p.row - 1}}) {
            if (q.col < 0 || q.row < 0 || q.col >= 30 || q.row >= 30 || blob.at(q) || outside.at(q)) continue;
            outside.set(q.col, q.row);
            queue.push_back(q);
        }
    }
    blob.bits = !outside.bits;
    return blob;
}

}  // namespace

TEST(Binarize, ThresholdSemantics) {
    EXPECT_EQ(binarize(GrayImage(4, 3, 0)).count(), 0);
    EXPECT_EQ(binarize(GrayImage(4, 3, 255)).count(), 12);
    GrayImage g(2, 1);
    g(0, 0) = 127;
    g(1, 0) = 128;
    const BinaryMask m = binarize(g, 128);
    EXPECT_FALSE(m.at(0, 0));
    EXPECT_TRUE(m.at(1, 0));
}

TEST(ExtractClass, SelectsOneLabel) {
    LabelMask lm;
    lm.labels.resize(1, 4);
    lm.labels << 0, 1, 2, 1;
    const auto one = extract_class(lm, 1);
    EXPECT_FALSE(one.absent);
    EXPECT_TRUE(!one.mask.at(0, 0) && one.mask.at(1, 0) && !one.mask.at(2, 0) && one.mask.at(3, 0));
    const auto two = extract_class(lm, 2);
    EXPECT_EQ(two.mask.count(), 1);
    EXPECT_TRUE(two.mask.at(2, 0));
    const auto seven = extract_class(lm, 7);
    EXPECT_TRUE(seven.absent);
    EXPECT_EQ(seven.mask.count(), 0);
    EXPECT_THROW(extract_class(lm, 0), Error);
}

TEST(Components, TwoSquares) {
    BinaryMask m = rect_mask(20, 10, 1, 1, 3, 3);
    m.bits.block(5, 10, 3, 3) = true;
    const auto comps = connected_components(m);
    ASSERT_EQ(comps.size(), 2u);
    for (const auto& c : comps) EXPECT_EQ(c.pixel_count, 9);
    EXPECT_EQ(comps[0].id, 0);
    EXPECT_EQ(comps[0].bbox.min_col, 1);
}

TEST(Components, DiagonalAdjacency) {
    BinaryMask m(3, 3);
    m.set(0, 0);
    m.set(1, 1);
    EXPECT_EQ(connected_components(m, Connectivity::Four).size(), 2u);
    EXPECT_EQ(connected_components(m, Connectivity::Eight).size(), 1u);
}

TEST(Components, MatchesFloodFillOracle) {
    SplitMix64 rng(100);
    for (int k = 0; k < 100; ++k) {
        const BinaryMask m = random_mask(rng, rng.uniform_int(1, 40), rng.uniform_int(1, 40), rng.uniform(0.1, 0.7));
        EXPECT_EQ(static_cast<int>(connected_components(m, Connectivity::Eight).size()), oracle_count(m, true)) << k;
        EXPECT_EQ(static_cast<int>(connected_components(m, Connectivity::Four).size()), oracle_count(m, false)) << k;
    }
}

TEST(Components, PixelsPartitionForeground) {
    SplitMix64 rng(101);
    const BinaryMask m = random_mask(rng, 50, 40, 0.45);
    long total = 0;
    for (const auto& c : connected_components(m)) {
        EXPECT_TRUE(std::is_sorted(c.pixels.begin(), c.pixels.end()));
        for (const Pixel& p : c.pixels) EXPECT_TRUE(m.at(p));
        total += c.pixel_count;
    }
    EXPECT_EQ(total, m.count());
}

TEST(Clean, SmallComponentsAndIdentity) {
    BinaryMask dot(5, 5);
    dot.set(2, 2);
    EXPECT_EQ(clean(dot, 2).count(), 0);
    SplitMix64 rng(3);
    const BinaryMask m = random_mask(rng, 30, 30, 0.5);
    EXPECT_EQ(clean(m, 0), m);
    EXPECT_THROW(clean(m, -1), Error);
}

TEST(Clean, FillsSmallHolesOnly) {
    BinaryMask m = rect_mask(20, 20, 2, 2, 17, 17);
    m.set(5, 5, false);                              // 1 px hole
    m.bits.block(10, 10, 5, 5) = false;              // 25 px hole
    const BinaryMask c = clean(m, 16);
    EXPECT_TRUE(c.at(5, 5));
    EXPECT_FALSE(c.at(12, 12));
}

TEST(Clean, NoisySrgKeepsToothCount) {
    const SrgSample s = gen_srg(SrgSpec{});
    const BinaryMask noisy = add_noise(s.mask, 0.01, 42);
    EXPECT_EQ(connected_components(clean(noisy, 16)).size(), s.truth.teeth.size());
}

TEST(Contour, SinglePixelAndSquare) {
    BinaryMask one(4, 4);
    one.set(2, 1);
    auto comps = connected_components(one);
    const Contour c1 = trace_contour(one, comps[0]);
    ASSERT_EQ(c1.points.size(), 1u);
    EXPECT_EQ(c1.points[0], (Pixel{2, 1}));

    const BinaryMask sq = rect_mask(3, 3, 0, 0, 2, 2);
    comps = connected_components(sq);
    const Contour c = trace_contour(sq, comps[0]);
    const std::vector<Pixel> expect{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
    EXPECT_EQ(c.points, expect);
}

TEST(Contour, MatchesBoundaryOracle) {
    SplitMix64 rng(55);
    for (int k = 0; k < 60; ++k) {
        const BinaryMask m = solid_blob(rng);
        const auto comps = connected_components(m);
        ASSERT_EQ(comps.size(), 1u);
        const Contour c = trace_contour(m, comps[0]);
        std::set<Pixel> got(c.points.begin(), c.points.end());
        std::set<Pixel> expect;
        for (const Pixel& p : comps[0].pixels) {
            bool boundary = false;
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) boundary = boundary || !m.at(p.col + dc, p.row + dr);
            }
            if (boundary) expect.insert(p);
        }
        EXPECT_EQ(got, expect) << "blob " << k;
    }
}

TEST(StripSpurs, RemovesSurfaceSpecksKeepsNarrowNecks) {
    BinaryMask m = rect_mask(20, 12, 2, 4, 17, 10);
    m.set(8, 3);   // speck on the top surface
    m.set(8, 2);   // two rows tall
    m.set(5, 11);  // hanging under the bottom
    const BinaryMask s = strip_spurs(m, 3);
    EXPECT_EQ(s, rect_mask(20, 12, 2, 4, 17, 10));
    EXPECT_EQ(strip_spurs(m, 1), m);

    // A 2 px neck between two wide blocks is supported on both sides; the
    // same column standing free peels away entirely.
    BinaryMask neck = rect_mask(20, 12, 9, 0, 10, 11);
    EXPECT_EQ(strip_spurs(neck, 3).count(), 0);
    neck.bits.block(0, 2, 3, 16) = true;
    neck.bits.block(9, 2, 3, 16) = true;
    EXPECT_EQ(strip_spurs(neck, 3), neck);
}

TEST(StripSpurs, BrokenSurfaceRowStays) {
    BinaryMask m = rect_mask(20, 8, 2, 2, 17, 6);
    m.set(4, 2, false);
    m.set(6, 2, false);
    EXPECT_EQ(strip_spurs(m, 3), m);
}

TEST(Geometry, MirrorAndTranslate) {
    SplitMix64 rng(9);
    const BinaryMask m = random_mask(rng, 13, 7, 0.5);
    EXPECT_EQ(mirror_horizontal(mirror_horizontal(m)), m);
    const BinaryMask mir = mirror_horizontal(m);
    for (int r = 0; r < 7; ++r) {
        for (int c = 0; c < 13; ++c) EXPECT_EQ(mir.at(c, r), m.at(12 - c, r));
    }
    const BinaryMask t = translate(m, 3, 2);
    EXPECT_EQ(t.width(), 16);
    EXPECT_EQ(t.height(), 9);
    for (int r = 0; r < 7; ++r) {
        for (int c = 0; c < 13; ++c) EXPECT_EQ(t.at(c + 3, r + 2), m.at(c, r));
    }
    EXPECT_EQ(t.count(), m.count());
}
