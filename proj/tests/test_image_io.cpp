#include "cdm/fsutil.hpp"
#include "cdm/raster.hpp"
#include "test_util.hpp"

#include <cstdio>
#include <png.h>

#include <gtest/gtest.h>

using namespace cdm;
namespace fs = std::filesystem;

namespace {

// Writes a PNG of arbitrary colour type and bit depth with libpng directly,
// so the decoder is checked against an independent encoder call.
void write_raw_png(const fs::path& path, int w, int h, int color_type, int bit_depth,
                   const std::vector<std::uint8_t>& bytes, const std::vector<png_color>& palette = {}) {
    FILE* f = std::fopen(path.c_str(), "wb");
    ASSERT_NE(f, nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, f);
    png_set_IHDR(png, info, w, h, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    if (!palette.empty()) png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
    png_write_info(png, info);
    const std::size_t stride = bytes.size() / static_cast<std::size_t>(h);
    for (int r = 0; r < h; ++r) png_write_row(png, bytes.data() + stride * r);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
}

}  // namespace

TEST(ImageIo, PgmIdentityDecode) {
    const fs::path p = test::scratch() / "a.pgm";
    const std::string bytes = std::string("P5\n2 2\n255\n") + std::string("\x00\xff\x80\x07", 4);
    write_file_atomic(p, bytes);
    const GrayImage g = load_gray(p);
    ASSERT_EQ(g.width(), 2);
    ASSERT_EQ(g.height(), 2);
    EXPECT_EQ(g(0, 0), 0);
    EXPECT_EQ(g(1, 0), 255);
    EXPECT_EQ(g(0, 1), 128);
    EXPECT_EQ(g(1, 1), 7);
}

TEST(ImageIo, SixteenBitRejected) {
    const fs::path dir = test::scratch();
    write_raw_png(dir / "deep.png", 2, 1, PNG_COLOR_TYPE_GRAY, 16, {0, 1, 2, 3});
    try {
        load_gray(dir / "deep.png");
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("unsupported bit depth"), std::string::npos);
    }
    write_file_atomic(dir / "deep.pgm", std::string("P5\n1 1\n65535\n\x01\x02", 16));
    EXPECT_THROW(load_gray(dir / "deep.pgm"), Error);
}

TEST(ImageIo, RgbWhiteIsWhite) {
    const fs::path p = test::scratch() / "rgb.png";
    write_raw_png(p, 2, 1, PNG_COLOR_TYPE_RGB, 8, {255, 255, 255, 255, 0, 0});
    const GrayImage g = load_gray(p);
    EXPECT_EQ(g(0, 0), 255);
    EXPECT_EQ(g(1, 0), (299 * 255 + 500) / 1000);
}

TEST(ImageIo, PaletteLabelsKeepIndices) {
    const fs::path p = test::scratch() / "labels.png";
    write_raw_png(p, 4, 1, PNG_COLOR_TYPE_PALETTE, 8, {0, 1, 2, 1}, {{0, 0, 0}, {200, 10, 10}, {10, 200, 10}});
    const LabelMask lm = load_labels(p);
    ASSERT_EQ(lm.width(), 4);
    EXPECT_EQ(lm(0, 0), 0);
    EXPECT_EQ(lm(1, 0), 1);
    EXPECT_EQ(lm(2, 0), 2);
    EXPECT_EQ(lm(3, 0), 1);
}

TEST(ImageIo, MaskRoundTripPngAndPgm) {
    SplitMix64 rng(12);
    const BinaryMask m = test::random_mask(rng, 37, 23, 0.4);
    const fs::path dir = test::scratch();
    save_mask(m, dir / "m.png");
    save_mask(m, dir / "m.pgm");
    EXPECT_EQ(binarize(load_gray(dir / "m.png")), m);
    EXPECT_EQ(binarize(load_gray(dir / "m.pgm")), m);
    // Encoding is a pure function of the pixels.
    EXPECT_EQ(encode_png(to_gray(m)), encode_png(to_gray(m)));
}

TEST(ImageIo, MissingAndUnknownFiles) {
    const fs::path dir = test::scratch();
    EXPECT_THROW(load_gray(dir / "nope.png"), Error);
    write_file_atomic(dir / "x.png", std::string("not an image"));
    EXPECT_THROW(load_gray(dir / "x.png"), Error);
    write_file_atomic(dir / "t.png", std::string("\x89PNG\r\n\x1a\n\x00\x00", 10));
    EXPECT_THROW(load_gray(dir / "t.png"), Error);
}

TEST(ImageIo, AtomicWriteLeavesNoTemporaries) {
    const fs::path dir = test::scratch();
    write_file_atomic(dir / "a.txt", std::string("one"));
    write_file_atomic(dir / "a.txt", std::string("two"));
    const auto bytes = read_file_bytes(dir / "a.txt");
    EXPECT_EQ(std::string(bytes.begin(), bytes.end()), "two");
    int files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    EXPECT_EQ(files, 1);
}
