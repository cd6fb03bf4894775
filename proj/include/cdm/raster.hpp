#pragma once

#include "cdm/core.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cdm {

/// Row-major dense raster. Eigen indexing is (row, col); the wrappers below
/// take (col, row) to follow the image convention used everywhere else.
template <typename T>
using Raster = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 8-bit intensity image.
struct GrayImage {
    Raster<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0);
    explicit GrayImage(Raster<std::uint8_t> d) : data(std::move(d)) {}

    int width() const { return static_cast<int>(data.cols()); }
    int height() const { return static_cast<int>(data.rows()); }
    std::uint8_t operator()(int col, int row) const { return data(row, col); }
    std::uint8_t& operator()(int col, int row) { return data(row, col); }
};

/// 8-bit RGB image, interleaved, used for overlays.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 3 bytes per pixel, row-major

    std::uint8_t* at(int col, int row) { return &data[3 * (static_cast<std::size_t>(row) * width + col)]; }
    const std::uint8_t* at(int col, int row) const {
        return &data[3 * (static_cast<std::size_t>(row) * width + col)];
    }
};

/// Foreground/background raster. Reads outside the canvas return background.
struct BinaryMask {
    Raster<bool> bits;

    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);
    explicit BinaryMask(Raster<bool> b) : bits(std::move(b)) {}

    int width() const { return static_cast<int>(bits.cols()); }
    int height() const { return static_cast<int>(bits.rows()); }
    bool inside(int col, int row) const { return col >= 0 && row >= 0 && col < width() && row < height(); }
    bool at(int col, int row) const { return inside(col, row) && bits(row, col); }
    bool at(Pixel p) const { return at(p.col, p.row); }
    void set(int col, int row, bool v = true) { bits(row, col) = v; }
    long count() const { return static_cast<long>(bits.count()); }

    friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
        return a.bits.rows() == b.bits.rows() && a.bits.cols() == b.bits.cols() && (a.bits == b.bits).all();
    }
};

/// Per-pixel class ids, 0 = background.
struct LabelMask {
    Raster<std::uint8_t> labels;

    int width() const { return static_cast<int>(labels.cols()); }
    int height() const { return static_cast<int>(labels.rows()); }
    std::uint8_t operator()(int col, int row) const { return labels(row, col); }
};

struct BoundingBox {
    int min_col = 0;
    int min_row = 0;
    int max_col = 0;
    int max_row = 0;

    int width() const { return max_col - min_col + 1; }
    int height() const { return max_row - min_row + 1; }
};

/// One connected foreground region. `pixels` is sorted in raster order, so
/// per-row runs can be read off directly.
struct Component {
    int id = 0;
    long pixel_count = 0;
    BoundingBox bbox;
    Vec2 centroid = Vec2::Zero();  // (col, row)
    std::vector<Pixel> pixels;

    bool contains(Pixel p) const;
    /// Leftmost and rightmost member column on `row`; false if the row is empty.
    bool row_extent(int row, int& min_col, int& max_col) const;
};

/// Closed outer boundary, clockwise on screen, implicit edge last->first.
struct Contour {
    std::vector<Pixel> points;
};

enum class Connectivity { Four = 4, Eight = 8 };

struct ClassExtraction {
    BinaryMask mask;
    bool absent = false;  // class id not present; mask is all background
};

// --- I/O (PNG 8-bit gray/RGB/palette, binary PGM) --------------------------

/// Decodes 8-bit PNG (gray, RGB, palette) or binary PGM. Colour input is
/// converted with Rec.601 luma weights.
GrayImage load_gray(const std::filesystem::path& path);

/// Decodes a class-id raster: 8-bit gray or indexed PNG, or PGM, where the
/// stored value (palette index for indexed PNG) is the class id.
LabelMask load_labels(const std::filesystem::path& path);

/// Foreground = 255, background = 0.
GrayImage to_gray(const BinaryMask& mask);

void save_pgm(const GrayImage& img, const std::filesystem::path& path);
void save_png(const GrayImage& img, const std::filesystem::path& path);
void save_png(const RgbImage& img, const std::filesystem::path& path);
/// Picks PNG or PGM from the file extension.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const GrayImage& img);
std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

// --- raster operations -------------------------------------------------------

BinaryMask binarize(const GrayImage& img, int threshold = 128);

/// `class_id` must be >= 1.
ClassExtraction extract_class(const LabelMask& lm, int class_id);

/// Components ordered by bounding box (min_row, min_col), then centroid column.
std::vector<Component> connected_components(const BinaryMask& mask,
                                            Connectivity connectivity = Connectivity::Eight);

/// Drops 8-connected foreground components smaller than `min_area`, then fills
/// enclosed 4-connected background holes smaller than `min_area`.
BinaryMask clean(const BinaryMask& mask, long min_area);

/// Moore-neighbour trace of the outer boundary, clockwise from the component's
/// topmost-then-leftmost pixel. Inner-corner pixels skipped by a diagonal step
/// are inserted so every pixel with a background 8-neighbour on the outer
/// boundary appears.
Contour trace_contour(const BinaryMask& mask, const Component& comp);

/// Foreground exactly at the component's pixels, on a canvas of given size.
BinaryMask component_mask(const Component& comp, int width, int height);

/// Drops row runs shorter than `min_run` that have no foreground directly
/// above or directly below them (spurs on a top or bottom surface). Runs
/// inside a narrow region are supported on both sides and stay. Runs split
/// by a single background pixel count as one, measured in foreground
/// pixels.
BinaryMask strip_spurs(const BinaryMask& mask, int min_run);

BinaryMask mirror_horizontal(const BinaryMask& mask);
/// Shifts content by (dx, dy) onto a canvas enlarged by the same amount.
BinaryMask translate(const BinaryMask& mask, int dx, int dy);

}  // namespace cdm
