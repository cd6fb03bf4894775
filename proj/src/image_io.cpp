#include "cdm/fsutil.hpp"
#include "cdm/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <string>

namespace cdm {

namespace {

struct DecodedPng {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    std::string error;
};

struct MemReader {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t n) {
    auto* src = static_cast<MemReader*>(png_get_io_ptr(png));
    if (src->pos + n > src->size) png_error(png, "truncated PNG stream");
    std::memcpy(out, src->data + src->pos, n);
    src->pos += n;
}

// Keeps every object with a destructor outside the setjmp frame; `out` is
// owned by the caller.
void decode_png(const std::uint8_t* data, std::size_t size, bool keep_indices, DecodedPng& out) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        out.error = "out of memory decoding PNG";
        return;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        if (out.error.empty()) out.error = "corrupt PNG";
        return;
    }
    MemReader reader{data, size, 0};
    png_set_read_fn(png, &reader, read_from_memory);
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth > 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        out.error = "unsupported bit depth: " + std::to_string(bit_depth);
        return;
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        if (keep_indices) png_set_packing(png);
        else png_set_palette_to_rgb(png);
    } else if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        if (bit_depth < 8) {
            if (keep_indices) png_set_packing(png);
            else png_set_expand_gray_1_2_4_to_8(png);
        }
    }
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    out.pixels.resize(stride * static_cast<std::size_t>(out.height));
    out.rows.resize(static_cast<std::size_t>(out.height));
    for (int r = 0; r < out.height; ++r) out.rows[static_cast<std::size_t>(r)] = out.pixels.data() + stride * r;
    png_read_image(png, out.rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
}

bool is_png(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool is_pgm(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5';
}

// Binary PGM (P5) with maxval <= 255.
Raster<std::uint8_t> decode_pgm(const std::vector<std::uint8_t>& bytes, int& maxval, const std::string& name) {
    std::size_t pos = 2;
    auto skip_space = [&] {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&] {
        skip_space();
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw Error("malformed PGM header: " + name);
        long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos++] - '0');
            if (v > 1'000'000) throw Error("malformed PGM header: " + name);
        }
        return static_cast<int>(v);
    };
    const int width = read_int();
    const int height = read_int();
    maxval = read_int();
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw Error("malformed PGM header: " + name);
    ++pos;
    if (width < 1 || height < 1) throw Error("PGM has empty dimensions: " + name);
    if (maxval > 255) throw Error("unsupported bit depth: 16 (" + name + ")");
    if (maxval < 1) throw Error("malformed PGM header: " + name);
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - pos < n) throw Error("truncated PGM data: " + name);
    Raster<std::uint8_t> out(height, width);
    std::memcpy(out.data(), bytes.data() + pos, n);
    return out;
}

}  // namespace

GrayImage load_gray(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error("file not found: " + path.string());
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    if (is_pgm(bytes)) {
        int maxval = 255;
        Raster<std::uint8_t> raw = decode_pgm(bytes, maxval, path.string());
        if (maxval != 255) {
            raw = ((raw.cast<int>().min(maxval) * 255 + maxval / 2) / maxval).cast<std::uint8_t>();
        }
        return GrayImage(std::move(raw));
    }
    if (!is_png(bytes)) throw Error("unsupported image format: " + path.string());

    DecodedPng png;
    decode_png(bytes.data(), bytes.size(), false, png);
    if (!png.error.empty()) throw Error(png.error + " (" + path.string() + ")");
    GrayImage img(png.width, png.height);
    for (int r = 0; r < png.height; ++r) {
        const std::uint8_t* row = png.rows[static_cast<std::size_t>(r)];
        for (int c = 0; c < png.width; ++c) {
            if (png.channels == 1) {
                img(c, r) = row[c];
            } else {
                // Rec.601 luma, rounded.
                const int R = row[3 * c];
                const int G = row[3 * c + 1];
                const int B = row[3 * c + 2];
                img(c, r) = static_cast<std::uint8_t>((299 * R + 587 * G + 114 * B + 500) / 1000);
            }
        }
    }
    return img;
}

LabelMask load_labels(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error("file not found: " + path.string());
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    LabelMask lm;
    if (is_pgm(bytes)) {
        int maxval = 255;
        lm.labels = decode_pgm(bytes, maxval, path.string());
        return lm;
    }
    if (!is_png(bytes)) throw Error("unsupported image format: " + path.string());
    DecodedPng png;
    decode_png(bytes.data(), bytes.size(), true, png);
    if (!png.error.empty()) throw Error(png.error + " (" + path.string() + ")");
    if (png.channels != 1) throw Error("label PNG must be gray or indexed: " + path.string());
    lm.labels.resize(png.height, png.width);
    for (int r = 0; r < png.height; ++r) {
        std::memcpy(&lm.labels(r, 0), png.rows[static_cast<std::size_t>(r)], static_cast<std::size_t>(png.width));
    }
    return lm;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.data.data(), img.data.data() + img.data.size());
    return out;
}

namespace {

std::vector<std::uint8_t> encode_png_raw(const std::uint8_t* pixels, int width, int height, png_uint_32 format) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(width);
    image.height = static_cast<png_uint_32>(height);
    image.format = format;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr)) {
        throw Error(std::string("PNG encode failed: ") + image.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr)) {
        throw Error(std::string("PNG encode failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
    return encode_png_raw(img.data.data(), img.width(), img.height(), PNG_FORMAT_GRAY);
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
    return encode_png_raw(img.data.data(), img.width, img.height, PNG_FORMAT_RGB);
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) { write_file_atomic(path, encode_pgm(img)); }
void save_png(const GrayImage& img, const std::filesystem::path& path) { write_file_atomic(path, encode_png(img)); }
void save_png(const RgbImage& img, const std::filesystem::path& path) { write_file_atomic(path, encode_png(img)); }

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") save_pgm(to_gray(mask), path);
    else save_png(to_gray(mask), path);
}

}  // namespace cdm
