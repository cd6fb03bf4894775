#include "cdm/raster.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <string>

namespace cdm {

GrayImage::GrayImage(int width, int height, std::uint8_t fill) {
    if (width < 1 || height < 1) throw Error("image dimensions must be positive");
    data = Raster<std::uint8_t>::Constant(height, width, fill);
}

BinaryMask::BinaryMask(int width, int height, bool fill) {
    if (width < 1 || height < 1) throw Error("mask dimensions must be positive");
    bits = Raster<bool>::Constant(height, width, fill);
}

bool Component::contains(Pixel p) const {
    if (p.col < bbox.min_col || p.col > bbox.max_col || p.row < bbox.min_row || p.row > bbox.max_row) {
        return false;
    }
    return std::binary_search(pixels.begin(), pixels.end(), p);
}

bool Component::row_extent(int row, int& min_col, int& max_col) const {
    auto lo = std::lower_bound(pixels.begin(), pixels.end(), Pixel{std::numeric_limits<int>::min(), row});
    if (lo == pixels.end() || lo->row != row) return false;
    auto hi = std::upper_bound(lo, pixels.end(), Pixel{std::numeric_limits<int>::max(), row});
    min_col = lo->col;
    max_col = std::prev(hi)->col;
    return true;
}

BinaryMask binarize(const GrayImage& img, int threshold) {
    return BinaryMask(Raster<bool>(img.data.cast<int>() >= threshold));
}

GrayImage to_gray(const BinaryMask& mask) {
    return GrayImage(Raster<std::uint8_t>(mask.bits.cast<std::uint8_t>() * std::uint8_t{255}));
}

ClassExtraction extract_class(const LabelMask& lm, int class_id) {
    if (class_id < 1) throw Error("class id must be >= 1");
    ClassExtraction out;
    out.mask = BinaryMask(Raster<bool>(lm.labels.cast<int>() == class_id));
    out.absent = out.mask.count() == 0;
    return out;
}

namespace {

struct Labeling {
    Raster<int> labels;  // -1 = not part of the labelled set
    std::vector<long> counts;
    std::vector<char> touches_border;
};

// Flood-fill labelling of the `true` cells of `set`.
Labeling label_set(const Raster<bool>& set, Connectivity conn) {
    const int h = static_cast<int>(set.rows());
    const int w = static_cast<int>(set.cols());
    Labeling out;
    out.labels = Raster<int>::Constant(h, w, -1);

    static constexpr std::array<std::array<int, 2>, 8> kOffsets{
        {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}}};
    const int n_offsets = conn == Connectivity::Eight ? 8 : 4;

    std::vector<int> stack;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!set(r, c) || out.labels(r, c) >= 0) continue;
            const int id = static_cast<int>(out.counts.size());
            out.counts.push_back(0);
            out.touches_border.push_back(0);
            out.labels(r, c) = id;
            stack.push_back(r * w + c);
            while (!stack.empty()) {
                const int idx = stack.back();
                stack.pop_back();
                const int pr = idx / w;
                const int pc = idx % w;
                ++out.counts[id];
                if (pr == 0 || pc == 0 || pr == h - 1 || pc == w - 1) out.touches_border[id] = 1;
                for (int k = 0; k < n_offsets; ++k) {
                    const int nc = pc + kOffsets[k][0];
                    const int nr = pr + kOffsets[k][1];
                    if (nc < 0 || nr < 0 || nc >= w || nr >= h) continue;
                    if (!set(nr, nc) || out.labels(nr, nc) >= 0) continue;
                    out.labels(nr, nc) = id;
                    stack.push_back(nr * w + nc);
                }
            }
        }
    }
    return out;
}

}  // namespace

std::vector<Component> connected_components(const BinaryMask& mask, Connectivity connectivity) {
    const Labeling lab = label_set(mask.bits, connectivity);
    std::vector<Component> comps(lab.counts.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        comps[i].pixels.reserve(static_cast<std::size_t>(lab.counts[i]));
        comps[i].bbox = {std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
    }
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            const int id = lab.labels(r, c);
            if (id < 0) continue;
            Component& comp = comps[static_cast<std::size_t>(id)];
            comp.pixels.push_back({c, r});
            comp.centroid += Vec2(c, r);
            auto& b = comp.bbox;
            b.min_col = std::min(b.min_col, c);
            b.max_col = std::max(b.max_col, c);
            b.min_row = std::min(b.min_row, r);
            b.max_row = std::max(b.max_row, r);
        }
    }
    for (auto& comp : comps) {
        comp.pixel_count = static_cast<long>(comp.pixels.size());
        comp.centroid /= static_cast<double>(comp.pixel_count);
    }
    std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        if (a.bbox.min_row != b.bbox.min_row) return a.bbox.min_row < b.bbox.min_row;
        if (a.bbox.min_col != b.bbox.min_col) return a.bbox.min_col < b.bbox.min_col;
        return a.centroid.x() < b.centroid.x();
    });
    for (std::size_t i = 0; i < comps.size(); ++i) comps[i].id = static_cast<int>(i);
    return comps;
}

BinaryMask clean(const BinaryMask& mask, long min_area) {
    if (min_area < 0) throw Error("min-area must be >= 0");
    if (min_area <= 1) return mask;  // every component and hole has >= 1 pixel

    BinaryMask out = mask;
    const Labeling fg = label_set(mask.bits, Connectivity::Eight);
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            const int id = fg.labels(r, c);
            if (id >= 0 && fg.counts[static_cast<std::size_t>(id)] < min_area) out.set(c, r, false);
        }
    }
    // Background touching the canvas edge connects to the outside and is
    // never a hole.
    const Raster<bool> background = !out.bits;
    const Labeling bg = label_set(background, Connectivity::Four);
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            const int id = bg.labels(r, c);
            if (id < 0) continue;
            const auto i = static_cast<std::size_t>(id);
            if (!bg.touches_border[i] && bg.counts[i] < min_area) out.set(c, r, true);
        }
    }
    return out;
}

namespace {

// Clockwise on screen (row axis points down), starting north.
constexpr std::array<Pixel, 8> kMoore{{{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

int direction_of(Pixel from, Pixel to) {
    for (int d = 0; d < 8; ++d) {
        if (from.col + kMoore[d].col == to.col && from.row + kMoore[d].row == to.row) return d;
    }
    return -1;
}

}  // namespace

Contour trace_contour(const BinaryMask& mask, const Component& comp) {
    if (comp.pixels.empty()) throw Error("cannot trace an empty component");
    (void)mask;

    // Membership bitmap over the bounding box plus a one-pixel border.
    const auto& bb = comp.bbox;
    const int w = bb.width() + 2;
    const int h = bb.height() + 2;
    Raster<bool> local = Raster<bool>::Constant(h, w, false);
    for (const Pixel& p : comp.pixels) local(p.row - bb.min_row + 1, p.col - bb.min_col + 1) = true;
    auto in = [&](Pixel p) {
        const int lc = p.col - bb.min_col + 1;
        const int lr = p.row - bb.min_row + 1;
        return lc >= 0 && lr >= 0 && lc < w && lr < h && local(lr, lc);
    };

    // From `p` with background neighbour `back`, scan clockwise for the next
    // member; `back` is updated to the last background cell scanned.
    auto step = [&](Pixel p, Pixel& back, Pixel& next) {
        const int start = direction_of(p, back);
        for (int i = 1; i <= 8; ++i) {
            const int d = (start + i) % 8;
            const Pixel q{p.col + kMoore[d].col, p.row + kMoore[d].row};
            if (in(q)) {
                const int pd = (start + i + 7) % 8;
                back = {p.col + kMoore[pd].col, p.row + kMoore[pd].row};
                next = q;
                return true;
            }
        }
        return false;
    };

    const Pixel start = comp.pixels.front();
    Pixel back{start.col - 1, start.row};
    Pixel first_next{};
    std::vector<Pixel> moore{start};
    if (!step(start, back, first_next)) return Contour{moore};

    Pixel cur = first_next;
    const std::size_t cap = 4 * comp.pixels.size() + 16;
    while (moore.size() < cap) {
        Pixel nb = back;
        Pixel nxt{};
        step(cur, nb, nxt);
        if (cur == start && nxt == first_next) break;
        moore.push_back(cur);
        back = nb;
        cur = nxt;
    }

    // Fill the inner corner a diagonal step cuts across. The 4-neighbour
    // scanned just before the diagonal target is background, so at most one
    // of the two intermediates is a member.
    Contour out;
    out.points.reserve(moore.size() * 2);
    for (std::size_t i = 0; i < moore.size(); ++i) {
        const Pixel p = moore[i];
        const Pixel q = moore[(i + 1) % moore.size()];
        if (out.points.empty() || !(out.points.back() == p)) out.points.push_back(p);
        if (p.col != q.col && p.row != q.row) {
            const Pixel m1{q.col, p.row};
            const Pixel m2{p.col, q.row};
            if (in(m1)) out.points.push_back(m1);
            else if (in(m2)) out.points.push_back(m2);
        }
    }
    while (out.points.size() > 1 && out.points.back() == out.points.front()) out.points.pop_back();
    return out;
}

BinaryMask component_mask(const Component& comp, int width, int height) {
    BinaryMask out(width, height);
    for (const Pixel& p : comp.pixels) {
        if (out.inside(p.col, p.row)) out.set(p.col, p.row);
    }
    return out;
}

BinaryMask strip_spurs(const BinaryMask& mask, int min_run) {
    if (min_run <= 1) return mask;
    BinaryMask out = mask;
    const int w = mask.width(), h = mask.height();
    // Foreground of `out` in row `r` over columns [c0 - 1, c1].
    auto any_in = [&](int r, int c0, int c1) {
        if (r < 0 || r >= h) return false;
        const int lo = std::max(0, c0 - 1), hi = std::min(w - 1, c1);
        return out.bits.row(r).segment(lo, hi - lo + 1).any();
    };
    auto strip_row = [&](int r) {
        int c = 0;
        while (c < w) {
            if (!out.bits(r, c)) {
                ++c;
                continue;
            }
            // Single-pixel gaps are bridged: a surface row broken by noise
            // is not a spur.
            int end = c, filled = 0;
            while (end < w && (out.bits(r, end) || (end + 1 < w && out.bits(r, end + 1)))) filled += out.bits(r, end++);
            if (filled < min_run && !(any_in(r - 1, c, end) && any_in(r + 1, c, end))) {
                out.bits.row(r).segment(c, end - c).setConstant(false);
            }
            c = end;
        }
    };
    // Downward then upward, so a spur several rows tall loses its support
    // one row at a time.
    for (int r = 0; r < h; ++r) strip_row(r);
    for (int r = h - 1; r >= 0; --r) strip_row(r);
    return out;
}

BinaryMask mirror_horizontal(const BinaryMask& mask) {
    return BinaryMask(Raster<bool>(mask.bits.rowwise().reverse()));
}

BinaryMask translate(const BinaryMask& mask, int dx, int dy) {
    if (dx < 0 || dy < 0) throw Error("translate expects non-negative offsets");
    BinaryMask out(mask.width() + dx, mask.height() + dy);
    out.bits.block(dy, dx, mask.height(), mask.width()) = mask.bits;
    return out;
}

}  // namespace cdm
