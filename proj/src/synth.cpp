#include "cdm/synth.hpp"

#include "cdm/rng.hpp"

#include <algorithm>
#include <cmath>

namespace cdm {

namespace {

constexpr double kEps = 1e-9;

double cot_deg(double deg) {
    const double r = to_radians(deg);
    return std::cos(r) / std::sin(r);
}

struct ToothGeometry {
    double x_lm, x_rm;  // mid-row wall columns
    double dl, dr;      // column offset from mid to top of each wall
};

}  // namespace

SrgSample gen_srg(const SrgSpec& spec) {
    if (spec.tooth_count < 1) throw Error("tooth count must be at least 1");
    if (!(spec.pitch > 0.0) && spec.tooth_count > 1) throw Error("pitch must be positive");
    const long depth = std::lround(spec.depth);
    if (depth < 2) throw Error("depth must be at least 2 px");
    if (!(spec.mid_thickness >= 0.0)) throw Error("mid thickness must be non-negative");
    for (double s : {spec.left_slant, spec.right_slant}) {
        if (!(s > 0.0 && s < 180.0)) throw Error("slant angles must lie in (0, 180) degrees");
    }
    if (spec.margin < 0) throw Error("margin must be non-negative");

    SrgTruth truth;
    truth.spec = spec;
    truth.top_row = spec.margin;
    truth.bottom_row = spec.margin + static_cast<int>(depth);
    truth.mid_row = static_cast<int>(std::lround(truth.top_row + 0.5 * depth));
    truth.etch_depth = static_cast<double>(depth);
    const int h_top = truth.mid_row - truth.top_row;
    const double width = static_cast<double>(std::lround(spec.mid_thickness));
    const double dl = static_cast<double>(std::lround(h_top * cot_deg(spec.left_slant)));
    const double dr = static_cast<double>(std::lround(h_top * cot_deg(spec.right_slant)));
    if (width + dr < dl) throw Error("tooth top narrower than 1 px");

    std::vector<ToothGeometry> teeth;
    for (int i = 0; i < spec.tooth_count; ++i) {
        const double x = static_cast<double>(std::lround(i * spec.pitch));
        teeth.push_back({x, x + width, dl, dr});
    }
    auto left_at = [&](const ToothGeometry& t, int row) { return t.x_lm + (truth.mid_row - row) * t.dl / h_top; };
    auto right_at = [&](const ToothGeometry& t, int row) { return t.x_rm + (truth.mid_row - row) * t.dr / h_top; };

    // Integer column span of every tooth on every row, before shifting.
    double min_x = 0.0, max_x = 0.0;
    bool first = true;
    for (const ToothGeometry& t : teeth) {
        for (int r : {truth.top_row, truth.bottom_row}) {
            if (first || left_at(t, r) < min_x) min_x = left_at(t, r);
            if (first || right_at(t, r) > max_x) max_x = right_at(t, r);
            first = false;
        }
    }
    for (int r = truth.top_row; r <= truth.bottom_row; ++r) {
        for (std::size_t i = 0; i < teeth.size(); ++i) {
            const double lo = std::ceil(left_at(teeth[i], r) - kEps);
            const double hi = std::floor(right_at(teeth[i], r) + kEps);
            if (hi < lo) throw Error("tooth vanishes at row " + std::to_string(r) + ": walls cross");
            if (i + 1 < teeth.size() && std::ceil(left_at(teeth[i + 1], r) - kEps) - hi < 2) {
                throw Error("teeth " + std::to_string(i) + " and " + std::to_string(i + 1) + " closer than 2 px");
            }
        }
    }
    const double shift = spec.margin - std::floor(min_x + kEps);
    for (ToothGeometry& t : teeth) {
        t.x_lm += shift;
        t.x_rm += shift;
    }
    const int need_w = static_cast<int>(std::floor(max_x + shift + kEps)) + 1 + spec.margin;
    const int need_h = truth.bottom_row + 1 + spec.margin;
    if ((spec.width > 0 && spec.width < need_w) || (spec.height > 0 && spec.height < need_h)) {
        throw Error("spec does not fit canvas: need " + std::to_string(need_w) + "x" + std::to_string(need_h));
    }

    BinaryMask mask(spec.width > 0 ? spec.width : need_w, spec.height > 0 ? spec.height : need_h);
    for (const ToothGeometry& t : teeth) {
        for (int r = truth.top_row; r <= truth.bottom_row; ++r) {
            const int lo = static_cast<int>(std::ceil(left_at(t, r) - kEps));
            const int hi = static_cast<int>(std::floor(right_at(t, r) + kEps));
            for (int c = lo; c <= hi; ++c) mask.set(c, r);
        }
        SrgToothTruth tt;
        tt.top_left = {left_at(t, truth.top_row), static_cast<double>(truth.top_row)};
        tt.top_right = {right_at(t, truth.top_row), static_cast<double>(truth.top_row)};
        tt.mid_left = {t.x_lm, static_cast<double>(truth.mid_row)};
        tt.mid_right = {t.x_rm, static_cast<double>(truth.mid_row)};
        tt.bottom_left = {left_at(t, truth.bottom_row), static_cast<double>(truth.bottom_row)};
        tt.bottom_right = {right_at(t, truth.bottom_row), static_cast<double>(truth.bottom_row)};
        tt.mid_thickness = width;
        tt.left_slant = to_degrees(std::atan2(static_cast<double>(h_top), dl));
        tt.right_slant = to_degrees(std::atan2(static_cast<double>(h_top), dr));
        truth.teeth.push_back(tt);
    }
    for (std::size_t i = 1; i < teeth.size(); ++i) truth.pitches.push_back(teeth[i].x_lm - teeth[i - 1].x_lm);
    return {std::move(mask), std::move(truth)};
}

FresnelSample gen_fresnel(const FresnelSpec& spec) {
    if (spec.bin_count < 1) throw Error("bin count must be at least 1");
    if (spec.bin_width < 1) throw Error("bin width must be at least 1 px");
    if (static_cast<int>(spec.bin_depths.size()) != spec.bin_count) {
        throw Error("bin depth list has " + std::to_string(spec.bin_depths.size()) + " entries, expected " +
                    std::to_string(spec.bin_count));
    }
    for (int d : spec.bin_depths) {
        if (d < 0) throw Error("bin depths must be non-negative");
    }
    if (spec.slab_thickness < 1 || spec.margin < 0) throw Error("slab thickness and margin must be positive");

    const int shallow = *std::min_element(spec.bin_depths.begin(), spec.bin_depths.end());
    const int deep = *std::max_element(spec.bin_depths.begin(), spec.bin_depths.end());
    const int base_row = spec.margin + deep + spec.slab_thickness;
    FresnelTruth truth;
    truth.spec = spec;
    truth.top_reference_row = spec.margin + shallow;
    BinaryMask mask(2 * spec.margin + spec.bin_count * spec.bin_width, base_row + 1 + spec.margin);
    for (int i = 0; i < spec.bin_count; ++i) {
        FresnelBinTruth bin;
        bin.first_col = spec.margin + i * spec.bin_width;
        bin.last_col = bin.first_col + spec.bin_width - 1;
        bin.floor_row = spec.margin + spec.bin_depths[static_cast<std::size_t>(i)];
        bin.depth = bin.floor_row - truth.top_reference_row;
        mask.bits.block(bin.floor_row, bin.first_col, base_row - bin.floor_row + 1, spec.bin_width).setConstant(true);
        truth.bins.push_back(bin);
    }
    return {std::move(mask), std::move(truth)};
}

const char* to_string(MergeLevel level) {
    switch (level) {
        case MergeLevel::Isolated: return "isolated";
        case MergeLevel::Columnar: return "columnar";
        case MergeLevel::Islands: return "islands";
    }
    return "?";
}

MergeLevel parse_merge_level(const std::string& text) {
    if (text == "isolated") return MergeLevel::Isolated;
    if (text == "columnar") return MergeLevel::Columnar;
    if (text == "islands") return MergeLevel::Islands;
    throw Error("unknown merge level: " + text);
}

namespace {

void paint(BinaryMask& mask, const Ellipse& e, bool value) {
    const Vec2 half = ellipse_half_extents(e);
    const int c0 = std::max(0, static_cast<int>(std::floor(e.center.x() - half.x())));
    const int c1 = std::min(mask.width() - 1, static_cast<int>(std::ceil(e.center.x() + half.x())));
    const int r0 = std::max(0, static_cast<int>(std::floor(e.center.y() - half.y())));
    const int r1 = std::min(mask.height() - 1, static_cast<int>(std::ceil(e.center.y() + half.y())));
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            if (ellipse_contains(e, c, r)) mask.set(c, r, value);
        }
    }
}

Ellipse at(const EllipseGratingSpec& spec, Vec2 center) {
    Ellipse e;
    e.center = center;
    e.a = spec.a;
    e.b = spec.b;
    e.theta = detail::wrap_half_turn(to_radians(spec.theta_deg));
    e.circle = spec.a == spec.b;
    if (e.circle) e.theta = 0.0;
    return e;
}

[[noreturn]] void inconsistent(const std::string& why) {
    throw Error("merge level inconsistent with pitches: " + why);
}

GratingSample gen_islands(const EllipseGratingSpec& spec) {
    if (spec.rows < 2 || spec.cols < 2) throw Error("islands need at least 2 x 2 islands");
    const double H = spec.col_pitch, V = spec.row_pitch;
    // Neighbouring holes of an island at the origin sit at (+-H/2, 0) and
    // (0, +-V/2); diagonal holes must overlap to cut the islands apart.
    const Ellipse probe = at(spec, Vec2::Zero());
    for (Vec2 c : {Vec2(H / 2, 0), Vec2(-H / 2, 0), Vec2(0, V / 2), Vec2(0, -V / 2)}) {
        if (ellipse_contains(probe, -c.x(), -c.y())) inconsistent("holes cover the island centres");
    }
    for (Vec2 diag : {Vec2(H / 2, V / 2), Vec2(H / 2, -V / 2)}) {
        if (!ellipse_contains(probe, diag.x() / 2, diag.y() / 2)) inconsistent("diagonal holes do not overlap");
    }

    const int span = spec.rows + spec.cols - 2;
    const Vec2 origin(spec.margin + H / 2, spec.margin + V / 2 + (spec.cols - 1) * V / 2);
    auto island = [&](double u, double v) { return Vec2(origin + u * Vec2(H / 2, -V / 2) + v * Vec2(H / 2, V / 2)); };
    const int width = static_cast<int>(std::ceil(2 * spec.margin + H + span * H / 2)) + 1;
    const int height = static_cast<int>(std::ceil(2 * spec.margin + V + span * V / 2)) + 1;

    BinaryMask holes(width, height);
    const int reach = span + 4;
    for (int p = -reach; p <= reach + spec.cols; ++p) {
        for (int q = -reach; q <= reach + spec.rows; ++q) {
            const Vec2 c = island(p, q) + Vec2(H / 2, 0);
            const Vec2 half = ellipse_half_extents(probe);
            if (c.x() + half.x() < 0 || c.y() + half.y() < 0 || c.x() - half.x() > width || c.y() - half.y() > height) {
                continue;
            }
            paint(holes, at(spec, c), true);
        }
    }
    BinaryMask material(Raster<bool>(!holes.bits));

    GratingTruth truth;
    truth.spec = spec;
    for (int v = 0; v < spec.rows; ++v) {
        for (int u = 0; u < spec.cols; ++u) truth.islands.push_back(island(u, v));
    }
    BinaryMask mask(width, height);
    const double tol = std::min(H, V) / 4;
    std::vector<int> hits(truth.islands.size(), 0);
    for (const Component& comp : connected_components(material, Connectivity::Eight)) {
        for (std::size_t k = 0; k < truth.islands.size(); ++k) {
            if ((comp.centroid - truth.islands[k]).norm() <= tol) {
                ++hits[k];
                for (const Pixel& px : comp.pixels) mask.set(px.col, px.row);
            }
        }
    }
    if (std::any_of(hits.begin(), hits.end(), [](int h) { return h != 1; })) inconsistent("islands did not separate");

    for (int q = 0; q + 1 < spec.rows; ++q) {
        for (int p = 0; p + 1 < spec.cols; ++p) truth.units.push_back({at(spec, island(p, q) + Vec2(H / 2, 0)), q, p});
    }
    std::stable_sort(truth.units.begin(), truth.units.end(), [](const GratingUnitTruth& a, const GratingUnitTruth& b) {
        if (std::abs(a.ellipse.center.y() - b.ellipse.center.y()) > 1e-9) return a.ellipse.center.y() < b.ellipse.center.y();
        return a.ellipse.center.x() < b.ellipse.center.x();
    });
    return {std::move(mask), std::move(truth)};
}

}  // namespace

GratingSample gen_ellipse_grating(const EllipseGratingSpec& spec) {
    if (!(spec.b > 0.0 && spec.a >= spec.b)) throw Error("ellipse needs a >= b > 0");
    if (spec.rows < 1 || spec.cols < 1) throw Error("lattice needs at least one row and column");
    if (!(spec.row_pitch > 0.0 && spec.col_pitch > 0.0)) throw Error("pitches must be positive");
    if (spec.margin < 0) throw Error("margin must be non-negative");
    if (spec.level == MergeLevel::Islands) return gen_islands(spec);

    const Ellipse probe = at(spec, Vec2::Zero());
    const Vec2 half = ellipse_half_extents(probe);
    const bool col_gap = spec.cols == 1 || spec.col_pitch >= 2 * half.x() + 2;
    const bool row_gap = spec.rows == 1 || spec.row_pitch >= 2 * half.y() + 2;
    if (spec.level == MergeLevel::Isolated && !(col_gap && row_gap)) inconsistent("isolated units would touch");
    if (spec.level == MergeLevel::Columnar) {
        if (spec.rows < 2) inconsistent("a column needs at least 2 units");
        if (!col_gap) inconsistent("columns would touch");
        // The neck between stacked units must be at least two pixels wide.
        if (!ellipse_contains(probe, 1.0, spec.row_pitch / 2) || !ellipse_contains(probe, -1.0, spec.row_pitch / 2)) {
            inconsistent("stacked units do not overlap");
        }
    }

    const int width = static_cast<int>(std::ceil(2 * spec.margin + 2 * half.x() + (spec.cols - 1) * spec.col_pitch)) + 1;
    const int height = static_cast<int>(std::ceil(2 * spec.margin + 2 * half.y() + (spec.rows - 1) * spec.row_pitch)) + 1;
    BinaryMask mask(width, height);
    GratingTruth truth;
    truth.spec = spec;
    for (int i = 0; i < spec.rows; ++i) {
        for (int j = 0; j < spec.cols; ++j) {
            const Vec2 c(spec.margin + half.x() + j * spec.col_pitch, spec.margin + half.y() + i * spec.row_pitch);
            const Ellipse e = at(spec, c);
            paint(mask, e, true);
            truth.units.push_back({e, i, j});
        }
    }
    return {std::move(mask), std::move(truth)};
}

BinaryMask add_noise(const BinaryMask& mask, double flip_prob, std::uint64_t seed) {
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) throw Error("flip probability must lie in [0, 1]");
    BinaryMask out = mask;
    SplitMix64 rng(seed);
    bool* bits = out.bits.data();
    for (Eigen::Index i = 0; i < out.bits.size(); ++i) {
        if (rng.uniform() < flip_prob) bits[i] = !bits[i];
    }
    return out;
}

}  // namespace cdm
