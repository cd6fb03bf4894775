#include "cdm/srg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace cdm {

CdStats summarize(const std::vector<double>& values) {
    CdStats s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    const Eigen::Map<const Eigen::ArrayXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
    s.mean = v.mean();
    s.min = v.minCoeff();
    s.max = v.maxCoeff();
    if (values.size() > 1) s.stddev = std::sqrt((v - s.mean).square().sum() / static_cast<double>(values.size() - 1));
    return s;
}

std::vector<Component> segment_teeth(const BinaryMask& mask, long min_area) {
    std::vector<Component> teeth = connected_components(clean(mask, min_area), Connectivity::Eight);
    if (teeth.empty()) throw Error("no teeth found");
    std::stable_sort(teeth.begin(), teeth.end(),
                     [](const Component& a, const Component& b) { return a.centroid.x() < b.centroid.x(); });
    return teeth;
}

namespace {

// The topmost row's leftmost pixel and the bottom row's leftmost pixel over
// all teeth; ties across teeth resolve to the smaller column.
void global_extremes(const std::vector<Component>& teeth, Pixel& top, Pixel& bottom) {
    if (teeth.empty()) throw Error("no teeth found");
    bool first = true;
    for (const Component& t : teeth) {
        int lo = 0, hi = 0;
        t.row_extent(t.bbox.min_row, lo, hi);
        const Pixel tp{lo, t.bbox.min_row};
        t.row_extent(t.bbox.max_row, lo, hi);
        const Pixel bp{lo, t.bbox.max_row};
        if (first || tp.row < top.row || (tp.row == top.row && tp.col < top.col)) top = tp;
        if (first || bp.row > bottom.row || (bp.row == bottom.row && bp.col < bottom.col)) bottom = bp;
        first = false;
    }
}

}  // namespace

double etch_depth(const std::vector<Component>& teeth, const BinaryMask& mask, const Calibration& calib) {
    (void)mask;
    calib.validate();
    Pixel top, bottom;
    global_extremes(teeth, top, bottom);
    return std::abs(top.row - bottom.row) * calib.nm_per_px_y;
}

int mid_row_of(const std::vector<Component>& teeth, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error("mid fraction must lie in [0, 1]");
    Pixel top, bottom;
    global_extremes(teeth, top, bottom);
    return static_cast<int>(std::lround(top.row + fraction * (bottom.row - top.row)));
}

double mid_thickness(const Component& tooth, const BinaryMask& mask, int mid_row, const Calibration& calib) {
    const Landmarks lm = landmarks(mask, tooth, mid_row);
    return std::abs(lm.mid_right.col - lm.mid_left.col) * calib.nm_per_px_x;
}

std::vector<double> pitch_sequence(const std::vector<Component>& teeth, const BinaryMask& mask, int mid_row,
                                   const Calibration& calib) {
    if (teeth.size() < 2) throw Error("pitch undefined: fewer than two teeth");
    std::vector<double> out;
    out.reserve(teeth.size() - 1);
    int prev = landmarks(mask, teeth.front(), mid_row).mid_left.col;
    for (std::size_t i = 1; i < teeth.size(); ++i) {
        const int cur = landmarks(mask, teeth[i], mid_row).mid_left.col;
        out.push_back(std::abs(cur - prev) * calib.nm_per_px_x);
        prev = cur;
    }
    return out;
}

SlantAngles slant_angles(const Landmarks& lm, const Calibration& calib) {
    if (lm.top_left.row == lm.mid_row) throw Error("tooth too shallow for slant");
    // Rows grow downward, so the rise from mid to top is (mid_row - top_row).
    const double rise = (lm.mid_left.row - lm.top_left.row) * calib.nm_per_px_y;
    SlantAngles out;
    out.left = to_degrees(std::atan2(rise, (lm.top_left.col - lm.mid_left.col) * calib.nm_per_px_x));
    out.right = to_degrees(std::atan2(rise, (lm.top_right.col - lm.mid_right.col) * calib.nm_per_px_x));
    return out;
}

SlantAngles slant_angles(const Component& tooth, const BinaryMask& mask, int mid_row, const Calibration& calib) {
    return slant_angles(landmarks(mask, tooth, mid_row), calib);
}

bool digitally_straight(const std::vector<Pixel>& samples) {
    if (samples.size() <= 2) return true;
    // The spread of col - m*row is convex and piecewise linear in m, so its
    // minimum sits on a slope through two samples.
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            if (samples[i].row == samples[j].row) continue;
            const double m = static_cast<double>(samples[j].col - samples[i].col) / (samples[j].row - samples[i].row);
            double lo = 0.0, hi = 0.0;
            for (std::size_t k = 0; k < samples.size(); ++k) {
                const double v = samples[k].col - m * samples[k].row;
                lo = k == 0 ? v : std::min(lo, v);
                hi = k == 0 ? v : std::max(hi, v);
            }
            if (hi - lo < 1.0 - 1e-9) return true;
        }
    }
    return false;
}

namespace {

int repair_edge(const Component& tooth, int row, int measured, bool left, int window) {
    // A side with fewer than three samples says nothing about straightness;
    // one other noisy row per side is tolerated.
    auto side = [&](int from, int to, int value) {
        std::vector<Pixel> s{{value, row}};
        for (int r = from; r <= to; ++r) {
            int lo = 0, hi = 0;
            if (r != row && tooth.row_extent(r, lo, hi)) s.push_back({left ? lo : hi, r});
        }
        if (s.size() < 4) return s.size() == 3 && digitally_straight(s);
        if (digitally_straight(s)) return true;
        for (std::size_t drop = 1; drop < s.size(); ++drop) {
            std::vector<Pixel> rest = s;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(drop));
            if (digitally_straight(rest)) return true;
        }
        return false;
    };
    auto fits = [&](int value) { return side(row - window, row, value) || side(row, row + window, value); };
    if (fits(measured)) return measured;
    for (int d = 1; d <= 2; ++d) {
        const bool down = fits(measured - d), up = fits(measured + d);
        if (down != up) return down ? measured - d : measured + d;
        if (down) break;
    }
    return measured;
}

}  // namespace

Landmarks repair_landmarks(const Component& tooth, const Landmarks& lm, int window) {
    if (window <= 0) return lm;
    Landmarks out = lm;
    out.top_left.col = repair_edge(tooth, lm.top_left.row, lm.top_left.col, true, window);
    out.top_right.col = repair_edge(tooth, lm.top_right.row, lm.top_right.col, false, window);
    out.mid_left.col = repair_edge(tooth, lm.mid_left.row, lm.mid_left.col, true, window);
    out.mid_right.col = repair_edge(tooth, lm.mid_right.row, lm.mid_right.col, false, window);
    return out;
}

CdReport extract_srg(const BinaryMask& input, const SrgOptions& options) {
    options.calibration.validate();
    const Calibration& calib = options.calibration;
    const BinaryMask mask = strip_spurs(input, options.min_run);
    const std::vector<Component> teeth = segment_teeth(mask, options.min_area);

    CdReport report;
    report.calibration = calib;
    global_extremes(teeth, report.global_top, report.global_bottom);
    report.etch_depth = std::abs(report.global_top.row - report.global_bottom.row) * calib.nm_per_px_y;
    report.mid_row = mid_row_of(teeth, options.mid_fraction);

    std::string errors;
    for (std::size_t i = 0; i < teeth.size(); ++i) {
        ToothCd cd;
        cd.tooth_id = static_cast<int>(i);
        try {
            cd.landmarks = repair_landmarks(teeth[i], landmarks(mask, teeth[i], report.mid_row), options.edge_window);
            const SlantAngles s = slant_angles(cd.landmarks, calib);
            cd.left_slant = s.left;
            cd.right_slant = s.right;
        } catch (const Error& e) {
            if (!errors.empty()) errors += "; ";
            errors += "tooth " + std::to_string(i) + ": " + e.what();
            continue;
        }
        cd.mid_thickness = std::abs(cd.landmarks.mid_right.col - cd.landmarks.mid_left.col) * calib.nm_per_px_x;
        cd.depth = std::abs(cd.landmarks.bottom.row - cd.landmarks.top.row) * calib.nm_per_px_y;
        report.teeth.push_back(cd);
    }
    if (!errors.empty()) throw Error(errors);

    for (std::size_t i = 1; i < report.teeth.size(); ++i) {
        const int d = report.teeth[i].landmarks.mid_left.col - report.teeth[i - 1].landmarks.mid_left.col;
        report.pitches.push_back(std::abs(d) * calib.nm_per_px_x);
    }
    if (report.teeth.size() == 1) report.warnings.push_back("single tooth: pitch undefined");

    auto collect = [&](auto member) {
        std::vector<double> v;
        for (const ToothCd& t : report.teeth) v.push_back(t.*member);
        return v;
    };
    report.mid_thickness_stats = summarize(collect(&ToothCd::mid_thickness));
    report.left_slant_stats = summarize(collect(&ToothCd::left_slant));
    report.right_slant_stats = summarize(collect(&ToothCd::right_slant));
    report.tooth_depth_stats = summarize(collect(&ToothCd::depth));
    report.pitch_stats = summarize(report.pitches);
    return report;
}

}  // namespace cdm
