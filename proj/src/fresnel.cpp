#include "cdm/fresnel.hpp"

#include <algorithm>
#include <cstdlib>

namespace cdm {

int SurfaceProfile::present() const {
    return static_cast<int>(std::count_if(top_row.begin(), top_row.end(), [](const auto& v) { return v.has_value(); }));
}

SurfaceProfile surface_profile(const BinaryMask& mask) {
    SurfaceProfile p;
    p.top_row.resize(static_cast<std::size_t>(mask.width()));
    bool any = false;
    for (int c = 0; c < mask.width(); ++c) {
        for (int r = 0; r < mask.height(); ++r) {
            if (mask.bits(r, c)) {
                p.top_row[static_cast<std::size_t>(c)] = r;
                any = true;
                break;
            }
        }
    }
    if (!any) throw Error("empty profile: mask has no foreground");
    return p;
}

std::vector<ColRange> detect_bins(const SurfaceProfile& profile, int jump_threshold) {
    if (jump_threshold < 1) throw Error("jump threshold must be at least 1");
    if (profile.present() == 0) throw Error("empty profile: no columns present");
    std::vector<ColRange> bins;
    std::optional<ColRange> open;
    for (int c = 0; c < profile.width(); ++c) {
        const auto& v = profile.top_row[static_cast<std::size_t>(c)];
        if (!v) {
            if (open) bins.push_back(*open);
            open.reset();
            continue;
        }
        if (open) {
            const int prev = *profile.top_row[static_cast<std::size_t>(c - 1)];
            if (std::abs(*v - prev) >= jump_threshold) {
                bins.push_back(*open);
                open = ColRange{c, c};
            } else {
                open->last = c;
            }
        } else {
            open = ColRange{c, c};
        }
    }
    if (open) bins.push_back(*open);
    return bins;
}

BinDepthReport bin_depths(const SurfaceProfile& profile, const std::vector<ColRange>& bins, const Calibration& calib,
                          std::optional<int> reference_row) {
    calib.validate();
    if (bins.empty()) throw Error("no bins given");
    BinDepthReport report;
    report.calibration = calib;
    if (reference_row) {
        report.top_reference_row = *reference_row;
    } else {
        bool first = true;
        for (const auto& v : profile.top_row) {
            if (v && (first || *v < report.top_reference_row)) {
                report.top_reference_row = *v;
                first = false;
            }
        }
        if (first) throw Error("empty profile: no columns present");
    }
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const ColRange& range = bins[i];
        if (range.first < 0 || range.last >= profile.width() || range.first > range.last) {
            throw Error("bin " + std::to_string(i) + " outside profile");
        }
        Bin bin;
        bin.bin_id = static_cast<int>(i);
        bin.cols = range;
        bool any = false;
        for (int c = range.first; c <= range.last; ++c) {
            const auto& v = profile.top_row[static_cast<std::size_t>(c)];
            if (v && (!any || *v > bin.floor_row)) {
                bin.floor_row = *v;
                any = true;
            }
        }
        if (!any) throw Error("bin " + std::to_string(i) + " has no surface samples");
        bin.depth = (bin.floor_row - report.top_reference_row) * calib.nm_per_px_y;
        report.bins.push_back(bin);
    }
    std::stable_sort(report.bins.begin(), report.bins.end(),
                     [](const Bin& a, const Bin& b) { return a.cols.first < b.cols.first; });
    for (std::size_t i = 0; i < report.bins.size(); ++i) {
        report.bins[i].bin_id = static_cast<int>(i);
        if (i > 0 && report.bins[i].cols.first <= report.bins[i - 1].cols.last) throw Error("bins overlap");
    }
    return report;
}

}  // namespace cdm
