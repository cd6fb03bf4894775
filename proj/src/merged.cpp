#include "cdm/merged.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cdm {

const char* to_string(ArcSide side) {
    switch (side) {
        case ArcSide::Left: return "left";
        case ArcSide::Top: return "top";
        case ArcSide::Right: return "right";
        case ArcSide::Bottom: return "bottom";
    }
    return "?";
}

std::vector<Vec2> ArcBundle::all_points() const {
    std::vector<Vec2> out;
    for (const Arc& a : arcs) out.insert(out.end(), a.points.begin(), a.points.end());
    return out;
}

ColumnSides column_sides(const BinaryMask& mask, const Component& comp) {
    (void)mask;
    ColumnSides sides;
    auto it = comp.pixels.begin();
    while (it != comp.pixels.end()) {
        const int row = it->row;
        auto run_end = it;
        int runs = 1;
        while (std::next(run_end) != comp.pixels.end() && std::next(run_end)->row == row) {
            if (std::next(run_end)->col != run_end->col + 1) ++runs;
            ++run_end;
        }
        sides.left.push_back({row, it->col});
        sides.right.push_back({row, run_end->col});
        if (runs > 1) sides.overhang = true;
        it = std::next(run_end);
    }
    return sides;
}

CosineFit<double> fit_cosine(const std::vector<SideSample>& samples, const CosineFitOptions& options) {
    Eigen::VectorXd rows(static_cast<Eigen::Index>(samples.size()));
    Eigen::VectorXd cols(static_cast<Eigen::Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        rows(static_cast<Eigen::Index>(i)) = samples[i].row;
        cols(static_cast<Eigen::Index>(i)) = samples[i].col;
    }
    return fit_cosine(rows, cols, options);
}

namespace {

std::vector<Vec2> samples_between(const std::vector<SideSample>& side, double r0, double r1) {
    std::vector<Vec2> out;
    for (const SideSample& s : side) {
        if (s.row >= r0 && s.row <= r1) out.emplace_back(s.col, s.row);
    }
    return out;
}

double phase_at(const CosineFit<double>& f, double row) { return 2.0 * kPi * row / f.period + f.phase; }

}  // namespace

ArcPairing pair_column_arcs(const ColumnSides& sides, const CosineFit<double>& left_fit,
                            const CosineFit<double>& right_fit) {
    ArcPairing out;
    if (sides.left.empty() || sides.right.empty()) {
        out.warnings.push_back("empty column sides");
        return out;
    }
    const double r0 = std::min(sides.left.front().row, sides.right.front().row);
    const double r1 = std::max(sides.left.back().row, sides.right.back().row);

    // A left crest (inward bulge) should face a right trough (also inward),
    // i.e. the two cosines run half a turn apart.
    const double rm = 0.5 * (r0 + r1);
    const double diff = detail::wrap_phase(phase_at(right_fit, rm) - phase_at(left_fit, rm));
    if (std::abs(std::abs(diff) - kPi) > 0.25 * 2.0 * kPi) {
        throw Error("sides out of registration: phase difference " + std::to_string(to_degrees(diff)) +
                    " deg, expected 180");
    }

    const auto left = extrema_rows(left_fit, r0, r1).crests;
    const auto right = extrema_rows(right_fit, r0, r1).troughs;
    const double tolerance = 0.25 * left_fit.period;
    for (std::size_t k = 0; k + 1 < left.size(); ++k) {
        const double mid = 0.5 * (left[k] + left[k + 1]);
        std::size_t best = right.size();
        double best_dist = tolerance;
        for (std::size_t j = 0; j + 1 < right.size(); ++j) {
            const double d = std::abs(0.5 * (right[j] + right[j + 1]) - mid);
            if (d <= best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best == right.size()) continue;
        ArcBundle bundle;
        bundle.source_unit_id = static_cast<int>(out.bundles.size());
        bundle.arcs.push_back({ArcSide::Left, samples_between(sides.left, left[k], left[k + 1])});
        bundle.arcs.push_back({ArcSide::Right, samples_between(sides.right, right[best], right[best + 1])});
        if (bundle.arcs[0].points.empty() || bundle.arcs[1].points.empty()) continue;
        out.bundles.push_back(std::move(bundle));
    }
    if (out.bundles.empty()) out.warnings.push_back("no full period between extrema; no bundles formed");
    return out;
}

namespace {

UnitEllipse fit_unit(const std::vector<Vec2>& points, const Calibration& calib) {
    UnitEllipse u;
    const EllipseFit<double> px = fit_ellipse(points);
    u.px = px.params;
    u.quality = px.quality;
    if (calib.nm_per_px_x == 1.0 && calib.nm_per_px_y == 1.0) {
        u.nm = u.px;
    } else {
        std::vector<Vec2> scaled;
        scaled.reserve(points.size());
        for (const Vec2& p : points) scaled.emplace_back(p.x() * calib.nm_per_px_x, p.y() * calib.nm_per_px_y);
        u.nm = fit_ellipse(scaled).params;
    }
    return u;
}

void append_error(std::string& errors, const std::string& what) {
    if (!errors.empty()) errors += "; ";
    errors += what;
}

}  // namespace

UnitReport fit_merged_column(const BinaryMask& mask, const MergedOptions& options) {
    options.calibration.validate();
    const std::vector<Component> comps = connected_components(clean(mask, options.min_area), Connectivity::Eight);
    if (comps.empty()) throw Error("no components in mask");

    UnitReport report;
    std::string errors;
    for (const Component& comp : comps) {
        const std::string tag = "component " + std::to_string(comp.id);
        const ColumnSides sides = column_sides(mask, comp);
        if (sides.overhang) report.warnings.push_back(tag + ": overhanging rows clipped to extreme columns");

        CosineFit<double> left_fit, right_fit;
        try {
            left_fit = fit_cosine(sides.left, options.cosine);
            right_fit = fit_cosine(sides.right, options.cosine);
        } catch (const InsufficientData&) {
            report.warnings.push_back(tag + ": not merged; use ellipse_from_contour");
            try {
                const Contour contour = trace_contour(mask, comp);
                UnitEllipse u = fit_unit(contour_edge_points(contour), options.calibration);
                u.component_id = comp.id;
                report.units.push_back(u);
            } catch (const Error& e) {
                append_error(errors, tag + ": " + e.what());
            }
            continue;
        } catch (const Error& e) {
            append_error(errors, tag + ": " + e.what());
            continue;
        }

        try {
            const ArcPairing pairing = pair_column_arcs(sides, left_fit, right_fit);
            for (const auto& w : pairing.warnings) report.warnings.push_back(tag + ": " + w);
            for (const ArcBundle& bundle : pairing.bundles) {
                try {
                    UnitEllipse u = fit_unit(bundle.all_points(), options.calibration);
                    u.component_id = comp.id;
                    u.bundle_id = bundle.source_unit_id;
                    report.units.push_back(u);
                } catch (const Error& e) {
                    append_error(errors, tag + " bundle " + std::to_string(bundle.source_unit_id) + ": " + e.what());
                }
            }
        } catch (const Error& e) {
            append_error(errors, tag + ": " + e.what());
        }
    }
    if (!errors.empty()) throw Error(errors);

    std::stable_sort(report.units.begin(), report.units.end(), [](const UnitEllipse& a, const UnitEllipse& b) {
        if (a.px.center.y() != b.px.center.y()) return a.px.center.y() < b.px.center.y();
        return a.px.center.x() < b.px.center.x();
    });
    return report;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Nearest neighbour spacing along one axis, considering only neighbours
// within a quarter of that spacing of the same line.
std::vector<double> axis_spacings(const std::vector<Component>& comps, bool horizontal) {
    std::vector<double> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        double best = 0.0;
        for (std::size_t j = 0; j < comps.size(); ++j) {
            if (i == j) continue;
            const Vec2 d = comps[j].centroid - comps[i].centroid;
            const double along = std::abs(horizontal ? d.x() : d.y());
            const double across = std::abs(horizontal ? d.y() : d.x());
            if (along <= 0.0 || across >= 0.25 * along) continue;
            if (best == 0.0 || along < best) best = along;
        }
        if (best > 0.0) out.push_back(best);
    }
    return out;
}

int nearest_within(const std::vector<Component>& comps, const Vec2& target, double tolerance) {
    int best = -1;
    double best_dist = tolerance;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const double d = (comps[i].centroid - target).norm();
        if (d <= best_dist) {
            best_dist = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

}  // namespace

Lattice estimate_lattice(const std::vector<Component>& comps) {
    if (comps.size() < 4) throw Error("no lattice: fewer than 4 components");
    Lattice lat;
    for (bool horizontal : {true, false}) {
        const std::vector<double> s = axis_spacings(comps, horizontal);
        if (s.empty()) throw Error("no lattice: no aligned neighbours");
        const double med = median(s);
        std::vector<double> dev;
        for (double v : s) dev.push_back(std::abs(v - med));
        if (median(dev) > 0.25 * med) throw Error("no lattice: inconsistent spacing");
        (horizontal ? lat.col_spacing : lat.row_spacing) = med;
    }
    return lat;
}

std::vector<DogboneGroup> group_dogbones(const std::vector<Component>& comps, const BinaryMask& mask) {
    (void)mask;
    const Lattice lat = estimate_lattice(comps);
    const double half_w = lat.col_spacing / 2;
    const double half_h = lat.row_spacing / 2;
    const double tol = 0.25 * std::min(half_w, half_h);

    std::vector<DogboneGroup> groups;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        DogboneGroup g;
        g.left = static_cast<int>(i);
        g.cell_center = comps[i].centroid + Vec2(half_w, 0.0);
        g.right = nearest_within(comps, g.cell_center + Vec2(half_w, 0.0), tol);
        g.top = nearest_within(comps, g.cell_center - Vec2(0.0, half_h), tol);
        g.bottom = nearest_within(comps, g.cell_center + Vec2(0.0, half_h), tol);
        if (g.right < 0 || g.top < 0 || g.bottom < 0) continue;
        // Refine the centre from all four members.
        g.cell_center = 0.25 * (comps[static_cast<std::size_t>(g.left)].centroid +
                                comps[static_cast<std::size_t>(g.right)].centroid +
                                comps[static_cast<std::size_t>(g.top)].centroid +
                                comps[static_cast<std::size_t>(g.bottom)].centroid);
        groups.push_back(g);
    }
    if (groups.empty()) throw Error("no lattice: no cell is surrounded by four components");
    std::stable_sort(groups.begin(), groups.end(), [&](const DogboneGroup& a, const DogboneGroup& b) {
        const long ra = std::lround(a.cell_center.y() / half_h);
        const long rb = std::lround(b.cell_center.y() / half_h);
        if (ra != rb) return ra < rb;
        return a.cell_center.x() < b.cell_center.x();
    });
    return groups;
}

ArcBundle arcs_from_group(const DogboneGroup& group, const std::vector<Component>& comps, const BinaryMask& mask) {
    (void)mask;
    const auto member = [&](int idx) -> const Component& {
        if (idx < 0 || static_cast<std::size_t>(idx) >= comps.size()) throw Error("invalid dog-bone group");
        return comps[static_cast<std::size_t>(idx)];
    };
    const Component& L = member(group.left);
    const Component& T = member(group.top);
    const Component& R = member(group.right);
    const Component& B = member(group.bottom);
    const double x0 = L.centroid.x(), x1 = R.centroid.x();
    const double y0 = T.centroid.y(), y1 = B.centroid.y();
    auto in_window = [&](int col, int row) { return col > x0 && col < x1 && row > y0 && row < y1; };

    // Per-row (horizontal=true) or per-column extreme pixel of a member.
    auto extremes = [&](const Component& c, bool per_row, bool take_max, ArcSide side) {
        std::map<int, int> best;
        for (const Pixel& p : c.pixels) {
            const int key = per_row ? p.row : p.col;
            const int val = per_row ? p.col : p.row;
            auto [it, inserted] = best.emplace(key, val);
            if (!inserted) it->second = take_max ? std::max(it->second, val) : std::min(it->second, val);
        }
        Arc arc{side, {}};
        for (const auto& [key, val] : best) {
            const int col = per_row ? val : key;
            const int row = per_row ? key : val;
            if (in_window(col, row)) arc.points.emplace_back(col, row);
        }
        return arc;
    };

    ArcBundle bundle;
    bundle.arcs.push_back(extremes(L, true, true, ArcSide::Left));
    bundle.arcs.push_back(extremes(T, false, true, ArcSide::Top));
    bundle.arcs.push_back(extremes(R, true, false, ArcSide::Right));
    bundle.arcs.push_back(extremes(B, false, false, ArcSide::Bottom));
    std::size_t total = 0;
    for (const Arc& a : bundle.arcs) {
        if (a.points.empty()) throw Error(std::string("arcs empty: no ") + to_string(a.side) + " samples in window");
        total += a.points.size();
    }
    if (total < 6) throw Error("arcs empty: fewer than 6 samples in window");
    return bundle;
}

UnitReport fit_island_ellipses(const BinaryMask& mask, const MergedOptions& options) {
    options.calibration.validate();
    const BinaryMask cleaned = clean(mask, options.min_area);
    const std::vector<Component> comps = connected_components(cleaned, Connectivity::Eight);
    const std::vector<DogboneGroup> groups = group_dogbones(comps, cleaned);
    const Lattice lat = estimate_lattice(comps);

    UnitReport report;
    std::string errors;
    int cell_row = 0;
    int cell_col = 0;
    long prev_band = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const long band = std::lround(groups[i].cell_center.y() / (lat.row_spacing / 2));
        if (i > 0) {
            if (band != prev_band) {
                ++cell_row;
                cell_col = 0;
            } else {
                ++cell_col;
            }
        }
        prev_band = band;
        try {
            const ArcBundle bundle = arcs_from_group(groups[i], comps, cleaned);
            UnitEllipse u = fit_unit(bundle.all_points(), options.calibration);
            u.cell_row = cell_row;
            u.cell_col = cell_col;
            report.units.push_back(u);
        } catch (const Error& e) {
            append_error(errors, "cell (" + std::to_string(cell_row) + "," + std::to_string(cell_col) + "): " + e.what());
        }
    }
    if (!errors.empty()) throw Error(errors);
    return report;
}

}  // namespace cdm
