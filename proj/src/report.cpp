#include "cdm/report.hpp"

#include <cmath>
#include <cstdio>

namespace cdm {

double round6(double v) {
    const double r = std::round(v * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", round6(v));
    return buf;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

Json point(const Pixel& p) { return Json::array({p.col, p.row}); }
Json point(const Vec2& p) { return Json::array({round6(p.x()), round6(p.y())}); }

Json stats(const CdStats& s) {
    return {{"mean", round6(s.mean)}, {"min", round6(s.min)}, {"max", round6(s.max)},
            {"stddev", round6(s.stddev)}, {"count", s.count}};
}

Json calibration(const Calibration& c) {
    return {{"nm_per_px_x", round6(c.nm_per_px_x)}, {"nm_per_px_y", round6(c.nm_per_px_y)}};
}

Json rounded(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(round6(x));
    return out;
}

Json ellipse_truth(const Ellipse& e) {
    return {{"center_px", point(e.center)}, {"a_px", round6(e.a)}, {"b_px", round6(e.b)},
            {"theta_deg", round6(to_degrees(e.theta))}};
}

}  // namespace

Json to_json(const CdReport& report, const std::string& source) {
    Json teeth = Json::array();
    for (const ToothCd& t : report.teeth) {
        const Landmarks& lm = t.landmarks;
        teeth.push_back({{"tooth_id", t.tooth_id},
                         {"mid_thickness_nm", round6(t.mid_thickness)},
                         {"left_slant_deg", round6(t.left_slant)},
                         {"right_slant_deg", round6(t.right_slant)},
                         {"depth_nm", round6(t.depth)},
                         {"landmarks",
                          {{"top", point(lm.top)},
                           {"bottom", point(lm.bottom)},
                           {"mid_left", point(lm.mid_left)},
                           {"mid_right", point(lm.mid_right)},
                           {"top_left", point(lm.top_left)},
                           {"top_right", point(lm.top_right)},
                           {"mid_row", lm.mid_row}}}});
    }
    return {{"source", source},
            {"calibration", calibration(report.calibration)},
            {"etch_depth_nm", round6(report.etch_depth)},
            {"pitch_nm", rounded(report.pitches)},
            {"mid_row", report.mid_row},
            {"global_top", point(report.global_top)},
            {"global_bottom", point(report.global_bottom)},
            {"teeth", teeth},
            {"stats",
             {{"mid_thickness_nm", stats(report.mid_thickness_stats)},
              {"left_slant_deg", stats(report.left_slant_stats)},
              {"right_slant_deg", stats(report.right_slant_stats)},
              {"pitch_nm", stats(report.pitch_stats)},
              {"tooth_depth_nm", stats(report.tooth_depth_stats)}}},
            {"warnings", report.warnings}};
}

Json to_json(const BinDepthReport& report, const std::string& source) {
    Json bins = Json::array();
    for (const Bin& b : report.bins) {
        bins.push_back({{"bin_id", b.bin_id},
                        {"first_col", b.cols.first},
                        {"last_col", b.cols.last},
                        {"floor_row", b.floor_row},
                        {"depth_nm", round6(b.depth)}});
    }
    return {{"source", source},
            {"calibration", calibration(report.calibration)},
            {"top_reference_row", report.top_reference_row},
            {"bins", bins}};
}

Json to_json(const IouRecord& r) {
    Json j = {{"image_id", r.image_id}, {"class", r.class_id}, {"intersection", r.intersection},
              {"union", r.union_},      {"iou", round6(r.iou)}, {"vacuous", r.vacuous}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

Json to_json(const BatchSummary& summary) {
    Json classes = Json::object();
    for (const auto& [cls, s] : summary.per_class) {
        classes[std::to_string(cls)] = {{"count", s.count}, {"min", round6(s.min)},       {"q1", round6(s.q1)},
                                        {"median", round6(s.median)}, {"q3", round6(s.q3)}, {"max", round6(s.max)},
                                        {"mean", round6(s.mean)}};
    }
    return {{"quantile_method", "linear interpolation between order statistics (type 7)"}, {"classes", classes}};
}

Json to_json(const CorrelationReport& r) {
    return {{"cd", r.cd_name},
            {"n", r.n},
            {"slope", round6(r.slope)},
            {"intercept", round6(r.intercept)},
            {"r_squared", round6(r.r_squared)},
            {"mean_abs_error", round6(r.mean_abs_error)},
            {"warnings", r.warnings}};
}

Json ellipse_json(const Ellipse& px, const FitQuality<double>& quality, const std::optional<Calibration>& calib) {
    Json j = {{"center_px", point(px.center)},
              {"a_px", round6(px.a)},
              {"b_px", round6(px.b)},
              {"theta_deg", round6(to_degrees(px.theta))},
              {"circle", px.circle},
              {"rms", round6(quality.rms_residual)},
              {"points", quality.point_count}};
    if (calib) {
        // Axis lengths along the rotated axes under anisotropic scale.
        const double c = std::cos(px.theta), s = std::sin(px.theta);
        j["a_nm"] = round6(px.a * std::hypot(c * calib->nm_per_px_x, s * calib->nm_per_px_y));
        j["b_nm"] = round6(px.b * std::hypot(s * calib->nm_per_px_x, c * calib->nm_per_px_y));
    }
    return j;
}

Json to_json(const UnitReport& report, const std::string& source, const std::optional<Calibration>& calib) {
    Json units = Json::array();
    for (const UnitEllipse& u : report.units) {
        Json j = ellipse_json(u.px, u.quality, std::nullopt);
        if (calib) {
            j["center_nm"] = point(u.nm.center);
            j["a_nm"] = round6(u.nm.a);
            j["b_nm"] = round6(u.nm.b);
            j["theta_nm_deg"] = round6(to_degrees(u.nm.theta));
        }
        if (u.cell_row >= 0) j["cell"] = Json::array({u.cell_row, u.cell_col});
        if (u.component_id >= 0) j["component"] = u.component_id;
        if (u.bundle_id >= 0) j["bundle"] = u.bundle_id;
        units.push_back(j);
    }
    Json out = {{"source", source}, {"units", units}, {"warnings", report.warnings}};
    if (calib) out["calibration"] = calibration(*calib);
    return out;
}

Json to_json(const SrgTruth& t) {
    Json teeth = Json::array();
    for (const SrgToothTruth& tt : t.teeth) {
        teeth.push_back({{"top_left", point(tt.top_left)},
                         {"top_right", point(tt.top_right)},
                         {"mid_left", point(tt.mid_left)},
                         {"mid_right", point(tt.mid_right)},
                         {"bottom_left", point(tt.bottom_left)},
                         {"bottom_right", point(tt.bottom_right)},
                         {"mid_thickness_px", round6(tt.mid_thickness)},
                         {"left_slant_deg", round6(tt.left_slant)},
                         {"right_slant_deg", round6(tt.right_slant)}});
    }
    const SrgSpec& s = t.spec;
    return {{"kind", "srg"},
            {"spec",
             {{"tooth_count", s.tooth_count},
              {"pitch", round6(s.pitch)},
              {"depth", round6(s.depth)},
              {"mid_thickness", round6(s.mid_thickness)},
              {"left_slant", round6(s.left_slant)},
              {"right_slant", round6(s.right_slant)},
              {"width", s.width},
              {"height", s.height},
              {"margin", s.margin},
              {"seed", s.seed}}},
            {"top_row", t.top_row},
            {"bottom_row", t.bottom_row},
            {"mid_row", t.mid_row},
            {"etch_depth_px", round6(t.etch_depth)},
            {"pitch_px", rounded(t.pitches)},
            {"teeth", teeth}};
}

Json to_json(const FresnelTruth& t) {
    Json bins = Json::array();
    for (const FresnelBinTruth& b : t.bins) {
        bins.push_back({{"first_col", b.first_col}, {"last_col", b.last_col}, {"floor_row", b.floor_row}, {"depth_px", b.depth}});
    }
    const FresnelSpec& s = t.spec;
    return {{"kind", "fresnel"},
            {"spec",
             {{"bin_count", s.bin_count},
              {"bin_width", s.bin_width},
              {"bin_depths", s.bin_depths},
              {"slab_thickness", s.slab_thickness},
              {"margin", s.margin},
              {"seed", s.seed}}},
            {"top_reference_row", t.top_reference_row},
            {"bins", bins}};
}

Json to_json(const GratingTruth& t) {
    Json units = Json::array();
    for (const GratingUnitTruth& u : t.units) {
        Json j = ellipse_truth(u.ellipse);
        j["lattice"] = Json::array({u.row, u.col});
        units.push_back(j);
    }
    Json islands = Json::array();
    for (const Vec2& c : t.islands) islands.push_back(point(c));
    const EllipseGratingSpec& s = t.spec;
    Json out = {{"kind", "ellipse"},
                {"spec",
                 {{"a", round6(s.a)},
                  {"b", round6(s.b)},
                  {"theta_deg", round6(s.theta_deg)},
                  {"rows", s.rows},
                  {"cols", s.cols},
                  {"row_pitch", round6(s.row_pitch)},
                  {"col_pitch", round6(s.col_pitch)},
                  {"level", to_string(s.level)},
                  {"margin", s.margin},
                  {"seed", s.seed}}},
                {"units", units}};
    if (!t.islands.empty()) out["islands"] = islands;
    return out;
}

std::string srg_csv_header() {
    return "id,image,tooth,etch_depth_nm,mid_thickness_nm,left_slant_deg,right_slant_deg,pitch_nm\n";
}

namespace {

std::string srg_row(const std::string& image, std::size_t i, double depth, double mid, double left, double right,
                    const std::vector<double>& pitches) {
    std::string row = image + "#" + std::to_string(i) + "," + image + "," + std::to_string(i) + "," + fixed6(depth) +
                      "," + fixed6(mid) + "," + fixed6(left) + "," + fixed6(right) + ",";
    if (i < pitches.size()) row += fixed6(pitches[i]);
    return row + "\n";
}

}  // namespace

std::string srg_csv_rows(const CdReport& report, const std::string& image) {
    std::string out;
    for (std::size_t i = 0; i < report.teeth.size(); ++i) {
        const ToothCd& t = report.teeth[i];
        out += srg_row(image, i, report.etch_depth, t.mid_thickness, t.left_slant, t.right_slant, report.pitches);
    }
    return out;
}

std::string srg_csv_rows(const SrgTruth& truth, const std::string& image) {
    std::string out;
    for (std::size_t i = 0; i < truth.teeth.size(); ++i) {
        const SrgToothTruth& t = truth.teeth[i];
        out += srg_row(image, i, truth.etch_depth, t.mid_thickness, t.left_slant, t.right_slant, truth.pitches);
    }
    return out;
}

std::string fresnel_csv_header() { return "id,image,bin,first_col,last_col,depth_nm\n"; }

std::string fresnel_csv_rows(const BinDepthReport& report, const std::string& image) {
    std::string out;
    for (const Bin& b : report.bins) {
        out += image + "#" + std::to_string(b.bin_id) + "," + image + "," + std::to_string(b.bin_id) + "," +
               std::to_string(b.cols.first) + "," + std::to_string(b.cols.last) + "," + fixed6(b.depth) + "\n";
    }
    return out;
}

std::string iou_csv(const std::vector<IouRecord>& records) {
    std::string out = "image_id,class,intersection,union,iou,vacuous,error\n";
    for (const IouRecord& r : records) {
        std::string err = r.error;
        for (char& c : err) {
            if (c == ',' || c == '\n') c = ';';
        }
        out += r.image_id + "," + std::to_string(r.class_id) + "," + std::to_string(r.intersection) + "," +
               std::to_string(r.union_) + "," + (r.error.empty() ? fixed6(r.iou) : std::string()) + "," +
               (r.vacuous ? "1" : "0") + "," + err + "\n";
    }
    return out;
}

}  // namespace cdm
