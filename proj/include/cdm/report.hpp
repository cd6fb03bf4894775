#pragma once

#include "cdm/eval.hpp"
#include "cdm/fresnel.hpp"
#include "cdm/merged.hpp"
#include "cdm/srg.hpp"
#include "cdm/synth.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace cdm {

using Json = nlohmann::ordered_json;

/// Rounds to six decimals so reports are byte-stable.
double round6(double v);
/// "%.6f"
std::string fixed6(double v);

/// Two-space indented, newline-terminated.
std::string dump(const Json& j);

Json to_json(const CdReport& report, const std::string& source);
Json to_json(const BinDepthReport& report, const std::string& source);
Json to_json(const IouRecord& record);
Json to_json(const BatchSummary& summary);
Json to_json(const CorrelationReport& report);

/// `center_px`, `a_px`, `b_px`, `theta_deg`, `rms`, and `a_nm`/`b_nm` when a
/// calibration is given.
Json ellipse_json(const Ellipse& px, const FitQuality<double>& quality, const std::optional<Calibration>& calib);
Json to_json(const UnitReport& report, const std::string& source, const std::optional<Calibration>& calib);

Json to_json(const SrgTruth& truth);
Json to_json(const FresnelTruth& truth);
Json to_json(const GratingTruth& truth);

/// One row per tooth: id,image,tooth,etch_depth_nm,mid_thickness_nm,
/// left_slant_deg,right_slant_deg,pitch_nm (spacing to the next tooth, empty
/// for the last). The id is `<image>#<tooth>`.
std::string srg_csv_header();
std::string srg_csv_rows(const CdReport& report, const std::string& image);
/// Same columns from generator truth, lengths in px.
std::string srg_csv_rows(const SrgTruth& truth, const std::string& image);

std::string fresnel_csv_header();
std::string fresnel_csv_rows(const BinDepthReport& report, const std::string& image);

std::string iou_csv(const std::vector<IouRecord>& records);

}  // namespace cdm
