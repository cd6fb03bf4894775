#pragma once

#include "cdm/raster.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cdm {

struct IouRecord {
    std::string image_id;
    int class_id = 1;
    long intersection = 0;
    long union_ = 0;
    double iou = 0.0;
    bool vacuous = false;  // both masks empty; iou reported as 1
    std::string error;     // batch only: non-empty when the pair failed
};

IouRecord iou(const BinaryMask& pred, const BinaryMask& truth);

/// Linear interpolation between order statistics at position q * (n - 1)
/// of the sorted sample (the "type 7" definition).
double quantile(std::vector<double> values, double q);

struct ClassSummary {
    int count = 0;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

ClassSummary summarize_ious(const std::vector<double>& values);

struct BatchSummary {
    std::map<int, ClassSummary> per_class;
};

struct IouPair {
    std::filesystem::path pred;
    std::filesystem::path truth;
    int class_id = 1;
};

struct IouBatchOptions {
    int threshold = 128;
    bool label_masks = false;  // select class_id from label masks instead of binarizing
};

struct IouBatch {
    std::vector<IouRecord> records;  // input order
    BatchSummary summary;            // failed records excluded
    int failures = 0;
};

BinaryMask load_mask_for_class(const std::filesystem::path& path, int class_id, const IouBatchOptions& options);

/// Records for every pair; unreadable files give a record with `error` set
/// and the batch continues.
IouBatch iou_batch(const std::vector<IouPair>& pairs, const IouBatchOptions& options = {});

/// Reads `pred,truth,class` rows (header optional). Relative paths resolve
/// against the manifest's directory.
std::vector<IouPair> read_iou_manifest(const std::filesystem::path& path);

struct CorrelationReport {
    std::string cd_name;
    int n = 0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double mean_abs_error = 0.0;
    std::vector<std::string> warnings;
};

struct Measurement {
    std::string id;
    double value = 0.0;
};

/// OLS fit extracted = slope * manual + intercept over ids present in both.
CorrelationReport correlate(const std::vector<Measurement>& manual, const std::vector<Measurement>& extracted,
                            const std::string& cd_name = "cd");

/// Wide CSV: an `id` column plus one column per CD. Empty cells are missing
/// values.
struct CdTable {
    std::vector<std::string> columns;  // CD names, file order
    std::map<std::string, std::vector<Measurement>> values;
};

CdTable read_cd_table(const std::filesystem::path& path);
void append_cd_table(CdTable& into, const CdTable& from);

using Rgb = std::array<std::uint8_t, 3>;

/// Gray expanded to RGB, contour pixels painted `color`.
RgbImage overlay(const GrayImage& img, const std::vector<Contour>& contours, Rgb color = {255, 0, 0});

}  // namespace cdm
