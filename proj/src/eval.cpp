#include "cdm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace cdm {

IouRecord iou(const BinaryMask& pred, const BinaryMask& truth) {
    if (pred.width() != truth.width() || pred.height() != truth.height()) {
        throw Error("dimension mismatch: " + std::to_string(pred.width()) + "x" + std::to_string(pred.height()) +
                    " vs " + std::to_string(truth.width()) + "x" + std::to_string(truth.height()));
    }
    IouRecord r;
    r.intersection = static_cast<long>((pred.bits && truth.bits).count());
    r.union_ = static_cast<long>((pred.bits || truth.bits).count());
    if (r.union_ == 0) {
        r.vacuous = true;
        r.iou = 1.0;
    } else {
        r.iou = static_cast<double>(r.intersection) / static_cast<double>(r.union_);
    }
    return r;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw Error("quantile of empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ClassSummary summarize_ious(const std::vector<double>& values) {
    ClassSummary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return s;
}

BinaryMask load_mask_for_class(const std::filesystem::path& path, int class_id, const IouBatchOptions& options) {
    if (options.label_masks) return extract_class(load_labels(path), class_id).mask;
    return binarize(load_gray(path), options.threshold);
}

IouBatch iou_batch(const std::vector<IouPair>& pairs, const IouBatchOptions& options) {
    IouBatch batch;
    std::map<int, std::vector<double>> by_class;
    for (const IouPair& p : pairs) {
        IouRecord r;
        try {
            r = iou(load_mask_for_class(p.pred, p.class_id, options), load_mask_for_class(p.truth, p.class_id, options));
            by_class[p.class_id].push_back(r.iou);
        } catch (const Error& e) {
            r.error = e.what();
            ++batch.failures;
        }
        r.image_id = p.pred.filename().string();
        r.class_id = p.class_id;
        batch.records.push_back(r);
    }
    for (const auto& [cls, values] : by_class) batch.summary.per_class[cls] = summarize_ious(values);
    return batch;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    std::size_t used = 0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == s.size();
}

}  // namespace

std::vector<IouPair> read_iou_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read manifest: " + path.string());
    std::vector<IouPair> pairs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv(line);
        if (lineno == 1 && !cells.empty() && cells[0] == "pred") continue;
        if (cells.size() < 2 || cells.size() > 3) throw Error("manifest line " + std::to_string(lineno) + ": expected pred,truth,class");
        IouPair p;
        p.pred = cells[0];
        p.truth = cells[1];
        if (cells.size() == 3 && !cells[2].empty()) {
            double v = 0;
            if (!parse_double(cells[2], v) || v < 1 || v != std::floor(v)) {
                throw Error("manifest line " + std::to_string(lineno) + ": class must be an integer >= 1");
            }
            p.class_id = static_cast<int>(v);
        }
        if (p.pred.is_relative()) p.pred = path.parent_path() / p.pred;
        if (p.truth.is_relative()) p.truth = path.parent_path() / p.truth;
        pairs.push_back(p);
    }
    return pairs;
}

CorrelationReport correlate(const std::vector<Measurement>& manual, const std::vector<Measurement>& extracted,
                            const std::string& cd_name) {
    CorrelationReport rep;
    rep.cd_name = cd_name;
    std::map<std::string, double> ext;
    for (const Measurement& m : extracted) {
        if (!ext.emplace(m.id, m.value).second) rep.warnings.push_back("duplicate extracted id " + m.id);
    }
    std::set<std::string> seen;
    std::vector<double> xs, ys;
    for (const Measurement& m : manual) {
        if (!seen.insert(m.id).second) {
            rep.warnings.push_back("duplicate manual id " + m.id);
            continue;
        }
        auto it = ext.find(m.id);
        if (it == ext.end()) {
            rep.warnings.push_back("unmatched manual id " + m.id);
            continue;
        }
        xs.push_back(m.value);
        ys.push_back(it->second);
    }
    for (const auto& [id, v] : ext) {
        if (!seen.count(id)) rep.warnings.push_back("unmatched extracted id " + id);
    }
    rep.n = static_cast<int>(xs.size());
    if (rep.n < 2) throw Error("insufficient pairs for " + cd_name + ": " + std::to_string(rep.n) + " matched");

    const Eigen::Map<const Eigen::ArrayXd> x(xs.data(), rep.n), y(ys.data(), rep.n);
    const double mx = x.mean(), my = y.mean();
    const double sxx = (x - mx).square().sum();
    const double syy = (y - my).square().sum();
    const double sxy = ((x - mx) * (y - my)).sum();
    if (!(sxx > 0.0)) throw Error("degenerate regression for " + cd_name + ": manual values have zero variance");
    rep.slope = sxy / sxx;
    rep.intercept = my - rep.slope * mx;
    rep.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    rep.r_squared = std::clamp(rep.r_squared, 0.0, 1.0);
    rep.mean_abs_error = (y - x).abs().mean();
    return rep;
}

namespace {

// Identifier columns written next to the id; never correlated.
bool is_descriptor(const std::string& column) { return column == "image" || column == "tooth"; }

}  // namespace

CdTable read_cd_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read CSV: " + path.string());
    std::string line;
    CdTable t;
    std::vector<std::string> header;
    std::size_t id_col = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (header.empty()) {
            header = cells;
            auto it = std::find(header.begin(), header.end(), "id");
            if (it == header.end()) throw Error("CSV lacks an id column: " + path.string());
            id_col = static_cast<std::size_t>(it - header.begin());
            for (std::size_t c = 0; c < header.size(); ++c) {
                if (c != id_col && !is_descriptor(header[c])) t.columns.push_back(header[c]);
            }
            continue;
        }
        if (cells.size() > header.size() || cells.size() <= id_col) {
            throw Error(path.string() + " line " + std::to_string(lineno) + ": column count mismatch");
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v = 0.0;
            if (c == id_col || is_descriptor(header[c]) || !parse_double(cells[c], v)) continue;
            t.values[header[c]].push_back({cells[id_col], v});
        }
    }
    if (header.empty()) throw Error("empty CSV: " + path.string());
    return t;
}

void append_cd_table(CdTable& into, const CdTable& from) {
    for (const std::string& c : from.columns) {
        if (std::find(into.columns.begin(), into.columns.end(), c) == into.columns.end()) into.columns.push_back(c);
    }
    for (const auto& [name, v] : from.values) {
        auto& dst = into.values[name];
        dst.insert(dst.end(), v.begin(), v.end());
    }
}

RgbImage overlay(const GrayImage& img, const std::vector<Contour>& contours, Rgb color) {
    RgbImage out;
    out.width = img.width();
    out.height = img.height();
    out.data.resize(3 * static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height));
    for (int r = 0; r < out.height; ++r) {
        for (int c = 0; c < out.width; ++c) {
            std::uint8_t* px = out.at(c, r);
            px[0] = px[1] = px[2] = img(c, r);
        }
    }
    for (const Contour& contour : contours) {
        for (const Pixel& p : contour.points) {
            if (p.col < 0 || p.row < 0 || p.col >= out.width || p.row >= out.height) {
                throw Error("contour point (" + std::to_string(p.col) + "," + std::to_string(p.row) + ") outside image");
            }
            std::uint8_t* px = out.at(p.col, p.row);
            px[0] = color[0];
            px[1] = color[1];
            px[2] = color[2];
        }
    }
    return out;
}

}  // namespace cdm
