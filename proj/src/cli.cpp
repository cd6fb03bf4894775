#include "cdm/cli.hpp"

#include "cdm/eval.hpp"
#include "cdm/fresnel.hpp"
#include "cdm/fsutil.hpp"
#include "cdm/kvfile.hpp"
#include "cdm/merged.hpp"
#include "cdm/mesh.hpp"
#include "cdm/report.hpp"
#include "cdm/srg.hpp"
#include "cdm/synth.hpp"
#include "cdm/transitions.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <set>
#include <thread>

namespace fs = std::filesystem;

namespace cdm::cli {

namespace {

constexpr int kOk = 0;
constexpr int kItemFailed = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
    using Error::Error;
};

struct Common {
    std::string config;
    double nm_x = 1.0;
    double nm_y = 1.0;
    long min_area = 16;
    int threshold = 128;
    int class_id = 0;
    std::string out = ".";
    int jobs = 1;

    Calibration calibration() const { return {nm_x, nm_y}; }
    bool calibrated() const { return nm_x != 1.0 || nm_y != 1.0; }
};

void add_common(CLI::App* app, Common& c, bool mask_inputs = true) {
    app->add_option("--config", c.config, "flat key = value file; keys are the long flag names");
    app->add_option("--nm-per-px-x", c.nm_x, "horizontal calibration")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--nm-per-px-y", c.nm_y, "vertical calibration")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--out", c.out, "output directory")->capture_default_str();
    app->add_option("--jobs", c.jobs, "parallel inputs")->capture_default_str()->check(CLI::Range(1, 256));
    if (!mask_inputs) return;
    app->add_option("--min-area", c.min_area, "cleanup area in px")->capture_default_str()->check(CLI::NonNegativeNumber);
    app->add_option("--threshold", c.threshold, "binarization threshold")->capture_default_str()->check(CLI::Range(0, 255));
    app->add_option("--class", c.class_id, "read label masks and select this class id (0 = binarize)")
        ->capture_default_str()
        ->check(CLI::Range(0, 255));
}

// Config values fill options not given on the command line.
void apply_config(CLI::App* app, const std::string& path) {
    if (path.empty()) return;
    std::vector<std::pair<std::string, std::string>> entries;
    try {
        entries = read_kv_file(path);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    for (const auto& [key, value] : entries) {
        if (key == "config") throw UsageError("config files cannot include other config files");
        CLI::Option* opt = app->get_option_no_throw("--" + key);
        if (opt == nullptr) throw UsageError("unknown config key '" + key + "' for " + app->get_name());
        if (opt->count() > 0) continue;
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw UsageError("config key '" + key + "': " + e.what());
        }
    }
}

BinaryMask load_input(const fs::path& path, const Common& c, std::vector<std::string>* warnings = nullptr) {
    if (c.class_id > 0) {
        ClassExtraction ex = extract_class(load_labels(path), c.class_id);
        if (ex.absent && warnings) warnings->push_back("class " + std::to_string(c.class_id) + " absent");
        return ex.mask;
    }
    return binarize(load_gray(path), c.threshold);
}

std::string stem_of(const std::string& p) { return fs::path(p).stem().string(); }

void check_unique_stems(const std::vector<std::string>& inputs) {
    std::set<std::string> seen;
    for (const auto& in : inputs) {
        if (!seen.insert(stem_of(in)).second) throw UsageError("two inputs share the output name " + stem_of(in));
    }
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

struct ItemResult {
    std::string error;
    std::string csv;
};

// Per-input work with the uniform failure policy: errors are reported in
// input order and turn the exit status to 1.
template <typename Fn>
int for_each_input(const std::vector<std::string>& inputs, int jobs, std::string* csv, Fn work) {
    std::vector<ItemResult> results(inputs.size());
    parallel_for(inputs.size(), jobs, [&](std::size_t i) {
        try {
            results[i].csv = work(i);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });
    int status = kOk;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!results[i].error.empty()) {
            std::cerr << "error: " << inputs[i] << ": " << results[i].error << "\n";
            status = kItemFailed;
        } else if (csv) {
            *csv += results[i].csv;
        }
    }
    return status;
}

fs::path out_path(const Common& c, const std::string& name) { return fs::path(c.out) / name; }

// --- subcommands -------------------------------------------------------------

struct SrgArgs {
    std::vector<std::string> inputs;
    std::vector<std::string> overlay;
    double mid_fraction = 0.5;
    int min_run = 3;
    int edge_window = 6;
};

int cmd_srg(const Common& c, const SrgArgs& a) {
    if (!a.overlay.empty() && a.overlay.size() != a.inputs.size()) {
        throw UsageError("--overlay needs one image per input mask");
    }
    SrgOptions opt;
    opt.calibration = c.calibration();
    opt.min_area = c.min_area;
    opt.mid_fraction = a.mid_fraction;
    opt.min_run = a.min_run;
    opt.edge_window = a.edge_window;
    std::string csv = srg_csv_header();
    const int status = for_each_input(a.inputs, c.jobs, &csv, [&](std::size_t i) {
        std::vector<std::string> warnings;
        const BinaryMask mask = load_input(a.inputs[i], c, &warnings);
        CdReport report = extract_srg(mask, opt);
        report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
        const std::string stem = stem_of(a.inputs[i]);
        write_file_atomic(out_path(c, stem + ".srg.json"), dump(to_json(report, fs::path(a.inputs[i]).filename().string())));
        if (!a.overlay.empty()) {
            const BinaryMask opened = strip_spurs(mask, opt.min_run);
            const BinaryMask cleaned = clean(opened, opt.min_area);
            std::vector<Contour> contours;
            for (const Component& t : segment_teeth(opened, opt.min_area)) contours.push_back(trace_contour(cleaned, t));
            save_png(overlay(load_gray(a.overlay[i]), contours), out_path(c, stem + ".overlay.png"));
        }
        return srg_csv_rows(report, stem);
    });
    write_file_atomic(out_path(c, "srg.csv"), csv);
    return status;
}

struct FresnelArgs {
    std::vector<std::string> inputs;
    int jump_threshold = 5;
    int reference_row = -1;
    std::vector<std::string> bins;
};

std::vector<ColRange> parse_ranges(const std::vector<std::string>& specs) {
    std::vector<ColRange> out;
    for (const auto& s : specs) {
        const auto dash = s.find('-');
        try {
            if (dash == std::string::npos) throw std::invalid_argument(s);
            std::size_t u1 = 0, u2 = 0;
            const std::string lo = s.substr(0, dash), hi = s.substr(dash + 1);
            ColRange r{std::stoi(lo, &u1), std::stoi(hi, &u2)};
            if (u1 != lo.size() || u2 != hi.size() || r.first > r.last || r.first < 0) throw std::invalid_argument(s);
            out.push_back(r);
        } catch (const std::exception&) {
            throw UsageError("bad bin range '" + s + "', expected FIRST-LAST");
        }
    }
    return out;
}

int cmd_fresnel(const Common& c, const FresnelArgs& a) {
    const std::vector<ColRange> explicit_bins = parse_ranges(a.bins);
    std::string csv = fresnel_csv_header();
    const int status = for_each_input(a.inputs, c.jobs, &csv, [&](std::size_t i) {
        const BinaryMask mask = clean(load_input(a.inputs[i], c), c.min_area);
        const SurfaceProfile profile = surface_profile(mask);
        const auto bins = explicit_bins.empty() ? detect_bins(profile, a.jump_threshold) : explicit_bins;
        const std::optional<int> ref = a.reference_row >= 0 ? std::optional<int>(a.reference_row) : std::nullopt;
        const BinDepthReport report = bin_depths(profile, bins, c.calibration(), ref);
        const std::string stem = stem_of(a.inputs[i]);
        write_file_atomic(out_path(c, stem + ".fresnel.json"),
                          dump(to_json(report, fs::path(a.inputs[i]).filename().string())));
        return fresnel_csv_rows(report, stem);
    });
    write_file_atomic(out_path(c, "fresnel.csv"), csv);
    return status;
}

struct ManyArgs {
    std::vector<std::string> inputs;
    double noise_floor = 1.0;
};

int cmd_ellipse(const Common& c, const ManyArgs& a) {
    const std::optional<Calibration> calib = c.calibrated() ? std::optional(c.calibration()) : std::nullopt;
    return for_each_input(a.inputs, c.jobs, nullptr, [&](std::size_t i) {
        const BinaryMask mask = clean(load_input(a.inputs[i], c), c.min_area);
        const auto comps = connected_components(mask, Connectivity::Eight);
        if (comps.empty()) throw Error("no components in mask");
        Json units = Json::array();
        std::string errors;
        for (const Component& comp : comps) {
            try {
                const EllipseFit<double> fit = ellipse_from_contour(trace_contour(mask, comp));
                Json j = ellipse_json(fit.params, fit.quality, calib);
                j["component"] = comp.id;
                units.push_back(j);
            } catch (const Error& e) {
                errors += (errors.empty() ? "" : "; ") + ("component " + std::to_string(comp.id) + ": " + e.what());
            }
        }
        if (!errors.empty()) throw Error(errors);
        Json doc = {{"source", fs::path(a.inputs[i]).filename().string()}, {"units", units}};
        write_file_atomic(out_path(c, stem_of(a.inputs[i]) + ".ellipse.json"), dump(doc));
        return std::string();
    });
}

int cmd_units(const Common& c, const ManyArgs& a, bool islands) {
    MergedOptions opt;
    opt.calibration = c.calibration();
    opt.min_area = c.min_area;
    opt.cosine.noise_floor = a.noise_floor;
    const std::optional<Calibration> calib = c.calibrated() ? std::optional(c.calibration()) : std::nullopt;
    return for_each_input(a.inputs, c.jobs, nullptr, [&](std::size_t i) {
        const BinaryMask mask = load_input(a.inputs[i], c);
        const UnitReport report = islands ? fit_island_ellipses(mask, opt) : fit_merged_column(mask, opt);
        write_file_atomic(out_path(c, stem_of(a.inputs[i]) + (islands ? ".islands.json" : ".merged.json")),
                          dump(to_json(report, fs::path(a.inputs[i]).filename().string(), calib)));
        return std::string();
    });
}

struct MeshArgs {
    std::string manifest;
    std::string output;
    int max_resample = 2048;
};

int cmd_mesh(const Common& c, const MeshArgs& a) {
    const SliceManifest manifest = read_manifest(a.manifest);
    SliceStack stack;
    for (std::size_t i = 0; i < manifest.masks.size(); ++i) {
        const BinaryMask mask = clean(load_input(manifest.masks[i], c), c.min_area);
        const auto comps = connected_components(mask, Connectivity::Eight);
        if (comps.empty()) throw Error("degenerate slice: " + manifest.masks[i].string() + " has no foreground");
        const auto largest = std::max_element(comps.begin(), comps.end(), [](const Component& x, const Component& y) {
            return x.pixel_count < y.pixel_count;
        });
        stack.slices.push_back(slice_from_contour(trace_contour(mask, *largest), i * manifest.z_spacing, c.calibration()));
    }
    MeshOptions opt;
    opt.max_resample = a.max_resample;
    const Mesh mesh = build_mesh(stack, opt);
    const fs::path dst = a.output.empty() ? out_path(c, fs::path(a.manifest).stem().string() + ".obj") : fs::path(a.output);
    export_obj(mesh, dst);
    std::cout << dst.string() << ": " << mesh.vertices.rows() << " vertices, " << mesh.faces.rows() << " faces\n";
    return kOk;
}

struct IouArgs {
    std::vector<std::string> pair;
    std::string manifest;
    bool labels = false;
};

int cmd_iou(const Common& c, const IouArgs& a) {
    std::vector<IouPair> pairs;
    if (!a.manifest.empty()) {
        if (!a.pair.empty()) throw UsageError("give either --manifest or PRED TRUTH, not both");
        pairs = read_iou_manifest(a.manifest);
    } else if (a.pair.size() == 2) {
        pairs.push_back({a.pair[0], a.pair[1], std::max(1, c.class_id)});
    } else {
        throw UsageError("iou needs PRED TRUTH or --manifest");
    }
    IouBatchOptions opt;
    opt.threshold = c.threshold;
    opt.label_masks = a.labels || c.class_id > 0;
    const IouBatch batch = iou_batch(pairs, opt);
    write_file_atomic(out_path(c, "iou_records.csv"), iou_csv(batch.records));
    write_file_atomic(out_path(c, "iou_summary.json"), dump(to_json(batch.summary)));
    for (const IouRecord& r : batch.records) {
        if (!r.error.empty()) std::cerr << "error: " << r.image_id << ": " << r.error << "\n";
        else std::cout << r.image_id << " class " << r.class_id << " iou " << fixed6(r.iou) << (r.vacuous ? " (vacuous)" : "") << "\n";
    }
    return batch.failures > 0 ? kItemFailed : kOk;
}

struct CorrelateArgs {
    std::vector<std::string> manual;
    std::vector<std::string> extracted;
    std::vector<std::string> cds;
};

int cmd_correlate(const Common& c, const CorrelateArgs& a) {
    CdTable manual, extracted;
    for (const auto& p : a.manual) append_cd_table(manual, read_cd_table(p));
    for (const auto& p : a.extracted) append_cd_table(extracted, read_cd_table(p));
    std::vector<std::string> names = a.cds;
    if (names.empty()) {
        for (const auto& col : manual.columns) {
            if (std::find(extracted.columns.begin(), extracted.columns.end(), col) != extracted.columns.end()) {
                names.push_back(col);
            }
        }
    }
    if (names.empty()) throw UsageError("no CD column shared by the manual and extracted tables");
    Json reports = Json::array();
    Json errors = Json::array();
    int status = kOk;
    for (const auto& name : names) {
        try {
            const CorrelationReport r = correlate(manual.values[name], extracted.values[name], name);
            reports.push_back(to_json(r));
            std::cout << name << " n " << r.n << " slope " << fixed6(r.slope) << " intercept " << fixed6(r.intercept)
                      << " r2 " << fixed6(r.r_squared) << " mae " << fixed6(r.mean_abs_error) << "\n";
        } catch (const Error& e) {
            errors.push_back({{"cd", name}, {"error", e.what()}});
            std::cerr << "error: " << name << ": " << e.what() << "\n";
            status = kItemFailed;
        }
    }
    write_file_atomic(out_path(c, "correlation.json"), dump(Json{{"reports", reports}, {"errors", errors}}));
    return status;
}

struct SynthArgs {
    std::string kind = "srg";
    std::string name = "synth";
    double noise = 0.0;
    std::uint64_t seed = 0;
    SrgSpec srg;
    FresnelSpec fresnel;
    std::vector<int> bin_depths{0, 10, 20, 30, 40, 50, 60, 70, 80};
    EllipseGratingSpec ellipse;
    std::string level = "isolated";
};

int cmd_synth(const Common& c, SynthArgs a) {
    const fs::path png = out_path(c, a.name + ".png");
    const fs::path truth = out_path(c, a.name + ".truth.json");
    BinaryMask mask;
    if (a.kind == "srg") {
        a.srg.seed = a.seed;
        SrgSample s = gen_srg(a.srg);
        mask = std::move(s.mask);
        write_file_atomic(truth, dump(to_json(s.truth)));
        write_file_atomic(out_path(c, a.name + ".truth.csv"), srg_csv_header() + srg_csv_rows(s.truth, a.name));
    } else if (a.kind == "fresnel") {
        a.fresnel.seed = a.seed;
        a.fresnel.bin_depths = a.bin_depths;
        FresnelSample s = gen_fresnel(a.fresnel);
        mask = std::move(s.mask);
        write_file_atomic(truth, dump(to_json(s.truth)));
    } else if (a.kind == "ellipse") {
        a.ellipse.seed = a.seed;
        a.ellipse.level = parse_merge_level(a.level);
        GratingSample s = gen_ellipse_grating(a.ellipse);
        mask = std::move(s.mask);
        write_file_atomic(truth, dump(to_json(s.truth)));
    } else {
        throw UsageError("unknown synth kind '" + a.kind + "' (srg, fresnel, ellipse)");
    }
    if (a.noise > 0.0) mask = add_noise(mask, a.noise, a.seed);
    save_png(to_gray(mask), png);
    return kOk;
}

struct OverlayArgs {
    std::string image;
    std::string mask;
    std::vector<int> color{255, 0, 0};
    std::string output;
};

int cmd_overlay(const Common& c, const OverlayArgs& a) {
    const BinaryMask mask = clean(load_input(a.mask, c), c.min_area);
    std::vector<Contour> contours;
    for (const Component& comp : connected_components(mask, Connectivity::Eight)) contours.push_back(trace_contour(mask, comp));
    const Rgb color{static_cast<std::uint8_t>(a.color[0]), static_cast<std::uint8_t>(a.color[1]),
                    static_cast<std::uint8_t>(a.color[2])};
    const GrayImage img = load_gray(a.image);
    if (img.width() != mask.width() || img.height() != mask.height()) throw Error("image and mask sizes differ");
    const fs::path dst = a.output.empty() ? out_path(c, stem_of(a.image) + ".overlay.png") : fs::path(a.output);
    save_png(overlay(img, contours, color), dst);
    return kOk;
}

int cmd_transitions(const Common& c, const ManyArgs& a) {
    return for_each_input(a.inputs, c.jobs, nullptr, [&](std::size_t i) {
        std::string csv = "col,row,sides\n";
        for (const TransitionPoint& t : find_transition_points(load_input(a.inputs[i], c))) {
            csv += std::to_string(t.pos.col) + "," + std::to_string(t.pos.row) + "," + sides_to_string(t.background_sides) + "\n";
        }
        write_file_atomic(out_path(c, stem_of(a.inputs[i]) + ".transitions.csv"), csv);
        return std::string();
    });
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Critical-dimension metrology on segmentation masks", args.empty() ? "cdmetro" : args[0]};
    app.require_subcommand(1, 1);

    Common common;
    SrgArgs srg;
    FresnelArgs fresnel;
    ManyArgs ellipse, merged, islands, transitions;
    MeshArgs mesh;
    IouArgs iou;
    CorrelateArgs corr;
    SynthArgs synth;
    OverlayArgs ov;

    auto* s_srg = app.add_subcommand("srg", "surface relief grating CDs: depth, pitch, mid thickness, slants");
    add_common(s_srg, common);
    s_srg->add_option("inputs", srg.inputs, "mask files")->required();
    s_srg->add_option("--overlay", srg.overlay, "original images, one per mask, for contour overlays");
    s_srg->add_option("--mid-fraction", srg.mid_fraction, "mid elevation as a fraction of the depth")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    s_srg->add_option("--min-run", srg.min_run, "strip surface spurs narrower than this before segmentation (1 = off)")
        ->capture_default_str()
        ->check(CLI::Range(1, 1 << 16));
    s_srg->add_option("--edge-window", srg.edge_window, "rows per side for landmark straightness repair (0 = off)")
        ->capture_default_str()
        ->check(CLI::Range(0, 64));

    auto* s_fresnel = app.add_subcommand("fresnel", "Fresnel lens bin depths");
    add_common(s_fresnel, common);
    s_fresnel->add_option("inputs", fresnel.inputs, "mask files")->required();
    s_fresnel->add_option("--jump-threshold", fresnel.jump_threshold, "surface jump that splits bins, px")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    s_fresnel->add_option("--reference-row", fresnel.reference_row, "explicit top reference row (-1 = highest surface)")
        ->capture_default_str();
    s_fresnel->add_option("--bins", fresnel.bins, "explicit bins FIRST-LAST, comma separated")->delimiter(',');

    auto* s_ellipse = app.add_subcommand("ellipse", "ellipse fit per isolated unit");
    add_common(s_ellipse, common);
    s_ellipse->add_option("inputs", ellipse.inputs, "mask files")->required();

    auto* s_merged = app.add_subcommand("merged", "ellipses from columnar merged chains");
    add_common(s_merged, common);
    s_merged->add_option("inputs", merged.inputs, "mask files")->required();
    s_merged->add_option("--noise-floor", merged.noise_floor, "smallest side oscillation amplitude, px")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);

    auto* s_islands = app.add_subcommand("islands", "ellipses from dog-bone islands");
    add_common(s_islands, common);
    s_islands->add_option("inputs", islands.inputs, "mask files")->required();

    auto* s_mesh = app.add_subcommand("mesh", "OBJ mesh from a stack of slice masks");
    add_common(s_mesh, common);
    s_mesh->add_option("manifest", mesh.manifest, "slice manifest")->required();
    s_mesh->add_option("--output", mesh.output, "OBJ path (default <out>/<manifest>.obj)");
    s_mesh->add_option("--max-resample", mesh.max_resample, "cap on points per ring")
        ->capture_default_str()
        ->check(CLI::Range(3, 1 << 20));

    auto* s_iou = app.add_subcommand("iou", "IoU of predicted vs ground-truth masks");
    add_common(s_iou, common);
    s_iou->add_option("pair", iou.pair, "PRED TRUTH")->expected(0, 2);
    s_iou->add_option("--manifest", iou.manifest, "CSV with pred,truth,class rows");
    s_iou->add_flag("--labels", iou.labels, "inputs are label masks; select each row's class");

    auto* s_corr = app.add_subcommand("correlate", "manual vs extracted CD correlation");
    add_common(s_corr, common, false);
    s_corr->add_option("--manual", corr.manual, "CSV with id and CD columns (repeatable)")->required();
    s_corr->add_option("--extracted", corr.extracted, "CSV with id and CD columns (repeatable)")->required();
    s_corr->add_option("--cd", corr.cds, "CD columns to correlate (default: all shared)")->delimiter(',');

    auto* s_synth = app.add_subcommand("synth", "synthetic mask with ground truth sidecar");
    add_common(s_synth, common, false);
    s_synth->add_option("--kind", synth.kind, "srg, fresnel or ellipse")->capture_default_str();
    s_synth->add_option("--name", synth.name, "output file stem")->capture_default_str();
    s_synth->add_option("--noise", synth.noise, "pixel flip probability")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    s_synth->add_option("--seed", synth.seed, "noise seed")->capture_default_str();
    s_synth->add_option("--tooth-count", synth.srg.tooth_count, "srg")->capture_default_str();
    s_synth->add_option("--pitch", synth.srg.pitch, "srg, px")->capture_default_str();
    s_synth->add_option("--depth", synth.srg.depth, "srg, px")->capture_default_str();
    s_synth->add_option("--mid-thickness", synth.srg.mid_thickness, "srg, px")->capture_default_str();
    s_synth->add_option("--left-slant", synth.srg.left_slant, "srg, degrees")->capture_default_str();
    s_synth->add_option("--right-slant", synth.srg.right_slant, "srg, degrees")->capture_default_str();
    s_synth->add_option("--width", synth.srg.width, "srg canvas width (0 = fit)")->capture_default_str();
    s_synth->add_option("--height", synth.srg.height, "srg canvas height (0 = fit)")->capture_default_str();
    s_synth->add_option("--margin", synth.srg.margin, "srg margin, px")->capture_default_str();
    s_synth->add_option("--bin-count", synth.fresnel.bin_count, "fresnel")->capture_default_str();
    s_synth->add_option("--bin-width", synth.fresnel.bin_width, "fresnel, px")->capture_default_str();
    s_synth->add_option("--bin-depths", synth.bin_depths, "fresnel, px, comma separated")
        ->delimiter(',')
        ->capture_default_str();
    s_synth->add_option("--slab-thickness", synth.fresnel.slab_thickness, "fresnel, px")->capture_default_str();
    s_synth->add_option("--a", synth.ellipse.a, "ellipse semi-major, px")->capture_default_str();
    s_synth->add_option("--b", synth.ellipse.b, "ellipse semi-minor, px")->capture_default_str();
    s_synth->add_option("--theta", synth.ellipse.theta_deg, "ellipse rotation, degrees")->capture_default_str();
    s_synth->add_option("--rows", synth.ellipse.rows, "ellipse lattice rows")->capture_default_str();
    s_synth->add_option("--cols", synth.ellipse.cols, "ellipse lattice columns")->capture_default_str();
    s_synth->add_option("--row-pitch", synth.ellipse.row_pitch, "ellipse lattice, px")->capture_default_str();
    s_synth->add_option("--col-pitch", synth.ellipse.col_pitch, "ellipse lattice, px")->capture_default_str();
    s_synth->add_option("--level", synth.level, "isolated, columnar or islands")->capture_default_str();

    auto* s_overlay = app.add_subcommand("overlay", "paint mask contours onto an image");
    add_common(s_overlay, common);
    s_overlay->add_option("image", ov.image, "grayscale image")->required();
    s_overlay->add_option("mask", ov.mask, "mask file")->required();
    s_overlay->add_option("--color", ov.color, "R,G,B")->delimiter(',')->expected(3)->capture_default_str()->check(CLI::Range(0, 255));
    s_overlay->add_option("--output", ov.output, "PNG path (default <out>/<image>.overlay.png)");

    auto* s_trans = app.add_subcommand("transitions", "dump transition points as CSV");
    add_common(s_trans, common);
    s_trans->add_option("inputs", transitions.inputs, "mask files")->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        if (!rev.empty()) rev.pop_back();
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        apply_config(sub, common.config);
        common.calibration().validate();
        fs::create_directories(common.out);
        if (sub == s_srg) {
            check_unique_stems(srg.inputs);
            return cmd_srg(common, srg);
        }
        if (sub == s_fresnel) {
            check_unique_stems(fresnel.inputs);
            return cmd_fresnel(common, fresnel);
        }
        if (sub == s_ellipse) {
            check_unique_stems(ellipse.inputs);
            return cmd_ellipse(common, ellipse);
        }
        if (sub == s_merged) {
            check_unique_stems(merged.inputs);
            return cmd_units(common, merged, false);
        }
        if (sub == s_islands) {
            islands.noise_floor = merged.noise_floor;
            check_unique_stems(islands.inputs);
            return cmd_units(common, islands, true);
        }
        if (sub == s_trans) {
            check_unique_stems(transitions.inputs);
            return cmd_transitions(common, transitions);
        }
        if (sub == s_mesh) return cmd_mesh(common, mesh);
        if (sub == s_iou) return cmd_iou(common, iou);
        if (sub == s_corr) return cmd_correlate(common, corr);
        if (sub == s_synth) return cmd_synth(common, synth);
        if (sub == s_overlay) return cmd_overlay(common, ov);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kItemFailed;
    }
    return kUsage;
}

int run(int argc, const char* const* argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace cdm::cli
