#include "core/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "core/aggregation.hpp"
#include "core/error.hpp"
#include "core/image_io.hpp"
#include "core/synth.hpp"

namespace sdgf {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class StageClock {
public:
    explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

    template <typename Fn>
    auto run(const std::string& stage, Fn&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                record(stage, t0);
            } else {
                auto result = fn();
                record(stage, t0);
                return result;
            }
        } catch (const Error& e) {
            throw Error(e.kind(), "stage " + stage + ": " + e.what());
        }
    }

private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
        const auto dt = std::chrono::steady_clock::now() - t0;
        sink_.push_back({stage, std::chrono::duration<double, std::milli>(dt).count()});
    }

    std::vector<StageTiming>& sink_;
};

int effective_threads(const PipelineConfig& config) {
    if (config.threads > 0) return config.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

FeatureParams level_feature_params(const FeatureParams& base, int level) {
    FeatureParams p = base;
    for (int& r : p.context_radii) r = std::max(1, r >> level);
    return p;
}

double penalty_depth(const PipelineConfig& config) {
    if (config.eval_penalty_depth == "auto") return config.rig.bf() / kDisparityEps;
    return std::stod(config.eval_penalty_depth);
}

}  // namespace

PipelineResult run_pipeline(const PipelineInputs& inputs, const PipelineConfig& config) {
    validate_config(config);
    const int H = inputs.left.height(), W = inputs.left.width();
    if (!inputs.left.same_shape(inputs.right))
        fail_invalid("left and right images must share dimensions");
    if (inputs.hints.height != H || inputs.hints.width != W)
        fail_invalid("hint map must be at full image resolution");
    const int threads = effective_threads(config);
    const int levels = config.pyramid_levels;

    PipelineResult res;
    res.height = H;
    res.width = W;
    StageClock clock(res.timings);

    const ImageGrid luma = to_luma(inputs.left);
    const ImageGrid luma_r = to_luma(inputs.right);

    // pyramids: index 0 = full res; features live at 1/4 (index 2) and below
    const auto pyr_l = clock.run("pyramid", [&] { return build_pyramid(luma, 2 + levels); });
    const std::vector<ImageGrid> pyr_r = build_pyramid(luma_r, 2 + levels);

    auto features = clock.run("extract_features", [&] {
        std::pair<std::vector<FeatureMap>, std::vector<FeatureMap>> f;
        for (int i = 0; i < levels; ++i) {
            const FeatureParams fp = level_feature_params(config.features, i);
            f.first.push_back(extract_features(pyr_l[2 + i], fp));
            f.second.push_back(extract_features(pyr_r[2 + i], fp));
        }
        return f;
    });

    const SparseHintMap hints_q =
        clock.run("downsample_hints", [&] { return downsample_hints(inputs.hints, 4); });

    const OffsetField offsets = clock.run("offsets", [&] {
        if (config.offset_source == "zero")
            return zero_offset_field(hints_q.height, hints_q.width, config.prop_window);
        if (config.offset_source == "edge_aware")
            return edge_aware_offset_field(features.first[0], config.prop_window,
                                           config.prop_dilation);
        const std::string path = config.offset_source.substr(std::string("external:").size());
        return load_offset_field(path, hints_q.height, hints_q.width, config.prop_window);
    });

    const PropagationWeights weights = clock.run("propagation_weights", [&] {
        return propagation_weights(features.first[0], offsets, config.prop_dilation,
                                   config.prop_temperature, threads);
    });

    // raw Eq.-3/4 output feeds the exported maps per the normalize flag; the
    // guidance consumers always see the confidence-corrected disparity, since
    // the raw weighted sum is biased low by C_p at partial confidence
    const SemiDenseHint hint_raw = clock.run("propagate", [&] {
        return propagate(hints_q, weights, offsets, config.prop_dilation, /*normalize=*/false,
                         threads);
    });
    res.hint_quarter = config.prop_normalize ? confidence_normalized(hint_raw) : hint_raw;
    const SemiDenseHint guidance = confidence_normalized(hint_raw);

    CoarseToFineConfig ctf;
    ctf.volume = config.volume;
    ctf.cost = config.cost;
    ctf.cg = config.cg;
    ctf.cg_enabled = config.cg_enabled;
    ctf.agg = config.agg;
    ctf.softargmin_t = config.softargmin_t;
    ctf.levels = levels;
    ctf.threads = threads;

    std::vector<ImageGrid> luma_levels(pyr_l.begin() + 2, pyr_l.begin() + 2 + levels);
    const CoarseToFineResult ctf_res = clock.run("coarse_to_fine", [&] {
        return coarse_to_fine(features.first, features.second, luma_levels, guidance, ctf,
                              config.dump_volume ? &res.volume_dump : nullptr);
    });
    res.uncertainty_q = ctf_res.uncertainty;

    res.disparity = clock.run("upsample", [&] {
        return upsample_disparity(ctf_res.disparity, ctf_res.height, ctf_res.width, luma,
                                  config.upsample_sigma_range, threads);
    });

    res.residuals = clock.run("residuals", [&] {
        if (config.residual_provider == "zero") return ResidualMaps(H, W);
        if (config.residual_provider == "lidar") {
            DepthMap lidar =
                inputs.lidar ? *inputs.lidar : hints_to_depth(inputs.hints, config.rig);
            LidarResidualConfig rc;
            rc.window = config.prop_window;
            rc.temperature = config.prop_temperature;
            rc.rho = config.cg.rho;
            rc.features = config.features;
            rc.threads = threads;
            return lidar_anchored_residuals(res.disparity, H, W, config.rig, lidar, inputs.left,
                                            rc);
        }
        const std::string paths = config.residual_provider.substr(std::string("file:").size());
        const size_t comma = paths.find(',');
        if (comma == std::string::npos)
            fail_config("residuals.provider file form needs 'file:DELTA1.pfm,DELTA2.pfm'");
        return external_residuals(paths.substr(0, comma), paths.substr(comma + 1), H, W);
    });

    res.depth = clock.run("triangulate",
                          [&] { return triangulate(res.disparity, H, W, config.rig, res.residuals); });

    res.error_map = clock.run("error_map",
                              [&] { return warp_error_map(inputs.left, inputs.right, res.disparity); });
    return res;
}

namespace {

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail_io("cannot create output directory '" + out_dir + "': " + ec.message());
}

void require_inputs(std::initializer_list<std::pair<const char*, const std::string*>> inputs) {
    for (const auto& [what, path] : inputs) {
        if (path->empty()) fail_io(std::string(what) + " path is required");
        if (!file_exists(*path)) fail_io(std::string(what) + " '" + *path + "' does not exist");
    }
}

ImageGrid plane_grid(const std::vector<float>& values, int h, int w) {
    ImageGrid g(h, w, 1);
    std::copy(values.begin(), values.end(), g.data().begin());
    return g;
}

void write_manifest(const std::string& out_dir, const PipelineConfig& config,
                    const std::string& command, const json& inputs, const json& outputs,
                    const std::vector<StageTiming>& timings) {
    json m;
    m["tool"] = "sdg-fuse";
    m["version"] = kVersion;
    m["command"] = command;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    json cfg;
    for (const auto& [k, v] : config_echo(config)) cfg[k] = v;
    m["config"] = cfg;
    json t = json::array();
    for (const StageTiming& st : timings) t.push_back({{"stage", st.stage}, {"ms", st.ms}});
    m["timings"] = t;
    std::ofstream out(fs::path(out_dir) / "manifest.json");
    if (!out) fail_io("cannot write manifest in '" + out_dir + "'");
    out << m.dump(2) << "\n";
}

json output_list(const std::vector<std::string>& names) {
    json j = json::array();
    for (const auto& n : names) j.push_back(n);
    return j;
}

void dump_volumes(const std::string& out_dir, const std::vector<CostVolume>& volumes) {
    // coarse_to_fine pushes coarsest first
    for (size_t i = 0; i < volumes.size(); ++i) {
        const CostVolume& cv = volumes[i];
        ImageGrid stack(cv.height, cv.width, cv.d_max);
        for (int y = 0; y < cv.height; ++y)
            for (int x = 0; x < cv.width; ++x)
                for (int d = 0; d < cv.d_max; ++d) stack.at(x, y, d) = cv.cost[cv.index(x, y, d)];
        const std::string name = "volume_level" + std::to_string(volumes.size() - 1 - i) + ".pfm";
        write_pfm((fs::path(out_dir) / name).string(), stack);
    }
}

struct EvalRow {
    std::string file;
    MetricReport report;
};

std::string render_report(const std::vector<EvalRow>& rows, const std::string& format,
                          const std::vector<std::string>& notices) {
    std::ostringstream os;
    if (format == "csv") {
        os << "file,bucket,rmse_mm,mae_mm,irmse_1perkm,imae_1perkm,valid_count\n";
        for (const auto& r : rows)
            os << r.file << "," << r.report.bucket.label() << "," << r.report.rmse_mm << ","
               << r.report.mae_mm << "," << r.report.irmse_per_km << "," << r.report.imae_per_km
               << "," << r.report.valid_count << "\n";
    } else if (format == "json-lines") {
        for (const auto& r : rows) {
            json j;
            j["file"] = r.file;
            j["bucket"] = r.report.bucket.label();
            j["rmse_mm"] = r.report.rmse_mm;
            j["mae_mm"] = r.report.mae_mm;
            j["irmse_1perkm"] = r.report.irmse_per_km;
            j["imae_1perkm"] = r.report.imae_per_km;
            j["valid_count"] = r.report.valid_count;
            os << j.dump() << "\n";
        }
    } else {
        os << std::left << std::setw(24) << "file" << std::setw(12) << "bucket" << std::right
           << std::setw(12) << "RMSE(mm)" << std::setw(12) << "MAE(mm)" << std::setw(14)
           << "iRMSE(1/km)" << std::setw(13) << "iMAE(1/km)" << std::setw(10) << "pixels" << "\n";
        for (const auto& r : rows) {
            os << std::left << std::setw(24) << r.file << std::setw(12) << r.report.bucket.label()
               << std::right << std::fixed << std::setprecision(3) << std::setw(12)
               << r.report.rmse_mm << std::setw(12) << r.report.mae_mm << std::setw(14)
               << r.report.irmse_per_km << std::setw(13) << r.report.imae_per_km << std::setw(10)
               << r.report.valid_count << "\n";
            os.unsetf(std::ios_base::floatfield);
            os << std::setprecision(6);
        }
    }
    for (const auto& n : notices) os << "# " << n << "\n";
    return os.str();
}

// Count-weighted merge: quadratic mean for RMSE-like terms, mean for MAE-like.
MetricReport merge_reports(const std::vector<MetricReport>& parts) {
    MetricReport all;
    double sq = 0, ab = 0, isq = 0, iab = 0;
    size_t n = 0;
    for (const auto& r : parts) {
        const double w = static_cast<double>(r.valid_count);
        sq += r.rmse_mm * r.rmse_mm * w;
        ab += r.mae_mm * w;
        isq += r.irmse_per_km * r.irmse_per_km * w;
        iab += r.imae_per_km * w;
        n += r.valid_count;
    }
    all.valid_count = n;
    if (n > 0) {
        all.rmse_mm = std::sqrt(sq / n);
        all.mae_mm = ab / n;
        all.irmse_per_km = std::sqrt(isq / n);
        all.imae_per_km = iab / n;
    }
    return all;
}

}  // namespace

SparseHintMap load_hints_as_disparity(const std::string& path, const CameraRig& rig) {
    rig.validate();
    const DepthMap depth = read_depth_png(path);
    SparseHintMap hints(depth.height, depth.width);
    const double bf = rig.bf();
    for (size_t i = 0; i < depth.valid.size(); ++i)
        if (depth.valid[i]) {
            hints.disparity[i] = static_cast<float>(bf / depth.depth[i]);
            hints.valid[i] = 1;
        }
    return hints;
}

void synth_to_files(const PipelineConfig& config, const std::string& out_dir) {
    validate_config(config);
    SceneSpec spec = config.synth;
    spec.rig = config.rig;
    spec.texture_seed = config.seed;
    const Scene scene = render_scene(spec);
    ensure_out_dir(out_dir);

    const fs::path dir(out_dir);
    write_image_png((dir / "left.png").string(), scene.left);
    write_image_png((dir / "right.png").string(), scene.right);
    write_pfm((dir / "gt_disparity.pfm").string(),
              plane_grid(scene.gt_disparity, spec.height, spec.width));
    // dataset-convention ground truth: occluded pixels are left invalid
    DepthMap gt_masked = scene.gt_depth;
    for (size_t i = 0; i < gt_masked.valid.size(); ++i)
        if (!scene.non_occluded[i]) gt_masked.valid[i] = 0;
    write_depth_png((dir / "gt_depth.png").string(), gt_masked);
    write_depth_png((dir / "hints.png").string(), hints_to_depth(scene.hints, spec.rig));

    write_manifest(out_dir, config, "synth", json::object(),
                   output_list({"left.png", "right.png", "gt_disparity.pfm", "gt_depth.png",
                                "hints.png"}),
                   {});
}

void propagate_to_files(const PipelineConfig& config, const std::string& left_path,
                        const std::string& hints_path, const std::string& out_dir) {
    validate_config(config);
    require_inputs({{"left image", &left_path}, {"hint map", &hints_path}});
    const ImageGrid left = read_image_png(left_path);
    const SparseHintMap hints = load_hints_as_disparity(hints_path, config.rig);
    if (hints.height != left.height() || hints.width != left.width())
        fail_io("hint map resolution does not match the left image");
    const int threads = effective_threads(config);

    std::vector<StageTiming> timings;
    StageClock clock(timings);
    const ImageGrid quarter = build_pyramid(to_luma(left), 3).back();
    const FeatureMap feats = extract_features(quarter, config.features);
    const SparseHintMap hints_q = downsample_hints(hints, 4);
    const OffsetField offsets = clock.run("offsets", [&] {
        if (config.offset_source == "zero")
            return zero_offset_field(hints_q.height, hints_q.width, config.prop_window);
        if (config.offset_source == "edge_aware")
            return edge_aware_offset_field(feats, config.prop_window, config.prop_dilation);
        const std::string path = config.offset_source.substr(std::string("external:").size());
        return load_offset_field(path, hints_q.height, hints_q.width, config.prop_window);
    });
    const PropagationWeights weights = clock.run("propagation_weights", [&] {
        return propagation_weights(feats, offsets, config.prop_dilation, config.prop_temperature,
                                   threads);
    });
    const SemiDenseHint hint = clock.run("propagate", [&] {
        return propagate(hints_q, weights, offsets, config.prop_dilation, config.prop_normalize,
                         threads);
    });

    ensure_out_dir(out_dir);
    const fs::path dir(out_dir);
    write_pfm((dir / "dp.pfm").string(), plane_grid(hint.disparity_p, hint.height, hint.width));
    write_pfm((dir / "confidence.pfm").string(),
              plane_grid(hint.confidence_p, hint.height, hint.width));
    write_manifest(out_dir, config, "propagate",
                   {{"left", left_path}, {"hints", hints_path}},
                   output_list({"dp.pfm", "confidence.pfm"}), timings);
}

namespace {

PipelineResult run_pipeline_from_paths(const PipelineConfig& config, const std::string& left_path,
                                       const std::string& right_path,
                                       const std::string& hints_path, ImageGrid* left_out) {
    require_inputs({{"left image", &left_path}, {"right image", &right_path}});
    PipelineInputs in;
    in.left = read_image_png(left_path);
    in.right = read_image_png(right_path);
    if (!hints_path.empty()) {
        require_inputs({{"hint map", &hints_path}});
        in.hints = load_hints_as_disparity(hints_path, config.rig);
        in.lidar = read_depth_png(hints_path);
    } else {
        in.hints = SparseHintMap(in.left.height(), in.left.width());
    }
    if (left_out) *left_out = in.left;
    return run_pipeline(in, config);
}

}  // namespace

void match_to_files(const PipelineConfig& config, const std::string& left_path,
                    const std::string& right_path, const std::string& hints_path,
                    const std::string& out_dir) {
    validate_config(config);
    const PipelineResult res =
        run_pipeline_from_paths(config, left_path, right_path, hints_path, nullptr);
    ensure_out_dir(out_dir);
    const fs::path dir(out_dir);
    write_pfm((dir / "disparity.pfm").string(), plane_grid(res.disparity, res.height, res.width));
    write_pfm((dir / "dp.pfm").string(),
              plane_grid(res.hint_quarter.disparity_p, res.hint_quarter.height,
                         res.hint_quarter.width));
    write_pfm((dir / "confidence.pfm").string(),
              plane_grid(res.hint_quarter.confidence_p, res.hint_quarter.height,
                         res.hint_quarter.width));
    std::vector<std::string> outputs = {"disparity.pfm", "dp.pfm", "confidence.pfm"};
    if (config.dump_volume) {
        dump_volumes(out_dir, res.volume_dump);
        for (size_t i = 0; i < res.volume_dump.size(); ++i)
            outputs.push_back("volume_level" + std::to_string(i) + ".pfm");
    }
    write_manifest(out_dir, config, "match",
                   {{"left", left_path}, {"right", right_path}, {"hints", hints_path}},
                   output_list(outputs), res.timings);
}

void depth_to_files(const PipelineConfig& config, const std::string& left_path,
                    const std::string& right_path, const std::string& disparity_path,
                    const std::string& hints_path, const std::string& out_dir) {
    validate_config(config);
    require_inputs({{"left image", &left_path},
                    {"right image", &right_path},
                    {"disparity map", &disparity_path}});
    const ImageGrid left = read_image_png(left_path);
    const ImageGrid right = read_image_png(right_path);
    const ImageGrid disp_grid = read_pfm(disparity_path);
    if (disp_grid.channels() != 1 || disp_grid.height() != left.height() ||
        disp_grid.width() != left.width())
        fail_io("disparity PFM must be single-channel at image resolution");
    const std::vector<float>& disparity = disp_grid.data();
    const int H = left.height(), W = left.width();
    const int threads = effective_threads(config);

    std::vector<StageTiming> timings;
    StageClock clock(timings);
    const ResidualMaps residuals = clock.run("residuals", [&]() -> ResidualMaps {
        if (config.residual_provider == "zero") return ResidualMaps(H, W);
        if (config.residual_provider == "lidar") {
            require_inputs({{"hint map (needed by the lidar residual provider)", &hints_path}});
            const DepthMap lidar = read_depth_png(hints_path);
            LidarResidualConfig rc;
            rc.window = config.prop_window;
            rc.temperature = config.prop_temperature;
            rc.rho = config.cg.rho;
            rc.features = config.features;
            rc.threads = threads;
            return lidar_anchored_residuals(disparity, H, W, config.rig, lidar, left, rc);
        }
        const std::string paths = config.residual_provider.substr(std::string("file:").size());
        const size_t comma = paths.find(',');
        if (comma == std::string::npos)
            fail_config("residuals.provider file form needs 'file:DELTA1.pfm,DELTA2.pfm'");
        return external_residuals(paths.substr(0, comma), paths.substr(comma + 1), H, W);
    });
    const DepthMap depth =
        clock.run("triangulate", [&] { return triangulate(disparity, H, W, config.rig, residuals); });
    const ErrorMap error =
        clock.run("error_map", [&] { return warp_error_map(left, right, disparity); });

    ensure_out_dir(out_dir);
    const fs::path dir(out_dir);
    write_depth_png((dir / "depth.png").string(), depth);
    ImageGrid err = error.error;
    write_pfm((dir / "error_map.pfm").string(), err);
    save_residuals((dir / "delta1.pfm").string(), (dir / "delta2.pfm").string(), residuals);
    write_manifest(out_dir, config, "depth",
                   {{"left", left_path},
                    {"right", right_path},
                    {"disparity", disparity_path},
                    {"hints", hints_path}},
                   output_list({"depth.png", "error_map.pfm", "delta1.pfm", "delta2.pfm"}),
                   timings);
}

std::string run_to_files(const PipelineConfig& config, const std::string& left_path,
                         const std::string& right_path, const std::string& hints_path,
                         const std::string& gt_depth_path, const std::string& out_dir) {
    validate_config(config);
    if (!gt_depth_path.empty()) require_inputs({{"ground-truth depth", &gt_depth_path}});
    const PipelineResult res =
        run_pipeline_from_paths(config, left_path, right_path, hints_path, nullptr);

    ensure_out_dir(out_dir);
    const fs::path dir(out_dir);
    write_pfm((dir / "disparity.pfm").string(), plane_grid(res.disparity, res.height, res.width));
    write_depth_png((dir / "depth.png").string(), res.depth);
    write_pfm((dir / "confidence.pfm").string(),
              plane_grid(res.hint_quarter.confidence_p, res.hint_quarter.height,
                         res.hint_quarter.width));
    write_pfm((dir / "dp.pfm").string(),
              plane_grid(res.hint_quarter.disparity_p, res.hint_quarter.height,
                         res.hint_quarter.width));
    write_pfm((dir / "error_map.pfm").string(), res.error_map.error);
    std::vector<std::string> outputs = {"disparity.pfm", "depth.png", "confidence.pfm", "dp.pfm",
                                        "error_map.pfm"};
    if (config.dump_volume) {
        dump_volumes(out_dir, res.volume_dump);
        for (size_t i = 0; i < res.volume_dump.size(); ++i)
            outputs.push_back("volume_level" + std::to_string(i) + ".pfm");
    }

    std::string report;
    if (!gt_depth_path.empty()) {
        const DepthMap gt = read_depth_png(gt_depth_path);
        DepthMetricsOptions opt;
        opt.penalty_depth_m = penalty_depth(config);
        const auto reports = depth_metrics(res.depth, gt, parse_buckets(config.eval_buckets), opt);
        std::vector<EvalRow> rows;
        for (const auto& r : reports) rows.push_back({"run", r});
        report = render_report(rows, config.eval_format, {});
        std::ofstream rep(dir / "metrics.txt");
        rep << report;
        outputs.push_back("metrics.txt");
    }
    write_manifest(out_dir, config, "run",
                   {{"left", left_path},
                    {"right", right_path},
                    {"hints", hints_path},
                    {"gt", gt_depth_path}},
                   output_list(outputs), res.timings);
    return report;
}

std::string eval_files(const PipelineConfig& config, const std::string& pred_path,
                       const std::string& gt_path) {
    validate_config(config);
    require_inputs({{"prediction", &pred_path}, {"ground truth", &gt_path}});
    const std::vector<DepthBucket> buckets = parse_buckets(config.eval_buckets);
    DepthMetricsOptions opt;
    opt.penalty_depth_m = penalty_depth(config);

    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> pairs;
    if (fs::is_directory(pred_path)) {
        if (!fs::is_directory(gt_path))
            fail_io("prediction is a directory but ground truth is not");
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(pred_path))
            if (entry.path().extension() == ".png") names.push_back(entry.path().filename());
        std::sort(names.begin(), names.end());
        if (names.empty()) fail_io("no .png predictions in '" + pred_path + "'");
        for (const auto& name : names) {
            const std::string gt_file = (fs::path(gt_path) / name).string();
            if (!file_exists(gt_file)) fail_io("missing ground truth for '" + name + "'");
            pairs.push_back({name, {(fs::path(pred_path) / name).string(), gt_file}});
        }
    } else {
        pairs.push_back({fs::path(pred_path).filename().string(), {pred_path, gt_path}});
    }

    std::vector<EvalRow> rows;
    std::vector<std::string> notices;
    std::vector<std::vector<MetricReport>> by_bucket(buckets.size());
    for (const auto& [name, paths] : pairs) {
        const DepthMap pred = read_depth_png(paths.first);
        const DepthMap gt = read_depth_png(paths.second);
        const auto reports = depth_metrics(pred, gt, buckets, opt);
        for (const auto& r : reports) rows.push_back({name, r});
        for (size_t b = 0; b < buckets.size(); ++b) {
            const auto it = std::find_if(reports.begin(), reports.end(), [&](const auto& r) {
                return r.bucket.lo_m == buckets[b].lo_m && r.bucket.hi_m == buckets[b].hi_m;
            });
            if (it != reports.end())
                by_bucket[b].push_back(*it);
            else
                notices.push_back(name + ": bucket " + buckets[b].label() +
                                  " omitted (no overlapping valid pixels)");
        }
    }
    if (pairs.size() > 1) {
        for (size_t b = 0; b < buckets.size(); ++b) {
            if (by_bucket[b].empty()) continue;
            MetricReport all = merge_reports(by_bucket[b]);
            all.bucket = buckets[b];
            rows.push_back({"ALL", all});
        }
    }
    return render_report(rows, config.eval_format, notices);
}

}  // namespace sdgf
