// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Each check pins its tolerance in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/aggregation.hpp"
#include "core/config.hpp"
#include "core/cost_volume.hpp"
#include "core/depth_conversion.hpp"
#include "core/image_io.hpp"
#include "core/metrics.hpp"
#include "core/pipeline.hpp"
#include "core/propagation.hpp"
#include "core/rng.hpp"
#include "core/synth.hpp"
#include "oracles.hpp"

using namespace sdgf;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ImageGrid random_image(int h, int w, uint64_t seed) {
    ImageGrid g(h, w, 1);
    Rng rng(seed);
    for (float& v : g.data()) v = static_cast<float>(rng.uniform());
    return g;
}

SparseHintMap random_hints(int h, int w, double density, uint64_t seed) {
    SparseHintMap hints(h, w);
    Rng rng(seed);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (rng.bernoulli(density)) hints.set(x, y, static_cast<float>(rng.uniform(0.0, 30.0)));
    return hints;
}

// depth RMSE in mm over non-occluded pixels
double scene_rmse_mm(const DepthMap& pred, const Scene& scene) {
    DepthMap gt = scene.gt_depth;
    for (size_t i = 0; i < gt.valid.size(); ++i)
        if (!scene.non_occluded[i]) gt.valid[i] = 0;
    const auto reports = depth_metrics(pred, gt, {{0.0, 1000.0}});
    return reports.empty() ? 0.0 : reports[0].rmse_mm;
}

PipelineInputs scene_inputs(const Scene& scene, bool with_hints) {
    PipelineInputs in;
    in.left = scene.left;
    in.right = scene.right;
    in.hints = with_hints ? scene.hints : SparseHintMap(scene.left.height(), scene.left.width());
    return in;
}

// ---- criterion 1: optimized Eqs. 2-4 equal the naive triple-loop oracle ----
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    double max_diff = 0.0;
    int cases = 0;
    for (int P : {3, 5, 9}) {
        for (int trial = 0; trial < 7; ++trial) {
            const uint64_t seed = 1000 + 17 * P + trial;
            const ImageGrid img = random_image(16, 16, seed);
            const FeatureMap features = extract_features(img, {});
            OffsetField offsets = zero_offset_field(16, 16, P);
            Rng rng(seed ^ 0xabcdULL);
            for (float& v : offsets.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
            const SparseHintMap hints = random_hints(16, 16, 0.25, seed ^ 0x77ULL);

            const PropagationWeights weights = propagation_weights(features, offsets, 2, 1.0);
            const SemiDenseHint result = propagate(hints, weights, offsets, 2);

            std::vector<float> mask(hints.valid.begin(), hints.valid.end());
            const auto naive =
                oracle::naive_propagation(features, offsets.data, hints.disparity, mask, P, 2, 1.0);
            for (size_t i = 0; i < result.disparity_p.size(); ++i) {
                max_diff = std::max(max_diff,
                                    std::abs(result.disparity_p[i] - naive.dp[i]));
                max_diff = std::max(max_diff,
                                    std::abs(result.confidence_p[i] - naive.cp[i]));
            }
            for (size_t i = 0; i < weights.data.size(); ++i)
                max_diff = std::max(
                    max_diff, std::abs(static_cast<double>(weights.data[i]) - naive.weights[i]));
            ++cases;
        }
    }
    const double elapsed = seconds_since(t0);
    char detail[160];
    std::snprintf(detail, sizeof(detail), "%d cases, max abs diff %.2e < 1e-5, %.2f s < 10 s",
                  cases, max_diff, elapsed);
    report(1, "propagation oracle equivalence", cases >= 20 && max_diff < 1e-5 && elapsed < 10.0,
           detail);
}

// ---- criterion 2: weight normalization and confidence invariants ----
void criterion_2() {
    size_t pixels = 0, violations = 0;
    for (int trial = 0; trial < 7; ++trial) {
        const int h = 40, w = 40, P = 5;
        const uint64_t seed = 2000 + trial;
        const FeatureMap features = extract_features(random_image(h, w, seed), {});
        OffsetField offsets = zero_offset_field(h, w, P);
        Rng rng(seed ^ 0x5555ULL);
        for (float& v : offsets.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
        const SparseHintMap hints = random_hints(h, w, 0.3, seed ^ 0x9999ULL);
        const PropagationWeights weights = propagation_weights(features, offsets, 2, 1.0);
        const SemiDenseHint out = propagate(hints, weights, offsets, 2);

        float max_disp = 0.f;
        for (size_t i = 0; i < hints.valid.size(); ++i)
            if (hints.valid[i]) max_disp = std::max(max_disp, hints.disparity[i]);

        const int n = P * P;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                ++pixels;
                const float* wp = weights.data.data() + weights.base(x, y);
                double sum = 0.0;
                bool bad = false;
                for (int i = 0; i < n; ++i) {
                    if (wp[i] < 0.f) bad = true;
                    sum += wp[i];
                }
                if (std::abs(sum - 1.0) > 1e-5) bad = true;
                const float cp = out.confidence_p[out.index(x, y)];
                const float dp = out.disparity_p[out.index(x, y)];
                if (cp < 0.f || cp > 1.f) bad = true;
                if (dp < 0.f || dp > cp * max_disp + 1e-5f) bad = true;
                if (bad) ++violations;
            }
    }
    char detail[160];
    std::snprintf(detail, sizeof(detail), "%zu pixels, %zu violations", pixels, violations);
    report(2, "weight/confidence invariants", pixels >= 10000 && violations == 0, detail);
}

// ---- criterion 3: CG identity, peak placement and the Eq.-6 hand value ----
void criterion_3() {
    bool identity_ok = true;
    {
        CostVolume cv(8, 8, 24);
        Rng rng(3001);
        for (float& v : cv.cost) v = static_cast<float>(rng.uniform(0.0, 2.0));
        const CostVolume before = cv;
        SemiDenseHint empty;
        empty.height = 8;
        empty.width = 8;
        empty.disparity_p.assign(64, 0.f);
        empty.confidence_p.assign(64, 0.f);  // no hints anywhere
        gaussian_modulate(cv, empty, ModulationParams{}, 2.f);
        identity_ok = cv.cost == before.cost;
    }

    int peak_hits = 0, peak_total = 0;
    {
        Rng rng(3002);
        for (int trial = 0; trial < 200; ++trial) {
            CostVolume cv(1, 1, 48);
            for (float& v : cv.cost) v = 1.f;  // flat pre-modulation volume
            const float dp = static_cast<float>(rng.uniform(0.2, 46.7));
            SemiDenseHint hint;
            hint.height = hint.width = 1;
            hint.disparity_p = {dp};
            hint.confidence_p = {1.f};
            gaussian_modulate(cv, hint, ModulationParams{}, 2.f);
            int best = 0;
            for (int d = 1; d < 48; ++d)
                if (cv.cost[d] < cv.cost[best]) best = d;
            ++peak_total;
            if (best == static_cast<int>(std::lround(dp))) ++peak_hits;
        }
    }

    const double f8 = modulation_weight(1.f, 8.0, 0.0, ModulationParams{});
    const double expected = 2.0 * std::exp(-0.5);
    const double f_err = std::abs(f8 - expected);

    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "identity %s, peak at round(D_p) %d/%d, |f - 2e^-0.5| = %.1e < 1e-9",
                  identity_ok ? "bitwise" : "BROKEN", peak_hits, peak_total, f_err);
    report(3, "CG identity and peak", identity_ok && peak_hits == peak_total && f_err < 1e-9,
           detail);
}

// ---- criterion 4: end-to-end accuracy on textured planes ----
void criterion_4() {
    PipelineConfig cfg;
    cfg.threads = 1;
    cfg.synth.height = 384;
    cfg.synth.width = 512;
    cfg.synth.z_m = 10.0;
    cfg.synth.hint_density = 0.05;

    const auto t0 = std::chrono::steady_clock::now();

    // fronto-parallel plane
    SceneSpec fronto = cfg.synth;
    fronto.rig = cfg.rig;
    fronto.texture_seed = 41;
    const Scene scene_f = render_scene(fronto);
    const PipelineResult res_f = run_pipeline(scene_inputs(scene_f, true), cfg);

    size_t good = 0, total = 0;
    for (size_t i = 0; i < res_f.disparity.size(); ++i) {
        if (!scene_f.non_occluded[i]) continue;
        ++total;
        if (std::abs(res_f.disparity[i] - scene_f.gt_disparity[i]) <= 1.f) ++good;
    }
    const double fronto_frac = static_cast<double>(good) / static_cast<double>(total);
    const double fronto_rmse = scene_rmse_mm(res_f.depth, scene_f);

    // slanted plane
    SceneSpec slanted = fronto;
    slanted.layout = SceneLayout::slanted_plane;
    slanted.z0_m = 10.0;
    slanted.slope = 0.05;
    slanted.texture_seed = 43;
    const Scene scene_s = render_scene(slanted);
    const PipelineResult res_s = run_pipeline(scene_inputs(scene_s, true), cfg);
    size_t good_s = 0, total_s = 0;
    for (size_t i = 0; i < res_s.disparity.size(); ++i) {
        if (!scene_s.non_occluded[i]) continue;
        ++total_s;
        if (std::abs(res_s.disparity[i] - scene_s.gt_disparity[i]) <= 1.f) ++good_s;
    }
    const double slanted_frac = static_cast<double>(good_s) / static_cast<double>(total_s);
    const double elapsed = seconds_since(t0);

    char detail[240];
    std::snprintf(detail, sizeof(detail),
                  "fronto %.2f%% <=1px (need 99), RMSE %.1f mm (need <300); slanted %.2f%% "
                  "(need 97); %.1f s single-threaded (need <30)",
                  100.0 * fronto_frac, fronto_rmse, 100.0 * slanted_frac, elapsed);
    report(4, "end-to-end synthetic accuracy",
           fronto_frac >= 0.99 && fronto_rmse < 300.0 && slanted_frac >= 0.97 && elapsed < 30.0,
           detail);
}

// ---- criterion 5: hints must cut two_box RMSE to <= 0.8x of the blind run ----
void criterion_5() {
    PipelineConfig with;
    with.threads = 1;
    with.synth.layout = SceneLayout::two_box;
    with.synth.height = 256;
    with.synth.width = 384;
    with.synth.z_near_m = 8.0;
    with.synth.z_far_m = 30.0;
    with.synth.hint_density = 0.05;

    PipelineConfig without = with;
    without.volume.hint_weight = 0.f;
    without.cg_enabled = false;
    without.residual_provider = "zero";

    double sum_with = 0.0, sum_without = 0.0;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        SceneSpec spec = with.synth;
        spec.rig = with.rig;
        spec.texture_seed = 500 + seed;
        const Scene scene = render_scene(spec);
        const PipelineResult rw = run_pipeline(scene_inputs(scene, true), with);
        const PipelineResult ro = run_pipeline(scene_inputs(scene, false), without);
        sum_with += scene_rmse_mm(rw.depth, scene);
        sum_without += scene_rmse_mm(ro.depth, scene);
    }
    const double mean_with = sum_with / 10.0, mean_without = sum_without / 10.0;
    const double ratio = mean_with / mean_without;
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "mean RMSE with hints %.1f mm, without %.1f mm, ratio %.3f (need <= 0.8)",
                  mean_with, mean_without, ratio);
    report(5, "hint benefit on the occlusion scene", ratio <= 0.8, detail);
}

// ---- criterion 6: quadratic triangulation error law ----
void criterion_6() {
    const CameraRig rig{0.54, 721.0};
    const double e_d = 0.25;
    auto depth_error = [&](double z) {
        const double d = rig.bf() / z;
        const std::vector<float> biased = {static_cast<float>(d + e_d)};
        const DepthMap out = triangulate(biased, 1, 1, rig, ResidualMaps(1, 1));
        return std::abs(z - static_cast<double>(out.depth[0]));
    };
    const double ratio = depth_error(40.0) / depth_error(20.0);
    char detail[120];
    std::snprintf(detail, sizeof(detail), "error(40m)/error(20m) = %.4f (need 4 +- 5%%)", ratio);
    report(6, "quadratic triangulation law", std::abs(ratio - 4.0) <= 0.2, detail);
}

// ---- criterion 7: lidar-anchored delta2 halves the bias-induced RMSE ----
void criterion_7() {
    SceneSpec spec;
    spec.layout = SceneLayout::fronto_plane;
    spec.z_m = 10.0;
    spec.height = 256;
    spec.width = 384;
    spec.hint_density = 0.05;
    spec.texture_seed = 7001;
    const Scene scene = render_scene(spec);
    const int H = spec.height, W = spec.width;

    std::vector<float> biased(scene.gt_disparity);
    for (float& d : biased) d += 0.5f;

    const DepthMap plain = triangulate(biased, H, W, spec.rig, ResidualMaps(H, W));
    const double rmse_zero = scene_rmse_mm(plain, scene);

    LidarResidualConfig rc;
    const ResidualMaps res = lidar_anchored_residuals(
        biased, H, W, spec.rig, hints_to_depth(scene.hints, spec.rig), scene.left, rc);
    const DepthMap corrected = triangulate(biased, H, W, spec.rig, res);
    const double rmse_lidar = scene_rmse_mm(corrected, scene);

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "RMSE zero-residual %.1f mm, lidar-anchored %.1f mm, reduction %.1f%% (need >= 50)",
                  rmse_zero, rmse_lidar, 100.0 * (1.0 - rmse_lidar / rmse_zero), 0);
    report(7, "DDC residual benefit", rmse_lidar <= 0.5 * rmse_zero, detail);
}

// ---- criterion 8: metric hand values and bucket recombination ----
void criterion_8() {
    bool ok = true;
    std::string why = "hand cases exact";

    {
        DepthMap pred(1, 1), gt(1, 1);
        pred.depth[0] = 2.f;
        pred.valid[0] = 1;
        gt.depth[0] = 1.f;
        gt.valid[0] = 1;
        const auto r = depth_metrics(pred, gt, {{0.0, 1000.0}});
        if (r.size() != 1 || std::abs(r[0].mae_mm - 1000.0) > 1e-9 ||
            std::abs(r[0].rmse_mm - 1000.0) > 1e-9 || std::abs(r[0].imae_per_km - 500.0) > 1e-9 ||
            std::abs(r[0].irmse_per_km - 500.0) > 1e-9) {
            ok = false;
            why = "pred 2 m vs gt 1 m hand case broken";
        }
    }
    {
        // D1 double threshold: 4 px on gt 100 is fine, 4 px on gt 20 is an outlier
        const DisparityMetrics a = disparity_metrics({104.f}, {100.f}, {1});
        const DisparityMetrics b = disparity_metrics({24.f}, {20.f}, {1});
        const DisparityMetrics c = disparity_metrics({22.f}, {20.f}, {1});  // 2 px: under 3 px
        if (a.d1_pct != 0.0 || std::abs(b.d1_pct - 100.0) > 1e-9 || c.d1_pct != 0.0 ||
            std::abs(a.epe_px - 4.0) > 1e-9) {
            ok = false;
            why = "D1 double-threshold hand cases broken";
        }
    }
    {
        Rng rng(8001);
        const int n = 10000;
        DepthMap pred(100, 100), gt(100, 100);
        for (int i = 0; i < n; ++i) {
            gt.depth[i] = static_cast<float>(rng.uniform(0.5, 99.9));
            gt.valid[i] = 1;
            pred.depth[i] = std::max(0.05f, gt.depth[i] + static_cast<float>(rng.normal(0, 0.4)));
            pred.valid[i] = 1;
        }
        const auto parts = depth_metrics(pred, gt, {{0.0, 20.0}, {20.0, 100.0}});
        const auto global = depth_metrics(pred, gt, {{0.0, 100.0}});
        double sq = 0.0;
        size_t count = 0;
        for (const auto& r : parts) {
            sq += r.rmse_mm * r.rmse_mm * static_cast<double>(r.valid_count);
            count += r.valid_count;
        }
        const double recombined = std::sqrt(sq / static_cast<double>(count));
        if (count != global[0].valid_count ||
            std::abs(recombined - global[0].rmse_mm) > 1e-9 * std::max(1.0, global[0].rmse_mm)) {
            ok = false;
            why = "bucket recombination identity broken";
        }
    }
    report(8, "metric correctness", ok, why);
}

// ---- criterion 9: byte-identical outputs for 1, 2 and 8 worker threads ----
void criterion_9() {
    PipelineConfig cfg;
    cfg.seed = 99;
    cfg.synth.height = 192;
    cfg.synth.width = 256;
    cfg.synth.z_m = 12.0;
    cfg.volume.d_max = 128;

    const fs::path base = fs::temp_directory_path() / "sdgf_acceptance" / "determinism";
    fs::remove_all(base);
    const std::string scene_dir = (base / "scene").string();
    synth_to_files(cfg, scene_dir);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::vector<char>{std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>()};
    };

    const std::vector<std::string> artifacts = {"disparity.pfm", "depth.png", "confidence.pfm",
                                                "dp.pfm", "error_map.pfm"};
    bool identical = true;
    std::vector<std::vector<char>> reference;
    for (int threads : {1, 2, 8}) {
        cfg.threads = threads;
        const std::string out = (base / ("run_t" + std::to_string(threads))).string();
        run_to_files(cfg, scene_dir + "/left.png", scene_dir + "/right.png",
                     scene_dir + "/hints.png", "", out);
        if (threads == 1) {
            for (const auto& name : artifacts) reference.push_back(slurp(fs::path(out) / name));
        } else {
            for (size_t i = 0; i < artifacts.size(); ++i)
                if (slurp(fs::path(out) / artifacts[i]) != reference[i]) identical = false;
        }
    }
    report(9, "thread-count determinism",
           identical, identical ? "1/2/8 worker outputs byte-identical" : "outputs diverge");
}

}  // namespace

int main() {
    std::printf("sdg-fuse acceptance suite\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures == 0)
        std::printf("all 9 criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
