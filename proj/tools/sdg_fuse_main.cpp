// sdg-fuse command line front end. Everything goes through the C API of
// libsdgfuse; this binary only parses flags and forwards paths/options.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdg_fuse.h"

namespace {

struct ContextDeleter {
    void operator()(sdgf_context* ctx) const { sdgf_context_destroy(ctx); }
};
using ContextPtr = std::unique_ptr<sdgf_context, ContextDeleter>;

struct StringDeleter {
    void operator()(char* s) const { sdgf_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

int fail(sdgf_context* ctx, sdgf_status st) {
    std::fprintf(stderr, "sdg-fuse: %s: %s\n", sdgf_status_name(st),
                 sdgf_context_last_error(ctx));
    return static_cast<int>(st);
}

#define CHECK(call)                                  \
    do {                                             \
        const sdgf_status st_ = (call);              \
        if (st_ != SDGF_OK) return fail(ctx, st_);   \
    } while (0)

struct CommonArgs {
    std::string config_path;
    std::string threads;
    std::string seed;
    bool dump_volume = false;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out = true) {
    cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
    cmd->add_option("--threads", args.threads, "worker threads (0 = hardware concurrency)");
    cmd->add_option("--seed", args.seed, "RNG seed");
    cmd->add_flag("--dump-volume", args.dump_volume, "write aggregated cost volumes as PFM stacks");
    if (with_out) cmd->add_option("--out", args.out_dir, "output directory")->required();
}

int apply_common(sdgf_context* ctx, const CommonArgs& args) {
    if (!args.config_path.empty())
        CHECK(sdgf_load_config_file(ctx, args.config_path.c_str()));
    CHECK(sdgf_apply_env_overrides(ctx));
    if (!args.threads.empty()) CHECK(sdgf_set_option(ctx, "threads", args.threads.c_str()));
    if (!args.seed.empty()) CHECK(sdgf_set_option(ctx, "seed", args.seed.c_str()));
    if (args.dump_volume) CHECK(sdgf_set_option(ctx, "debug.dump_volume", "true"));
    return 0;
}

int apply_rig(sdgf_context* ctx, const std::string& rig) {
    if (rig.empty()) return 0;
    const size_t comma = rig.find(',');
    if (comma == std::string::npos) {
        std::fprintf(stderr, "sdg-fuse: --rig expects BASELINE_M,FOCAL_PX\n");
        return static_cast<int>(SDGF_ERROR_CONFIG);
    }
    CHECK(sdgf_set_option(ctx, "rig.baseline_m", rig.substr(0, comma).c_str()));
    CHECK(sdgf_set_option(ctx, "rig.focal_px", rig.substr(comma + 1).c_str()));
    return 0;
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sdg-fuse: stereo-LiDAR depth estimation pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sdgf_version()));

    ContextPtr context(sdgf_context_create());
    sdgf_context* ctx = context.get();
    if (!ctx) {
        std::fprintf(stderr, "sdg-fuse: cannot allocate context\n");
        return 1;
    }

    // synth
    CommonArgs synth_common;
    std::string layout, size_arg, rig_arg;
    std::vector<std::pair<std::string, std::string>> synth_opts;  // key -> flag value
    auto* synth = app.add_subcommand("synth", "render a synthetic stereo + LiDAR scene");
    add_common(synth, synth_common);
    synth->add_option("--layout", layout, "fronto_plane | slanted_plane | two_box");
    synth->add_option("--size", size_arg, "scene size as WxH, e.g. 512x384");
    synth->add_option("--rig", rig_arg, "baseline_m,focal_px");
    static std::string z, z0, slope, z_near, z_far, density, noise;
    synth->add_option("--z", z, "fronto plane depth (m)");
    synth->add_option("--z0", z0, "slanted plane center depth (m)");
    synth->add_option("--slope", slope, "slanted plane disparity slope (px/px)");
    synth->add_option("--z-near", z_near, "two_box foreground depth (m)");
    synth->add_option("--z-far", z_far, "two_box background depth (m)");
    synth->add_option("--density", density, "hint density in (0,1]");
    synth->add_option("--noise", noise, "hint disparity noise stddev (px)");

    // propagate
    CommonArgs prop_common;
    std::string p_left, p_hints;
    auto* propagate = app.add_subcommand("propagate", "expand sparse hints to a semi-dense map");
    add_common(propagate, prop_common);
    propagate->add_option("--left", p_left, "left image PNG")->required();
    propagate->add_option("--lidar", p_hints, "hint depth PNG (meters * 256)")->required();

    // match
    CommonArgs match_common;
    std::string m_left, m_right, m_hints, m_rig;
    auto* match = app.add_subcommand("match", "stereo matching to a full-resolution disparity map");
    add_common(match, match_common);
    match->add_option("--left", m_left, "left image PNG")->required();
    match->add_option("--right", m_right, "right image PNG")->required();
    match->add_option("--lidar", m_hints, "hint depth PNG (optional)");
    match->add_option("--rig", m_rig, "baseline_m,focal_px");

    // depth
    CommonArgs depth_common;
    std::string d_left, d_right, d_disp, d_hints, d_rig, d_residuals;
    auto* depth = app.add_subcommand("depth", "disparity to metric depth with residuals");
    add_common(depth, depth_common);
    depth->add_option("--left", d_left, "left image PNG")->required();
    depth->add_option("--right", d_right, "right image PNG")->required();
    depth->add_option("--disparity", d_disp, "disparity PFM from match")->required();
    depth->add_option("--lidar", d_hints, "hint depth PNG (needed for --residuals lidar)");
    depth->add_option("--rig", d_rig, "baseline_m,focal_px");
    depth->add_option("--residuals", d_residuals, "zero | lidar | file:D1.pfm,D2.pfm");

    // eval
    CommonArgs eval_common;
    std::string e_pred, e_gt, e_buckets, e_format;
    auto* eval = app.add_subcommand("eval", "depth metrics against ground truth");
    add_common(eval, eval_common, /*with_out=*/false);
    eval->add_option("--pred", e_pred, "prediction depth PNG or directory")->required();
    eval->add_option("--gt", e_gt, "ground-truth depth PNG or directory")->required();
    eval->add_option("--buckets", e_buckets, "depth buckets, e.g. 0-20,20-100");
    eval->add_option("--format", e_format, "table | csv | json-lines");

    // run
    CommonArgs run_common;
    std::string r_left, r_right, r_hints, r_gt, r_rig, r_residuals;
    auto* run = app.add_subcommand("run", "full pipeline: propagate, match, depth, optional eval");
    add_common(run, run_common);
    run->add_option("--left", r_left, "left image PNG")->required();
    run->add_option("--right", r_right, "right image PNG")->required();
    run->add_option("--lidar", r_hints, "hint depth PNG (optional)");
    run->add_option("--gt", r_gt, "ground-truth depth PNG (optional, enables metrics)");
    run->add_option("--rig", r_rig, "baseline_m,focal_px");
    run->add_option("--residuals", r_residuals, "zero | lidar | file:D1.pfm,D2.pfm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(SDGF_ERROR_CONFIG);
    }

    if (synth->parsed()) {
        if (int rc = apply_common(ctx, synth_common)) return rc;
        if (int rc = apply_rig(ctx, rig_arg)) return rc;
        if (!layout.empty()) CHECK(sdgf_set_option(ctx, "synth.layout", layout.c_str()));
        if (!size_arg.empty()) {
            const size_t x = size_arg.find('x');
            if (x == std::string::npos) {
                std::fprintf(stderr, "sdg-fuse: --size expects WxH\n");
                return static_cast<int>(SDGF_ERROR_CONFIG);
            }
            CHECK(sdgf_set_option(ctx, "synth.width", size_arg.substr(0, x).c_str()));
            CHECK(sdgf_set_option(ctx, "synth.height", size_arg.substr(x + 1).c_str()));
        }
        const std::pair<const char*, std::string*> scene_opts[] = {
            {"synth.z", &z},           {"synth.z0", &z0},
            {"synth.slope", &slope},   {"synth.z_near", &z_near},
            {"synth.z_far", &z_far},   {"synth.hint_density", &density},
            {"synth.hint_noise_px", &noise}};
        for (const auto& [key, value] : scene_opts)
            if (!value->empty()) CHECK(sdgf_set_option(ctx, key, value->c_str()));
        CHECK(sdgf_synth(ctx, synth_common.out_dir.c_str()));
        std::printf("scene written to %s\n", synth_common.out_dir.c_str());
        return 0;
    }

    if (propagate->parsed()) {
        if (int rc = apply_common(ctx, prop_common)) return rc;
        CHECK(sdgf_propagate(ctx, p_left.c_str(), p_hints.c_str(), prop_common.out_dir.c_str()));
        std::printf("semi-dense hints written to %s\n", prop_common.out_dir.c_str());
        return 0;
    }

    if (match->parsed()) {
        if (int rc = apply_common(ctx, match_common)) return rc;
        if (int rc = apply_rig(ctx, m_rig)) return rc;
        CHECK(sdgf_match(ctx, m_left.c_str(), m_right.c_str(), opt(m_hints),
                         match_common.out_dir.c_str()));
        std::printf("disparity written to %s\n", match_common.out_dir.c_str());
        return 0;
    }

    if (depth->parsed()) {
        if (int rc = apply_common(ctx, depth_common)) return rc;
        if (int rc = apply_rig(ctx, d_rig)) return rc;
        if (!d_residuals.empty())
            CHECK(sdgf_set_option(ctx, "residuals.provider", d_residuals.c_str()));
        CHECK(sdgf_depth(ctx, d_left.c_str(), d_right.c_str(), d_disp.c_str(), opt(d_hints),
                         depth_common.out_dir.c_str()));
        std::printf("depth written to %s\n", depth_common.out_dir.c_str());
        return 0;
    }

    if (eval->parsed()) {
        if (int rc = apply_common(ctx, eval_common)) return rc;
        if (!e_buckets.empty()) CHECK(sdgf_set_option(ctx, "eval.buckets", e_buckets.c_str()));
        if (!e_format.empty()) CHECK(sdgf_set_option(ctx, "eval.format", e_format.c_str()));
        char* report = nullptr;
        CHECK(sdgf_eval(ctx, e_pred.c_str(), e_gt.c_str(), &report));
        CString holder(report);
        std::fputs(report, stdout);
        return 0;
    }

    if (run->parsed()) {
        if (int rc = apply_common(ctx, run_common)) return rc;
        if (int rc = apply_rig(ctx, r_rig)) return rc;
        if (!r_residuals.empty())
            CHECK(sdgf_set_option(ctx, "residuals.provider", r_residuals.c_str()));
        char* report = nullptr;
        CHECK(sdgf_run(ctx, r_left.c_str(), r_right.c_str(), opt(r_hints), opt(r_gt),
                       run_common.out_dir.c_str(), &report));
        CString holder(report);
        if (report && report[0]) std::fputs(report, stdout);
        std::printf("pipeline outputs written to %s\n", run_common.out_dir.c_str());
        return 0;
    }

    return 0;
}
