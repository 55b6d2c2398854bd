#include "sdg_fuse.h"

#include <cstring>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/pipeline.hpp"

using namespace sdgf;

struct sdgf_context {
    PipelineConfig config;
    std::string last_error;
};

namespace {

sdgf_status status_from(ErrKind kind) {
    switch (kind) {
        case ErrKind::config: return SDGF_ERROR_CONFIG;
        case ErrKind::io: return SDGF_ERROR_IO;
        case ErrKind::compute: return SDGF_ERROR_COMPUTE;
        case ErrKind::invalid_arg: return SDGF_ERROR_INVALID;
    }
    return SDGF_ERROR_COMPUTE;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(::operator new(s.size() + 1, std::nothrow));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
sdgf_status guarded(sdgf_context* ctx, Fn&& fn) {
    if (!ctx) return SDGF_ERROR_NULL_ARGUMENT;
    ctx->last_error.clear();
    try {
        fn();
        return SDGF_OK;
    } catch (const Error& e) {
        ctx->last_error = e.what();
        return status_from(e.kind());
    } catch (const std::exception& e) {
        ctx->last_error = e.what();
        return SDGF_ERROR_COMPUTE;
    }
}

bool require(sdgf_context* ctx, const char* arg, const char* name, sdgf_status* st) {
    if (arg) return true;
    if (ctx) ctx->last_error = std::string(name) + " must not be NULL";
    *st = SDGF_ERROR_NULL_ARGUMENT;
    return false;
}

}  // namespace

extern "C" {

const char* sdgf_version(void) { return kVersion; }

const char* sdgf_status_name(sdgf_status status) {
    switch (status) {
        case SDGF_OK: return "ok";
        case SDGF_ERROR_NULL_ARGUMENT: return "null-argument";
        case SDGF_ERROR_CONFIG: return "config-error";
        case SDGF_ERROR_IO: return "io-error";
        case SDGF_ERROR_COMPUTE: return "compute-error";
        case SDGF_ERROR_INVALID: return "invalid-data";
    }
    return "unknown";
}

sdgf_context* sdgf_context_create(void) {
    try {
        return new sdgf_context();
    } catch (...) {
        return nullptr;
    }
}

void sdgf_context_destroy(sdgf_context* ctx) { delete ctx; }

const char* sdgf_context_last_error(const sdgf_context* ctx) {
    return ctx ? ctx->last_error.c_str() : "null context";
}

sdgf_status sdgf_load_config_file(sdgf_context* ctx, const char* path) {
    sdgf_status st = SDGF_OK;
    if (!require(ctx, path, "path", &st)) return st;
    return guarded(ctx, [&] { ctx->config = parse_config_file(path); });
}

sdgf_status sdgf_set_option(sdgf_context* ctx, const char* key, const char* value) {
    sdgf_status st = SDGF_OK;
    if (!require(ctx, key, "key", &st) || !require(ctx, value, "value", &st)) return st;
    return guarded(ctx, [&] { config_set(ctx->config, key, value); });
}

sdgf_status sdgf_get_option(sdgf_context* ctx, const char* key, char** value_out) {
    sdgf_status st = SDGF_OK;
    if (!require(ctx, key, "key", &st) ||
        !require(ctx, reinterpret_cast<const char*>(value_out), "value_out", &st))
        return st;
    return guarded(ctx, [&] {
        *value_out = dup_string(config_get(ctx->config, key));
        if (!*value_out) fail_compute("out of memory");
    });
}

sdgf_status sdgf_apply_env_overrides(sdgf_context* ctx) {
    return guarded(ctx, [&] { apply_env_overrides(ctx->config); });
}

sdgf_status sdgf_reference_config(char** text_out) {
    if (!text_out) return SDGF_ERROR_NULL_ARGUMENT;
    *text_out = dup_string(reference_config_text());
    return *text_out ? SDGF_OK : SDGF_ERROR_COMPUTE;
}

sdgf_status sdgf_synth(sdgf_context* ctx, const char* out_dir) {
    sdgf_status st = SDGF_OK;
    if (!require(ctx, out_dir, "out_dir", &st)) return st;
    return guarded(ctx, [&] { synth_to_files(ctx->config, out_dir); });
}

sdgf_status sdgf_propagate(sdgf_context* ctx, const char* left_png, const char* hints_png,
                           const char* out_dir) {
    sdgf_status st = SDGF_OK;
    if (!require(ctx, left_png, "left_png", &st) || !require(ctx, hints_png, "hints_png", &st) ||
        !require(ctx, out_dir, "out_dir", &st))
        return st;
    return guarded(ctx, [&] { propagate_to_files(ctx->config, left_png, hints_png, out_dir); });
}

sdgf_status sdgf_match(sdgf_context* ctx, const char* left_png, const char* right_png,
                       const char* hints_png, const char* out_dir) {
    sdgf_status st = SDGF_OK;
    if (!require(ctx, left_png, "left_png", &st) || !require(ctx, right_png, "right_png", &st) ||
        !require(ctx, out_dir, "out_dir", &st))
        return st;
    return guarded(ctx, [&] {
        match_to_files(ctx->config, left_png, right_png, hints_png ? hints_png : "", out_dir);
    });
}

sdgf_status sdgf_depth(sdgf_context* ctx, const char* left_png, const char* right_png,
                       const char* disparity_pfm, const char* hints_png, const char* out_dir) {
    sdgf_status st = SDGF_OK;
    if (!require(ctx, left_png, "left_png", &st) || !require(ctx, right_png, "right_png", &st) ||
        !require(ctx, disparity_pfm, "disparity_pfm", &st) ||
        !require(ctx, out_dir, "out_dir", &st))
        return st;
    return guarded(ctx, [&] {
        depth_to_files(ctx->config, left_png, right_png, disparity_pfm,
                       hints_png ? hints_png : "", out_dir);
    });
}

sdgf_status sdgf_eval(sdgf_context* ctx, const char* pred_path, const char* gt_path,
                      char** report_out) {
    sdgf_status st = SDGF_OK;
    if (!require(ctx, pred_path, "pred_path", &st) || !require(ctx, gt_path, "gt_path", &st) ||
        !require(ctx, reinterpret_cast<const char*>(report_out), "report_out", &st))
        return st;
    return guarded(ctx, [&] {
        *report_out = dup_string(eval_files(ctx->config, pred_path, gt_path));
        if (!*report_out) fail_compute("out of memory");
    });
}

sdgf_status sdgf_run(sdgf_context* ctx, const char* left_png, const char* right_png,
                     const char* hints_png, const char* gt_depth_png, const char* out_dir,
                     char** report_out) {
    sdgf_status st = SDGF_OK;
    if (!require(ctx, left_png, "left_png", &st) || !require(ctx, right_png, "right_png", &st) ||
        !require(ctx, out_dir, "out_dir", &st))
        return st;
    return guarded(ctx, [&] {
        const std::string report =
            run_to_files(ctx->config, left_png, right_png, hints_png ? hints_png : "",
                         gt_depth_png ? gt_depth_png : "", out_dir);
        if (report_out) {
            *report_out = dup_string(report);
            if (!*report_out) fail_compute("out of memory");
        }
    });
}

void sdgf_string_free(char* s) { ::operator delete(s); }

}  // extern "C"
