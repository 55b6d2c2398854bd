/* sdg-fuse: stereo-LiDAR depth estimation pipeline.
 *
 * C API of the shared library. All state lives behind the opaque
 * sdgf_context handle; every entry point returns an sdgf_status and a
 * human-readable message is kept per context (sdgf_context_last_error).
 * Strings returned through char** are heap-allocated; release them with
 * sdgf_string_free.
 */

#ifndef SDG_FUSE_H
#define SDG_FUSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SDGF_API __declspec(dllexport)
#elif defined(__GNUC__)
#define SDGF_API __attribute__((visibility("default")))
#else
#define SDGF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdgf_status {
    SDGF_OK = 0,
    SDGF_ERROR_NULL_ARGUMENT = 1,
    SDGF_ERROR_CONFIG = 2,   /* bad key, value or cross-key validation */
    SDGF_ERROR_IO = 3,       /* missing or malformed input/output files */
    SDGF_ERROR_COMPUTE = 4,  /* a pipeline stage failed */
    SDGF_ERROR_INVALID = 5   /* contract violation on in-memory data */
} sdgf_status;

typedef struct sdgf_context sdgf_context;

SDGF_API const char* sdgf_version(void);
SDGF_API const char* sdgf_status_name(sdgf_status status);

/* Context: owns the pipeline configuration and the last error message. */
SDGF_API sdgf_context* sdgf_context_create(void);
SDGF_API void sdgf_context_destroy(sdgf_context* ctx);
SDGF_API const char* sdgf_context_last_error(const sdgf_context* ctx);

/* Configuration. Keys are documented in the reference config
 * (sdgf_reference_config). Precedence: defaults < load_config_file <
 * apply_env_overrides < set_option. */
SDGF_API sdgf_status sdgf_load_config_file(sdgf_context* ctx, const char* path);
SDGF_API sdgf_status sdgf_set_option(sdgf_context* ctx, const char* key, const char* value);
SDGF_API sdgf_status sdgf_get_option(sdgf_context* ctx, const char* key, char** value_out);
SDGF_API sdgf_status sdgf_apply_env_overrides(sdgf_context* ctx);
SDGF_API sdgf_status sdgf_reference_config(char** text_out);

/* Stage entry points. Paths follow the formats in the README: images and
 * depth/hint maps are PNG (depth stored as meters * 256, 0 invalid), float
 * rasters are PFM. hints/gt arguments may be NULL where marked optional. */
SDGF_API sdgf_status sdgf_synth(sdgf_context* ctx, const char* out_dir);
SDGF_API sdgf_status sdgf_propagate(sdgf_context* ctx, const char* left_png,
                                    const char* hints_png, const char* out_dir);
SDGF_API sdgf_status sdgf_match(sdgf_context* ctx, const char* left_png, const char* right_png,
                                const char* hints_png /* optional */, const char* out_dir);
SDGF_API sdgf_status sdgf_depth(sdgf_context* ctx, const char* left_png, const char* right_png,
                                const char* disparity_pfm, const char* hints_png /* optional */,
                                const char* out_dir);
SDGF_API sdgf_status sdgf_eval(sdgf_context* ctx, const char* pred_path, const char* gt_path,
                               char** report_out);
SDGF_API sdgf_status sdgf_run(sdgf_context* ctx, const char* left_png, const char* right_png,
                              const char* hints_png /* optional */,
                              const char* gt_depth_png /* optional */, const char* out_dir,
                              char** report_out /* optional */);

SDGF_API void sdgf_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SDG_FUSE_H */
