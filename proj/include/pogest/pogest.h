#ifndef POGEST_H
#define POGEST_H

/*
 * C interface to the point-of-gaze estimation workbench.
 *
 * Every function returns a pogest_status; on failure a human-readable
 * message is available from pogest_last_error() until the next call on the
 * same thread. Handles are opaque and must be released with their matching
 * close function.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define POGEST_API __declspec(dllexport)
#else
#define POGEST_API __attribute__((visibility("default")))
#endif

typedef enum pogest_status {
    POGEST_OK = 0,
    POGEST_E_USAGE = 1,      /* bad arguments to the API itself */
    POGEST_E_VALIDATION = 2, /* invalid config, manifest or data */
    POGEST_E_RUNTIME = 3     /* I/O or computation failure */
} pogest_status;

POGEST_API const char* pogest_version(void);

/* Message for the most recent failure on this thread. */
POGEST_API const char* pogest_last_error(void);

/* ------------------------------------------------------------------ */
/* Pipeline commands; artifacts land under the given output directory. */

POGEST_API pogest_status pogest_generate(const char* world_config_path, const char* out_dir);

/* Same, overriding the config's rng_seed. */
POGEST_API pogest_status pogest_generate_seeded(const char* world_config_path, uint64_t rng_seed,
                                                const char* out_dir);

POGEST_API pogest_status pogest_train(const char* manifest_path, const char* train_config_path,
                                      const char* out_dir, const char* resume_checkpoint_or_null);

/* deg_per_px <= 0 leaves the eye-angle column out of the report. */
POGEST_API pogest_status pogest_eval(const char* manifest_path, const char* checkpoint_path,
                                     const char* report_dir, double deg_per_px);

POGEST_API pogest_status pogest_baseline(const char* manifest_path, const char* report_dir);

POGEST_API pogest_status pogest_loso(const char* manifest_path, const char* train_config_path,
                                     const char* out_dir);

/* max_lag <= 0 selects the default +/- 60 s search window.
 * out_json_or_null optionally writes the result as JSON. */
POGEST_API pogest_status pogest_align_sync(const char* wav_a_path, const char* wav_b_path,
                                           long max_lag, const char* out_json_or_null,
                                           long* out_shift_samples, double* out_confidence,
                                           int* out_low_confidence);

POGEST_API pogest_status pogest_align_transfer(const char* pairs_path, const char* points_path,
                                               const char* out_path, int iters, double inlier_px,
                                               uint64_t rng_seed, int* out_inlier_count);

POGEST_API pogest_status pogest_stats(const char* manifest_path, const char* classes_path,
                                      const char* report_dir);

POGEST_API pogest_status pogest_plot(const char* input_path, const char* out_dir);

/* ------------------------------------------------------------------ */
/* Model handle: load a checkpoint once, predict per image pair.       */

typedef struct pogest_model pogest_model;

POGEST_API pogest_status pogest_model_open(const char* checkpoint_path, pogest_model** out_model);
POGEST_API void pogest_model_close(pogest_model* model);

POGEST_API pogest_status pogest_model_input_side(const pogest_model* model, int* out_side);
POGEST_API pogest_status pogest_model_embedding_dim(const pogest_model* model, int* out_dim);

/*
 * Predicts the point of gaze on the scene image.
 *
 * landmarks_xy: n_landmarks (x, y) pairs in face-image pixels.
 * eye_corner_indices: 4 indices (left a, left b, right a, right b), or NULL
 *   for the default 0,1,2,3 layout.
 * facial_roi: x_min, y_min, x_max, y_max of the dataset's fixed facial
 *   window in face-image pixels.
 * out_xy: predicted scene-pixel coordinates (2 values).
 * out_embedding: optional, receives embedding_dim values; pass NULL to skip.
 */
POGEST_API pogest_status pogest_model_predict(pogest_model* model, const char* scene_png_path,
                                              const char* face_png_path,
                                              const double* landmarks_xy, int n_landmarks,
                                              const int* eye_corner_indices,
                                              const double* facial_roi, double* out_xy,
                                              double* out_embedding);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POGEST_H */
