#include "pogest/pogest.h"

#include <cstring>
#include <string>

#include "checkpoint.hpp"
#include "error.hpp"
#include "pipeline.hpp"
#include "trainer.hpp"

using namespace pogest;

namespace {

thread_local std::string g_last_error;

pogest_status status_of(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::validation: return POGEST_E_VALIDATION;
        case ErrorKind::io:
        case ErrorKind::runtime: return POGEST_E_RUNTIME;
    }
    return POGEST_E_RUNTIME;
}

template <class Fn>
pogest_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return POGEST_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return POGEST_E_RUNTIME;
    } catch (...) {
        g_last_error = "unknown failure";
        return POGEST_E_RUNTIME;
    }
}

pogest_status usage_error(const char* msg) {
    g_last_error = msg;
    return POGEST_E_USAGE;
}

} // namespace

struct pogest_model {
    CheckpointData checkpoint;
    GazeNet net;

    explicit pogest_model(CheckpointData ck)
        : checkpoint(std::move(ck)), net(model_from_checkpoint(checkpoint)) {}
};

extern "C" {

const char* pogest_version(void) { return "1.0.0"; }

const char* pogest_last_error(void) { return g_last_error.c_str(); }

pogest_status pogest_generate(const char* world_config_path, const char* out_dir) {
    if (!world_config_path || !out_dir) return usage_error("generate: null argument");
    return guarded([&] { run_generate(world_config_path, out_dir); });
}

pogest_status pogest_generate_seeded(const char* world_config_path, uint64_t rng_seed,
                                     const char* out_dir) {
    if (!world_config_path || !out_dir) return usage_error("generate: null argument");
    return guarded([&] { run_generate(world_config_path, out_dir, rng_seed); });
}

pogest_status pogest_train(const char* manifest_path, const char* train_config_path,
                           const char* out_dir, const char* resume_checkpoint_or_null) {
    if (!manifest_path || !train_config_path || !out_dir)
        return usage_error("train: null argument");
    return guarded([&] {
        run_train(manifest_path, train_config_path, out_dir,
                  resume_checkpoint_or_null ? resume_checkpoint_or_null : "");
    });
}

pogest_status pogest_eval(const char* manifest_path, const char* checkpoint_path,
                          const char* report_dir, double deg_per_px) {
    if (!manifest_path || !checkpoint_path || !report_dir)
        return usage_error("eval: null argument");
    return guarded([&] {
        std::optional<double> deg;
        if (deg_per_px > 0.0) deg = deg_per_px;
        run_eval(manifest_path, checkpoint_path, report_dir, deg);
    });
}

pogest_status pogest_baseline(const char* manifest_path, const char* report_dir) {
    if (!manifest_path || !report_dir) return usage_error("baseline: null argument");
    return guarded([&] { run_baseline(manifest_path, report_dir); });
}

pogest_status pogest_loso(const char* manifest_path, const char* train_config_path,
                          const char* out_dir) {
    if (!manifest_path || !train_config_path || !out_dir)
        return usage_error("loso: null argument");
    return guarded([&] { run_loso(manifest_path, train_config_path, out_dir); });
}

pogest_status pogest_align_sync(const char* wav_a_path, const char* wav_b_path, long max_lag,
                                const char* out_json_or_null, long* out_shift_samples,
                                double* out_confidence, int* out_low_confidence) {
    if (!wav_a_path || !wav_b_path) return usage_error("align sync: null argument");
    return guarded([&] {
        TimeShift s = run_align_sync(wav_a_path, wav_b_path, max_lag,
                                     out_json_or_null ? out_json_or_null : "");
        if (out_shift_samples) *out_shift_samples = s.shift;
        if (out_confidence) *out_confidence = s.confidence;
        if (out_low_confidence) *out_low_confidence = s.low_confidence ? 1 : 0;
    });
}

pogest_status pogest_align_transfer(const char* pairs_path, const char* points_path,
                                    const char* out_path, int iters, double inlier_px,
                                    uint64_t rng_seed, int* out_inlier_count) {
    if (!pairs_path || !points_path || !out_path)
        return usage_error("align transfer: null argument");
    return guarded([&] {
        TransferRunResult r =
            run_align_transfer(pairs_path, points_path, out_path, iters, inlier_px, rng_seed);
        if (out_inlier_count) *out_inlier_count = r.inlier_count;
    });
}

pogest_status pogest_stats(const char* manifest_path, const char* classes_path,
                           const char* report_dir) {
    if (!manifest_path || !classes_path || !report_dir)
        return usage_error("stats: null argument");
    return guarded([&] { run_stats(manifest_path, classes_path, report_dir); });
}

pogest_status pogest_plot(const char* input_path, const char* out_dir) {
    if (!input_path || !out_dir) return usage_error("plot: null argument");
    return guarded([&] { run_plot(input_path, out_dir); });
}

pogest_status pogest_model_open(const char* checkpoint_path, pogest_model** out_model) {
    if (!checkpoint_path || !out_model) return usage_error("model open: null argument");
    return guarded([&] { *out_model = new pogest_model(load_checkpoint(checkpoint_path)); });
}

void pogest_model_close(pogest_model* model) { delete model; }

pogest_status pogest_model_input_side(const pogest_model* model, int* out_side) {
    if (!model || !out_side) return usage_error("model input side: null argument");
    *out_side = model->checkpoint.config.model.input_side;
    return POGEST_OK;
}

pogest_status pogest_model_embedding_dim(const pogest_model* model, int* out_dim) {
    if (!model || !out_dim) return usage_error("model embedding dim: null argument");
    *out_dim = model->checkpoint.config.model.embedding_dim;
    return POGEST_OK;
}

pogest_status pogest_model_predict(pogest_model* model, const char* scene_png_path,
                                   const char* face_png_path, const double* landmarks_xy,
                                   int n_landmarks, const int* eye_corner_indices,
                                   const double* facial_roi, double* out_xy,
                                   double* out_embedding) {
    if (!model || !scene_png_path || !face_png_path || !landmarks_xy || !facial_roi || !out_xy)
        return usage_error("model predict: null argument");
    if (n_landmarks < 2) return usage_error("model predict: needs at least two landmarks");
    return guarded([&] {
        LoadedSample sample;
        sample.scene = load_png(scene_png_path);
        sample.face = load_png(face_png_path);
        for (int i = 0; i < n_landmarks; ++i)
            sample.landmarks.points.push_back({landmarks_xy[2 * i], landmarks_xy[2 * i + 1]});
        if (eye_corner_indices) {
            sample.landmarks.corners = {eye_corner_indices[0], eye_corner_indices[1],
                                        eye_corner_indices[2], eye_corner_indices[3]};
        }
        sample.landmarks.validate();
        sample.gaze = GazePoint{0.0, 0.0};

        LoadedDataset data;
        data.width = sample.scene.width;
        data.height = sample.scene.height;
        data.facial_roi = BoundingBox{facial_roi[0], facial_roi[1], facial_roi[2], facial_roi[3]};
        data.facial_roi->validate("facial roi");
        data.samples.push_back(std::move(sample));
        data.session_of.push_back(0);
        data.session_ids.push_back("adhoc");

        const int idx[1] = {0};
        ForwardBatch fb = predict_batch(model->net, data, idx, model->checkpoint.config.ablation,
                                        nn::Mode::eval, nullptr);
        out_xy[0] = fb.points[0].x;
        out_xy[1] = fb.points[0].y;
        if (out_embedding)
            for (int e = 0; e < model->checkpoint.config.model.embedding_dim; ++e)
                out_embedding[e] = fb.embeddings(e, 0);
    });
}

} // extern "C"
