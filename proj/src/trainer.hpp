#pragma once

#include <optional>
#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "dataset.hpp"
#include "manifest.hpp"
#include "trainer_config.hpp"

namespace pogest {

struct EpochMetrics {
    int epoch = 0;
    double mean_dist_loss = 0.0;
    double mean_trip_loss = 0.0;
    double mean_px_error = 0.0;
};

struct TrainResult {
    std::vector<EpochMetrics> metrics; // this run's epochs
    int best_epoch = 0;
    double best_train_px = 0.0;
    std::string checkpoint_best;
    std::string checkpoint_last;
    std::string metrics_path;
    size_t degenerate_triplet_batches = 0;
};

// Session-stratified batch plan: every session's (shuffled) samples are
// dealt round-robin across the epoch's batches, so each batch mixes
// sessions whenever the data allows it.
std::vector<std::vector<int>> plan_batches(std::span<const int> session_of, int batch_size,
                                           Rng rng);

// Forward pass over a set of samples; used by both the training loop and
// evaluation.
struct ForwardBatch {
    std::vector<GazePoint> points;  // scene pixels
    Eigen::MatrixXd embeddings;     // embedding_dim x n
};
ForwardBatch predict_batch(GazeNet& net, const LoadedDataset& data, std::span<const int> indices,
                           const AblationConfig& ablation, nn::Mode mode, Rng* dropout_rng);

ForwardBatch predict_dataset(GazeNet& net, const LoadedDataset& data,
                             const AblationConfig& ablation, int batch_size = 64);

// Adam over total_loss, with per-epoch metrics, periodic checkpoints, a
// best-train-error snapshot and bit-compatible resume.
TrainResult train_model(const DatasetManifest& manifest, const TrainConfig& cfg,
                        const std::string& out_dir, const std::string& resume_path = "");

} // namespace pogest
