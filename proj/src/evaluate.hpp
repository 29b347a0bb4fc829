#pragma once

#include <optional>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "metrics.hpp"
#include "trainer.hpp"

namespace pogest {

struct MethodResult {
    std::string name;
    ErrorSummary summary;
    double auc = 0.0;
    bool available = true;
    std::string note;
};

struct EmbeddingStats {
    double mean_intra = 0.0;
    double mean_inter = 0.0;
    double gap = 0.0;        // inter - intra
    double gap_ci_low = 0.0; // bootstrap 95% interval
    double gap_ci_high = 0.0;
    size_t n_sessions = 0;
};

struct EvalOptions {
    int auc_negatives = 100;
    uint64_t rng_seed = 17;
    std::optional<double> deg_per_px; // adds an eye-angle column when set
    int batch_size = 64;
};

struct EvalReport {
    std::vector<MethodResult> methods; // model first, then baselines
    EmbeddingStats embedding;
    std::vector<double> model_errors; // per test sample
    int width = 0, height = 0;
    size_t n_test = 0;
    std::optional<double> deg_per_px;
};

// Evaluates an in-memory model plus the image-independent and
// landmark-regression baselines on the manifest's test split.
EvalReport evaluate_model(const DatasetManifest& manifest, GazeNet& net,
                          const AblationConfig& ablation, const EvalOptions& options);

EvalReport evaluate_checkpoint(const DatasetManifest& manifest, const std::string& checkpoint_path,
                               const EvalOptions& options);

// Baselines only (no model row).
EvalReport evaluate_baselines(const DatasetManifest& manifest, const EvalOptions& options);

// Mean intra- vs inter-session embedding distance with a bootstrap interval
// on the gap. Sessions are subsampled to a cap for the bootstrap.
EmbeddingStats embedding_cluster_stats(const Eigen::MatrixXd& embeddings,
                                       std::span<const int> session_of, uint64_t seed,
                                       int bootstrap_rounds = 1000, int per_session_cap = 150);

// report.json plus error-distribution plots under report_dir.
void write_eval_report(const EvalReport& report, const std::string& report_dir);

struct LosoSubjectResult {
    std::string subject;
    std::vector<std::string> trained_sessions;
    std::vector<std::string> test_sessions;
    ErrorSummary summary;
};

struct LosoReport {
    std::vector<LosoSubjectResult> subjects;
    std::vector<std::string> skipped; // subjects whose removal empties the train split
};

// Per test subject: trains on the train split minus that subject's
// sessions, evaluates on the subject's test sessions.
LosoReport leave_one_subject_out(const DatasetManifest& manifest, const TrainConfig& cfg,
                                 const std::string& out_dir);

void write_loso_report(const LosoReport& report, const std::string& out_dir);

} // namespace pogest
