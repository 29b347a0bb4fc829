#pragma once

#include <optional>
#include <string>
#include <vector>

#include "audio.hpp"
#include "evaluate.hpp"
#include "world.hpp"

namespace pogest {

// High-level commands behind the C API and the CLI. Every command writes
// its artifacts under its own output directory plus a run_manifest.json
// recording the command, seed, a hash of the effective config and the
// artifact list.

WorldConfig load_world_config(const std::string& path);

void run_generate(const std::string& world_config_path, const std::string& out_dir,
                  std::optional<uint64_t> seed_override = {});

void run_train(const std::string& manifest_path, const std::string& config_path,
               const std::string& out_dir, const std::string& resume_checkpoint = "");

void run_eval(const std::string& manifest_path, const std::string& checkpoint_path,
              const std::string& report_dir, std::optional<double> deg_per_px = {});

void run_baseline(const std::string& manifest_path, const std::string& report_dir);

void run_loso(const std::string& manifest_path, const std::string& config_path,
              const std::string& out_dir);

TimeShift run_align_sync(const std::string& wav_a, const std::string& wav_b, long max_lag,
                         const std::string& out_json = "");

struct TransferRunResult {
    size_t n_points = 0;
    int inlier_count = 0;
    size_t n_pairs = 0;
};
TransferRunResult run_align_transfer(const std::string& pairs_path, const std::string& points_path,
                                     const std::string& out_path, int iters, double inlier_px,
                                     uint64_t seed);

void run_stats(const std::string& manifest_path, const std::string& classes_path,
               const std::string& report_dir);

// Re-renders plots from a metrics log (training curves), an evaluation
// report, or a statistics report.
void run_plot(const std::string& input_path, const std::string& out_dir);

} // namespace pogest
