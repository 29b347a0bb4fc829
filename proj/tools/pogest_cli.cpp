// Command-line front end over the shared library's C interface.

#include <pogest/pogest.h>

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

namespace {

int report(pogest_status status) {
    if (status == POGEST_OK) return 0;
    std::fprintf(stderr, "error: %s\n", pogest_last_error());
    return static_cast<int>(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-of-gaze estimation workbench"};
    app.require_subcommand(1);

    std::string manifest, config, out_dir, checkpoint, resume, report_dir;
    std::string wav_a, wav_b, sync_out;
    std::string pairs_path, points_path, transfer_out = "transferred.txt";
    std::string classes_path, plot_input;
    std::optional<uint64_t> seed;
    double deg_per_px = 0.0;
    double inlier_px = 2.0;
    int iters = 1000;
    long max_lag = 0;
    uint64_t transfer_seed = 1;

    auto* generate = app.add_subcommand("generate", "render a synthetic dataset");
    generate->add_option("--config", config, "world config (JSON)")->required();
    generate->add_option("--out", out_dir, "output directory")->required();
    generate->add_option("--seed", seed, "override the config rng_seed");

    auto* train = app.add_subcommand("train", "train a model on a manifest's train split");
    train->add_option("--manifest", manifest)->required();
    train->add_option("--config", config, "train config (JSON)")->required();
    train->add_option("--out", out_dir)->required();
    train->add_option("--resume", resume, "checkpoint to resume from");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
    eval->add_option("--manifest", manifest)->required();
    eval->add_option("--checkpoint", checkpoint)->required();
    eval->add_option("--report", report_dir)->required();
    eval->add_option("--deg-per-px", deg_per_px, "adds eye-angle columns when > 0");

    auto* baseline = app.add_subcommand("baseline", "evaluate the non-learned baselines");
    baseline->add_option("--manifest", manifest)->required();
    baseline->add_option("--report", report_dir)->required();

    auto* loso = app.add_subcommand("loso", "leave-one-subject-out training/evaluation");
    loso->add_option("--manifest", manifest)->required();
    loso->add_option("--config", config)->required();
    loso->add_option("--out", out_dir)->required();

    auto* align = app.add_subcommand("align", "dataset-construction tools");
    align->require_subcommand(1);
    auto* sync = align->add_subcommand("sync", "audio cross-correlation time shift");
    sync->add_option("--a", wav_a, "reference WAV")->required();
    sync->add_option("--b", wav_b, "WAV to align against it")->required();
    sync->add_option("--max-lag", max_lag, "search window in samples");
    sync->add_option("--out", sync_out, "optional JSON result path");
    auto* transfer = align->add_subcommand("transfer", "robust homography point transfer");
    transfer->add_option("--pairs", pairs_path, "correspondences: gx gy sx sy per line")->required();
    transfer->add_option("--points", points_path, "points to transfer: x y per line")->required();
    transfer->add_option("--out", transfer_out, "output file for transferred points");
    transfer->add_option("--iters", iters);
    transfer->add_option("--inlier-px", inlier_px);
    transfer->add_option("--seed", transfer_seed);

    auto* stats = app.add_subcommand("stats", "semantic statistics over label maps");
    stats->add_option("--manifest", manifest)->required();
    stats->add_option("--classes", classes_path, "class-name table, one per line")->required();
    stats->add_option("--report", report_dir)->required();

    auto* plot = app.add_subcommand("plot", "re-render plots from a metrics log or report");
    plot->add_option("--input", plot_input)->required();
    plot->add_option("--out", out_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (generate->parsed()) {
        if (seed) return report(pogest_generate_seeded(config.c_str(), *seed, out_dir.c_str()));
        return report(pogest_generate(config.c_str(), out_dir.c_str()));
    }
    if (train->parsed())
        return report(pogest_train(manifest.c_str(), config.c_str(), out_dir.c_str(),
                                   resume.empty() ? nullptr : resume.c_str()));
    if (eval->parsed())
        return report(
            pogest_eval(manifest.c_str(), checkpoint.c_str(), report_dir.c_str(), deg_per_px));
    if (baseline->parsed())
        return report(pogest_baseline(manifest.c_str(), report_dir.c_str()));
    if (loso->parsed())
        return report(pogest_loso(manifest.c_str(), config.c_str(), out_dir.c_str()));
    if (sync->parsed()) {
        long shift = 0;
        double confidence = 0.0;
        int low = 0;
        const pogest_status status =
            pogest_align_sync(wav_a.c_str(), wav_b.c_str(), max_lag,
                              sync_out.empty() ? nullptr : sync_out.c_str(), &shift, &confidence,
                              &low);
        if (status == POGEST_OK)
            std::printf("shift_samples=%ld confidence=%.4f low_confidence=%d\n", shift, confidence,
                        low);
        return report(status);
    }
    if (transfer->parsed()) {
        int inliers = 0;
        const pogest_status status =
            pogest_align_transfer(pairs_path.c_str(), points_path.c_str(), transfer_out.c_str(),
                                  iters, inlier_px, transfer_seed, &inliers);
        if (status == POGEST_OK) std::printf("inliers=%d out=%s\n", inliers, transfer_out.c_str());
        return report(status);
    }
    if (stats->parsed())
        return report(pogest_stats(manifest.c_str(), classes_path.c_str(), report_dir.c_str()));
    if (plot->parsed()) return report(pogest_plot(plot_input.c_str(), out_dir.c_str()));

    return 1;
}
