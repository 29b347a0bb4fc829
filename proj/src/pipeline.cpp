#include "pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dataset.hpp"
#include "error.hpp"
#include "plots.hpp"
#include "stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pogest {

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void write_run_manifest(const std::string& out_dir, const std::string& command,
                        const json& effective_config, std::optional<uint64_t> seed,
                        const std::vector<std::string>& artifacts) {
    json j;
    j["command"] = command;
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a(effective_config.dump())));
    j["config_hash"] = buf;
    if (seed) j["seed"] = *seed;
    j["artifacts"] = artifacts;
    std::ofstream out((fs::path(out_dir) / "run_manifest.json").string());
    if (!out) Error::io("cannot write run manifest under " + out_dir);
    out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) Error::io(std::string("cannot open ") + what + ": " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        Error::validation(std::string(what) + ": invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

} // namespace

WorldConfig load_world_config(const std::string& path) {
    json j = read_json_file(path, "world config");
    static const std::set<std::string> allowed = {"image_side",    "n_sessions", "samples_per_session",
                                                  "n_distractors", "noise_sigma", "rng_seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        require_valid(allowed.count(it.key()) > 0, "world config: unknown key '" + it.key() + "'");
    WorldConfig w;
    if (j.contains("image_side")) w.image_side = j.at("image_side").get<int>();
    if (j.contains("n_sessions")) w.n_sessions = j.at("n_sessions").get<int>();
    if (j.contains("samples_per_session"))
        w.samples_per_session = j.at("samples_per_session").get<int>();
    if (j.contains("n_distractors")) w.n_distractors = j.at("n_distractors").get<int>();
    if (j.contains("noise_sigma")) w.noise_sigma = j.at("noise_sigma").get<double>();
    require_valid(j.contains("rng_seed"), "world config: rng_seed is mandatory");
    w.rng_seed = j.at("rng_seed").get<uint64_t>();
    w.validate();
    return w;
}

void run_generate(const std::string& world_config_path, const std::string& out_dir,
                  std::optional<uint64_t> seed_override) {
    WorldConfig world = load_world_config(world_config_path);
    if (seed_override) world.rng_seed = *seed_override;
    fs::create_directories(out_dir);
    GenerateResult result = generate_dataset(world, out_dir);

    std::vector<std::string> artifacts = {"manifest.json"};
    for (const auto& s : result.manifest.sessions) {
        artifacts.push_back("images/" + s.session_id + "/");
        artifacts.push_back("latents/" + s.session_id + ".json");
    }
    json cfg_json = {{"image_side", world.image_side},
                     {"n_sessions", world.n_sessions},
                     {"samples_per_session", world.samples_per_session},
                     {"n_distractors", world.n_distractors},
                     {"noise_sigma", world.noise_sigma},
                     {"rng_seed", world.rng_seed}};
    write_run_manifest(out_dir, "generate", cfg_json, world.rng_seed, artifacts);
}

void run_train(const std::string& manifest_path, const std::string& config_path,
               const std::string& out_dir, const std::string& resume_checkpoint) {
    TrainConfig cfg = load_train_config(config_path);
    DatasetManifest manifest = load_manifest(manifest_path);
    fs::create_directories(out_dir);
    TrainResult result = train_model(manifest, cfg, out_dir, resume_checkpoint);
    write_run_manifest(out_dir, "train", train_config_to_json(cfg), cfg.rng_seed,
                       {"checkpoint_best.ckpt", "checkpoint_last.ckpt", "metrics.jsonl"});
    std::cerr << "best epoch " << result.best_epoch << " with train error " << result.best_train_px
              << " px\n";
}

void run_eval(const std::string& manifest_path, const std::string& checkpoint_path,
              const std::string& report_dir, std::optional<double> deg_per_px) {
    DatasetManifest manifest = load_manifest(manifest_path);
    EvalOptions options;
    options.deg_per_px = deg_per_px;
    EvalReport report = evaluate_checkpoint(manifest, checkpoint_path, options);
    write_eval_report(report, report_dir);
    json cfg = {{"checkpoint", fs::path(checkpoint_path).filename().string()},
                {"auc_negatives", options.auc_negatives}};
    if (deg_per_px) cfg["deg_per_px"] = *deg_per_px;
    write_run_manifest(report_dir, "eval", cfg, options.rng_seed,
                       {"report.json", "error_pdf.png", "error_cdf.png"});
}

void run_baseline(const std::string& manifest_path, const std::string& report_dir) {
    DatasetManifest manifest = load_manifest(manifest_path);
    EvalOptions options;
    EvalReport report = evaluate_baselines(manifest, options);
    write_eval_report(report, report_dir);
    write_run_manifest(report_dir, "baseline", json::object(), options.rng_seed, {"report.json"});
}

void run_loso(const std::string& manifest_path, const std::string& config_path,
              const std::string& out_dir) {
    TrainConfig cfg = load_train_config(config_path);
    DatasetManifest manifest = load_manifest(manifest_path);
    fs::create_directories(out_dir);
    LosoReport report = leave_one_subject_out(manifest, cfg, out_dir);
    write_loso_report(report, out_dir);
    write_run_manifest(out_dir, "loso", train_config_to_json(cfg), cfg.rng_seed,
                       {"loso_report.json", "loso_errors.png"});
}

TimeShift run_align_sync(const std::string& wav_a, const std::string& wav_b, long max_lag,
                         const std::string& out_json) {
    AudioClip a = load_wav(wav_a);
    AudioClip b = load_wav(wav_b);
    TimeShift shift = estimate_time_shift(a, b, max_lag);
    if (!out_json.empty()) {
        json j = {{"shift_samples", shift.shift},
                  {"confidence", shift.confidence},
                  {"low_confidence", shift.low_confidence},
                  {"sample_rate", a.sample_rate}};
        std::ofstream out(out_json);
        if (!out) Error::io("cannot write sync result: " + out_json);
        out << j.dump(2) << '\n';
    }
    return shift;
}

TransferRunResult run_align_transfer(const std::string& pairs_path, const std::string& points_path,
                                     const std::string& out_path, int iters, double inlier_px,
                                     uint64_t seed) {
    auto read_rows = [](const std::string& path, int cols) {
        std::ifstream in(path);
        if (!in) Error::io("cannot open " + path);
        std::vector<std::vector<double>> rows;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            std::vector<double> row;
            double v;
            while (ss >> v) row.push_back(v);
            require_valid(static_cast<int>(row.size()) == cols,
                          path + ": expected " + std::to_string(cols) + " values per line");
            rows.push_back(row);
        }
        return rows;
    };

    std::vector<Correspondence> pairs;
    for (const auto& r : read_rows(pairs_path, 4)) pairs.push_back({{r[0], r[1]}, {r[2], r[3]}});
    std::vector<GazePoint> points;
    for (const auto& r : read_rows(points_path, 2)) points.push_back({r[0], r[1]});

    RansacResult ransac = ransac_homography(pairs, iters, inlier_px, seed);

    std::ofstream out(out_path);
    if (!out) Error::io("cannot write transferred points: " + out_path);
    out.precision(10);
    for (const auto& p : points) {
        GazePoint q = transfer_point(ransac.h, p);
        out << q.x << ' ' << q.y << '\n';
    }

    TransferRunResult result;
    result.n_points = points.size();
    result.inlier_count = ransac.inlier_count;
    result.n_pairs = pairs.size();
    return result;
}

void run_stats(const std::string& manifest_path, const std::string& classes_path,
               const std::string& report_dir) {
    DatasetManifest manifest = load_manifest(manifest_path);
    ClassTable table = load_class_table(classes_path);
    fs::create_directories(report_dir);

    std::vector<LabelMap> maps;
    std::vector<GazePoint> gazes;
    std::vector<LabelMap> maps_with_gaze;
    for (const auto& sess : manifest.sessions) {
        for (const auto& rec : sess.samples) {
            if (!rec.label_map_path) continue;
            LabelMap map = load_png(resolve_path(manifest, *rec.label_map_path));
            require_valid(map.channels == 1,
                          "stats: label map must be single-channel: " + *rec.label_map_path);
            if (rec.gaze) {
                maps_with_gaze.push_back(map);
                gazes.push_back(*rec.gaze);
            }
            maps.push_back(std::move(map));
        }
    }
    require_valid(!maps.empty(), "stats: manifest has no label maps");

    const std::vector<double> presence = image_class_presence(maps, table);
    const std::vector<double> share = pixel_class_share(maps, table);
    FixationDistribution fixation;
    if (!maps_with_gaze.empty()) fixation = fixation_class_distribution(maps_with_gaze, gazes, table);

    json j;
    j["classes"] = table.names;
    j["image_presence"] = presence;
    j["pixel_share"] = share;
    if (!maps_with_gaze.empty()) {
        j["fixation_share"] = fixation.fraction;
        j["fixations_skipped"] = fixation.skipped;
        j["fixations_counted"] = gazes.size() - fixation.skipped;
    }
    j["n_maps"] = maps.size();
    std::ofstream out((fs::path(report_dir) / "stats_report.json").string());
    if (!out) Error::io("cannot write stats report under " + report_dir);
    out << j.dump(2) << '\n';

    const PlotSeries presence_series[] = {{"SHARE OF IMAGES", presence}};
    plot_bars((fs::path(report_dir) / "image_presence.png").string(), "CLASS PRESENCE PER IMAGE",
              table.names, presence_series);
    const PlotSeries share_series[] = {{"SHARE OF PIXELS", share}};
    plot_bars((fs::path(report_dir) / "pixel_share.png").string(), "PIXEL SHARE PER CLASS",
              table.names, share_series);
    std::vector<std::string> artifacts = {"stats_report.json", "image_presence.png",
                                          "pixel_share.png"};
    if (!maps_with_gaze.empty()) {
        const PlotSeries both[] = {{"FIXATIONS", fixation.fraction}, {"PIXELS", share}};
        plot_bars((fs::path(report_dir) / "fixation_vs_pixels.png").string(),
                  "FIXATION SHARE VS PIXEL SHARE", table.names, both);
        artifacts.push_back("fixation_vs_pixels.png");
    }

    write_run_manifest(report_dir, "stats", json{{"classes", classes_path}}, std::nullopt,
                       artifacts);
}

void run_plot(const std::string& input_path, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::ifstream in(input_path);
    if (!in) Error::io("cannot open plot input: " + input_path);
    std::string first_line;
    std::getline(in, first_line);
    in.seekg(0);

    std::vector<std::string> artifacts;
    json probe;
    try {
        probe = json::parse(first_line);
    } catch (const json::parse_error&) {
        Error::validation("plot: input is neither a metrics log nor a JSON report: " + input_path);
    }

    if (probe.is_object() && probe.contains("epoch")) {
        // Metrics log: one JSON record per line.
        std::vector<double> xs;
        PlotSeries dist{"DIST LOSS", {}}, trip{"TRIP LOSS", {}}, px{"TRAIN PX", {}};
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json rec = json::parse(line);
            xs.push_back(rec.at("epoch").get<double>());
            dist.values.push_back(rec.at("dist").get<double>());
            trip.values.push_back(rec.at("trip").get<double>());
            px.values.push_back(rec.at("px").get<double>());
        }
        require_valid(xs.size() >= 2, "plot: metrics log has fewer than 2 epochs");
        const PlotSeries loss_series[] = {dist, trip};
        plot_lines((fs::path(out_dir) / "training_loss.png").string(), "TRAINING LOSS PER EPOCH",
                   xs, loss_series);
        const PlotSeries px_series[] = {px};
        plot_lines((fs::path(out_dir) / "training_px.png").string(), "TRAIN PIXEL ERROR PER EPOCH",
                   xs, px_series);
        artifacts = {"training_loss.png", "training_px.png"};
    } else {
        json j;
        in >> j;
        if (j.contains("model_error_cdf")) {
            std::vector<double> xs;
            PlotSeries s{"CDF", {}};
            for (const auto& row : j.at("model_error_cdf")) {
                xs.push_back(row[0].get<double>());
                s.values.push_back(row[1].get<double>());
            }
            const PlotSeries series[] = {s};
            plot_lines((fs::path(out_dir) / "error_cdf.png").string(),
                       "PREDICTION ERROR CUMULATIVE PX", xs, series);
            artifacts = {"error_cdf.png"};
        } else if (j.contains("pixel_share")) {
            std::vector<std::string> labels = j.at("classes").get<std::vector<std::string>>();
            const PlotSeries share_series[] = {
                {"SHARE OF PIXELS", j.at("pixel_share").get<std::vector<double>>()}};
            plot_bars((fs::path(out_dir) / "pixel_share.png").string(), "PIXEL SHARE PER CLASS",
                      labels, share_series);
            artifacts = {"pixel_share.png"};
        } else {
            Error::validation("plot: unrecognized report format: " + input_path);
        }
    }

    write_run_manifest(out_dir, "plot", json{{"input", fs::path(input_path).filename().string()}},
                       std::nullopt, artifacts);
}

} // namespace pogest
