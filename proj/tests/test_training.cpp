#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "checkpoint.hpp"
#include "test_support.hpp"
#include "trainer.hpp"
#include "world.hpp"

using namespace pogest;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("training");

namespace {

// Small world + small model for fast train-loop tests.
struct Fixture {
    testsupport::TempDir dir;
    DatasetManifest manifest;

    explicit Fixture(const std::string& name, uint64_t seed = 5, int sessions = 4,
                     int samples = 12)
        : dir(name) {
        WorldConfig w;
        w.image_side = 32;
        w.n_sessions = sessions;
        w.samples_per_session = samples;
        w.n_distractors = 3;
        w.noise_sigma = 0.01;
        w.rng_seed = seed;
        manifest = generate_dataset(w, dir.path()).manifest;
    }
};

TrainConfig tiny_config(uint64_t seed, int epochs = 2) {
    TrainConfig cfg;
    cfg.learning_rate = 1e-3;
    cfg.batch_size = 16;
    cfg.epochs = epochs;
    cfg.rng_seed = seed;
    cfg.checkpoint_every = 1;
    cfg.model.input_side = 32;
    cfg.model.backbone_width = 4;
    cfg.model.backbone_depth = 2;
    cfg.model.head_hidden = 24;
    cfg.model.dropout_rate = 0.1;
    return cfg;
}

} // namespace

TEST_CASE("batch plan mixes sessions and covers every sample exactly once") {
    std::vector<int> session_of;
    for (int s = 0; s < 4; ++s)
        for (int i = 0; i < 50; ++i) session_of.push_back(s);
    Rng rng(3);
    auto batches = plan_batches(session_of, 32, rng);

    std::set<int> seen;
    for (const auto& b : batches) {
        std::set<int> sessions;
        for (int idx : b) {
            CHECK(seen.insert(idx).second);
            sessions.insert(session_of[idx]);
        }
        CHECK(sessions.size() >= 2);
    }
    CHECK(seen.size() == session_of.size());

    // Deterministic for a fixed seed.
    auto batches2 = plan_batches(session_of, 32, Rng(3));
    CHECK(batches2 == plan_batches(session_of, 32, Rng(3)));
}

TEST_CASE("training runs, improves, logs, and is deterministic") {
    Fixture fx("train_basic");
    TrainConfig cfg = tiny_config(11, 3);

    testsupport::TempDir out_a("train_basic_out_a");
    TrainResult a = train_model(fx.manifest, cfg, out_a.path());
    REQUIRE(a.metrics.size() == 3);
    for (const auto& m : a.metrics) {
        CHECK(std::isfinite(m.mean_dist_loss));
        CHECK(std::isfinite(m.mean_trip_loss));
        CHECK(std::isfinite(m.mean_px_error));
    }
    CHECK(fs::exists(a.checkpoint_best));
    CHECK(fs::exists(a.checkpoint_last));
    CHECK(fs::exists(a.metrics_path));

    // Determinism: identical run -> identical metric log bytes.
    testsupport::TempDir out_b("train_basic_out_b");
    TrainResult b = train_model(fx.manifest, cfg, out_b.path());
    std::ifstream fa(a.metrics_path), fb(b.metrics_path);
    std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
    Fixture fx("train_lr0");
    TrainConfig cfg = tiny_config(13, 2);
    cfg.learning_rate = 0.0;

    GazeNet untouched(cfg.model, cfg.rng_seed);
    auto before = snapshot_params(untouched);

    testsupport::TempDir out("train_lr0_out");
    TrainResult r = train_model(fx.manifest, cfg, out.path());
    CheckpointData ck = load_checkpoint(r.checkpoint_last);
    CHECK(ck.params == before);
}

TEST_CASE("resume reproduces the uninterrupted run bit for bit") {
    Fixture fx("train_resume");
    TrainConfig cfg = tiny_config(17, 4);

    testsupport::TempDir full_out("train_resume_full");
    TrainResult full = train_model(fx.manifest, cfg, full_out.path());

    TrainConfig cfg_half = cfg;
    cfg_half.epochs = 2;
    testsupport::TempDir half_out("train_resume_half");
    TrainResult half = train_model(fx.manifest, cfg_half, half_out.path());

    testsupport::TempDir resumed_out("train_resume_cont");
    TrainResult resumed = train_model(fx.manifest, cfg, resumed_out.path(), half.checkpoint_last);
    REQUIRE(resumed.metrics.size() == 2); // epochs 3 and 4
    CHECK(resumed.metrics[0].epoch == 3);
    CHECK(resumed.metrics[0].mean_dist_loss == full.metrics[2].mean_dist_loss);
    CHECK(resumed.metrics[0].mean_trip_loss == full.metrics[2].mean_trip_loss);
    CHECK(resumed.metrics[0].mean_px_error == full.metrics[2].mean_px_error);
    CHECK(resumed.metrics[1].mean_px_error == full.metrics[3].mean_px_error);

    // Final parameters agree as well.
    CheckpointData ck_full = load_checkpoint(full.checkpoint_last);
    CheckpointData ck_resumed = load_checkpoint(resumed.checkpoint_last);
    CHECK(ck_full.params == ck_resumed.params);
}

TEST_CASE("single-session train split is rejected before epoch 1") {
    Fixture fx("train_single", 7, 1, 8);
    // One session: the generator marks it train (single-session subject).
    TrainConfig cfg = tiny_config(19);
    testsupport::TempDir out("train_single_out");
    CHECK_THROWS_AS(train_model(fx.manifest, cfg, out.path()), Error);
}

TEST_CASE("checkpoints round-trip parameters bit-exactly") {
    Fixture fx("ckpt_roundtrip");
    TrainConfig cfg = tiny_config(23, 1);
    testsupport::TempDir out("ckpt_roundtrip_out");
    TrainResult r = train_model(fx.manifest, cfg, out.path());

    CheckpointData ck = load_checkpoint(r.checkpoint_last);
    const std::string copy = out.file("copy.ckpt");
    save_checkpoint(copy, ck);
    CheckpointData ck2 = load_checkpoint(copy);
    CHECK(ck.params == ck2.params);
    CHECK(ck.adam.m == ck2.adam.m);
    CHECK(ck.adam.v == ck2.adam.v);
    CHECK(ck.adam.step == ck2.adam.step);
    CHECK(ck.epochs_completed == ck2.epochs_completed);
    CHECK(ck.config == ck2.config);

    // The rebuilt model predicts identically to the saved one.
    GazeNet net = model_from_checkpoint(ck);
    GazeNet net2 = model_from_checkpoint(ck2);
    CHECK(snapshot_params(net) == snapshot_params(net2));
}

TEST_CASE("train config files are strict about keys and the seed") {
    using nlohmann::json;
    json j = train_config_to_json(tiny_config(29));
    TrainConfig cfg = train_config_from_json(j, true);
    CHECK(cfg == tiny_config(29));

    json bad = j;
    bad["learning_rte"] = 0.1;
    CHECK_THROWS_AS(train_config_from_json(bad, true), Error);

    json noseed = j;
    noseed.erase("rng_seed");
    CHECK_THROWS_AS(train_config_from_json(noseed, true), Error);
    CHECK_NOTHROW(train_config_from_json(noseed, false));

    json small = j;
    small["batch_size"] = 2;
    CHECK_THROWS_AS(train_config_from_json(small, true), Error);
}

TEST_SUITE_END();
