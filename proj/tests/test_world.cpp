#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "dataset.hpp"
#include "test_support.hpp"
#include "world.hpp"

using namespace pogest;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("world");

namespace {

WorldConfig tiny_world(uint64_t seed) {
    WorldConfig w;
    w.image_side = 64;
    w.n_sessions = 3;
    w.samples_per_session = 6;
    w.n_distractors = 5;
    w.noise_sigma = 0.02;
    w.rng_seed = seed;
    return w;
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("gaze map anchors: identity at the origin, rotation and scale applied") {
    SessionCameraConfig cfg;
    cfg.scale = 16.0;
    const GazePoint center = oracle_gaze(0.0, 0.0, cfg, 64);
    CHECK(center.x == doctest::Approx(32.0));
    CHECK(center.y == doctest::Approx(32.0));

    // g = (1, 0) with rotation 90 degrees displaces along +y.
    cfg.rotation_deg = 90.0;
    const GazePoint rotated = oracle_gaze(1.0, 0.0, cfg, 64);
    CHECK(rotated.x == doctest::Approx(32.0).epsilon(1e-9));
    CHECK(rotated.y == doctest::Approx(32.0 + 16.0).epsilon(1e-9));

    // Identity config with g = (0.5, 0.5).
    SessionCameraConfig ident;
    ident.scale = 16.0;
    const GazePoint p = oracle_gaze(0.5, 0.5, ident, 64);
    CHECK(p.x == doctest::Approx(32.0 + 8.0));
    CHECK(p.y == doctest::Approx(32.0 + 8.0));

    // Linearity: perturbing g moves the point by the session matrix times
    // the perturbation.
    SessionCameraConfig lin;
    lin.scale = 12.0;
    lin.rotation_deg = 30.0;
    lin.offset_x = 2.0;
    lin.offset_y = -1.0;
    const double eps = 1e-3;
    const GazePoint base = oracle_gaze(0.2, -0.4, lin, 64);
    const GazePoint moved = oracle_gaze(0.2 + eps, -0.4, lin, 64);
    const double rad = 30.0 * 3.14159265358979323846 / 180.0;
    CHECK(moved.x - base.x == doctest::Approx(12.0 * std::cos(rad) * eps).epsilon(1e-6));
    CHECK(moved.y - base.y == doctest::Approx(12.0 * std::sin(rad) * eps).epsilon(1e-6));
}

TEST_CASE("session geometry validation rejects out-of-frame maps") {
    SessionCameraConfig cfg;
    cfg.scale = 40.0; // sqrt(2)*40 alone exceeds half of 64
    CHECK_THROWS_AS(validate_session_geometry(cfg, 64), Error);
    cfg.scale = 10.0;
    cfg.rotation_deg = 50.0;
    CHECK_THROWS_AS(validate_session_geometry(cfg, 64), Error);
    cfg.rotation_deg = 10.0;
    CHECK_NOTHROW(validate_session_geometry(cfg, 64));
    cfg.scale = -1.0;
    CHECK_THROWS_AS(validate_session_geometry(cfg, 64), Error);
}

TEST_CASE("generation is deterministic and the oracle reproduces annotations bit-exactly") {
    testsupport::TempDir dir_a("world_det_a");
    testsupport::TempDir dir_b("world_det_b");
    GenerateResult a = generate_dataset(tiny_world(123), dir_a.path());
    GenerateResult b = generate_dataset(tiny_world(123), dir_b.path());

    CHECK(read_all(a.manifest_path) == read_all(b.manifest_path));
    for (const auto& sess : a.manifest.sessions) {
        for (const auto& rec : sess.samples) {
            CHECK(read_all(resolve_path(a.manifest, rec.scene_path)) ==
                  read_all(resolve_path(b.manifest, rec.scene_path)));
            CHECK(read_all(resolve_path(a.manifest, rec.face_path)) ==
                  read_all(resolve_path(b.manifest, rec.face_path)));
        }
    }

    // Latents recompute the stored annotation exactly.
    for (size_t s = 0; s < a.latents.size(); ++s) {
        const SessionLatents& lat = a.latents[s];
        const SessionRecord& sess = a.manifest.sessions[s];
        REQUIRE(lat.samples.size() == sess.samples.size());
        for (size_t i = 0; i < lat.samples.size(); ++i) {
            const GazePoint recomputed =
                oracle_gaze(lat.samples[i].gx, lat.samples[i].gy, lat.config, 64);
            CHECK(recomputed.x == sess.samples[i].gaze->x);
            CHECK(recomputed.y == sess.samples[i].gaze->y);
        }
    }

    // Latents sidecar round-trips.
    SessionLatents loaded = load_latents(dir_a.file("latents/s000.json"));
    CHECK(loaded.config == a.latents[0].config);
    CHECK(loaded.samples.size() == a.latents[0].samples.size());
}

TEST_CASE("every generated annotation is in frame and the dataset loads") {
    testsupport::TempDir dir("world_inframe");
    GenerateResult g = generate_dataset(tiny_world(7), dir.path());
    for (const auto& sess : g.manifest.sessions)
        for (const auto& rec : sess.samples) {
            REQUIRE(rec.gaze.has_value());
            CHECK(rec.gaze->in_frame(64, 64));
        }
    DatasetManifest loaded = load_manifest(g.manifest_path);
    LoadedDataset data = load_dataset(loaded, std::nullopt, true);
    CHECK(data.samples.size() == 18);
    CHECK(data.facial_roi.has_value());
}

TEST_CASE("subject layout exercises the 3/2/1 split rules on six sessions") {
    testsupport::TempDir dir("world_split");
    WorldConfig w = tiny_world(11);
    w.n_sessions = 6;
    w.samples_per_session = 2;
    GenerateResult g = generate_dataset(w, dir.path());

    std::map<std::string, std::vector<std::string>> by_subject;
    for (const auto& s : g.manifest.sessions) by_subject[s.subject_id].push_back(s.session_id);
    REQUIRE(by_subject.size() == 3);
    std::multiset<size_t> sizes;
    for (auto& [p, v] : by_subject) sizes.insert(v.size());
    CHECK(sizes == std::multiset<size_t>{1, 2, 3});

    int train = 0, test = 0;
    for (const auto& [sid, sp] : g.manifest.split) (sp == Split::train ? train : test)++;
    CHECK(train == 4);
    CHECK(test == 2);
}

TEST_CASE("different session configs map the same gaze grid to different points") {
    testsupport::TempDir dir("world_inject");
    WorldConfig w = tiny_world(31);
    w.n_sessions = 4;
    GenerateResult g = generate_dataset(w, dir.path());
    for (size_t i = 0; i < g.latents.size(); ++i) {
        for (size_t j = i + 1; j < g.latents.size(); ++j) {
            REQUIRE(!(g.latents[i].config == g.latents[j].config));
            bool differs = false;
            for (double gx = -1.0; gx <= 1.0; gx += 0.5)
                for (double gy = -1.0; gy <= 1.0; gy += 0.5) {
                    const GazePoint a = oracle_gaze(gx, gy, g.latents[i].config, 64);
                    const GazePoint b = oracle_gaze(gx, gy, g.latents[j].config, 64);
                    if (std::hypot(a.x - b.x, a.y - b.y) > 1e-9) differs = true;
                }
            CHECK(differs);
        }
    }
}

TEST_CASE("target disks are indistinguishable from distractors") {
    // Two-sample chi-square on radius and color channels; the frozen
    // critical value for 3 degrees of freedom at p = 0.01 is 11.345.
    testsupport::TempDir dir("world_chi2");
    WorldConfig w = tiny_world(47);
    w.n_sessions = 4;
    w.samples_per_session = 120;
    GenerateResult g = generate_dataset(w, dir.path());

    std::vector<double> target_attr[4], distractor_attr[4];
    for (const auto& lat : g.latents) {
        for (const auto& s : lat.samples) {
            target_attr[0].push_back(s.target.radius);
            target_attr[1].push_back(s.target.r);
            target_attr[2].push_back(s.target.g);
            target_attr[3].push_back(s.target.b);
            for (const auto& d : s.distractors) {
                distractor_attr[0].push_back(d.radius);
                distractor_attr[1].push_back(d.r);
                distractor_attr[2].push_back(d.g);
                distractor_attr[3].push_back(d.b);
            }
        }
    }

    const double lo_all[4] = {2.2, 0.45, 0.45, 0.45};
    const double hi_all[4] = {3.2, 0.95, 0.95, 0.95};
    for (int attr = 0; attr < 4; ++attr) {
        const int bins = 4;
        double o1[4] = {0, 0, 0, 0}, o2[4] = {0, 0, 0, 0};
        auto bin_of = [&](double v) {
            int b = static_cast<int>((v - lo_all[attr]) / (hi_all[attr] - lo_all[attr]) * bins);
            return std::clamp(b, 0, bins - 1);
        };
        for (double v : target_attr[attr]) o1[bin_of(v)] += 1.0;
        for (double v : distractor_attr[attr]) o2[bin_of(v)] += 1.0;
        const double n1 = target_attr[attr].size(), n2 = distractor_attr[attr].size();
        double chi2 = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double k1 = std::sqrt(n2 / n1), k2 = std::sqrt(n1 / n2);
            const double denom = o1[b] + o2[b];
            if (denom > 0) chi2 += (k1 * o1[b] - k2 * o2[b]) * (k1 * o1[b] - k2 * o2[b]) / denom;
        }
        CHECK(chi2 < 11.345);
    }
}

TEST_SUITE_END();
