#include <doctest.h>

#include <cmath>
#include <set>

#include "assemble.hpp"
#include "dataset.hpp"
#include "image.hpp"
#include "manifest.hpp"
#include "roi.hpp"
#include "split.hpp"
#include "test_support.hpp"

using namespace pogest;

TEST_SUITE_BEGIN("core-data");

TEST_CASE("eye roi follows the corner geometry") {
    Landmarks lm;
    lm.points = {{100, 100}, {140, 100}, {0, 0}, {0, 20}};
    auto [left, right] = compute_eye_roi(lm);

    CHECK(left.x_min == doctest::Approx(90.0));
    CHECK(left.y_min == doctest::Approx(70.0));
    CHECK(left.x_max == doctest::Approx(150.0));
    CHECK(left.y_max == doctest::Approx(130.0));

    // Vertical corner pair; clamping is deferred to the crop.
    CHECK(right.x_min == doctest::Approx(-15.0));
    CHECK(right.y_min == doctest::Approx(-5.0));
    CHECK(right.x_max == doctest::Approx(15.0));
    CHECK(right.y_max == doctest::Approx(25.0));
}

TEST_CASE("eye roi rejects coincident corners") {
    Landmarks lm;
    lm.points = {{5, 5}, {5, 5}, {1, 1}, {2, 2}};
    CHECK_THROWS_AS(compute_eye_roi(lm), Error);
}

TEST_CASE("eye roi is square with side 1.5x corner distance") {
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
        Landmarks lm;
        lm.points = {{rng.uniform(0, 200), rng.uniform(0, 200)},
                     {rng.uniform(0, 200), rng.uniform(0, 200)},
                     {rng.uniform(0, 200), rng.uniform(0, 200)},
                     {rng.uniform(0, 200), rng.uniform(0, 200)}};
        const double dl = std::hypot(lm.points[1].x - lm.points[0].x, lm.points[1].y - lm.points[0].y);
        const double dr = std::hypot(lm.points[3].x - lm.points[2].x, lm.points[3].y - lm.points[2].y);
        if (dl == 0.0 || dr == 0.0) continue;
        auto [left, right] = compute_eye_roi(lm);
        CHECK(left.width() == left.height());
        CHECK(right.width() == right.height());
        CHECK(std::abs(left.width() - 1.5 * dl) < 1e-9);
        CHECK(std::abs(right.width() - 1.5 * dr) < 1e-9);
    }
}

TEST_CASE("facial roi is the union of face boxes") {
    const BoundingBox single[] = {{0, 0, 10, 10}};
    CHECK(compute_facial_roi(single) == BoundingBox{0, 0, 10, 10});

    const BoundingBox two[] = {{0, 0, 10, 10}, {5, 5, 20, 15}};
    const BoundingBox u = compute_facial_roi(two);
    CHECK(u == BoundingBox{0, 0, 20, 15});
    for (const auto& b : two) CHECK(u.contains(b));

    CHECK_THROWS_AS(compute_facial_roi({}), Error);
}

namespace {

LoadedSample make_sample(int side, Rng& rng) {
    LoadedSample s;
    s.scene = testsupport::random_rgb(side, side, rng);
    s.face = testsupport::random_rgb(side, side, rng);
    s.landmarks.points = {{14, 20}, {22, 20}, {34, 20}, {42, 20}};
    return s;
}

} // namespace

TEST_CASE("assembled input has the contracted shape and calibration tiling") {
    Rng rng(7);
    LoadedSample s = make_sample(64, rng);
    const BoundingBox roi{8, 8, 56, 56};

    Eigen::VectorXd calib(8);
    calib << 1, 0, 0, 0, 0, 0, 0, 0;
    nn::Tensor t = assemble_input(s, roi, calib, 32);
    CHECK(t.n == 1);
    CHECK(t.c == 20);
    CHECK(t.h == 32);
    CHECK(t.w == 32);

    // Channel 13 identically one, channels 14-20 identically zero.
    for (size_t i = 0; i < t.plane_stride(); ++i) {
        CHECK(t.plane(0, 12)[i] == doctest::Approx(1.0f));
        for (int c = 13; c < 20; ++c) CHECK(t.plane(0, c)[i] == doctest::Approx(0.0f));
    }

    // Calibration channels have zero spatial variance for any embedding.
    Rng vr(11);
    Eigen::VectorXd v(8);
    for (int k = 0; k < 8; ++k) v(k) = vr.normal();
    v.normalize();
    nn::Tensor t2 = assemble_input(s, roi, v, 16);
    for (int c = 12; c < 20; ++c) {
        const float first = t2.plane(0, c)[0];
        for (size_t i = 0; i < t2.plane_stride(); ++i) CHECK(t2.plane(0, c)[i] == first);
    }
}

TEST_CASE("assemble rejects missing landmarks and non-positive side") {
    Rng rng(9);
    LoadedSample s = make_sample(32, rng);
    Eigen::VectorXd calib = Eigen::VectorXd::Zero(8);
    s.landmarks.points.clear();
    CHECK_THROWS_AS(assemble_input(s, {0, 0, 32, 32}, calib, 16), Error);

    LoadedSample ok = make_sample(32, rng);
    CHECK_THROWS_AS(assemble_input(ok, {0, 0, 32, 32}, calib, 0), Error);
}

TEST_CASE("out-of-bounds crops match a pad-then-crop oracle") {
    Rng rng(23);
    ImageU8 img = testsupport::random_rgb(24, 24, rng);
    const BoundingBox box{-6.0, 10.0, 18.0, 34.0}; // hangs over two edges
    const int side = 16;

    std::vector<float> direct(3 * side * side);
    crop_resize_into(img, box, side, direct.data(), static_cast<size_t>(side) * side);

    // Oracle: embed in a zero canvas first, then crop fully inside.
    const int pad = 40;
    ImageU8 padded = ImageU8::make(img.width + 2 * pad, img.height + 2 * pad, 3, 0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) padded.at(x + pad, y + pad, c) = img.at(x, y, c);
    const BoundingBox shifted{box.x_min + pad, box.y_min + pad, box.x_max + pad, box.y_max + pad};
    std::vector<float> oracle(3 * side * side);
    crop_resize_into(padded, shifted, side, oracle.data(), static_cast<size_t>(side) * side);

    for (size_t i = 0; i < direct.size(); ++i) CHECK(direct[i] == doctest::Approx(oracle[i]).epsilon(1e-6));

    // In-bounds pixels are preserved, out-of-bounds region is zero.
    bool any_zero = false, any_nonzero = false;
    for (float v : direct) {
        any_zero |= (v == 0.0f);
        any_nonzero |= (v != 0.0f);
    }
    CHECK(any_zero);
    CHECK(any_nonzero);
}

TEST_CASE("constant images stay constant under resize") {
    ImageU8 img = ImageU8::make(20, 20, 3, 128);
    std::vector<float> out(3 * 8 * 8);
    resize_into(img, 8, out.data(), 64);
    for (float v : out) CHECK(v == doctest::Approx(128.0f / 255.0f));
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("manifest");

namespace {

DatasetManifest toy_manifest(const testsupport::TempDir& dir, int sessions = 2) {
    Rng rng(3);
    DatasetManifest m;
    m.base_dir = dir.path();
    m.facial_roi = BoundingBox{4, 4, 28, 28};
    for (int s = 0; s < sessions; ++s) {
        SessionRecord sess;
        sess.session_id = "s" + std::to_string(s);
        sess.subject_id = "p" + std::to_string(s / 2);
        for (int i = 0; i < 2; ++i) {
            SampleRecord rec;
            rec.scene_path = sess.session_id + "_scene" + std::to_string(i) + ".png";
            rec.face_path = sess.session_id + "_face" + std::to_string(i) + ".png";
            save_png(dir.file(rec.scene_path), testsupport::random_rgb(32, 32, rng));
            save_png(dir.file(rec.face_path), testsupport::random_rgb(32, 32, rng));
            rec.landmarks.points = {{8, 12}, {14, 12}, {18, 12}, {24, 12}};
            rec.gaze = GazePoint{16.0 + i, 10.0 + s};
            rec.object_boxes.push_back({"car", {1, 1, 9, 9}});
            sess.samples.push_back(rec);
        }
        m.sessions.push_back(sess);
    }
    return m;
}

} // namespace

TEST_CASE("manifest round-trips through save and load") {
    testsupport::TempDir dir("manifest_roundtrip");
    DatasetManifest m = toy_manifest(dir);
    m.split = {{"s0", Split::train}, {"s1", Split::test}};
    save_manifest(m, dir.file("manifest.json"));
    DatasetManifest loaded = load_manifest(dir.file("manifest.json"));
    CHECK(loaded == m);
}

TEST_CASE("manifest rejects duplicate session ids") {
    testsupport::TempDir dir("manifest_dup");
    DatasetManifest m = toy_manifest(dir);
    m.sessions[1].session_id = m.sessions[0].session_id;
    CHECK_THROWS_AS(save_manifest(m, dir.file("manifest.json")), Error);
}

TEST_CASE("manifest names missing image files") {
    testsupport::TempDir dir("manifest_missing");
    DatasetManifest m = toy_manifest(dir);
    m.sessions[0].samples[0].scene_path = "not_there.png";
    save_manifest(m, dir.file("manifest.json"));
    try {
        load_manifest(dir.file("manifest.json"));
        FAIL("expected a missing-file error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("not_there.png") != std::string::npos);
    }
}

TEST_CASE("split honors the per-subject session rules") {
    testsupport::TempDir dir("split_rules");
    // Subjects with 1, 2 and 3 sessions.
    DatasetManifest m = toy_manifest(dir, 6);
    m.sessions[0].subject_id = "a";
    m.sessions[1].subject_id = "b";
    m.sessions[2].subject_id = "b";
    m.sessions[3].subject_id = "c";
    m.sessions[4].subject_id = "c";
    m.sessions[5].subject_id = "c";

    DatasetManifest split = split_sessions(m, 99);
    CHECK(split.split.at("s0") == Split::train); // single-session subject trains

    int b_train = 0, b_test = 0, c_train = 0, c_test = 0;
    for (const auto& [sid, sp] : split.split) {
        const SessionRecord* sess = split.find_session(sid);
        if (sess->subject_id == "b") (sp == Split::train ? b_train : b_test)++;
        if (sess->subject_id == "c") (sp == Split::train ? c_train : c_test)++;
    }
    CHECK(b_train == 1);
    CHECK(b_test == 1);
    CHECK(c_train == 2);
    CHECK(c_test == 1);

    // Deterministic given the seed.
    DatasetManifest again = split_sessions(m, 99);
    CHECK(again.split == split.split);
}

TEST_CASE("split covers all sessions with disjoint assignments across many seeds") {
    testsupport::TempDir dir("split_seeds");
    DatasetManifest m = toy_manifest(dir, 6);
    m.sessions[1].subject_id = "p9";
    m.sessions[2].subject_id = "p9";
    for (uint64_t seed = 0; seed < 50; ++seed) {
        DatasetManifest s = split_sessions(m, seed);
        CHECK(s.split.size() == m.sessions.size());
        int p9_train = 0, p9_test = 0;
        for (const auto& [sid, sp] : s.split)
            if (s.find_session(sid)->subject_id == "p9") (sp == Split::train ? p9_train : p9_test)++;
        CHECK(p9_train == 1);
        CHECK(p9_test == 1);
    }
}

TEST_CASE("dataset load enforces shared dimensions and in-frame gazes") {
    testsupport::TempDir dir("dataset_load");
    DatasetManifest m = toy_manifest(dir);
    m.split = {{"s0", Split::train}, {"s1", Split::test}};
    save_manifest(m, dir.file("manifest.json"));
    DatasetManifest loaded = load_manifest(dir.file("manifest.json"));
    LoadedDataset all = load_dataset(loaded, std::nullopt, true);
    CHECK(all.samples.size() == 4);
    CHECK(all.width == 32);

    // Out-of-frame gaze rejected.
    m.sessions[0].samples[0].gaze = GazePoint{200.0, 5.0};
    save_manifest(m, dir.file("manifest2.json"));
    DatasetManifest bad = load_manifest(dir.file("manifest2.json"));
    CHECK_THROWS_AS(load_dataset(bad, std::nullopt, true), Error);
}

TEST_SUITE_END();
