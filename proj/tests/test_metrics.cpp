#include <doctest.h>

#include <cmath>

#include "baselines.hpp"
#include "evaluate.hpp"
#include "metrics.hpp"

using namespace pogest;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("pixel error basics") {
    CHECK(pixel_error({3, 4}, {3, 4}) == 0.0);
    CHECK(pixel_error({0, 0}, {3, 4}) == doctest::Approx(5.0));
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        GazePoint a{rng.uniform(-50, 50), rng.uniform(-50, 50)};
        GazePoint b{rng.uniform(-50, 50), rng.uniform(-50, 50)};
        CHECK(pixel_error(a, b) == pixel_error(b, a));
    }
}

TEST_CASE("error summary mean, median and cdf") {
    const double three[] = {3.0, 4.0, 5.0};
    ErrorSummary s = summarize_errors(three);
    CHECK(s.mean == doctest::Approx(4.0));
    CHECK(s.median == doctest::Approx(4.0));

    const double one[] = {7.0};
    ErrorSummary s1 = summarize_errors(one);
    CHECK(s1.mean == 7.0);
    CHECK(s1.median == 7.0);

    const double thresholds[] = {0.0, 3.0, 4.5, 100.0};
    ErrorSummary s2 = summarize_errors(three, thresholds);
    CHECK(s2.cdf[0].second == doctest::Approx(0.0));
    CHECK(s2.cdf[1].second == doctest::Approx(1.0 / 3.0));
    CHECK(s2.cdf[2].second == doctest::Approx(2.0 / 3.0));
    CHECK(s2.cdf[3].second == doctest::Approx(1.0)); // threshold >= max -> 1.0
    for (size_t i = 1; i < s2.cdf.size(); ++i) CHECK(s2.cdf[i].second >= s2.cdf[i - 1].second);

    CHECK_THROWS_AS(summarize_errors({}), Error);

    const double echo[] = {9.2, 25.1, 9.2};
    CHECK(summarize_errors(echo).median == doctest::Approx(9.2));
}

TEST_CASE("angle model: one-point fits and linearity") {
    const std::pair<double, double> single[] = {{100.0, 9.92}};
    CHECK(fit_angle_model(single).deg_per_px == doctest::Approx(0.0992));
    const std::pair<double, double> unit[] = {{1.0, 1.0}};
    CHECK(fit_angle_model(unit).deg_per_px == doctest::Approx(1.0));

    AngleModel m{0.0992};
    CHECK(px_to_degrees(0.0, m) == 0.0);
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const double a = rng.uniform(0, 100), b = rng.uniform(0, 100);
        CHECK(px_to_degrees(a + b, m) == doctest::Approx(px_to_degrees(a, m) + px_to_degrees(b, m)));
    }

    const std::pair<double, double> zeros[] = {{0.0, 0.0}};
    CHECK_THROWS_AS(fit_angle_model(zeros), Error);
}

TEST_CASE("auc: perfect prediction scores one, distant prediction near zero") {
    Rng rng(7);
    const GazePoint gt{10.0, 12.0};
    CHECK(auc_score(gt, gt, 64, 64, 500, rng) == doctest::Approx(1.0));

    // Annotation at a corner, prediction at the opposite corner: almost all
    // pixels score closer to the prediction than the annotation does.
    Rng rng2(9);
    const double auc = auc_score({63.0, 63.0}, {0.5, 0.5}, 64, 64, 4000, rng2);
    CHECK(auc < 0.05);
}

TEST_CASE("baseline center and fixed are exact") {
    CHECK(baseline_center(1280, 720) == GazePoint{640.0, 360.0});
    CHECK(baseline_center(100, 50) == GazePoint{50.0, 25.0});
    CHECK(baseline_center(224, 224) == GazePoint{112.0, 112.0});

    const GazePoint pts[] = {{0, 0}, {10, 20}};
    CHECK(baseline_fixed(pts) == GazePoint{5.0, 10.0});
    const GazePoint one[] = {{7, 7}};
    CHECK(baseline_fixed(one) == GazePoint{7.0, 7.0});
    CHECK_THROWS_AS(baseline_fixed({}), Error);

    // Translation equivariance.
    Rng rng(11);
    std::vector<GazePoint> base(10);
    for (auto& g : base) g = {rng.uniform(0, 100), rng.uniform(0, 100)};
    const GazePoint mean = baseline_fixed(base);
    std::vector<GazePoint> shifted = base;
    for (auto& g : shifted) {
        g.x += 3.5;
        g.y -= 2.25;
    }
    const GazePoint mean2 = baseline_fixed(shifted);
    CHECK(mean2.x == doctest::Approx(mean.x + 3.5));
    CHECK(mean2.y == doctest::Approx(mean.y - 2.25));
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("baselines");

TEST_CASE("linear regression recovers an exact affine map") {
    Rng rng(13);
    // Ground truth: gaze = A * features + b with random A (2x4), b.
    Eigen::MatrixXd a(2, 4);
    Eigen::Vector2d b;
    for (int i = 0; i < 8; ++i) a(i / 4, i % 4) = rng.normal();
    b << rng.normal(), rng.normal();

    std::vector<std::vector<double>> x;
    std::vector<GazePoint> y;
    for (int i = 0; i < 40; ++i) {
        Eigen::Vector4d f;
        for (int k = 0; k < 4; ++k) f(k) = rng.uniform(-5, 5);
        Eigen::Vector2d g = a * f + b;
        x.push_back({f(0), f(1), f(2), f(3)});
        y.push_back({g(0), g(1)});
    }
    LinRegModel model = fit_linreg(x, y);
    CHECK(!model.ridge_fallback);
    for (int i = 0; i < 10; ++i) {
        Eigen::Vector4d f;
        for (int k = 0; k < 4; ++k) f(k) = rng.uniform(-5, 5);
        Eigen::Vector2d g = a * f + b;
        GazePoint pred = model.predict({f(0), f(1), f(2), f(3)});
        CHECK(std::hypot(pred.x - g(0), pred.y - g(1)) < 1e-6);
    }
}

TEST_CASE("constant features fall back to the mean prediction") {
    std::vector<std::vector<double>> x(10, std::vector<double>{1.0, 1.0});
    std::vector<GazePoint> y;
    Rng rng(17);
    for (int i = 0; i < 10; ++i) y.push_back({rng.uniform(0, 10), rng.uniform(0, 10)});
    LinRegModel model = fit_linreg(x, y);
    CHECK(model.ridge_fallback); // constant columns are rank-deficient
    const GazePoint mean = baseline_fixed(y);
    const GazePoint pred = model.predict({1.0, 1.0});
    CHECK(pred.x == doctest::Approx(mean.x).epsilon(1e-6));
    CHECK(pred.y == doctest::Approx(mean.y).epsilon(1e-6));
}

TEST_CASE("duplicating every training row leaves the fit unchanged") {
    Rng rng(19);
    std::vector<std::vector<double>> x;
    std::vector<GazePoint> y;
    for (int i = 0; i < 12; ++i) {
        x.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)});
        y.push_back({rng.uniform(0, 64), rng.uniform(0, 64)});
    }
    LinRegModel base = fit_linreg(x, y);

    std::vector<std::vector<double>> x2 = x;
    std::vector<GazePoint> y2 = y;
    x2.insert(x2.end(), x.begin(), x.end());
    y2.insert(y2.end(), y.begin(), y.end());
    LinRegModel doubled = fit_linreg(x2, y2);
    CHECK((base.coef - doubled.coef).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("car-in-front picks the box nearest the frame center") {
    const ObjectBox one[] = {{"car", {10, 10, 30, 30}}};
    CarInFront r1 = baseline_car_in_front(one, 1280, 720);
    CHECK(!r1.fallback);
    CHECK(r1.point == GazePoint{20.0, 20.0});

    const ObjectBox two[] = {{"car", {560, 320, 640, 400}}, {"car", {60, 60, 140, 140}}};
    CarInFront r2 = baseline_car_in_front(two, 1280, 720);
    CHECK(r2.point == GazePoint{600.0, 360.0});

    CarInFront r3 = baseline_car_in_front({}, 1280, 720);
    CHECK(r3.fallback);
    CHECK(r3.point == GazePoint{640.0, 360.0});

    // Non-car boxes are ignored.
    const ObjectBox mixed[] = {{"person", {600, 340, 680, 380}}, {"car", {0, 0, 20, 20}}};
    CarInFront r4 = baseline_car_in_front(mixed, 1280, 720);
    CHECK(!r4.fallback);
    CHECK(r4.point == GazePoint{10.0, 10.0});
}

TEST_CASE("embedding cluster stats separate well-separated sessions") {
    Rng rng(23);
    const int per = 40;
    Eigen::MatrixXd emb(8, 2 * per);
    std::vector<int> session_of(2 * per);
    for (int i = 0; i < per; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(8, 0) + 0.05 * Eigen::VectorXd::NullaryExpr(8, [&](auto) { return rng.normal(); });
        emb.col(i) = v / v.norm();
        session_of[i] = 0;
    }
    for (int i = 0; i < per; ++i) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(8, 1) + 0.05 * Eigen::VectorXd::NullaryExpr(8, [&](auto) { return rng.normal(); });
        emb.col(per + i) = v / v.norm();
        session_of[per + i] = 1;
    }
    EmbeddingStats stats = embedding_cluster_stats(emb, session_of, 7, 500);
    CHECK(stats.mean_intra < stats.mean_inter);
    CHECK(stats.gap_ci_low > 0.0);
    CHECK(stats.gap_ci_high >= stats.gap_ci_low);
}

TEST_SUITE_END();
