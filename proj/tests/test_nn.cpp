#include <doctest.h>

#include <cmath>

#include "model.hpp"
#include "nn/layers.hpp"

using namespace pogest;
using namespace pogest::nn;

TEST_SUITE_BEGIN("nn");

namespace {

Tensor random_tensor(int n, int c, int h, int w, Rng& rng, double scale = 1.0) {
    Tensor t(n, c, h, w);
    for (auto& v : t.v) v = static_cast<float>(rng.normal(0.0, scale));
    return t;
}

// Scalar objective for gradient checks: weighted sum of the outputs.
float weighted_sum(const Tensor& t, const std::vector<float>& w) {
    float s = 0.0f;
    for (size_t i = 0; i < t.v.size(); ++i) s += t.v[i] * w[i];
    return s;
}

// Relative-difference comparator tolerant to float32 finite differences.
void check_close(double analytic, double fd, double tol = 2e-2) {
    const double denom = std::max({std::abs(analytic), std::abs(fd), 0.05});
    CHECK(std::abs(analytic - fd) / denom < tol);
}

} // namespace

TEST_CASE("conv2d forward matches a direct convolution") {
    Rng rng(3);
    Conv2d conv("t.conv", 2, 3, 3, 2, 1);
    conv.init(rng);
    Tensor x = random_tensor(2, 2, 7, 6, rng);
    Tensor y = conv.forward(x);
    CHECK(y.n == 2);
    CHECK(y.c == 3);
    CHECK(y.h == 4);
    CHECK(y.w == 3);

    // Direct evaluation of one output element.
    auto direct = [&](int ni, int co, int oy, int ox) {
        double acc = 0.0;
        for (int ci = 0; ci < 2; ++ci)
            for (int ky = 0; ky < 3; ++ky)
                for (int kx = 0; kx < 3; ++kx) {
                    const int iy = oy * 2 - 1 + ky;
                    const int ix = ox * 2 - 1 + kx;
                    if (iy < 0 || ix < 0 || iy >= x.h || ix >= x.w) continue;
                    // weight layout: out x (in*k*k), row-major patch order
                    const int col = (ci * 3 + ky) * 3 + kx;
                    acc += static_cast<double>(conv.params()[0]->value(co, col)) * x.at(ni, ci, iy, ix);
                }
        return acc + conv.params()[1]->value(co, 0);
    };
    for (int ni = 0; ni < 2; ++ni)
        for (int co = 0; co < 3; ++co)
            for (int oy = 0; oy < y.h; ++oy)
                for (int ox = 0; ox < y.w; ++ox)
                    CHECK(y.at(ni, co, oy, ox) == doctest::Approx(direct(ni, co, oy, ox)).epsilon(1e-4));
}

TEST_CASE("conv2d gradients agree with finite differences") {
    Rng rng(5);
    Conv2d conv("t.conv", 2, 2, 3, 1, 1);
    conv.init(rng);
    Tensor x = random_tensor(1, 2, 5, 5, rng);
    Tensor y0 = conv.forward(x);

    std::vector<float> w(y0.size());
    Rng wr(7);
    for (auto& v : w) v = static_cast<float>(wr.normal());

    Tensor dy(y0.n, y0.c, y0.h, y0.w);
    for (size_t i = 0; i < dy.v.size(); ++i) dy.v[i] = w[i];
    conv.params()[0]->zero_grad();
    conv.params()[1]->zero_grad();
    Tensor dx = conv.backward(dy);

    const float h = 1e-2f;
    // Input gradient, a few positions.
    for (size_t i = 0; i < x.v.size(); i += 7) {
        Tensor xp = x, xm = x;
        xp.v[i] += h;
        xm.v[i] -= h;
        const double fd = (weighted_sum(conv.forward(xp), w) - weighted_sum(conv.forward(xm), w)) /
                          (2.0 * h);
        check_close(dx.v[i], fd);
    }
    // Weight gradient, a few entries.
    conv.forward(x);
    conv.params()[0]->zero_grad();
    conv.params()[1]->zero_grad();
    conv.backward(dy);
    Param& weight = *conv.params()[0];
    for (Eigen::Index i = 0; i < weight.value.size(); i += 5) {
        const float orig = weight.value.data()[i];
        weight.value.data()[i] = orig + h;
        const double up = weighted_sum(conv.forward(x), w);
        weight.value.data()[i] = orig - h;
        const double dn = weighted_sum(conv.forward(x), w);
        weight.value.data()[i] = orig;
        check_close(weight.grad.data()[i], (up - dn) / (2.0 * h));
    }
}

TEST_CASE("residual backbone gradients agree with finite differences") {
    Rng rng(11);
    Backbone bb("t.bb", 4, 4, 2);
    bb.init(rng);
    Tensor x = random_tensor(2, 4, 8, 8, rng);
    Tensor y0 = bb.forward(x);

    std::vector<float> w(y0.size());
    Rng wr(13);
    for (auto& v : w) v = static_cast<float>(wr.normal());
    Tensor dy(y0.n, y0.c, y0.h, y0.w);
    for (size_t i = 0; i < dy.v.size(); ++i) dy.v[i] = w[i];

    for (auto* p : bb.params()) p->zero_grad();
    Tensor dx = bb.backward(dy);

    const float h = 2e-2f;
    for (size_t i = 0; i < x.v.size(); i += 23) {
        Tensor xp = x, xm = x;
        xp.v[i] += h;
        xm.v[i] -= h;
        const double fd = (weighted_sum(bb.forward(xp), w) - weighted_sum(bb.forward(xm), w)) /
                          (2.0 * h);
        check_close(dx.v[i], fd, 5e-2);
    }

    bb.forward(x);
    for (auto* p : bb.params()) p->zero_grad();
    bb.backward(dy);
    for (auto* p : bb.params()) {
        for (Eigen::Index i = 0; i < p->value.size(); i += std::max<Eigen::Index>(1, p->value.size() / 4)) {
            const float orig = p->value.data()[i];
            p->value.data()[i] = orig + h;
            const double up = weighted_sum(bb.forward(x), w);
            p->value.data()[i] = orig - h;
            const double dn = weighted_sum(bb.forward(x), w);
            p->value.data()[i] = orig;
            check_close(p->grad.data()[i], (up - dn) / (2.0 * h), 5e-2);
        }
    }
}

TEST_CASE("linear, relu, pooling and flatten backprop") {
    Rng rng(17);
    Linear lin("t.lin", 6, 4);
    lin.init(rng);
    Mat x(6, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<float>(rng.normal());
    Mat y = lin.forward(x);
    CHECK(y.rows() == 4);
    CHECK(y.cols() == 3);

    Mat dy = Mat::Ones(4, 3);
    lin.params()[0]->zero_grad();
    lin.params()[1]->zero_grad();
    Mat dx = lin.backward(dy);
    // d(sum y)/dx = W^T * 1
    Mat expected = lin.params()[0]->value.transpose() * dy;
    CHECK((dx - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    // Bias grad is the row count of columns.
    CHECK(lin.params()[1]->grad(0, 0) == doctest::Approx(3.0));

    GlobalAvgPool gap;
    Tensor t = random_tensor(2, 3, 4, 4, rng);
    Mat pooled = gap.forward(t);
    CHECK(pooled.rows() == 3);
    CHECK(pooled.cols() == 2);
    double manual = 0.0;
    for (size_t s = 0; s < t.plane_stride(); ++s) manual += t.plane(1, 2)[s];
    CHECK(pooled(2, 1) == doctest::Approx(manual / 16.0).epsilon(1e-5));

    Tensor back = gap.backward(Mat::Ones(3, 2));
    CHECK(back.v[0] == doctest::Approx(1.0 / 16.0));

    Tensor f = random_tensor(2, 2, 3, 3, rng);
    Mat flat = flatten(f);
    CHECK(flat.rows() == 18);
    CHECK(flat(4, 1) == f.v[f.sample_stride() + 4]);
    Tensor rt = unflatten(flat, 2, 2, 3, 3);
    CHECK(rt.v == f.v);
}

TEST_CASE("dropout is identity in eval mode and rescales in train mode") {
    Rng rng(19);
    Dropout drop(0.5);
    Tensor x = random_tensor(1, 4, 8, 8, rng);
    Tensor eval_out = drop.forward(x, Mode::eval, nullptr);
    CHECK(eval_out.v == x.v);

    Rng drng(23);
    Tensor train_out = drop.forward(x, Mode::train, &drng);
    size_t zeros = 0;
    for (size_t i = 0; i < train_out.v.size(); ++i) {
        if (train_out.v[i] == 0.0f) {
            ++zeros;
        } else {
            CHECK(train_out.v[i] == doctest::Approx(x.v[i] * 2.0f));
        }
    }
    CHECK(zeros > 50);
    CHECK(zeros < 200);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("model");

TEST_CASE("calibration embeddings are unit norm for random inputs") {
    ModelConfig cfg = ModelConfig::desk();
    cfg.input_side = 32;
    cfg.backbone_width = 4;
    GazeNet net(cfg, 5);
    Rng rng(29);
    double max_dev = 0.0;
    for (int batch = 0; batch < 10; ++batch) {
        Tensor x(4, 6, 32, 32);
        for (auto& v : x.v) v = static_cast<float>(rng.uniform());
        Mat emb = net.calibration().forward(x, Mode::eval);
        for (Eigen::Index c = 0; c < emb.cols(); ++c)
            max_dev = std::max(max_dev, std::abs(emb.col(c).cast<double>().norm() - 1.0));
    }
    CHECK(max_dev < 1e-6);
}

TEST_CASE("channel count violations raise instead of reshaping") {
    ModelConfig cfg = ModelConfig::desk();
    cfg.input_side = 32;
    cfg.backbone_width = 4;
    GazeNet net(cfg, 6);
    Tensor wrong(1, 5, 32, 32);
    CHECK_THROWS_AS(net.calibration().forward(wrong, Mode::eval), Error);
    Tensor wrong20(1, 19, 32, 32);
    CHECK_THROWS_AS(net.regression().forward(wrong20, Mode::eval, nullptr), Error);
}

TEST_CASE("eval mode forward is bit-identical across calls") {
    ModelConfig cfg = ModelConfig::desk();
    cfg.input_side = 32;
    cfg.backbone_width = 4;
    GazeNet net(cfg, 7);
    Rng rng(31);
    Tensor x(2, 20, 32, 32);
    for (auto& v : x.v) v = static_cast<float>(rng.uniform());
    Mat a = net.regression().forward(x, Mode::eval, nullptr);
    Mat b = net.regression().forward(x, Mode::eval, nullptr);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("forcing the spatial weighting to ones bypasses the gating branch") {
    ModelConfig cfg = ModelConfig::desk();
    cfg.input_side = 32;
    cfg.backbone_width = 4;
    cfg.dropout_rate = 0.0;
    GazeNet net(cfg, 9);
    Rng rng(37);
    Tensor x(1, 20, 32, 32);
    for (auto& v : x.v) v = static_cast<float>(rng.uniform());

    net.regression().force_weighting_ones = true;
    Mat bypass = net.regression().forward(x, Mode::eval, nullptr);
    net.regression().force_weighting_ones = false;
    Mat gated = net.regression().forward(x, Mode::eval, nullptr);

    // The bypass output equals the head applied to relu(F); with the learned
    // gate in place the result differs, confirming the multiply placement.
    CHECK((bypass - gated).cwiseAbs().maxCoeff() > 0.0f);

    // With every gating conv forced to identity-like all-ones output the two
    // paths must coincide: emulate by re-running bypass twice.
    net.regression().force_weighting_ones = true;
    Mat bypass2 = net.regression().forward(x, Mode::eval, nullptr);
    CHECK((bypass - bypass2).cwiseAbs().maxCoeff() == 0.0f);
}

TEST_CASE("regression and calibration gradients flow end to end") {
    ModelConfig cfg = ModelConfig::desk();
    cfg.input_side = 16;
    cfg.backbone_width = 4;
    cfg.head_hidden = 16;
    cfg.dropout_rate = 0.0;
    GazeNet net(cfg, 11);
    Rng rng(41);

    Tensor x(2, 20, 16, 16);
    for (auto& v : x.v) v = static_cast<float>(rng.uniform());
    Mat out = net.regression().forward(x, Mode::train, nullptr);
    Mat dout = Mat::Ones(2, 2);
    for (auto* p : net.params()) p->zero_grad();
    Tensor dx = net.regression().backward(dout);
    CHECK(dx.same_shape(x));

    // Finite check: all gradients finite, some nonzero.
    double total = 0.0;
    for (auto* p : net.regression().params()) {
        for (Eigen::Index i = 0; i < p->grad.size(); ++i) {
            CHECK(std::isfinite(p->grad.data()[i]));
            total += std::abs(p->grad.data()[i]);
        }
    }
    CHECK(total > 0.0);

    // Finite-difference spot check through the full regression net.
    auto objective = [&]() {
        Mat y = net.regression().forward(x, Mode::train, nullptr);
        return static_cast<double>(y.sum());
    };
    auto* fc1 = net.regression().params()[net.regression().params().size() - 6];
    const float h = 1e-3f;
    for (Eigen::Index i = 0; i < fc1->value.size(); i += std::max<Eigen::Index>(1, fc1->value.size() / 3)) {
        const float orig = fc1->value.data()[i];
        fc1->value.data()[i] = orig + h;
        const double up = objective();
        fc1->value.data()[i] = orig - h;
        const double dn = objective();
        fc1->value.data()[i] = orig;
        const double fd = (up - dn) / (2.0 * h);
        const double an = fc1->grad.data()[i];
        const double denom = std::max({std::abs(an), std::abs(fd), 1e-3});
        CHECK(std::abs(an - fd) / denom < 5e-2);
    }

    // Calibration gradient path.
    Tensor cx(2, 6, 16, 16);
    for (auto& v : cx.v) v = static_cast<float>(rng.uniform());
    Mat emb = net.calibration().forward(cx, Mode::train);
    for (auto* p : net.calibration().params()) p->zero_grad();
    Mat demb = Mat::Ones(cfg.embedding_dim, 2);
    net.calibration().backward(demb);
    double csum = 0.0;
    for (auto* p : net.calibration().params())
        for (Eigen::Index i = 0; i < p->grad.size(); ++i) {
            CHECK(std::isfinite(p->grad.data()[i]));
            csum += std::abs(p->grad.data()[i]);
        }
    CHECK(csum > 0.0);
}

TEST_CASE("embedding normalization backward matches finite differences") {
    ModelConfig cfg = ModelConfig::desk();
    cfg.input_side = 16;
    cfg.backbone_width = 4;
    GazeNet net(cfg, 13);
    Rng rng(43);
    Tensor cx(1, 6, 16, 16);
    for (auto& v : cx.v) v = static_cast<float>(rng.uniform());

    std::vector<float> w(static_cast<size_t>(cfg.embedding_dim));
    for (auto& v : w) v = static_cast<float>(rng.normal());

    auto objective = [&]() {
        Mat e = net.calibration().forward(cx, Mode::eval);
        double s = 0.0;
        for (int i = 0; i < cfg.embedding_dim; ++i) s += w[i] * e(i, 0);
        return s;
    };

    net.calibration().forward(cx, Mode::eval);
    for (auto* p : net.calibration().params()) p->zero_grad();
    Mat demb(cfg.embedding_dim, 1);
    for (int i = 0; i < cfg.embedding_dim; ++i) demb(i, 0) = w[i];
    net.calibration().backward(demb);

    auto* fc = net.calibration().params().back() == nullptr
                   ? nullptr
                   : net.calibration().params()[net.calibration().params().size() - 2];
    REQUIRE(fc != nullptr);
    const float h = 1e-3f;
    for (Eigen::Index i = 0; i < fc->value.size(); i += std::max<Eigen::Index>(1, fc->value.size() / 5)) {
        const float orig = fc->value.data()[i];
        fc->value.data()[i] = orig + h;
        const double up = objective();
        fc->value.data()[i] = orig - h;
        const double dn = objective();
        fc->value.data()[i] = orig;
        const double fd = (up - dn) / (2.0 * h);
        const double an = fc->grad.data()[i];
        const double denom = std::max({std::abs(an), std::abs(fd), 1e-2});
        CHECK(std::abs(an - fd) / denom < 5e-2);
    }
}

TEST_CASE("reference preset builds and validates") {
    ModelConfig ref = ModelConfig::reference();
    CHECK_NOTHROW(ref.validate());
    CHECK(ref.head_hidden == 4096);
    CHECK(ref.dropout_rate == 0.5);
    CHECK(ref.embedding_dim == 8);
    // Construction only; training the reference preset is out of test scope.
    GazeNet net(ref, 1);
    CHECK(net.params().size() > 20);
}

TEST_SUITE_END();
