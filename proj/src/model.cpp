#include "model.hpp"

#include <cmath>

namespace pogest {

using nn::Mat;
using nn::Mode;
using nn::Tensor;

ModelConfig ModelConfig::reference() {
    return ModelConfig{224, 64, 4, 4096, 0.5, 8};
}

ModelConfig ModelConfig::desk() {
    return ModelConfig{64, 8, 3, 128, 0.1, 8};
}

void ModelConfig::validate() const {
    require_valid(input_side > 0, "model config: input_side must be positive");
    require_valid(backbone_width > 0, "model config: backbone_width must be positive");
    require_valid(backbone_depth > 0, "model config: backbone_depth must be positive");
    require_valid(head_hidden > 0, "model config: head_hidden must be positive");
    require_valid(dropout_rate >= 0.0 && dropout_rate < 1.0, "model config: dropout_rate must be in [0,1)");
    require_valid(embedding_dim > 0, "model config: embedding_dim must be positive");
}

// ---------------------------------------------------------------------------
// CalibrationNet

namespace {
constexpr double kNormGuard = 1e-12;
}

CalibrationNet::CalibrationNet(const ModelConfig& cfg)
    : cfg_(cfg),
      backbone_("calib", 6, cfg.backbone_width, cfg.backbone_depth + 1),
      fc_("calib.fc", backbone_.out_channels(), cfg.embedding_dim) {
    backbone_.set_needs_input_grad(false);
}

void CalibrationNet::init(Rng& rng) {
    backbone_.init(rng);
    // Moderate scale keeps pre-normalization vectors away from the origin.
    fc_.init(rng, 0.5);
}

nn::ParamRefs CalibrationNet::params() {
    nn::ParamRefs out = backbone_.params();
    for (auto* p : fc_.params()) out.push_back(p);
    return out;
}

Mat CalibrationNet::forward(const Tensor& x, Mode) {
    require(x.c == 6, ErrorKind::validation,
            "calibration input must have 6 channels, got " + std::to_string(x.c));
    Mat pooled = pool_.forward(backbone_.forward(x));
    raw_ = fc_.forward(pooled);
    normed_.resize(raw_.rows(), raw_.cols());
    for (Eigen::Index j = 0; j < raw_.cols(); ++j) {
        const double norm = raw_.col(j).cast<double>().norm();
        const double s = norm + kNormGuard;
        normed_.col(j) = (raw_.col(j).cast<double>() / s).cast<float>();
    }
    return normed_;
}

void CalibrationNet::backward(const Mat& d_embedding) {
    Mat d_raw(raw_.rows(), raw_.cols());
    for (Eigen::Index j = 0; j < raw_.cols(); ++j) {
        const Eigen::VectorXd r = raw_.col(j).cast<double>();
        const Eigen::VectorXd dv = d_embedding.col(j).cast<double>();
        const double norm = r.norm();
        const double s = norm + kNormGuard;
        const double r_dot_dv = r.dot(dv);
        Eigen::VectorXd dr = dv / s;
        if (norm > 0.0) dr -= r * (r_dot_dv / (norm * s * s));
        d_raw.col(j) = dr.cast<float>();
    }
    Mat d_pooled = fc_.backward(d_raw);
    backbone_.backward(pool_.backward(d_pooled));
}

// ---------------------------------------------------------------------------
// RegressionNet

RegressionNet::RegressionNet(const ModelConfig& cfg)
    : cfg_(cfg),
      backbone_("reg", 12 + cfg.embedding_dim, cfg.backbone_width, cfg.backbone_depth),
      w1_("reg.weighting1", backbone_.out_channels(), backbone_.out_channels(), 1, 1, 0),
      w2_("reg.weighting2", backbone_.out_channels(), backbone_.out_channels(), 1, 1, 0),
      w3_("reg.weighting3", backbone_.out_channels(), backbone_.out_channels(), 1, 1, 0),
      dropout_(cfg.dropout_rate),
      fc1_("reg.fc1",
           backbone_.out_channels() * backbone_.out_side(cfg.input_side) * backbone_.out_side(cfg.input_side),
           cfg.head_hidden),
      fc2_("reg.fc2", cfg.head_hidden, cfg.head_hidden),
      fc3_("reg.fc3", cfg.head_hidden, 2) {}

void RegressionNet::init(Rng& rng) {
    backbone_.init(rng);
    w1_.init(rng);
    w2_.init(rng);
    w3_.init(rng);
    fc1_.init(rng);
    fc2_.init(rng);
    // Small output weights start predictions at the frame center.
    fc3_.init(rng, 0.01);
}

nn::ParamRefs RegressionNet::params() {
    nn::ParamRefs out = backbone_.params();
    for (auto* c : {&w1_, &w2_, &w3_})
        for (auto* p : c->params()) out.push_back(p);
    for (auto* l : {&fc1_, &fc2_, &fc3_})
        for (auto* p : l->params()) out.push_back(p);
    return out;
}

Mat RegressionNet::forward(const Tensor& x, Mode mode, Rng* dropout_rng) {
    require(x.c == 12 + cfg_.embedding_dim, ErrorKind::validation,
            "regression input must have " + std::to_string(12 + cfg_.embedding_dim) +
                " channels, got " + std::to_string(x.c));
    require(x.h == cfg_.input_side && x.w == cfg_.input_side, ErrorKind::validation,
            "regression input side mismatch");

    features_ = backbone_.forward(x);
    feat_n_ = features_.n;
    feat_c_ = features_.c;
    feat_h_ = features_.h;
    feat_w_ = features_.w;

    if (force_weighting_ones) {
        weighting_ = Tensor(feat_n_, feat_c_, feat_h_, feat_w_);
        for (auto& v : weighting_.v) v = 1.0f;
    } else {
        weighting_ = w3_.forward(wrelu2_.forward(w2_.forward(wrelu1_.forward(w1_.forward(features_)))));
    }

    Tensor gated(feat_n_, feat_c_, feat_h_, feat_w_);
    for (size_t i = 0; i < gated.v.size(); ++i) gated.v[i] = features_.v[i] * weighting_.v[i];
    gated = gate_relu_.forward(gated);
    gated = dropout_.forward(gated, mode, dropout_rng);

    Mat h = hrelu1_.forward(fc1_.forward(nn::flatten(gated)));
    h = hrelu2_.forward(fc2_.forward(h));
    Mat z = fc3_.forward(h);

    out01_.resize(z.rows(), z.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        out01_.data()[i] = 1.0f / (1.0f + std::exp(-z.data()[i]));
    return out01_;
}

Tensor RegressionNet::backward(const Mat& d_out01) {
    Mat dz(out01_.rows(), out01_.cols());
    for (Eigen::Index i = 0; i < dz.size(); ++i) {
        const float y = out01_.data()[i];
        dz.data()[i] = d_out01.data()[i] * y * (1.0f - y);
    }

    Mat dh = fc3_.backward(dz);
    dh = fc2_.backward(hrelu2_.backward(dh));
    Mat dflat = fc1_.backward(hrelu1_.backward(dh));

    Tensor d_gated = nn::unflatten(dflat, feat_n_, feat_c_, feat_h_, feat_w_);
    d_gated = dropout_.backward(d_gated);
    d_gated = gate_relu_.backward(d_gated);

    Tensor d_features(feat_n_, feat_c_, feat_h_, feat_w_);
    for (size_t i = 0; i < d_features.v.size(); ++i)
        d_features.v[i] = d_gated.v[i] * weighting_.v[i];

    if (!force_weighting_ones) {
        Tensor d_weighting(feat_n_, feat_c_, feat_h_, feat_w_);
        for (size_t i = 0; i < d_weighting.v.size(); ++i)
            d_weighting.v[i] = d_gated.v[i] * features_.v[i];
        Tensor dw = w3_.backward(d_weighting);
        dw = w2_.backward(wrelu2_.backward(dw));
        dw = w1_.backward(wrelu1_.backward(dw));
        for (size_t i = 0; i < d_features.v.size(); ++i) d_features.v[i] += dw.v[i];
    }

    return backbone_.backward(d_features);
}

// ---------------------------------------------------------------------------
// GazeNet

GazeNet::GazeNet(const ModelConfig& cfg, uint64_t init_seed) : cfg_(cfg), calib_(cfg), reg_(cfg) {
    cfg_.validate();
    Rng rng = Rng(init_seed).child("model-init");
    calib_.init(rng);
    reg_.init(rng);
}

nn::ParamRefs GazeNet::params() {
    nn::ParamRefs out = calib_.params();
    for (auto* p : reg_.params()) out.push_back(p);
    return out;
}

std::vector<std::pair<std::string, nn::Param*>> GazeNet::named_params() {
    std::vector<std::pair<std::string, nn::Param*>> out;
    for (auto* p : params()) out.emplace_back(p->name, p);
    return out;
}

} // namespace pogest
