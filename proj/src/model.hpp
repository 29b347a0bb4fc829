#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "nn/layers.hpp"

namespace pogest {

struct ModelConfig {
    int input_side = 224;
    int backbone_width = 64;
    int backbone_depth = 4; // residual stages
    int head_hidden = 4096;
    double dropout_rate = 0.5;
    int embedding_dim = 8;

    // Mirrors an 18-layer residual classifier plus one extra stage ahead of
    // the pooled embedding head.
    static ModelConfig reference();
    // Small preset for 64x64 desk-scale experiments.
    static ModelConfig desk();

    void validate() const;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct GazePrediction {
    GazePoint point;
    Eigen::VectorXd embedding;
};

// Camera-configuration embedding branch: residual backbone over the
// 6-channel (scene, face) stack, an extra residual stage, global average
// pooling, and a linear map to a unit-normalized embedding.
class CalibrationNet {
public:
    explicit CalibrationNet(const ModelConfig& cfg);

    // x: (N, 6, side, side) -> embedding_dim x N, unit-norm columns.
    nn::Mat forward(const nn::Tensor& x, nn::Mode mode);
    void backward(const nn::Mat& d_embedding);

    void init(Rng& rng);
    nn::ParamRefs params();

private:
    ModelConfig cfg_;
    nn::Backbone backbone_;
    nn::GlobalAvgPool pool_;
    nn::Linear fc_;
    nn::Mat raw_;   // pre-normalization embeddings
    nn::Mat normed_;
};

// Point-of-gaze regression branch: residual backbone over the 20-channel
// stack, a three-layer 1x1 spatial weighting branch multiplied into the
// features, then dropout and a fully connected head squashed to [0,1]^2.
class RegressionNet {
public:
    explicit RegressionNet(const ModelConfig& cfg);

    // x: (N, 20, side, side) -> 2 x N normalized coordinates in (0,1).
    nn::Mat forward(const nn::Tensor& x, nn::Mode mode, Rng* dropout_rng);
    // d_out01: gradient w.r.t. the normalized coordinates; returns dL/dx.
    nn::Tensor backward(const nn::Mat& d_out01);

    void init(Rng& rng);
    nn::ParamRefs params();

    // Test hook: replaces the learned spatial weighting with all-ones.
    bool force_weighting_ones = false;

private:
    ModelConfig cfg_;
    nn::Backbone backbone_;
    nn::Conv2d w1_, w2_, w3_;
    nn::ReLU wrelu1_, wrelu2_;
    nn::ReLU gate_relu_;
    nn::Dropout dropout_;
    nn::Linear fc1_, fc2_, fc3_;
    nn::ReLU hrelu1_, hrelu2_;
    nn::Tensor features_, weighting_; // caches for the elementwise product
    nn::Mat out01_;
    int feat_n_ = 0, feat_c_ = 0, feat_h_ = 0, feat_w_ = 0;
};

// The full two-module network. Inputs are assembled outside (see
// assemble.hpp); this class owns parameters, initialization and the
// parameter registry used by the optimizer and checkpoints.
class GazeNet {
public:
    explicit GazeNet(const ModelConfig& cfg, uint64_t init_seed = 0);

    const ModelConfig& config() const { return cfg_; }

    CalibrationNet& calibration() { return calib_; }
    RegressionNet& regression() { return reg_; }

    nn::ParamRefs params();

    // Named parameter access for checkpoints.
    std::vector<std::pair<std::string, nn::Param*>> named_params();

private:
    ModelConfig cfg_;
    CalibrationNet calib_;
    RegressionNet reg_;
};

} // namespace pogest
