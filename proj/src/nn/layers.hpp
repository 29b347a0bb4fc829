#pragma once

#include <string>
#include <vector>

#include "../rng.hpp"
#include "tensor.hpp"

namespace pogest::nn {

void he_normal_init(Param& p, int fan_in, Rng& rng, double scale = 1.0);

// 3x3 / 1x1 convolution via im2col + GEMM. Forward caches the patch matrix
// for the weight gradient; backward scatters through col2im.
class Conv2d {
public:
    Conv2d(std::string name, int in_ch, int out_ch, int ksize, int stride, int pad);

    Tensor forward(const Tensor& x);
    // Returns dL/dx (empty tensor when needs_input_grad is false) and
    // accumulates weight/bias gradients.
    Tensor backward(const Tensor& dy);

    void init(Rng& rng, double scale = 1.0);
    ParamRefs params() { return {&weight_, &bias_}; }

    int out_side(int in_side) const { return (in_side + 2 * pad_ - ksize_) / stride_ + 1; }

    bool needs_input_grad = true;

private:
    int in_ch_, out_ch_, ksize_, stride_, pad_;
    Param weight_; // out_ch x (in_ch*k*k)
    Param bias_;   // out_ch x 1
    Mat cols_;     // (in_ch*k*k) x (n*ho*wo)
    int cached_n_ = 0, cached_h_ = 0, cached_w_ = 0, cached_ho_ = 0, cached_wo_ = 0;
};

class Linear {
public:
    Linear(std::string name, int in_dim, int out_dim);

    // x: in_dim x batch -> out_dim x batch
    Mat forward(const Mat& x);
    Mat backward(const Mat& dy);

    void init(Rng& rng, double scale = 1.0);
    ParamRefs params() { return {&weight_, &bias_}; }

private:
    Param weight_; // out x in
    Param bias_;   // out x 1
    Mat last_x_;
};

class ReLU {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

    Mat forward(const Mat& x);
    Mat backward(const Mat& dy) const;

private:
    std::vector<uint8_t> mask_;
};

// Inverted dropout on feature maps; identity in eval mode.
class Dropout {
public:
    explicit Dropout(double rate) : rate_(rate) {}

    Tensor forward(const Tensor& x, Mode mode, Rng* rng);
    Tensor backward(const Tensor& dy) const;

private:
    double rate_;
    bool active_ = false;
    std::vector<float> mask_;
};

// (N,C,H,W) -> C x N means.
class GlobalAvgPool {
public:
    Mat forward(const Tensor& x);
    Tensor backward(const Mat& dy) const;

private:
    int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
};

// (N,C,H,W) -> (C*H*W) x N columns.
Mat flatten(const Tensor& x);
Tensor unflatten(const Mat& m, int n, int c, int h, int w);

// Standard two-conv residual block with an optional 1x1 projection skip.
class ResidualBlock {
public:
    ResidualBlock(const std::string& name, int in_ch, int out_ch, int stride);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    void init(Rng& rng);
    ParamRefs params();

    bool needs_input_grad = true;

private:
    bool projected_;
    Conv2d conv1_, conv2_;
    Conv2d skip_;
    ReLU relu1_, relu_out_;
};

// Stem conv + `depth` residual stages; stage i carries width*2^i channels
// and halves the spatial side for i > 0 (the stem already halves once).
class Backbone {
public:
    Backbone(const std::string& name, int in_ch, int width, int depth);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy);

    void init(Rng& rng);
    ParamRefs params();

    int out_channels() const { return out_channels_; }
    int out_side(int in_side) const;

    // When false the gradient stops at the stem (inputs are raw images).
    void set_needs_input_grad(bool v) { stem_.needs_input_grad = v; }

private:
    Conv2d stem_;
    ReLU stem_relu_;
    std::vector<ResidualBlock> blocks_;
    int depth_;
    int out_channels_;
};

} // namespace pogest::nn
