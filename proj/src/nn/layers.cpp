#include "layers.hpp"

#include <cmath>
#include <cstring>

namespace pogest::nn {

void he_normal_init(Param& p, int fan_in, Rng& rng, double scale) {
    const double std = scale * std::sqrt(2.0 / std::max(1, fan_in));
    for (Eigen::Index i = 0; i < p.value.size(); ++i)
        p.value.data()[i] = static_cast<float>(rng.normal(0.0, std));
    p.grad.setZero();
}

// ---------------------------------------------------------------------------
// Conv2d

Conv2d::Conv2d(std::string name, int in_ch, int out_ch, int ksize, int stride, int pad)
    : in_ch_(in_ch), out_ch_(out_ch), ksize_(ksize), stride_(stride), pad_(pad),
      weight_(name + ".w", out_ch, in_ch * ksize * ksize),
      bias_(name + ".b", out_ch, 1) {}

void Conv2d::init(Rng& rng, double scale) {
    he_normal_init(weight_, in_ch_ * ksize_ * ksize_, rng, scale);
    bias_.value.setZero();
    bias_.grad.setZero();
}

Tensor Conv2d::forward(const Tensor& x) {
    require(x.c == in_ch_, ErrorKind::validation,
            "conv " + weight_.name + ": channel-count mismatch, got " + std::to_string(x.c) +
                ", expected " + std::to_string(in_ch_));
    const int ho = (x.h + 2 * pad_ - ksize_) / stride_ + 1;
    const int wo = (x.w + 2 * pad_ - ksize_) / stride_ + 1;
    require(ho > 0 && wo > 0, ErrorKind::validation, "conv " + weight_.name + ": input too small");

    cached_n_ = x.n;
    cached_h_ = x.h;
    cached_w_ = x.w;
    cached_ho_ = ho;
    cached_wo_ = wo;

    const int krows = in_ch_ * ksize_ * ksize_;
    cols_.resize(krows, static_cast<Eigen::Index>(x.n) * ho * wo);

    for (int ni = 0; ni < x.n; ++ni) {
        const Eigen::Index col0 = static_cast<Eigen::Index>(ni) * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
            for (int ox = 0; ox < wo; ++ox) {
                const Eigen::Index col = col0 + static_cast<Eigen::Index>(oy) * wo + ox;
                float* dst = cols_.data() + col * krows;
                const int iy0 = oy * stride_ - pad_;
                const int ix0 = ox * stride_ - pad_;
                for (int ci = 0; ci < in_ch_; ++ci) {
                    const float* plane = x.plane(ni, ci);
                    for (int ky = 0; ky < ksize_; ++ky) {
                        const int iy = iy0 + ky;
                        for (int kx = 0; kx < ksize_; ++kx) {
                            const int ix = ix0 + kx;
                            *dst++ = (iy >= 0 && iy < x.h && ix >= 0 && ix < x.w)
                                         ? plane[static_cast<size_t>(iy) * x.w + ix]
                                         : 0.0f;
                        }
                    }
                }
            }
        }
    }

    Mat y_mat = weight_.value * cols_;
    y_mat.colwise() += bias_.value.col(0);

    Tensor y(x.n, out_ch_, ho, wo);
    const size_t plane = y.plane_stride();
    for (int ni = 0; ni < x.n; ++ni) {
        const Eigen::Index col0 = static_cast<Eigen::Index>(ni) * ho * wo;
        for (size_t s = 0; s < plane; ++s) {
            const float* src = y_mat.data() + (col0 + s) * out_ch_;
            for (int co = 0; co < out_ch_; ++co) y.plane(ni, co)[s] = src[co];
        }
    }
    return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
    const int ho = cached_ho_, wo = cached_wo_;
    const int krows = in_ch_ * ksize_ * ksize_;

    Mat dy_mat(out_ch_, static_cast<Eigen::Index>(dy.n) * ho * wo);
    const size_t plane = static_cast<size_t>(ho) * wo;
    for (int ni = 0; ni < dy.n; ++ni) {
        const Eigen::Index col0 = static_cast<Eigen::Index>(ni) * ho * wo;
        for (size_t s = 0; s < plane; ++s) {
            float* dst = dy_mat.data() + (col0 + s) * out_ch_;
            for (int co = 0; co < out_ch_; ++co) dst[co] = dy.plane(ni, co)[s];
        }
    }

    weight_.grad.noalias() += dy_mat * cols_.transpose();
    bias_.grad.col(0).noalias() += dy_mat.rowwise().sum();

    if (!needs_input_grad) return Tensor();

    Mat dcols = weight_.value.transpose() * dy_mat;

    Tensor dx(cached_n_, in_ch_, cached_h_, cached_w_);
    for (int ni = 0; ni < cached_n_; ++ni) {
        const Eigen::Index col0 = static_cast<Eigen::Index>(ni) * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
            for (int ox = 0; ox < wo; ++ox) {
                const Eigen::Index col = col0 + static_cast<Eigen::Index>(oy) * wo + ox;
                const float* src = dcols.data() + col * krows;
                const int iy0 = oy * stride_ - pad_;
                const int ix0 = ox * stride_ - pad_;
                for (int ci = 0; ci < in_ch_; ++ci) {
                    float* dplane = dx.plane(ni, ci);
                    for (int ky = 0; ky < ksize_; ++ky) {
                        const int iy = iy0 + ky;
                        for (int kx = 0; kx < ksize_; ++kx, ++src) {
                            const int ix = ix0 + kx;
                            if (iy >= 0 && iy < cached_h_ && ix >= 0 && ix < cached_w_)
                                dplane[static_cast<size_t>(iy) * cached_w_ + ix] += *src;
                        }
                    }
                }
            }
        }
    }
    return dx;
}

// ---------------------------------------------------------------------------
// Linear

Linear::Linear(std::string name, int in_dim, int out_dim)
    : weight_(name + ".w", out_dim, in_dim), bias_(name + ".b", out_dim, 1) {}

void Linear::init(Rng& rng, double scale) {
    he_normal_init(weight_, static_cast<int>(weight_.value.cols()), rng, scale);
    bias_.value.setZero();
    bias_.grad.setZero();
}

Mat Linear::forward(const Mat& x) {
    require(x.rows() == weight_.value.cols(), ErrorKind::validation,
            "linear " + weight_.name + ": input dim mismatch");
    last_x_ = x;
    Mat y = weight_.value * x;
    y.colwise() += bias_.value.col(0);
    return y;
}

Mat Linear::backward(const Mat& dy) {
    weight_.grad.noalias() += dy * last_x_.transpose();
    bias_.grad.col(0).noalias() += dy.rowwise().sum();
    return weight_.value.transpose() * dy;
}

// ---------------------------------------------------------------------------
// ReLU

Tensor ReLU::forward(const Tensor& x) {
    Tensor y = x;
    mask_.assign(x.size(), 0);
    for (size_t i = 0; i < y.v.size(); ++i) {
        if (y.v[i] > 0.0f) {
            mask_[i] = 1;
        } else {
            y.v[i] = 0.0f;
        }
    }
    return y;
}

Tensor ReLU::backward(const Tensor& dy) const {
    Tensor dx = dy;
    for (size_t i = 0; i < dx.v.size(); ++i)
        if (!mask_[i]) dx.v[i] = 0.0f;
    return dx;
}

Mat ReLU::forward(const Mat& x) {
    Mat y = x;
    mask_.assign(static_cast<size_t>(x.size()), 0);
    float* d = y.data();
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (d[i] > 0.0f) {
            mask_[i] = 1;
        } else {
            d[i] = 0.0f;
        }
    }
    return y;
}

Mat ReLU::backward(const Mat& dy) const {
    Mat dx = dy;
    float* d = dx.data();
    for (Eigen::Index i = 0; i < dx.size(); ++i)
        if (!mask_[i]) d[i] = 0.0f;
    return dx;
}

// ---------------------------------------------------------------------------
// Dropout

Tensor Dropout::forward(const Tensor& x, Mode mode, Rng* rng) {
    active_ = (mode == Mode::train && rate_ > 0.0);
    if (!active_) return x;
    require(rng != nullptr, ErrorKind::runtime, "dropout: train mode requires an rng");
    const float keep = static_cast<float>(1.0 - rate_);
    mask_.assign(x.size(), 0.0f);
    Tensor y = x;
    for (size_t i = 0; i < y.v.size(); ++i) {
        if (rng->uniform() >= rate_) {
            mask_[i] = 1.0f / keep;
            y.v[i] *= mask_[i];
        } else {
            y.v[i] = 0.0f;
        }
    }
    return y;
}

Tensor Dropout::backward(const Tensor& dy) const {
    if (!active_) return dy;
    Tensor dx = dy;
    for (size_t i = 0; i < dx.v.size(); ++i) dx.v[i] *= mask_[i];
    return dx;
}

// ---------------------------------------------------------------------------
// GlobalAvgPool / flatten

Mat GlobalAvgPool::forward(const Tensor& x) {
    n_ = x.n;
    c_ = x.c;
    h_ = x.h;
    w_ = x.w;
    Mat y(x.c, x.n);
    const float inv = 1.0f / static_cast<float>(x.h * x.w);
    for (int ni = 0; ni < x.n; ++ni) {
        for (int ci = 0; ci < x.c; ++ci) {
            const float* plane = x.plane(ni, ci);
            float acc = 0.0f;
            for (size_t s = 0; s < x.plane_stride(); ++s) acc += plane[s];
            y(ci, ni) = acc * inv;
        }
    }
    return y;
}

Tensor GlobalAvgPool::backward(const Mat& dy) const {
    Tensor dx(n_, c_, h_, w_);
    const float inv = 1.0f / static_cast<float>(h_ * w_);
    for (int ni = 0; ni < n_; ++ni) {
        for (int ci = 0; ci < c_; ++ci) {
            float* plane = dx.plane(ni, ci);
            const float g = dy(ci, ni) * inv;
            for (size_t s = 0; s < dx.plane_stride(); ++s) plane[s] = g;
        }
    }
    return dx;
}

Mat flatten(const Tensor& x) {
    Mat y(static_cast<Eigen::Index>(x.sample_stride()), x.n);
    for (int ni = 0; ni < x.n; ++ni)
        std::memcpy(y.data() + static_cast<size_t>(ni) * x.sample_stride(),
                    x.v.data() + static_cast<size_t>(ni) * x.sample_stride(),
                    x.sample_stride() * sizeof(float));
    return y;
}

Tensor unflatten(const Mat& m, int n, int c, int h, int w) {
    Tensor y(n, c, h, w);
    std::memcpy(y.v.data(), m.data(), y.size() * sizeof(float));
    return y;
}

// ---------------------------------------------------------------------------
// ResidualBlock

ResidualBlock::ResidualBlock(const std::string& name, int in_ch, int out_ch, int stride)
    : projected_(stride != 1 || in_ch != out_ch),
      conv1_(name + ".conv1", in_ch, out_ch, 3, stride, 1),
      conv2_(name + ".conv2", out_ch, out_ch, 3, 1, 1),
      skip_(name + ".skip", in_ch, out_ch, 1, stride, 0) {}

void ResidualBlock::init(Rng& rng) {
    conv1_.init(rng);
    conv2_.init(rng);
    if (projected_) skip_.init(rng);
}

ParamRefs ResidualBlock::params() {
    ParamRefs out = conv1_.params();
    for (auto* p : conv2_.params()) out.push_back(p);
    if (projected_) {
        for (auto* p : skip_.params()) out.push_back(p);
    }
    return out;
}

Tensor ResidualBlock::forward(const Tensor& x) {
    conv1_.needs_input_grad = needs_input_grad;
    skip_.needs_input_grad = needs_input_grad;
    Tensor main = relu1_.forward(conv1_.forward(x));
    main = conv2_.forward(main);
    Tensor shortcut = projected_ ? skip_.forward(x) : x;
    require(main.same_shape(shortcut), ErrorKind::runtime, "residual block: shape mismatch");
    for (size_t i = 0; i < main.v.size(); ++i) main.v[i] += shortcut.v[i];
    return relu_out_.forward(main);
}

Tensor ResidualBlock::backward(const Tensor& dy) {
    Tensor d_sum = relu_out_.backward(dy);
    Tensor d_main = conv2_.backward(d_sum);
    d_main = relu1_.backward(d_main);
    Tensor dx = conv1_.backward(d_main);
    if (projected_) {
        Tensor d_skip = skip_.backward(d_sum);
        if (!needs_input_grad) return Tensor();
        for (size_t i = 0; i < dx.v.size(); ++i) dx.v[i] += d_skip.v[i];
        return dx;
    }
    if (!needs_input_grad) return Tensor();
    for (size_t i = 0; i < dx.v.size(); ++i) dx.v[i] += d_sum.v[i];
    return dx;
}

// ---------------------------------------------------------------------------
// Backbone

Backbone::Backbone(const std::string& name, int in_ch, int width, int depth)
    : stem_(name + ".stem", in_ch, width, 3, 2, 1), depth_(depth) {
    require_valid(width > 0 && depth > 0, "backbone: width and depth must be positive");
    int ch = width;
    for (int i = 0; i < depth; ++i) {
        const int out_ch = width << i;
        blocks_.emplace_back(name + ".stage" + std::to_string(i), ch, out_ch, i == 0 ? 1 : 2);
        ch = out_ch;
    }
    out_channels_ = ch;
}

int Backbone::out_side(int in_side) const {
    int side = (in_side + 1) / 2; // stem stride 2, pad 1, k 3
    for (int i = 1; i < depth_; ++i) side = (side + 1) / 2;
    return side;
}

void Backbone::init(Rng& rng) {
    stem_.init(rng);
    for (auto& b : blocks_) b.init(rng);
}

ParamRefs Backbone::params() {
    ParamRefs out = stem_.params();
    for (auto& b : blocks_)
        for (auto* p : b.params()) out.push_back(p);
    return out;
}

Tensor Backbone::forward(const Tensor& x) {
    Tensor y = stem_relu_.forward(stem_.forward(x));
    for (auto& b : blocks_) y = b.forward(y);
    return y;
}

Tensor Backbone::backward(const Tensor& dy) {
    Tensor d = dy;
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) d = it->backward(d);
    d = stem_relu_.backward(d);
    return stem_.backward(d);
}

} // namespace pogest::nn
