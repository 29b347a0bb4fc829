#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

#include "../error.hpp"

namespace pogest::nn {

using Mat = Eigen::MatrixXf; // column-major

// Dense NCHW activation tensor. Each sample's C*H*W block is contiguous,
// so flattening to per-sample feature columns is a straight copy.
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<float> v;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_), v(static_cast<size_t>(n_) * c_ * h_ * w_, 0.0f) {}

    size_t size() const { return v.size(); }
    size_t sample_stride() const { return static_cast<size_t>(c) * h * w; }
    size_t plane_stride() const { return static_cast<size_t>(h) * w; }

    float* plane(int ni, int ci) {
        return v.data() + ni * sample_stride() + ci * plane_stride();
    }
    const float* plane(int ni, int ci) const {
        return v.data() + ni * sample_stride() + ci * plane_stride();
    }

    float& at(int ni, int ci, int y, int x) { return plane(ni, ci)[static_cast<size_t>(y) * w + x]; }
    float at(int ni, int ci, int y, int x) const { return plane(ni, ci)[static_cast<size_t>(y) * w + x]; }

    bool same_shape(const Tensor& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
};

// Learnable array with its gradient accumulator.
struct Param {
    std::string name;
    Mat value;
    Mat grad;

    Param() = default;
    Param(std::string name_, int rows, int cols)
        : name(std::move(name_)), value(Mat::Zero(rows, cols)), grad(Mat::Zero(rows, cols)) {}

    void zero_grad() { grad.setZero(); }
    Eigen::Index count() const { return value.size(); }
};

using ParamRefs = std::vector<Param*>;

enum class Mode { train, eval };

} // namespace pogest::nn
