#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace pogest {

// Interleaved 8-bit image (HWC). channels is 1 (gray / label map) or 3 (RGB).
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<uint8_t> px;

    static ImageU8 make(int w, int h, int c, uint8_t fill = 0) {
        ImageU8 img;
        img.width = w;
        img.height = h;
        img.channels = c;
        img.px.assign(static_cast<size_t>(w) * h * c, fill);
        return img;
    }

    uint8_t& at(int x, int y, int c) {
        return px[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    uint8_t at(int x, int y, int c) const {
        return px[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    friend bool operator==(const ImageU8&, const ImageU8&) = default;
};

ImageU8 load_png(const std::string& path);
void save_png(const std::string& path, const ImageU8& img);

// Bilinear sample of channel c at continuous pixel-center coordinates
// (pixel i has center i). Out-of-bounds neighbourhood contributes zero,
// which gives crops falling outside the image a zero-padded border.
// Values are rescaled from 8-bit to [0,1].
float sample_bilinear01(const ImageU8& img, double x, double y, int c);

// Resample the region `box` of `src` onto a side x side grid, writing one
// plane per channel at dst, dst+plane_stride, ... Box edges are continuous
// coordinates; source pixel i covers [i, i+1).
void crop_resize_into(const ImageU8& src, const BoundingBox& box, int side,
                      float* dst, size_t plane_stride);

// Full-image resize: crop_resize over [0,0,W,H].
void resize_into(const ImageU8& src, int side, float* dst, size_t plane_stride);

} // namespace pogest
