#include "image.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "error.hpp"

namespace pogest {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

ImageU8 load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) Error::io("cannot open image file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) Error::runtime("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        Error::runtime("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        Error::io("failed to decode PNG: " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    color_type = png_get_color_type(png, info);
    int channels = (color_type == PNG_COLOR_TYPE_GRAY) ? 1 : 3;

    ImageU8 img = ImageU8::make(static_cast<int>(w), static_cast<int>(h), channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = img.px.data() + static_cast<size_t>(y) * w * channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png(const std::string& path, const ImageU8& img) {
    require_valid(img.channels == 1 || img.channels == 3, "save_png: channels must be 1 or 3");
    require_valid(img.width > 0 && img.height > 0, "save_png: empty image");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) Error::io("cannot open image file for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) Error::runtime("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        Error::runtime("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        Error::io("failed to encode PNG: " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.px.data() + static_cast<size_t>(y) * img.width * img.channels);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

float sample_bilinear01(const ImageU8& img, double x, double y, int c) {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double fx = x - x0;
    double fy = y - y0;

    auto tap = [&](int xi, int yi) -> double {
        if (xi < 0 || yi < 0 || xi >= img.width || yi >= img.height) return 0.0;
        return img.at(xi, yi, c) * (1.0 / 255.0);
    };

    double v = (1.0 - fx) * (1.0 - fy) * tap(x0, y0) + fx * (1.0 - fy) * tap(x0 + 1, y0) +
               (1.0 - fx) * fy * tap(x0, y0 + 1) + fx * fy * tap(x0 + 1, y0 + 1);
    return static_cast<float>(v);
}

void crop_resize_into(const ImageU8& src, const BoundingBox& box, int side,
                      float* dst, size_t plane_stride) {
    require_valid(side > 0, "crop_resize: side must be positive");
    box.validate("crop box");
    const double sx = box.width() / side;
    const double sy = box.height() / side;
    for (int c = 0; c < src.channels; ++c) {
        float* plane = dst + static_cast<size_t>(c) * plane_stride;
        for (int j = 0; j < side; ++j) {
            double y = box.y_min + (j + 0.5) * sy - 0.5;
            for (int i = 0; i < side; ++i) {
                double x = box.x_min + (i + 0.5) * sx - 0.5;
                plane[static_cast<size_t>(j) * side + i] = sample_bilinear01(src, x, y, c);
            }
        }
    }
}

void resize_into(const ImageU8& src, int side, float* dst, size_t plane_stride) {
    crop_resize_into(src, {0.0, 0.0, double(src.width), double(src.height)}, side, dst, plane_stride);
}

} // namespace pogest
