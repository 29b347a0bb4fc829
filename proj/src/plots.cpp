#include "plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "error.hpp"
#include "image.hpp"

namespace pogest {

namespace {

// 5x7 column font, LSB = top row.
struct Glyph {
    char ch;
    uint8_t col[5];
};

constexpr Glyph kFont[] = {
    {'0', {0x3E, 0x51, 0x49, 0x45, 0x3E}}, {'1', {0x00, 0x42, 0x7F, 0x40, 0x00}},
    {'2', {0x42, 0x61, 0x51, 0x49, 0x46}}, {'3', {0x21, 0x41, 0x45, 0x4B, 0x31}},
    {'4', {0x18, 0x14, 0x12, 0x7F, 0x10}}, {'5', {0x27, 0x45, 0x45, 0x45, 0x39}},
    {'6', {0x3C, 0x4A, 0x49, 0x49, 0x30}}, {'7', {0x01, 0x71, 0x09, 0x05, 0x03}},
    {'8', {0x36, 0x49, 0x49, 0x49, 0x36}}, {'9', {0x06, 0x49, 0x49, 0x29, 0x1E}},
    {'A', {0x7E, 0x11, 0x11, 0x11, 0x7E}}, {'B', {0x7F, 0x49, 0x49, 0x49, 0x36}},
    {'C', {0x3E, 0x41, 0x41, 0x41, 0x22}}, {'D', {0x7F, 0x41, 0x41, 0x22, 0x1C}},
    {'E', {0x7F, 0x49, 0x49, 0x49, 0x41}}, {'F', {0x7F, 0x09, 0x09, 0x09, 0x01}},
    {'G', {0x3E, 0x41, 0x49, 0x49, 0x7A}}, {'H', {0x7F, 0x08, 0x08, 0x08, 0x7F}},
    {'I', {0x00, 0x41, 0x7F, 0x41, 0x00}}, {'J', {0x20, 0x40, 0x41, 0x3F, 0x01}},
    {'K', {0x7F, 0x08, 0x14, 0x22, 0x41}}, {'L', {0x7F, 0x40, 0x40, 0x40, 0x40}},
    {'M', {0x7F, 0x02, 0x0C, 0x02, 0x7F}}, {'N', {0x7F, 0x04, 0x08, 0x10, 0x7F}},
    {'O', {0x3E, 0x41, 0x41, 0x41, 0x3E}}, {'P', {0x7F, 0x09, 0x09, 0x09, 0x06}},
    {'Q', {0x3E, 0x41, 0x51, 0x21, 0x5E}}, {'R', {0x7F, 0x09, 0x19, 0x29, 0x46}},
    {'S', {0x46, 0x49, 0x49, 0x49, 0x31}}, {'T', {0x01, 0x01, 0x7F, 0x01, 0x01}},
    {'U', {0x3F, 0x40, 0x40, 0x40, 0x3F}}, {'V', {0x1F, 0x20, 0x40, 0x20, 0x1F}},
    {'W', {0x3F, 0x40, 0x38, 0x40, 0x3F}}, {'X', {0x63, 0x14, 0x08, 0x14, 0x63}},
    {'Y', {0x07, 0x08, 0x70, 0x08, 0x07}}, {'Z', {0x61, 0x51, 0x49, 0x45, 0x43}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00}}, {'.', {0x00, 0x60, 0x60, 0x00, 0x00}},
    {'-', {0x08, 0x08, 0x08, 0x08, 0x08}}, {'_', {0x40, 0x40, 0x40, 0x40, 0x40}},
    {':', {0x00, 0x36, 0x36, 0x00, 0x00}}, {'%', {0x23, 0x13, 0x08, 0x64, 0x62}},
    {'/', {0x20, 0x10, 0x08, 0x04, 0x02}}, {'+', {0x08, 0x08, 0x3E, 0x08, 0x08}},
    {',', {0x00, 0x50, 0x30, 0x00, 0x00}}, {'=', {0x14, 0x14, 0x14, 0x14, 0x14}},
};

const uint8_t* glyph_for(char c) {
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& g : kFont)
        if (g.ch == up) return g.col;
    return kFont[36].col; // space
}

struct Rgb {
    uint8_t r, g, b;
};

constexpr Rgb kBlack{20, 20, 20};
constexpr Rgb kGray{150, 150, 150};
constexpr Rgb kSeries[4] = {{52, 101, 164}, {204, 70, 70}, {70, 160, 90}, {180, 140, 40}};

struct PlotCanvas {
    ImageU8 img;

    PlotCanvas(int w, int h) : img(ImageU8::make(w, h, 3, 255)) {}

    void set(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
        img.at(x, y, 0) = c.r;
        img.at(x, y, 1) = c.g;
        img.at(x, y, 2) = c.b;
    }

    void fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
        for (int y = std::min(y0, y1); y <= std::max(y0, y1); ++y)
            for (int x = std::min(x0, x1); x <= std::max(x0, x1); ++x) set(x, y, c);
    }

    void line(double x0, double y0, double x1, double y1, Rgb c) {
        const double dx = x1 - x0, dy = y1 - y0;
        const int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(dx), std::abs(dy)))));
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            set(static_cast<int>(std::lround(x0 + t * dx)),
                static_cast<int>(std::lround(y0 + t * dy)), c);
        }
    }

    void text(int x, int y, const std::string& s, Rgb c) {
        for (char ch : s) {
            const uint8_t* col = glyph_for(ch);
            for (int cx = 0; cx < 5; ++cx)
                for (int cy = 0; cy < 7; ++cy)
                    if (col[cx] & (1 << cy)) set(x + cx, y + cy, c);
            x += 6;
        }
    }
};

std::string format_tick(double v) {
    char buf[32];
    if (v != 0.0 && (std::abs(v) >= 10000.0 || std::abs(v) < 0.01)) {
        std::snprintf(buf, sizeof buf, "%.1e", v);
    } else {
        std::snprintf(buf, sizeof buf, "%.4g", v);
    }
    return buf;
}

struct Frame {
    int x0, y0, x1, y1; // plot area, y grows downward
    double vmin, vmax;

    double y_of(double v) const { return y1 - (v - vmin) / (vmax - vmin) * (y1 - y0); }
};

Frame draw_frame(PlotCanvas& canvas, const std::string& title, double vmin, double vmax) {
    if (vmax <= vmin) vmax = vmin + 1.0;
    Frame f{58, 26, canvas.img.width - 14, canvas.img.height - 40, vmin, vmax};
    canvas.text(f.x0, 8, title, kBlack);
    canvas.line(f.x0, f.y0, f.x0, f.y1, kBlack);
    canvas.line(f.x0, f.y1, f.x1, f.y1, kBlack);
    for (int i = 0; i <= 4; ++i) {
        const double v = vmin + (vmax - vmin) * i / 4.0;
        const int y = static_cast<int>(std::lround(f.y_of(v)));
        canvas.line(f.x0 - 3, y, f.x0, y, kBlack);
        if (i > 0) canvas.line(f.x0 + 1, y, f.x1, y, {230, 230, 230});
        canvas.text(4, y - 3, format_tick(v), kBlack);
    }
    return f;
}

} // namespace

void plot_bars(const std::string& path, const std::string& title,
               std::span<const std::string> labels, std::span<const PlotSeries> series, int width,
               int height) {
    require_valid(!series.empty() && !labels.empty(), "plot: empty chart");
    for (const auto& s : series)
        require_valid(s.values.size() == labels.size(), "plot: series/label length mismatch");

    double vmax = 0.0, vmin = 0.0;
    for (const auto& s : series)
        for (double v : s.values) {
            vmax = std::max(vmax, v);
            vmin = std::min(vmin, v);
        }

    PlotCanvas canvas(width, height);
    Frame f = draw_frame(canvas, title, vmin, vmax * 1.05);

    const int groups = static_cast<int>(labels.size());
    const double group_w = static_cast<double>(f.x1 - f.x0) / groups;
    const double bar_w = std::max(1.0, group_w * 0.7 / static_cast<double>(series.size()));

    for (int g = 0; g < groups; ++g) {
        const double gx = f.x0 + g * group_w + group_w * 0.15;
        for (size_t si = 0; si < series.size(); ++si) {
            const double v = series[si].values[g];
            const int x0 = static_cast<int>(std::lround(gx + si * bar_w));
            const int x1 = static_cast<int>(std::lround(gx + (si + 1) * bar_w)) - 1;
            canvas.fill_rect(x0, static_cast<int>(std::lround(f.y_of(std::max(0.0, v)))),
                             x1, static_cast<int>(std::lround(f.y_of(std::min(0.0, v)))),
                             kSeries[si % 4]);
        }
        // Vertical label, one character per row, when the group is narrow.
        const std::string& lbl = labels[g];
        const int lx = static_cast<int>(std::lround(gx));
        if (group_w >= 6.0 * lbl.size() + 4) {
            canvas.text(lx, f.y1 + 6, lbl, kBlack);
        } else {
            for (size_t k = 0; k < lbl.size() && k < 4; ++k)
                canvas.text(lx, f.y1 + 6 + 8 * static_cast<int>(k), std::string(1, lbl[k]), kBlack);
        }
    }

    int lx = f.x0 + 8;
    for (size_t si = 0; si < series.size(); ++si) {
        if (series[si].label.empty()) continue;
        canvas.fill_rect(lx, 16, lx + 8, 22, kSeries[si % 4]);
        canvas.text(lx + 12, 16, series[si].label, kBlack);
        lx += 12 + 6 * static_cast<int>(series[si].label.size()) + 14;
    }

    save_png(path, canvas.img);
}

void plot_lines(const std::string& path, const std::string& title, std::span<const double> xs,
                std::span<const PlotSeries> series, int width, int height) {
    require_valid(!series.empty() && xs.size() >= 2, "plot: need at least two x values");
    for (const auto& s : series)
        require_valid(s.values.size() == xs.size(), "plot: series/x length mismatch");

    double vmin = series[0].values[0], vmax = vmin;
    for (const auto& s : series)
        for (double v : s.values) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    if (vmin > 0.0 && vmin < 0.25 * vmax) vmin = 0.0;

    PlotCanvas canvas(width, height);
    Frame f = draw_frame(canvas, title, vmin, vmax + 0.05 * (vmax - vmin + 1e-12));

    const double xmin = xs.front(), xmax = xs.back();
    auto x_of = [&](double x) {
        return f.x0 + (x - xmin) / std::max(1e-12, xmax - xmin) * (f.x1 - f.x0);
    };
    for (int i = 0; i <= 4; ++i) {
        const double x = xmin + (xmax - xmin) * i / 4.0;
        const int px = static_cast<int>(std::lround(x_of(x)));
        canvas.line(px, f.y1, px, f.y1 + 3, kBlack);
        canvas.text(px - 8, f.y1 + 6, format_tick(x), kBlack);
    }

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        for (size_t i = 1; i < xs.size(); ++i)
            canvas.line(x_of(xs[i - 1]), f.y_of(s.values[i - 1]), x_of(xs[i]), f.y_of(s.values[i]),
                        kSeries[si % 4]);
    }

    int lx = f.x0 + 8;
    for (size_t si = 0; si < series.size(); ++si) {
        if (series[si].label.empty()) continue;
        canvas.fill_rect(lx, 16, lx + 8, 18, kSeries[si % 4]);
        canvas.text(lx + 12, 13, series[si].label, kBlack);
        lx += 12 + 6 * static_cast<int>(series[si].label.size()) + 14;
    }

    save_png(path, canvas.img);
}

void plot_histogram(const std::string& path, const std::string& title,
                    std::span<const double> values, int bins, int width, int height) {
    require_valid(!values.empty() && bins > 0, "plot: empty histogram");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) hi = lo + 1.0;
    std::vector<double> counts(bins, 0.0);
    for (double v : values) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        counts[b] += 1.0;
    }
    const double bin_w = (hi - lo) / bins;
    for (double& c : counts) c /= static_cast<double>(values.size()) * bin_w; // density

    PlotCanvas canvas(width, height);
    double vmax = 0.0;
    for (double c : counts) vmax = std::max(vmax, c);
    Frame f = draw_frame(canvas, title, 0.0, vmax * 1.05);

    const double px_per_bin = static_cast<double>(f.x1 - f.x0) / bins;
    for (int b = 0; b < bins; ++b) {
        const int x0 = static_cast<int>(std::lround(f.x0 + b * px_per_bin)) + 1;
        const int x1 = static_cast<int>(std::lround(f.x0 + (b + 1) * px_per_bin)) - 1;
        canvas.fill_rect(x0, static_cast<int>(std::lround(f.y_of(counts[b]))), std::max(x0, x1),
                         f.y1 - 1, kSeries[0]);
    }
    for (int i = 0; i <= 4; ++i) {
        const double x = lo + (hi - lo) * i / 4.0;
        const int px = static_cast<int>(std::lround(f.x0 + (f.x1 - f.x0) * i / 4.0));
        canvas.line(px, f.y1, px, f.y1 + 3, kBlack);
        canvas.text(px - 8, f.y1 + 6, format_tick(x), kBlack);
    }

    save_png(path, canvas.img);
}

} // namespace pogest
