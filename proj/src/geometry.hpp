#pragma once

#include <cmath>
#include <vector>

#include "error.hpp"

namespace pogest {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

// Pixel location of a fixation on the scene image, origin top-left.
struct GazePoint {
    double x = 0.0;
    double y = 0.0;

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
    bool in_frame(int width, int height) const {
        return x >= 0.0 && x < width && y >= 0.0 && y < height;
    }

    friend bool operator==(const GazePoint&, const GazePoint&) = default;
};

inline double distance(const GazePoint& a, const GazePoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    GazePoint center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

    void validate(const char* what = "bounding box") const {
        require_valid(x_min < x_max && y_min < y_max,
                      std::string(what) + ": requires x_min < x_max and y_min < y_max");
    }

    bool contains(const BoundingBox& other) const {
        return x_min <= other.x_min && y_min <= other.y_min &&
               x_max >= other.x_max && y_max >= other.y_max;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Which landmark indices are the eye corners. Defaults fit the synthetic
// corpus layout (outer/inner left, outer/inner right as the first four
// points); datasets with 98-point annotations override via the manifest.
struct EyeCornerIndices {
    int left_a = 0;
    int left_b = 1;
    int right_a = 2;
    int right_b = 3;

    friend bool operator==(const EyeCornerIndices&, const EyeCornerIndices&) = default;
};

struct Landmarks {
    std::vector<Point2> points;
    EyeCornerIndices corners;

    void validate() const {
        int n = static_cast<int>(points.size());
        for (const auto& p : points)
            require_valid(std::isfinite(p.x) && std::isfinite(p.y), "landmarks: non-finite point");
        for (int idx : {corners.left_a, corners.left_b, corners.right_a, corners.right_b})
            require_valid(idx >= 0 && idx < n, "landmarks: eye corner index out of range");
    }

    friend bool operator==(const Landmarks&, const Landmarks&) = default;
};

} // namespace pogest
