#include "roi.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace pogest {

namespace {

BoundingBox eye_box(const Point2& a, const Point2& b) {
    double dist = std::hypot(b.x - a.x, b.y - a.y);
    require_valid(dist > 0.0, "degenerate landmarks: eye corners coincide");
    double side = 1.5 * dist;
    double cx = 0.5 * (a.x + b.x);
    double cy = 0.5 * (a.y + b.y);
    return {cx - 0.5 * side, cy - 0.5 * side, cx + 0.5 * side, cy + 0.5 * side};
}

} // namespace

std::pair<BoundingBox, BoundingBox> compute_eye_roi(const Landmarks& landmarks) {
    landmarks.validate();
    const auto& pts = landmarks.points;
    const auto& c = landmarks.corners;
    return {eye_box(pts[c.left_a], pts[c.left_b]), eye_box(pts[c.right_a], pts[c.right_b])};
}

BoundingBox compute_facial_roi(std::span<const BoundingBox> face_boxes) {
    require_valid(!face_boxes.empty(), "facial ROI: no face boxes given");
    BoundingBox u = face_boxes[0];
    u.validate("face box");
    for (const auto& b : face_boxes.subspan(1)) {
        b.validate("face box");
        u.x_min = std::min(u.x_min, b.x_min);
        u.y_min = std::min(u.y_min, b.y_min);
        u.x_max = std::max(u.x_max, b.x_max);
        u.y_max = std::max(u.y_max, b.y_max);
    }
    return u;
}

BoundingBox facial_roi_for(const DatasetManifest& manifest, std::span<const BoundingBox> face_boxes) {
    if (manifest.facial_roi) return *manifest.facial_roi;
    require_valid(!face_boxes.empty(),
                  "facial ROI: manifest pins no facial_roi and no face boxes were supplied");
    return compute_facial_roi(face_boxes);
}

} // namespace pogest
