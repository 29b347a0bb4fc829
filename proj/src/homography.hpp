#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "metrics.hpp"

namespace pogest {

// 3x3 projective map, normalized so h(2,2) == 1.
struct Homography {
    Eigen::Matrix3d h = Eigen::Matrix3d::Identity();

    Homography inverse() const;
};

struct Correspondence {
    Point2 src; // gaze frame
    Point2 dst; // scene frame

    friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

// Normalized direct linear transform over >= 4 correspondences; exact for
// consistent inputs, least-squares otherwise. Rejects configurations with
// three collinear source points among four, and non-invertible results.
Homography dlt_homography(std::span<const Correspondence> pairs);

struct RansacResult {
    Homography h;
    std::vector<bool> inlier_mask; // aligned with the input pair order
    int inlier_count = 0;
};

// Classic RANSAC over minimal 4-point samples with a least-squares refit on
// the consensus set. Pairs are canonically ordered internally, so any
// permutation of the input yields the same model and inlier set for a given
// seed. Raises an estimation-failed error when no model finds support
// beyond its own minimal sample.
RansacResult ransac_homography(std::span<const Correspondence> pairs, int iters,
                               double inlier_px, uint64_t rng_seed);

// Projective application; rejects points mapped to infinity.
GazePoint transfer_point(const Homography& h, const GazePoint& p);

// Quality audit of automatic transfers against manual annotations.
ErrorSummary audit_transfers(std::span<const GazePoint> transferred,
                             std::span<const GazePoint> manual,
                             std::span<const double> thresholds = {});

} // namespace pogest
