#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "dataset.hpp"
#include "geometry.hpp"
#include "manifest.hpp"

namespace pogest {

// Scene-image center.
GazePoint baseline_center(int width, int height);

// Coordinate-wise mean of the training fixations.
GazePoint baseline_fixed(std::span<const GazePoint> train_gazes);

// Ordinary least squares with bias, one output per coordinate. Falls back
// to a tiny ridge term on rank-deficient designs (reported via the flag).
struct LinRegModel {
    Eigen::MatrixXd coef; // (dim+1) x 2, last row is the bias
    bool ridge_fallback = false;

    GazePoint predict(std::span<const double> features) const;
};

LinRegModel fit_linreg(const std::vector<std::vector<double>>& features,
                       std::span<const GazePoint> gazes);

// Per eye: both corner points plus the pupil-center landmark when present
// (corner midpoint otherwise), flattened to 12 values.
std::vector<double> linreg_features(const Landmarks& landmarks);

struct CarInFront {
    GazePoint point;
    bool fallback = false; // no car box: frame center used
};

// Center of the car box whose center lies nearest the frame center.
CarInFront baseline_car_in_front(std::span<const ObjectBox> boxes, int width, int height);

} // namespace pogest
